#pragma once

#include <cstdint>
#include <string>

#include "xmodal/encoder.hpp"

namespace xmodal {

// Versioned text container for trained encoder weights. Numbers are written
// in shortest-round-trip decimal form, so save/load is bit-exact.
struct Checkpoint {
    EncoderSpec spec;
    EncoderParams params;
    std::string modality = "audio";
    std::uint64_t seed = 0;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace xmodal
