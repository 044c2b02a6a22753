#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xmodal/geometry.hpp"

namespace xmodal {

// Valid modality combinations for crossmodal triplets: all eight
// (anchor, positive, negative) combinations except (V,V,V), (V,V,A) and
// (A,A,A), the last being covered by the within-audio loss.
struct ModalityCombo {
    Modality anchor, positive, negative;
    auto operator<=>(const ModalityCombo&) const = default;
};

const std::array<ModalityCombo, 5>& valid_modality_combos();
bool is_valid_combo(Modality anchor, Modality positive, Modality negative);

struct MiningPolicy {
    bool use_hard = true;      // d(a,n) < d(a,p)
    bool use_semihard = true;  // d(a,p) <= d(a,n) < d(a,p) + alpha
    std::optional<std::size_t> cap;
    std::uint64_t seed = 0;
};

// Identity -> cluster id in [0, num_clusters), total over the training
// identities it was built from.
struct ClusterMapping {
    int num_clusters = 0;
    std::map<std::string, int> cluster_of;
};

// Within-modality mining over one embedded batch. For every ordered
// anchor/positive pair of the same identity (distinct indices), includes each
// different-identity negative selected by the policy. Output is in ascending
// (anchor, positive, negative) order; the policy cap, when set, subsamples it.
TripletSet mine_within_modality(const std::vector<Vec>& embeddings,
                                const std::vector<std::string>& identities, double alpha,
                                const MiningPolicy& policy);

// Target embedding transfer set: every margin-violating crossmodal triple
// with y_a = y_p, y_a != y_n, a valid modality combo, and anchor != positive
// as (index, modality) pairs.
CrossmodalTripletSet build_target_set(const std::vector<Vec>& audio_embeddings,
                                      const std::vector<std::string>& audio_identities,
                                      const std::vector<Vec>& visual_embeddings,
                                      const std::vector<std::string>& visual_identities, double alpha);

// Relative distance transfer set: audio triples with three distinct
// identities whose source-centroid distances order positive strictly closer
// than negative, and whose audio margin is violated.
TripletSet build_relative_set(const std::vector<Vec>& audio_embeddings,
                              const std::vector<std::string>& audio_identities,
                              const std::map<std::string, Vec>& visual_centroids, double alpha);

// Clustering structure transfer set. Default semantics: anchor and positive
// are distinct identities in the same source cluster, the negative is in a
// different cluster, and the audio margin is violated. literal_alg3 switches
// to the looser printed condition c_{y_a} != c_{y_p} && c_{y_a} != c_{y_n}.
TripletSet build_structure_set(const std::vector<Vec>& audio_embeddings,
                               const std::vector<std::string>& audio_identities,
                               const ClusterMapping& mapping, double alpha, bool literal_alg3 = false);

// Uniform subsample without replacement when |T| exceeds cap; identity
// otherwise. Deterministic given seed; output stays in ascending order.
TripletSet cap_triplets(const TripletSet& triples, std::size_t cap, std::uint64_t seed);
CrossmodalTripletSet cap_triplets(const CrossmodalTripletSet& triples, std::size_t cap, std::uint64_t seed);

}  // namespace xmodal
