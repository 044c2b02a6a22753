#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xmodal/geometry.hpp"

namespace xmodal {

// Row-major dense matrix, sized once at construction.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0.0) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)]; }
    bool same_shape(const Matrix& other) const { return rows == other.rows && cols == other.cols; }
};

enum class Pooling { MeanOverFrames };

struct EncoderSpec {
    int input_frame_dim = 0;
    int hidden_dim = 64;
    int embedding_dim = 128;  // d
    Pooling pooling = Pooling::MeanOverFrames;

    void validate() const;
};

// Two fully connected layers over the pooled frame mean, tanh nonlinearity,
// L2-normalized output.
struct EncoderParams {
    Matrix w1;  // hidden x input
    Vec b1;
    Matrix w2;  // embedding x hidden
    Vec b2;

    EncoderSpec spec() const;
};

// Fan-in-scaled symmetric uniform weights, zero biases; bit-reproducible
// given (spec, seed).
EncoderParams init_encoder(const EncoderSpec& spec, std::uint64_t seed);

// Intermediate activations kept for backprop.
struct ForwardCache {
    Vec pooled;      // mean over frames
    Vec preact;      // w1*pooled + b1
    Vec hidden;      // tanh(preact)
    Vec raw;         // w2*hidden + b2
    double raw_norm = 0.0;
    Vec embedding;   // raw / |raw|
};

Vec encode(const EncoderParams& params, const std::vector<Vec>& frames);
ForwardCache encode_cached(const EncoderParams& params, const std::vector<Vec>& frames);

}  // namespace xmodal
