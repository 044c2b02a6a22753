#include "xmodal/encoder.hpp"

#include <cmath>

#include "xmodal/rng.hpp"

namespace xmodal {

void EncoderSpec::validate() const {
    if (input_frame_dim < 1) throw InvalidConfig("encoder: input_frame_dim must be >= 1");
    if (hidden_dim < 1) throw InvalidConfig("encoder: hidden_dim must be >= 1");
    if (embedding_dim < 1) throw InvalidConfig("encoder: embedding_dim must be >= 1");
}

EncoderSpec EncoderParams::spec() const {
    EncoderSpec s;
    s.input_frame_dim = w1.cols;
    s.hidden_dim = w1.rows;
    s.embedding_dim = w2.rows;
    return s;
}

EncoderParams init_encoder(const EncoderSpec& spec, std::uint64_t seed) {
    spec.validate();
    EncoderParams p;
    p.w1 = Matrix(spec.hidden_dim, spec.input_frame_dim);
    p.b1.assign(static_cast<std::size_t>(spec.hidden_dim), 0.0);
    p.w2 = Matrix(spec.embedding_dim, spec.hidden_dim);
    p.b2.assign(static_cast<std::size_t>(spec.embedding_dim), 0.0);

    Rng rng(derive_seed(seed, 0x1717));
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(spec.input_frame_dim));
    for (double& w : p.w1.data) w = uniform_in(rng, -bound1, bound1);
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(spec.hidden_dim));
    for (double& w : p.w2.data) w = uniform_in(rng, -bound2, bound2);
    return p;
}

ForwardCache encode_cached(const EncoderParams& params, const std::vector<Vec>& frames) {
    if (frames.empty()) throw EmptySequence("encode: no frames");
    const auto input_dim = static_cast<std::size_t>(params.w1.cols);
    for (const Vec& f : frames)
        if (f.size() != input_dim)
            throw DimensionMismatch("encode: frame dim " + std::to_string(f.size()) + ", encoder expects " +
                                    std::to_string(input_dim));

    ForwardCache c;
    c.pooled.assign(input_dim, 0.0);
    for (const Vec& f : frames)
        for (std::size_t i = 0; i < input_dim; ++i) c.pooled[i] += f[i];
    for (double& x : c.pooled) x /= static_cast<double>(frames.size());

    const auto hidden_dim = static_cast<std::size_t>(params.w1.rows);
    c.preact.assign(hidden_dim, 0.0);
    for (std::size_t r = 0; r < hidden_dim; ++r) {
        double s = params.b1[r];
        for (std::size_t k = 0; k < input_dim; ++k)
            s += params.w1.data[r * input_dim + k] * c.pooled[k];
        c.preact[r] = s;
    }
    c.hidden.resize(hidden_dim);
    for (std::size_t r = 0; r < hidden_dim; ++r) c.hidden[r] = std::tanh(c.preact[r]);

    const auto out_dim = static_cast<std::size_t>(params.w2.rows);
    c.raw.assign(out_dim, 0.0);
    for (std::size_t r = 0; r < out_dim; ++r) {
        double s = params.b2[r];
        for (std::size_t k = 0; k < hidden_dim; ++k)
            s += params.w2.data[r * hidden_dim + k] * c.hidden[k];
        c.raw[r] = s;
    }

    c.raw_norm = norm(c.raw);
    if (c.raw_norm < 1e-12) throw ZeroVector("encode: pre-normalization output collapsed to zero");
    c.embedding.resize(out_dim);
    for (std::size_t r = 0; r < out_dim; ++r) c.embedding[r] = c.raw[r] / c.raw_norm;
    return c;
}

Vec encode(const EncoderParams& params, const std::vector<Vec>& frames) {
    return encode_cached(params, frames).embedding;
}

}  // namespace xmodal
