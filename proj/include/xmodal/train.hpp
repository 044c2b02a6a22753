#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xmodal/data.hpp"
#include "xmodal/encoder.hpp"
#include "xmodal/mining.hpp"

namespace xmodal {

enum class TransferKind { None, Target, Relative, Structure };

const char* to_string(TransferKind kind);
TransferKind transfer_kind_from_string(const std::string& name);

// Frozen source-modality embedding table: one entry per visual sample.
struct SourceEmbeddings {
    std::vector<Vec> embeddings;
    std::vector<std::string> identities;
};

struct TrainConfig {
    int epochs = 20;
    int batch_identities = 8;  // P
    int batch_samples = 4;     // S
    LossConfig loss;
    TransferKind transfer = TransferKind::None;
    int structure_clusters = 0;
    MiningPolicy mining;
    std::size_t transfer_cap = 10000;  // per-epoch cap on each transfer set
    bool literal_alg3 = false;
    bool renormalize_centroids = false;
    double learning_rate = 1e-3;
    double rmsprop_decay = 0.9;
    double rmsprop_epsilon = 1e-8;
    std::uint64_t seed = 0;

    void validate() const;
};

// Gradients share the parameter layout.
using EncoderGrads = EncoderParams;

EncoderGrads zero_grads(const EncoderParams& params);

struct OptimizerState {
    Matrix r_w1;
    Vec r_b1;
    Matrix r_w2;
    Vec r_b2;
    double decay = 0.9;
    double epsilon = 1e-8;
    double learning_rate = 1e-3;
};

OptimizerState init_optimizer(const EncoderParams& params, double learning_rate, double decay,
                              double epsilon);

// r' = decay*r + (1-decay)*g^2; theta' = theta - lr*g/(sqrt(r') + eps)
void rmsprop_step(EncoderParams& params, const EncoderGrads& grads, OptimizerState& state);

// Triplet sets frozen for one differentiation. Mining is piecewise constant
// in the parameters, so both the analytic gradient and its finite-difference
// check are taken with the sets held fixed.
struct LossContext {
    TransferKind transfer = TransferKind::None;
    TripletSet primary;               // over the audio sample list
    CrossmodalTripletSet target_set;  // transfer == Target
    TripletSet transfer_set;          // transfer == Relative or Structure
};

// Mines the primary set and the configured transfer set over `audio`.
// Transfer machinery is skipped entirely when transfer == None or lambda == 0.
LossContext mine_context(const EncoderParams& params, const std::vector<Sample>& audio,
                         const SourceEmbeddings& source, const TrainConfig& config,
                         std::uint64_t cap_seed);

struct LossBreakdown {
    double total = 0.0;
    double primary = 0.0;
    double transfer = 0.0;
};

double loss_value(const EncoderParams& params, const std::vector<Sample>& audio,
                  const SourceEmbeddings& source, const LossContext& context, const LossConfig& loss);

// Combined loss and exact analytic gradients with the context held fixed.
// Hinge subgradient is zero at the kink; no gradient flows into the frozen
// source embeddings.
LossBreakdown loss_and_gradients(const EncoderParams& params, const std::vector<Sample>& audio,
                                 const SourceEmbeddings& source, const LossContext& context,
                                 const LossConfig& loss, EncoderGrads& grads);

// Convenience form: mine a fresh context, then differentiate.
LossBreakdown loss_and_gradients(const EncoderParams& params, const std::vector<Sample>& audio,
                                 const SourceEmbeddings& source, const TrainConfig& config,
                                 EncoderGrads& grads);

struct EpochStats {
    int epoch = 0;
    double primary_loss = 0.0;   // mean over optimization steps
    double transfer_loss = 0.0;  // mean over optimization steps
    double total_loss = 0.0;
    std::size_t primary_triplets = 0;  // mined this epoch, summed over batches
    std::size_t transfer_triplets = 0; // size of the epoch transfer set
    int steps = 0;
};

struct TrainResult {
    EncoderParams params;
    std::vector<EpochStats> history;
};

// Epochs of: rebuild the transfer set, iterate balanced P*S mini-batches,
// mine within-modality triplets per batch, take an RMSProp step on the
// combined loss. The transfer term is evaluated over the full training list
// at every step. Deterministic given (dataset, config, seed).
TrainResult train(const std::vector<Sample>& audio_train, const SourceEmbeddings& source,
                  const EncoderSpec& spec, const TrainConfig& config);

struct FiniteDiffReport {
    struct Block {
        std::string name;
        double max_rel_error = 0.0;
    };
    std::vector<Block> blocks;
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Central differences at step 1e-6 against the analytic gradients, triplet
// sets frozen. Relative error is guarded: |a-n| / max(|a|+|n|, 1e-4).
FiniteDiffReport finite_diff_check(const EncoderParams& params, const std::vector<Sample>& audio,
                                   const SourceEmbeddings& source, const TrainConfig& config,
                                   double tolerance);

}  // namespace xmodal
