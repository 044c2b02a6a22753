#include "xmodal/train.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "xmodal/clustering.hpp"
#include "xmodal/rng.hpp"

namespace xmodal {

const char* to_string(TransferKind kind) {
    switch (kind) {
        case TransferKind::None: return "none";
        case TransferKind::Target: return "target";
        case TransferKind::Relative: return "relative";
        case TransferKind::Structure: return "structure";
    }
    return "none";
}

TransferKind transfer_kind_from_string(const std::string& name) {
    if (name == "none") return TransferKind::None;
    if (name == "target") return TransferKind::Target;
    if (name == "relative") return TransferKind::Relative;
    if (name == "structure") return TransferKind::Structure;
    throw InvalidConfig("unknown transfer kind '" + name + "'");
}

void TrainConfig::validate() const {
    if (epochs < 1) throw InvalidConfig("train: epochs must be >= 1");
    if (batch_identities < 2) throw InvalidConfig("train: batch_identities must be >= 2");
    if (batch_samples < 2) throw InvalidConfig("train: batch_samples must be >= 2");
    if (loss.margin < 0) throw InvalidConfig("train: margin must be >= 0");
    if (loss.transfer_margin && *loss.transfer_margin < 0)
        throw InvalidConfig("train: transfer margin must be >= 0");
    if (loss.lambda < 0) throw InvalidConfig("train: lambda must be >= 0");
    if (transfer == TransferKind::Structure && structure_clusters < 2)
        throw InvalidConfig("train: structure transfer needs a cluster count >= 2");
    if (!mining.use_hard && !mining.use_semihard)
        throw InvalidConfig("train: mining policy selects no negatives");
    if (learning_rate <= 0) throw InvalidConfig("train: learning rate must be > 0");
    if (rmsprop_decay <= 0 || rmsprop_decay >= 1) throw InvalidConfig("train: rmsprop decay must lie in (0,1)");
    if (rmsprop_epsilon <= 0) throw InvalidConfig("train: rmsprop epsilon must be > 0");
}

EncoderGrads zero_grads(const EncoderParams& params) {
    EncoderGrads g;
    g.w1 = Matrix(params.w1.rows, params.w1.cols);
    g.b1.assign(params.b1.size(), 0.0);
    g.w2 = Matrix(params.w2.rows, params.w2.cols);
    g.b2.assign(params.b2.size(), 0.0);
    return g;
}

OptimizerState init_optimizer(const EncoderParams& params, double learning_rate, double decay,
                              double epsilon) {
    OptimizerState s;
    s.r_w1 = Matrix(params.w1.rows, params.w1.cols);
    s.r_b1.assign(params.b1.size(), 0.0);
    s.r_w2 = Matrix(params.w2.rows, params.w2.cols);
    s.r_b2.assign(params.b2.size(), 0.0);
    s.learning_rate = learning_rate;
    s.decay = decay;
    s.epsilon = epsilon;
    return s;
}

namespace {

void rmsprop_update(std::vector<double>& theta, const std::vector<double>& g, std::vector<double>& r,
                    const OptimizerState& s) {
    if (theta.size() != g.size() || theta.size() != r.size())
        throw ShapeMismatch("rmsprop_step: parameter/gradient/accumulator shapes differ");
    for (std::size_t i = 0; i < theta.size(); ++i) {
        r[i] = s.decay * r[i] + (1.0 - s.decay) * g[i] * g[i];
        theta[i] -= s.learning_rate * g[i] / (std::sqrt(r[i]) + s.epsilon);
    }
}

}  // namespace

void rmsprop_step(EncoderParams& params, const EncoderGrads& grads, OptimizerState& state) {
    if (!params.w1.same_shape(grads.w1) || !params.w2.same_shape(grads.w2) ||
        params.b1.size() != grads.b1.size() || params.b2.size() != grads.b2.size())
        throw ShapeMismatch("rmsprop_step: gradient shapes do not match parameters");
    rmsprop_update(params.w1.data, grads.w1.data, state.r_w1.data, state);
    rmsprop_update(params.b1, grads.b1, state.r_b1, state);
    rmsprop_update(params.w2.data, grads.w2.data, state.r_w2.data, state);
    rmsprop_update(params.b2, grads.b2, state.r_b2, state);
}

namespace {

constexpr double kTinyDistance = 1e-12;

struct EmbeddedAudio {
    std::vector<ForwardCache> caches;
    std::vector<Vec> embeddings;
    std::vector<std::string> identities;
};

EmbeddedAudio embed_audio(const EncoderParams& params, const std::vector<Sample>& audio) {
    EmbeddedAudio out;
    out.caches.reserve(audio.size());
    out.embeddings.reserve(audio.size());
    out.identities.reserve(audio.size());
    for (const Sample& s : audio) {
        out.caches.push_back(encode_cached(params, s.frames));
        out.embeddings.push_back(out.caches.back().embedding);
        out.identities.push_back(s.identity);
    }
    return out;
}

// d(hinge)/d(embedding) contributions of one active triplet; frozen members
// pass a null gradient slot.
void add_hinge_grads(const Vec& ea, const Vec& ep, const Vec& en, double alpha, double weight,
                     Vec* ga, Vec* gp, Vec* gn) {
    const double d_ap = pairwise_distance(ea, ep);
    const double d_an = pairwise_distance(ea, en);
    if (d_ap - d_an + alpha <= 0.0) return;  // inactive or exactly at the kink
    const std::size_t dim = ea.size();
    if (d_ap > kTinyDistance) {
        const double w = weight / d_ap;
        for (std::size_t i = 0; i < dim; ++i) {
            const double u = (ea[i] - ep[i]) * w;
            if (ga) (*ga)[i] += u;
            if (gp) (*gp)[i] -= u;
        }
    }
    if (d_an > kTinyDistance) {
        const double w = weight / d_an;
        for (std::size_t i = 0; i < dim; ++i) {
            const double v = (ea[i] - en[i]) * w;
            if (ga) (*ga)[i] -= v;
            if (gn) (*gn)[i] += v;
        }
    }
}

// pull dL/d(embedding) back through normalization, the two dense layers and
// the tanh; pooled inputs need no gradient
void backprop_sample(const EncoderParams& params, const ForwardCache& cache, const Vec& grad_e,
                     EncoderGrads& grads) {
    const std::size_t out_dim = cache.embedding.size();
    const std::size_t hidden_dim = cache.hidden.size();
    const std::size_t input_dim = cache.pooled.size();

    // e = r/|r|  =>  dL/dr = (g - (g.e) e) / |r|
    double dot = 0.0;
    for (std::size_t i = 0; i < out_dim; ++i) dot += grad_e[i] * cache.embedding[i];
    Vec grad_raw(out_dim);
    for (std::size_t i = 0; i < out_dim; ++i)
        grad_raw[i] = (grad_e[i] - dot * cache.embedding[i]) / cache.raw_norm;

    Vec grad_hidden(hidden_dim, 0.0);
    for (std::size_t r = 0; r < out_dim; ++r) {
        const double g = grad_raw[r];
        if (g == 0.0) continue;
        grads.b2[r] += g;
        for (std::size_t k = 0; k < hidden_dim; ++k) {
            grads.w2.data[r * hidden_dim + k] += g * cache.hidden[k];
            grad_hidden[k] += params.w2.data[r * hidden_dim + k] * g;
        }
    }

    for (std::size_t r = 0; r < hidden_dim; ++r) {
        const double g = grad_hidden[r] * (1.0 - cache.hidden[r] * cache.hidden[r]);
        if (g == 0.0) continue;
        grads.b1[r] += g;
        for (std::size_t k = 0; k < input_dim; ++k) grads.w1.data[r * input_dim + k] += g * cache.pooled[k];
    }
}

const Vec& pick_embedding(const EmbeddedAudio& audio, const SourceEmbeddings& source, Modality m,
                          int index) {
    const std::vector<Vec>& list = (m == Modality::Audio) ? audio.embeddings : source.embeddings;
    if (index < 0 || static_cast<std::size_t>(index) >= list.size())
        throw IndexOutOfRange("crossmodal triplet index out of range");
    return list[static_cast<std::size_t>(index)];
}

}  // namespace

LossContext mine_context(const EncoderParams& params, const std::vector<Sample>& audio,
                         const SourceEmbeddings& source, const TrainConfig& config,
                         std::uint64_t cap_seed) {
    const EmbeddedAudio embedded = embed_audio(params, audio);
    LossContext ctx;
    ctx.primary = mine_within_modality(embedded.embeddings, embedded.identities, config.loss.margin,
                                       config.mining);
    if (config.transfer == TransferKind::None || config.loss.lambda == 0.0) return ctx;

    ctx.transfer = config.transfer;
    const double transfer_alpha = config.loss.effective_transfer_margin();
    switch (config.transfer) {
        case TransferKind::Target:
            ctx.target_set = cap_triplets(
                build_target_set(embedded.embeddings, embedded.identities, source.embeddings,
                                 source.identities, transfer_alpha),
                config.transfer_cap, cap_seed);
            break;
        case TransferKind::Relative: {
            const auto centroids = centroids_by_identity(source.embeddings, source.identities,
                                                         config.renormalize_centroids);
            ctx.transfer_set = cap_triplets(
                build_relative_set(embedded.embeddings, embedded.identities, centroids,
                                   transfer_alpha),
                config.transfer_cap, cap_seed);
            break;
        }
        case TransferKind::Structure: {
            const auto centroids = centroids_by_identity(source.embeddings, source.identities,
                                                         config.renormalize_centroids);
            std::vector<std::string> ids;
            std::vector<Vec> points;
            for (const auto& [identity, centroid] : centroids) {
                ids.push_back(identity);
                points.push_back(centroid);
            }
            const KMeansResult km =
                kmeans(points, config.structure_clusters, derive_seed(config.seed, 0x57C));
            const ClusterMapping mapping = cluster_mapping(km, ids);
            ctx.transfer_set = cap_triplets(
                build_structure_set(embedded.embeddings, embedded.identities, mapping,
                                    transfer_alpha, config.literal_alg3),
                config.transfer_cap, cap_seed);
            break;
        }
        case TransferKind::None: break;
    }
    return ctx;
}

double loss_value(const EncoderParams& params, const std::vector<Sample>& audio,
                  const SourceEmbeddings& source, const LossContext& context, const LossConfig& loss) {
    const EmbeddedAudio embedded = embed_audio(params, audio);
    const double primary = mean_triplet_loss(embedded.embeddings, context.primary, loss.margin);
    const double transfer_alpha = loss.effective_transfer_margin();
    double transfer = 0.0;
    if (context.transfer == TransferKind::Target)
        transfer = mean_triplet_loss(embedded.embeddings, source.embeddings, context.target_set,
                                     transfer_alpha);
    else if (context.transfer != TransferKind::None)
        transfer = mean_triplet_loss(embedded.embeddings, context.transfer_set, transfer_alpha);
    return combined_loss(primary, context.transfer == TransferKind::None ? 0.0 : transfer, loss.lambda);
}

LossBreakdown loss_and_gradients(const EncoderParams& params, const std::vector<Sample>& audio,
                                 const SourceEmbeddings& source, const LossContext& context,
                                 const LossConfig& loss, EncoderGrads& grads) {
    const EmbeddedAudio embedded = embed_audio(params, audio);
    const std::size_t n = embedded.embeddings.size();
    const std::size_t dim = n ? embedded.embeddings.front().size() : 0;
    std::vector<Vec> grad_e(n, Vec(dim, 0.0));

    LossBreakdown breakdown;
    breakdown.primary = mean_triplet_loss(embedded.embeddings, context.primary, loss.margin);
    if (!context.primary.empty()) {
        const double weight = 1.0 / static_cast<double>(context.primary.size());
        for (const Triplet& t : context.primary) {
            add_hinge_grads(embedded.embeddings[static_cast<std::size_t>(t.anchor)],
                            embedded.embeddings[static_cast<std::size_t>(t.positive)],
                            embedded.embeddings[static_cast<std::size_t>(t.negative)], loss.margin,
                            weight, &grad_e[static_cast<std::size_t>(t.anchor)],
                            &grad_e[static_cast<std::size_t>(t.positive)],
                            &grad_e[static_cast<std::size_t>(t.negative)]);
        }
    }

    const double transfer_alpha = loss.effective_transfer_margin();
    if (context.transfer == TransferKind::Target && !context.target_set.empty()) {
        breakdown.transfer = mean_triplet_loss(embedded.embeddings, source.embeddings,
                                               context.target_set, transfer_alpha);
        const double weight = loss.lambda / static_cast<double>(context.target_set.size());
        for (const CrossmodalTriplet& t : context.target_set) {
            Vec* ga = t.anchor_mod == Modality::Audio ? &grad_e[static_cast<std::size_t>(t.anchor)] : nullptr;
            Vec* gp = t.positive_mod == Modality::Audio ? &grad_e[static_cast<std::size_t>(t.positive)] : nullptr;
            Vec* gn = t.negative_mod == Modality::Audio ? &grad_e[static_cast<std::size_t>(t.negative)] : nullptr;
            add_hinge_grads(pick_embedding(embedded, source, t.anchor_mod, t.anchor),
                            pick_embedding(embedded, source, t.positive_mod, t.positive),
                            pick_embedding(embedded, source, t.negative_mod, t.negative),
                            transfer_alpha, weight, ga, gp, gn);
        }
    } else if ((context.transfer == TransferKind::Relative || context.transfer == TransferKind::Structure) &&
               !context.transfer_set.empty()) {
        breakdown.transfer =
            mean_triplet_loss(embedded.embeddings, context.transfer_set, transfer_alpha);
        const double weight = loss.lambda / static_cast<double>(context.transfer_set.size());
        for (const Triplet& t : context.transfer_set) {
            add_hinge_grads(embedded.embeddings[static_cast<std::size_t>(t.anchor)],
                            embedded.embeddings[static_cast<std::size_t>(t.positive)],
                            embedded.embeddings[static_cast<std::size_t>(t.negative)], transfer_alpha,
                            weight, &grad_e[static_cast<std::size_t>(t.anchor)],
                            &grad_e[static_cast<std::size_t>(t.positive)],
                            &grad_e[static_cast<std::size_t>(t.negative)]);
        }
    }

    for (std::size_t i = 0; i < n; ++i) backprop_sample(params, embedded.caches[i], grad_e[i], grads);

    breakdown.total = combined_loss(breakdown.primary,
                                    context.transfer == TransferKind::None ? 0.0 : breakdown.transfer,
                                    loss.lambda);
    return breakdown;
}

LossBreakdown loss_and_gradients(const EncoderParams& params, const std::vector<Sample>& audio,
                                 const SourceEmbeddings& source, const TrainConfig& config,
                                 EncoderGrads& grads) {
    const LossContext ctx = mine_context(params, audio, source, config, derive_seed(config.seed, 0xCA9));
    return loss_and_gradients(params, audio, source, ctx, config.loss, grads);
}

namespace {

struct BatchPlan {
    std::vector<std::vector<std::size_t>> batches;  // indices into the audio list
};

BatchPlan plan_batches(const std::vector<Sample>& audio, const TrainConfig& config, int epoch) {
    std::map<std::string, std::vector<std::size_t>> by_identity;
    for (std::size_t i = 0; i < audio.size(); ++i) by_identity[audio[i].identity].push_back(i);

    std::vector<std::string> identities;
    identities.reserve(by_identity.size());
    for (const auto& [identity, members] : by_identity) identities.push_back(identity);

    Rng rng(derive_seed(config.seed, 0xBA7C4ULL + static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = 0; i + 1 < identities.size(); ++i) {
        const std::size_t j = i + bounded(rng, identities.size() - i);
        std::swap(identities[i], identities[j]);
    }

    BatchPlan plan;
    const auto p = static_cast<std::size_t>(config.batch_identities);
    for (std::size_t start = 0; start < identities.size(); start += p) {
        const std::size_t end = std::min(start + p, identities.size());
        if (end - start < 2) break;  // a single-identity remainder cannot be mined
        std::vector<std::size_t> batch;
        for (std::size_t k = start; k < end; ++k) {
            std::vector<std::size_t> pool = by_identity[identities[k]];
            for (std::size_t i = 0; i + 1 < pool.size(); ++i) {
                const std::size_t j = i + bounded(rng, pool.size() - i);
                std::swap(pool[i], pool[j]);
            }
            const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(config.batch_samples), pool.size());
            batch.insert(batch.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
        }
        std::sort(batch.begin(), batch.end());
        plan.batches.push_back(std::move(batch));
    }
    return plan;
}

bool batch_minable(const std::vector<Sample>& audio, const std::vector<std::size_t>& batch) {
    std::map<std::string, int> counts;
    for (std::size_t i : batch) ++counts[audio[i].identity];
    if (counts.size() < 2) return false;
    for (const auto& [identity, c] : counts)
        if (c >= 2) return true;
    return false;
}

// batch triplet loss over every structural triple, satisfied ones counting
// zero; this is the reported training loss, while the optimizer works on the
// mined (margin-violating) subset
double batch_reference_loss(const std::vector<Vec>& embeddings, const std::vector<std::string>& ids,
                            double alpha) {
    const int n = static_cast<int>(embeddings.size());
    double sum = 0.0;
    long count = 0;
    for (int a = 0; a < n; ++a)
        for (int p = 0; p < n; ++p) {
            if (p == a || ids[p] != ids[a]) continue;
            const double d_ap = pairwise_distance(embeddings[a], embeddings[p]);
            for (int neg = 0; neg < n; ++neg) {
                if (ids[neg] == ids[a]) continue;
                const double v = d_ap - pairwise_distance(embeddings[a], embeddings[neg]) + alpha;
                sum += v > 0.0 ? v : 0.0;
                ++count;
            }
        }
    return count ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace

TrainResult train(const std::vector<Sample>& audio_train, const SourceEmbeddings& source,
                  const EncoderSpec& spec, const TrainConfig& config) {
    config.validate();
    spec.validate();
    if (source.embeddings.size() != source.identities.size())
        throw DimensionMismatch("train: source embedding table misaligned");

    std::map<std::string, int> audio_counts;
    for (const Sample& s : audio_train) ++audio_counts[s.identity];
    if (audio_counts.size() < 2)
        throw InsufficientData("train: need at least two identities in the audio training set");
    bool any_pair = false;
    for (const auto& [identity, c] : audio_counts) any_pair |= c >= 2;
    if (!any_pair)
        throw InsufficientData("train: no identity has two audio samples; nothing to mine");

    const bool transfer_active = config.transfer != TransferKind::None && config.loss.lambda > 0.0;
    if (transfer_active) {
        std::set<std::string> source_ids(source.identities.begin(), source.identities.end());
        int shared = 0;
        for (const auto& [identity, c] : audio_counts) shared += source_ids.count(identity) ? 1 : 0;
        if (shared < 2)
            throw InsufficientData("train: transfer needs at least two identities with both modalities");
    }

    TrainResult result;
    result.params = init_encoder(spec, derive_seed(config.seed, 0x1217));
    OptimizerState optimizer = init_optimizer(result.params, config.learning_rate, config.rmsprop_decay,
                                              config.rmsprop_epsilon);

    // per-batch contexts share the epoch-level transfer set; the primary set
    // is re-mined per batch below
    TrainConfig batch_config = config;
    batch_config.transfer = TransferKind::None;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        EpochStats stats;
        stats.epoch = epoch;

        LossContext epoch_ctx;
        if (transfer_active) {
            epoch_ctx = mine_context(result.params, audio_train, source, config,
                                     derive_seed(config.seed, 0x100ULL + static_cast<std::uint64_t>(epoch)));
            stats.transfer_triplets =
                config.transfer == TransferKind::Target ? epoch_ctx.target_set.size() : epoch_ctx.transfer_set.size();
        }

        const BatchPlan plan = plan_batches(audio_train, config, epoch);
        for (const auto& batch_indices : plan.batches) {
            if (!batch_minable(audio_train, batch_indices)) continue;
            std::vector<Sample> batch;
            batch.reserve(batch_indices.size());
            for (std::size_t i : batch_indices) batch.push_back(audio_train[i]);

            // primary term over the batch
            EncoderGrads grads = zero_grads(result.params);
            LossContext batch_ctx = mine_context(result.params, batch, source, batch_config, 0);
            stats.primary_triplets += batch_ctx.primary.size();
            const LossBreakdown primary =
                loss_and_gradients(result.params, batch, source, batch_ctx, config.loss, grads);

            // transfer term over the full training list
            LossBreakdown transfer;
            if (transfer_active) {
                LossContext transfer_ctx = epoch_ctx;
                transfer_ctx.primary.clear();
                transfer = loss_and_gradients(result.params, audio_train, source, transfer_ctx,
                                              config.loss, grads);
            }

            if (!std::isfinite(primary.primary) || !std::isfinite(transfer.transfer))
                throw NumericError("train: non-finite loss");

            // report the batch loss over all structural triples; the mined
            // mean alone does not trend with progress
            const EmbeddedAudio embedded = embed_audio(result.params, batch);
            const double step_primary =
                batch_reference_loss(embedded.embeddings, embedded.identities, config.loss.margin);
            const double step_transfer = transfer.transfer;
            stats.primary_loss += step_primary;
            stats.transfer_loss += step_transfer;
            stats.total_loss += combined_loss(step_primary, step_transfer, config.loss.lambda);
            ++stats.steps;

            rmsprop_step(result.params, grads, optimizer);
        }

        if (stats.steps > 0) {
            stats.primary_loss /= stats.steps;
            stats.transfer_loss /= stats.steps;
            stats.total_loss /= stats.steps;
        }
        result.history.push_back(stats);
    }
    return result;
}

FiniteDiffReport finite_diff_check(const EncoderParams& params, const std::vector<Sample>& audio,
                                   const SourceEmbeddings& source, const TrainConfig& config,
                                   double tolerance) {
    const LossContext ctx = mine_context(params, audio, source, config, derive_seed(config.seed, 0xCA9));
    EncoderGrads analytic = zero_grads(params);
    loss_and_gradients(params, audio, source, ctx, config.loss, analytic);

    constexpr double kStep = 1e-6;
    EncoderParams probe = params;
    auto block_error = [&](std::vector<double>& theta, const std::vector<double>& grad) {
        double worst = 0.0;
        for (std::size_t i = 0; i < theta.size(); ++i) {
            const double saved = theta[i];
            theta[i] = saved + kStep;
            const double up = loss_value(probe, audio, source, ctx, config.loss);
            theta[i] = saved - kStep;
            const double down = loss_value(probe, audio, source, ctx, config.loss);
            theta[i] = saved;
            const double numeric = (up - down) / (2.0 * kStep);
            const double denom = std::max(std::abs(grad[i]) + std::abs(numeric), 1e-4);
            worst = std::max(worst, std::abs(grad[i] - numeric) / denom);
        }
        return worst;
    };

    FiniteDiffReport report;
    report.tolerance = tolerance;
    report.blocks.push_back({"w1", block_error(probe.w1.data, analytic.w1.data)});
    report.blocks.push_back({"b1", block_error(probe.b1, analytic.b1)});
    report.blocks.push_back({"w2", block_error(probe.w2.data, analytic.w2.data)});
    report.blocks.push_back({"b2", block_error(probe.b2, analytic.b2)});
    for (const auto& block : report.blocks) report.max_rel_error = std::max(report.max_rel_error, block.max_rel_error);
    report.pass = report.max_rel_error < tolerance;
    return report;
}

}  // namespace xmodal
