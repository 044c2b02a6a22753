#include "xmodal/runner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <thread>

#include "xmodal/rng.hpp"

namespace xmodal {

namespace {

std::vector<Sample> collect(const Dataset& dataset, Modality m, const std::string& split) {
    std::vector<Sample> out;
    for (const Sample& s : dataset.samples)
        if (s.modality == m && s.split == split) out.push_back(s);
    return out;
}

SourceEmbeddings embed_table(const Checkpoint& ckpt, const std::vector<Sample>& samples) {
    SourceEmbeddings table;
    table.embeddings.reserve(samples.size());
    table.identities.reserve(samples.size());
    for (const Sample& s : samples) {
        table.embeddings.push_back(encode(ckpt.params, s.frames));
        table.identities.push_back(s.identity);
    }
    return table;
}

int frame_dim_of(const std::vector<Sample>& samples, const char* what) {
    if (samples.empty()) throw InsufficientData(std::string(what) + ": no samples");
    return static_cast<int>(samples.front().frames.front().size());
}

}  // namespace

TrainRunResult train_run(const Dataset& dataset, const ExperimentConfig& config) {
    dataset.validate();
    config.train.validate();
    const std::vector<Sample> audio_train = collect(dataset, Modality::Audio, "train");
    if (audio_train.empty()) throw InsufficientData("train: no audio training samples");

    const bool transfer_active =
        config.train.transfer != TransferKind::None && config.train.loss.lambda > 0.0;

    TrainRunResult result;
    SourceEmbeddings source;
    if (transfer_active) {
        const std::vector<Sample> visual_train = collect(dataset, Modality::Visual, "train");
        if (visual_train.empty())
            throw InsufficientData("train: transfer requested but no visual training samples");
        if (config.source_checkpoint) {
            result.source = *config.source_checkpoint;
            if (result.source->spec.input_frame_dim != frame_dim_of(visual_train, "train"))
                throw ShapeMismatch("train: source checkpoint frame dim does not match visual data");
        } else {
            // pre-train the source encoder with the plain within-modality loss
            TrainConfig source_config = config.train;
            source_config.transfer = TransferKind::None;
            source_config.loss.lambda = 0.0;
            source_config.epochs = config.source_epochs > 0 ? config.source_epochs : config.train.epochs;
            source_config.seed = derive_seed(config.train.seed, 0x5053);
            EncoderSpec source_spec;
            source_spec.input_frame_dim = frame_dim_of(visual_train, "train");
            source_spec.hidden_dim = config.hidden_dim;
            source_spec.embedding_dim = config.embedding_dim;
            TrainResult trained = train(visual_train, SourceEmbeddings{}, source_spec, source_config);
            result.source = Checkpoint{source_spec, std::move(trained.params), "visual", source_config.seed};
        }
        source = embed_table(*result.source, visual_train);
    }

    EncoderSpec audio_spec;
    audio_spec.input_frame_dim = frame_dim_of(audio_train, "train");
    audio_spec.hidden_dim = config.hidden_dim;
    audio_spec.embedding_dim = config.embedding_dim;
    TrainResult trained = train(audio_train, source, audio_spec, config.train);
    result.audio = Checkpoint{audio_spec, std::move(trained.params), "audio", config.train.seed};
    result.history = std::move(trained.history);
    return result;
}

namespace {

struct EmbeddedSplit {
    std::vector<Vec> embeddings;
    std::vector<std::string> identities;
    std::vector<const Sample*> samples;
};

EmbeddedSplit embed_split(const Checkpoint& ckpt, const Dataset& dataset, Modality m,
                          const std::string& split) {
    EmbeddedSplit out;
    for (const Sample& s : dataset.samples) {
        if (s.modality != m || s.split != split) continue;
        out.embeddings.push_back(encode(ckpt.params, s.frames));
        out.identities.push_back(s.identity);
        out.samples.push_back(&s);
    }
    return out;
}

std::vector<RetrievalQuery> assemble_queries(const EmbeddedSplit& query_side,
                                             const EmbeddedSplit& gallery_side, bool same_modality,
                                             int draws, Rng& rng) {
    // index gallery samples by identity
    std::map<std::string, std::vector<std::size_t>> by_identity;
    for (std::size_t i = 0; i < gallery_side.identities.size(); ++i)
        by_identity[gallery_side.identities[i]].push_back(i);
    std::vector<std::string> all_ids;
    for (const auto& [identity, members] : by_identity) all_ids.push_back(identity);
    if (all_ids.size() < 10)
        throw InsufficientData("retrieval: needs at least 10 test identities (1 correct + 9 distractors)");

    std::vector<RetrievalQuery> queries;
    for (std::size_t q = 0; q < query_side.embeddings.size(); ++q) {
        const std::string& identity = query_side.identities[q];
        auto it = by_identity.find(identity);
        if (it == by_identity.end()) continue;
        std::vector<std::size_t> correct_pool;
        for (std::size_t g : it->second) {
            if (same_modality && gallery_side.samples[g] == query_side.samples[q]) continue;
            correct_pool.push_back(g);
        }
        if (correct_pool.empty()) continue;

        std::vector<std::string> distractor_ids;
        for (const std::string& other : all_ids)
            if (other != identity) distractor_ids.push_back(other);

        for (int d = 0; d < draws; ++d) {
            RetrievalQuery query;
            query.query = query_side.embeddings[q];
            query.correct = gallery_side.embeddings[correct_pool[bounded(rng, correct_pool.size())]];
            // choose 9 distinct distractor identities, then one sample of each
            std::vector<std::string> ids = distractor_ids;
            for (std::size_t i = 0; i < 9; ++i) {
                const std::size_t j = i + bounded(rng, ids.size() - i);
                std::swap(ids[i], ids[j]);
            }
            for (std::size_t i = 0; i < 9; ++i) {
                const auto& pool = by_identity[ids[i]];
                query.distractors.push_back(gallery_side.embeddings[pool[bounded(rng, pool.size())]]);
            }
            queries.push_back(std::move(query));
        }
    }
    return queries;
}

}  // namespace

EvalResult eval_run(const Dataset& dataset, const Checkpoint& audio, const EvalOptions& options) {
    dataset.validate();
    const EmbeddedSplit test = embed_split(audio, dataset, Modality::Audio, "test");
    if (test.embeddings.empty()) throw InsufficientData("eval: no audio test samples");
    std::set<std::string> ids(test.identities.begin(), test.identities.end());
    if (ids.size() < 2)
        throw InsufficientData("eval: verification needs at least two test identities");

    EvalResult result;
    result.test_identities = static_cast<int>(ids.size());
    result.test_samples = static_cast<int>(test.embeddings.size());

    ScorePairs scores;
    for (std::size_t i = 0; i < test.embeddings.size(); ++i)
        for (std::size_t j = i + 1; j < test.embeddings.size(); ++j) {
            const double d = pairwise_distance(test.embeddings[i], test.embeddings[j]);
            if (test.identities[i] == test.identities[j]) scores.positives.push_back(d);
            else scores.negatives.push_back(d);
        }
    if (scores.positives.empty())
        throw InsufficientData("eval: no same-identity test pairs; EER undefined");
    result.eer = eer(scores);
    result.auc = roc_auc(scores);

    const int ideal = options.ideal_clusters > 0 ? options.ideal_clusters : result.test_identities;
    result.curve = clustering_curve(agglomerative(test.embeddings), test.identities, ideal);

    if (options.retrieval) {
        if (!options.source_checkpoint)
            throw InvalidConfig("eval: retrieval needs a source checkpoint for the visual side");
        const EmbeddedSplit visual =
            embed_split(*options.source_checkpoint, dataset, Modality::Visual, "test");
        if (visual.embeddings.empty()) throw InsufficientData("eval: retrieval needs visual test samples");

        const EmbeddedSplit* sides[2] = {&test, &visual};
        const char* names[2] = {"audio", "visual"};
        for (int qi = 0; qi < 2; ++qi)
            for (int gi = 0; gi < 2; ++gi) {
                Rng rng(derive_seed(options.seed, 0xE7A1 + static_cast<std::uint64_t>(qi * 2 + gi)));
                const auto queries =
                    assemble_queries(*sides[qi], *sides[gi], qi == gi, options.retrieval_draws, rng);
                RetrievalSetting setting;
                setting.name = std::string(names[qi]) + "->" + names[gi];
                for (int k = 1; k <= 10; ++k)
                    setting.prec_at.push_back(prec_at_k(queries, k, options.strict_precision));
                result.retrieval.push_back(std::move(setting));
            }
    }
    return result;
}

SweepResult sweep_run(const Dataset& dataset, const SweepConfig& config) {
    SweepResult result;
    for (const SweepPoint& point : config.points)
        for (std::uint64_t seed : config.seeds) {
            SweepCell cell;
            cell.point = point;
            cell.seed = seed;
            result.cells.push_back(cell);
        }

    auto run_cell = [&](SweepCell& cell) {
        try {
            ExperimentConfig ec = config.base;
            ec.train.loss.lambda = cell.point.lambda;
            if (cell.point.clusters > 0) ec.train.structure_clusters = cell.point.clusters;
            ec.train.seed = cell.seed;
            const TrainRunResult trained = train_run(dataset, ec);
            EvalOptions eval_options = config.eval;
            eval_options.seed = cell.seed;
            if (trained.source) eval_options.source_checkpoint = trained.source;
            const EvalResult eval = eval_run(dataset, trained.audio, eval_options);
            cell.eer = eval.eer;
            cell.auc = eval.auc;
            cell.min_ocik = eval.curve.min_ocik;
            cell.min_ocik_nclusters = eval.curve.min_ocik_nclusters;
            cell.ocik_at_ideal = eval.curve.ocik_at_ideal;
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
    };

    const int threads = std::max(1, config.threads);
    if (threads == 1) {
        for (SweepCell& cell : result.cells) run_cell(cell);
    } else {
        std::vector<std::thread> pool;
        std::size_t next = 0;
        const std::size_t stride = result.cells.size() / static_cast<std::size_t>(threads) + 1;
        for (int t = 0; t < threads && next < result.cells.size(); ++t) {
            const std::size_t begin = next;
            const std::size_t end = std::min(result.cells.size(), begin + stride);
            next = end;
            pool.emplace_back([&, begin, end] {
                for (std::size_t i = begin; i < end; ++i) run_cell(result.cells[i]);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    for (const SweepCell& cell : result.cells) result.all_ok &= cell.ok;
    return result;
}

std::vector<MetricsRow> sweep_rows(const SweepResult& sweep, const std::string& transfer_kind) {
    std::vector<MetricsRow> rows;
    // grid order is already (point, seed); group per point for summaries
    std::map<std::pair<double, int>, std::vector<const SweepCell*>> by_point;
    for (const SweepCell& cell : sweep.cells) {
        if (!cell.ok) continue;
        by_point[{cell.point.lambda, cell.point.clusters}].push_back(&cell);
        MetricsRow row;
        row.run_id = "lam" + format_double(cell.point.lambda) +
                     (cell.point.clusters > 0 ? "_c" + std::to_string(cell.point.clusters) : "") + "_s" +
                     std::to_string(cell.seed);
        row.transfer_kind = transfer_kind;
        row.lambda = cell.point.lambda;
        row.clusters = cell.point.clusters;
        row.eer = cell.eer;
        row.auc = cell.auc;
        row.min_ocik = cell.min_ocik;
        row.min_ocik_nclusters = cell.min_ocik_nclusters;
        row.ocik_at_ideal = cell.ocik_at_ideal;
        row.seed = cell.seed;
        rows.push_back(std::move(row));
    }

    for (const auto& [point, cells] : by_point) {
        const double n = static_cast<double>(cells.size());
        double eer_mean = 0.0, ocik_mean = 0.0, auc_mean = 0.0;
        for (const SweepCell* c : cells) {
            eer_mean += c->eer;
            auc_mean += c->auc;
            ocik_mean += static_cast<double>(c->min_ocik);
        }
        eer_mean /= n;
        auc_mean /= n;
        ocik_mean /= n;
        double eer_var = 0.0, auc_var = 0.0, ocik_var = 0.0;
        for (const SweepCell* c : cells) {
            eer_var += (c->eer - eer_mean) * (c->eer - eer_mean);
            auc_var += (c->auc - auc_mean) * (c->auc - auc_mean);
            ocik_var += (static_cast<double>(c->min_ocik) - ocik_mean) *
                        (static_cast<double>(c->min_ocik) - ocik_mean);
        }
        eer_var /= n;
        auc_var /= n;
        ocik_var /= n;

        const std::string id_base = "lam" + format_double(point.first) +
                                    (point.second > 0 ? "_c" + std::to_string(point.second) : "");
        MetricsRow mean_row;
        mean_row.run_id = id_base + "_mean";
        mean_row.transfer_kind = transfer_kind;
        mean_row.lambda = point.first;
        mean_row.clusters = point.second;
        mean_row.eer = eer_mean;
        mean_row.auc = auc_mean;
        mean_row.min_ocik = static_cast<long>(std::llround(ocik_mean));
        mean_row.min_ocik_nclusters = 0;
        mean_row.ocik_at_ideal = 0;
        mean_row.seed = 0;
        rows.push_back(mean_row);

        MetricsRow std_row = mean_row;
        std_row.run_id = id_base + "_stddev";
        std_row.eer = std::sqrt(eer_var);
        std_row.auc = std::sqrt(auc_var);
        std_row.min_ocik = static_cast<long>(std::llround(std::sqrt(ocik_var)));
        rows.push_back(std_row);
    }
    return rows;
}

}  // namespace xmodal
