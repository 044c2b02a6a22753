// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 4 and 6 drive the CLI binary (XMODAL_BIN env var); the
// rest run in-process.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "xmodal/checkpoint.hpp"
#include "xmodal/clustering.hpp"
#include "xmodal/data.hpp"
#include "xmodal/metrics.hpp"
#include "xmodal/rng.hpp"
#include "xmodal/runner.hpp"
#include "xmodal/train.hpp"

namespace fs = std::filesystem;
using namespace xmodal;

namespace {

struct Criterion {
    std::string name;
    std::function<bool(std::ostream&)> run;
};

// ---- shared fixtures ----

// the synthetic benchmark used by criteria 5-7: scarce, noisy audio against
// a clean visual side with five latent groups
SyntheticConfig benchmark_config(std::uint64_t seed, double share) {
    SyntheticConfig c;
    c.num_identities = 40;
    c.groups = 5;
    c.latent_dim = 5;
    c.audio_frame_dim = 20;
    c.visual_frame_dim = 16;
    c.frames_per_audio_sample = 4;
    c.samples_per_identity = 2;
    c.noise_sigma_audio = 0.7;
    c.noise_sigma_visual = 0.05;
    c.crossmodal_share = share;
    c.within_group_sigma = 0.12;
    c.test_fraction = 0.5;
    c.seed = seed;
    return c;
}

ExperimentConfig benchmark_experiment(TransferKind kind, double lambda, std::uint64_t seed) {
    ExperimentConfig ec;
    ec.hidden_dim = 32;
    ec.embedding_dim = 16;
    ec.source_epochs = 12;
    ec.train.epochs = 50;
    ec.train.transfer = kind;
    ec.train.loss.lambda = lambda;
    ec.train.structure_clusters = 5;
    ec.train.seed = seed;
    return ec;
}

struct TinyInstance {
    std::vector<Sample> audio;
    SourceEmbeddings source;
    EncoderSpec spec;
};

TinyInstance tiny_instance(Rng& rng) {
    TinyInstance inst;
    inst.spec.input_frame_dim = 4 + static_cast<int>(bounded(rng, 3));  // <= 6
    inst.spec.hidden_dim = 5;
    inst.spec.embedding_dim = 3 + static_cast<int>(bounded(rng, 2));  // <= 4
    const int identities = 2 + static_cast<int>(bounded(rng, 3));     // <= 4
    for (int identity = 0; identity < identities; ++identity) {
        const std::string name = "id" + std::to_string(identity);
        const int samples = identity == 0 ? 2 : 1 + static_cast<int>(bounded(rng, 3));  // <= 3
        for (int s = 0; s < samples; ++s) {
            Sample sample;
            sample.sample_id = name + "_a" + std::to_string(s);
            sample.identity = name;
            sample.modality = Modality::Audio;
            const int frames = 1 + static_cast<int>(bounded(rng, 3));
            for (int f = 0; f < frames; ++f) {
                Vec frame(static_cast<std::size_t>(inst.spec.input_frame_dim));
                for (double& x : frame) x = gaussian(rng);
                sample.frames.push_back(std::move(frame));
            }
            inst.audio.push_back(std::move(sample));
        }
        const int visuals = 1 + static_cast<int>(bounded(rng, 2));
        for (int v = 0; v < visuals; ++v) {
            Vec e(static_cast<std::size_t>(inst.spec.embedding_dim));
            for (double& x : e) x = gaussian(rng);
            inst.source.embeddings.push_back(l2_normalize(e));
            inst.source.identities.push_back(name);
        }
    }
    return inst;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string cli_binary() {
    const char* env = std::getenv("XMODAL_BIN");
    return env ? env : "";
}

int run_cli(const std::string& args) {
    const std::string cmd = cli_binary() + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

// ---- criterion 1 ----

bool gradient_correctness(std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    for (TransferKind kind : {TransferKind::None, TransferKind::Target, TransferKind::Relative,
                              TransferKind::Structure}) {
        Rng rng(9000 + static_cast<std::uint64_t>(kind));
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const TinyInstance inst = tiny_instance(rng);
            const EncoderParams params =
                init_encoder(inst.spec, derive_seed(31, static_cast<std::uint64_t>(trial)));
            TrainConfig config;
            config.transfer = kind;
            config.loss.margin = 0.2;
            config.loss.lambda = kind == TransferKind::None ? 0.0 : 0.7;
            config.structure_clusters = 2;
            config.seed = static_cast<std::uint64_t>(trial);
            const FiniteDiffReport report =
                finite_diff_check(params, inst.audio, inst.source, config, 1e-4);
            worst = std::max(worst, report.max_rel_error);
            ok &= report.pass;
        }
        log << "  " << to_string(kind) << ": worst relative error over 20 instances "
            << format_double(worst) << "\n";
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << "  runtime " << format_double(seconds) << " s (budget 30)\n";
    return ok && seconds < 30.0;
}

// ---- criterion 2 ----

bool triplet_set_oracles(std::ostream& log) {
    bool ok = true;
    Rng rng(5150);
    std::set<std::tuple<Modality, Modality, Modality>> combos_seen;
    int within_checked = 0, target_checked = 0, relative_checked = 0, structure_checked = 0;

    for (int trial = 0; trial < 120; ++trial) {
        // random instance, <= 5 identities x <= 4 samples
        const int identities = 2 + static_cast<int>(bounded(rng, 4));
        std::vector<Vec> audio_emb, visual_emb;
        std::vector<std::string> audio_ids, visual_ids;
        for (int identity = 0; identity < identities; ++identity) {
            const std::string name = "id" + std::to_string(identity);
            const int n_audio = 1 + static_cast<int>(bounded(rng, 4));
            for (int s = 0; s < n_audio; ++s) {
                Vec e(3);
                for (double& x : e) x = gaussian(rng);
                audio_emb.push_back(l2_normalize(e));
                audio_ids.push_back(name);
            }
            const int n_visual = 1 + static_cast<int>(bounded(rng, 3));
            for (int s = 0; s < n_visual; ++s) {
                Vec e(3);
                for (double& x : e) x = gaussian(rng);
                visual_emb.push_back(l2_normalize(e));
                visual_ids.push_back(name);
            }
        }

        MiningPolicy policy;
        policy.use_hard = trial % 3 != 0;
        policy.use_semihard = trial % 3 != 1;
        try {
            const auto mined = mine_within_modality(audio_emb, audio_ids, 0.2, policy);
            ok &= mined == oracles::within_modality(audio_emb, audio_ids, 0.2, policy.use_hard,
                                                    policy.use_semihard);
            ++within_checked;
        } catch (const DegenerateBatch&) {
        }

        const auto target = build_target_set(audio_emb, audio_ids, visual_emb, visual_ids, 0.2);
        ok &= target == oracles::target_set(audio_emb, audio_ids, visual_emb, visual_ids, 0.2);
        for (const CrossmodalTriplet& t : target)
            combos_seen.insert({t.anchor_mod, t.positive_mod, t.negative_mod});
        ++target_checked;

        std::map<std::string, Vec> centroids;
        std::map<std::string, int> clusters;
        for (const std::string& identity : audio_ids) {
            if (centroids.count(identity)) continue;
            Vec c(3);
            for (double& x : c) x = gaussian(rng) * 0.7;
            centroids[identity] = c;
            clusters[identity] = static_cast<int>(bounded(rng, 3));
        }
        ok &= build_relative_set(audio_emb, audio_ids, centroids, 0.2) ==
              oracles::relative_set(audio_emb, audio_ids, centroids, 0.2);
        ++relative_checked;

        ClusterMapping mapping;
        mapping.num_clusters = 3;
        mapping.cluster_of = clusters;
        const bool literal = trial % 2 == 1;
        ok &= build_structure_set(audio_emb, audio_ids, mapping, 0.2, literal) ==
              oracles::structure_set(audio_emb, audio_ids, clusters, 0.2, literal);
        ++structure_checked;
    }

    ok &= combos_seen.size() == 5;
    for (const auto& [ma, mp, mn] : combos_seen) ok &= is_valid_combo(ma, mp, mn);
    log << "  instances: " << within_checked << " within, " << target_checked << " target, "
        << relative_checked << " relative, " << structure_checked << " structure\n"
        << "  distinct modality combos emitted: " << combos_seen.size() << " (want 5)\n";
    return ok;
}

// ---- criterion 3 ----

bool metric_oracles(std::ostream& log) {
    bool ok = true;
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> pos, neg;
        const std::size_t np = 1 + bounded(rng, 8);
        const std::size_t nn = 1 + bounded(rng, 8);
        for (std::size_t i = 0; i < np; ++i) pos.push_back(uniform_in(rng, 0.0, 2.0));
        for (std::size_t i = 0; i < nn; ++i) neg.push_back(uniform_in(rng, 0.0, 2.0));
        ok &= eer({pos, neg}) == oracles::eer(pos, neg);
        ok &= roc_auc({pos, neg}) == oracles::auc(pos, neg);
    }
    log << "  eer/auc: 1000 random score sets match the oracles exactly\n";

    const LabeledPartition fixture = {{"A", "A", "B"}, {"B", "B"}};
    const double fixture_wcp = wcp(fixture);
    const double fixture_wce = wce(fixture);
    const long fixture_oci = oci_k(fixture);
    ok &= fixture_wcp == 0.8;
    ok &= std::abs(fixture_wce - 0.5510) < 1e-4;
    ok &= fixture_oci == 3;
    log << "  fixtures: wcp " << format_double(fixture_wcp) << " (want 0.8), wce "
        << format_double(fixture_wce) << " (want 0.5510 +- 1e-4), oci_k " << fixture_oci
        << " (want 3)\n";

    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Vec> points;
        std::vector<std::string> labels;
        const int n = 4 + static_cast<int>(bounded(rng, 10));
        for (int i = 0; i < n; ++i) {
            points.push_back({gaussian(rng), gaussian(rng)});
            labels.push_back("id" + std::to_string(bounded(rng, 4)));
        }
        const ClusteringCurve curve = clustering_curve(agglomerative(points), labels, 1);
        ok &= curve.points.front().num_clusters == n;
        ok &= curve.points.front().wcp == 1.0;
        ok &= curve.points.front().wce == 0.0;
        ok &= curve.points.front().oci_k == n;
    }
    log << "  clustering_curve: singleton endpoints WCP=1, WCE=0, OCI-k=N on 25 instances\n";
    return ok;
}

// ---- criterion 4 ----

bool lambda_zero_reduction(std::ostream& log) {
    if (cli_binary().empty()) {
        log << "  XMODAL_BIN not set\n";
        return false;
    }
    const fs::path work = fs::path("acceptance_tmp") / "lambda_zero";
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string data_dir = (work / "data").string();
    if (run_cli("gen --out " + data_dir +
                " --identities 12 --groups 3 --latent-dim 5 --samples 2 --frames 4"
                " --noise-audio 0.7 --test-fraction 0.5 --seed 3") != 0) {
        log << "  gen failed\n";
        return false;
    }
    const std::string data = data_dir + "/dataset.jsonl";
    const std::string common = " --data " + data + " --epochs 6 --hidden-dim 16 --embedding-dim 8"
                               " --batch-identities 3 --batch-samples 2 --seed 11 --out ";
    if (run_cli("train --transfer none" + common + (work / "base").string()) != 0) {
        log << "  baseline train failed\n";
        return false;
    }
    const std::string baseline = read_file((work / "base" / "checkpoint.txt").string());
    bool ok = !baseline.empty();
    for (const std::string kind : {"target", "relative", "structure"}) {
        const std::string out = (work / kind).string();
        const std::string extra = kind == "structure" ? " --clusters 3" : "";
        if (run_cli("train --transfer " + kind + " --lambda 0" + extra + common + out) != 0) {
            log << "  " << kind << " train failed\n";
            return false;
        }
        const bool identical = read_file(out + "/checkpoint.txt") == baseline;
        log << "  " << kind << " lambda=0 checkpoint byte-identical to baseline: "
            << (identical ? "yes" : "NO") << "\n";
        ok &= identical;
    }
    return ok;
}

// ---- criterion 5 ----

bool directional_reproduction(std::ostream& log) {
    const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::map<std::uint64_t, Dataset> datasets;
    for (std::uint64_t s : seeds) datasets[s] = generate_synthetic(benchmark_config(s, 1.0)).dataset;

    auto eer_of = [&](TransferKind kind, double lambda, std::uint64_t seed) {
        const TrainRunResult trained =
            train_run(datasets.at(seed), benchmark_experiment(kind, lambda, seed));
        return eval_run(datasets.at(seed), trained.audio, EvalOptions{}).eer;
    };

    std::map<std::uint64_t, double> baseline;
    double base_mean = 0.0;
    for (std::uint64_t s : seeds) {
        baseline[s] = eer_of(TransferKind::None, 0.0, s);
        base_mean += baseline[s];
    }
    base_mean /= static_cast<double>(seeds.size());
    log << "  baseline mean EER " << format_double(base_mean) << "\n";

    bool ok = true;
    const struct {
        TransferKind kind;
        double lambda;
    } methods[] = {{TransferKind::Target, 1.0}, {TransferKind::Relative, 0.5},
                   {TransferKind::Structure, 0.5}};
    for (const auto& method : methods) {
        double mean = 0.0;
        int wins = 0;
        std::string detail;
        for (std::uint64_t s : seeds) {
            const double e = eer_of(method.kind, method.lambda, s);
            mean += e;
            wins += e < baseline.at(s) ? 1 : 0;
            detail += " " + format_double(e);
        }
        mean /= static_cast<double>(seeds.size());
        const bool method_ok = mean < base_mean && wins >= 4;
        log << "  " << to_string(method.kind) << " (lambda " << format_double(method.lambda)
            << "): mean EER " << format_double(mean) << ", improves " << wins << "/5 seeds ->"
            << detail << (method_ok ? "" : "  [FAIL]") << "\n";
        ok &= method_ok;
    }

    // negative control: share = 0 removes the crossmodal signal; no
    // improvement is required, just report the outcome
    double control_base = 0.0, control_transfer = 0.0;
    for (std::uint64_t s : {1, 2, 3}) {
        const Dataset control = generate_synthetic(benchmark_config(s, 0.0)).dataset;
        control_base += eval_run(control,
                                 train_run(control, benchmark_experiment(TransferKind::None, 0.0, s)).audio,
                                 EvalOptions{})
                            .eer;
        control_transfer +=
            eval_run(control,
                     train_run(control, benchmark_experiment(TransferKind::Target, 1.0, s)).audio,
                     EvalOptions{})
                .eer;
    }
    log << "  negative control share=0 (3 seeds): baseline mean EER "
        << format_double(control_base / 3.0) << ", target-transfer mean EER "
        << format_double(control_transfer / 3.0) << " (no improvement required)\n";
    return ok;
}

// ---- criterion 6 ----

bool hypersphere_and_determinism(std::ostream& log) {
    bool ok = true;
    Rng rng(606);
    EncoderSpec spec;
    spec.input_frame_dim = 6;
    spec.hidden_dim = 8;
    spec.embedding_dim = 5;
    const EncoderParams params = init_encoder(spec, 44);
    double worst = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Vec> frames;
        const int n = 1 + static_cast<int>(bounded(rng, 6));
        for (int f = 0; f < n; ++f) {
            Vec frame(6);
            for (double& x : frame) x = gaussian(rng) * 3.0;
            frames.push_back(frame);
        }
        worst = std::max(worst, std::abs(norm(encode(params, frames)) - 1.0));
    }
    ok &= worst < 1e-6;
    log << "  worst |norm - 1| over 500 random encodes: " << format_double(worst) << "\n";

    if (cli_binary().empty()) {
        log << "  XMODAL_BIN not set\n";
        return false;
    }
    const fs::path work = fs::path("acceptance_tmp") / "determinism";
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string data_dir = (work / "data").string();
    if (run_cli("gen --out " + data_dir +
                " --identities 12 --groups 3 --latent-dim 5 --samples 2 --frames 4"
                " --noise-audio 0.7 --test-fraction 0.5 --seed 5") != 0) {
        log << "  gen failed\n";
        return false;
    }
    // regenerating the dataset must be byte-identical too
    const std::string data_dir2 = (work / "data2").string();
    run_cli("gen --out " + data_dir2 +
            " --identities 12 --groups 3 --latent-dim 5 --samples 2 --frames 4"
            " --noise-audio 0.7 --test-fraction 0.5 --seed 5");
    ok &= read_file(data_dir + "/dataset.jsonl") == read_file(data_dir2 + "/dataset.jsonl");

    const std::string common = " --data " + data_dir + "/dataset.jsonl --transfer target --lambda 1"
                               " --epochs 6 --hidden-dim 16 --embedding-dim 8 --batch-identities 3"
                               " --batch-samples 2 --source-epochs 4 --seed 9 --out ";
    if (run_cli("train" + common + (work / "run1").string()) != 0 ||
        run_cli("train" + common + (work / "run2").string()) != 0) {
        log << "  train failed\n";
        return false;
    }
    const bool ckpt_same = read_file((work / "run1" / "checkpoint.txt").string()) ==
                           read_file((work / "run2" / "checkpoint.txt").string());
    const bool history_same = read_file((work / "run1" / "history.csv").string()) ==
                              read_file((work / "run2" / "history.csv").string());
    log << "  repeated training: checkpoint byte-identical " << (ckpt_same ? "yes" : "NO")
        << ", history byte-identical " << (history_same ? "yes" : "NO") << "\n";
    ok &= ckpt_same && history_same;

    // trained encoders stay on the sphere over the test split
    const Checkpoint trained = load_checkpoint((work / "run1" / "checkpoint.txt").string());
    const Dataset data = load_jsonl(data_dir + "/dataset.jsonl");
    double worst_trained = 0.0;
    for (const Sample& s : data.samples)
        if (s.modality == Modality::Audio)
            worst_trained = std::max(worst_trained, std::abs(norm(encode(trained.params, s.frames)) - 1.0));
    ok &= worst_trained < 1e-6;
    log << "  worst |norm - 1| over trained-encoder embeddings: " << format_double(worst_trained)
        << "\n";
    return ok;
}

// ---- criterion 7 ----

bool crossmodal_consistency(std::ostream& log) {
    double mean_hit = 0.0;
    int queries_total = 0;
    for (std::uint64_t s : {1, 2, 3}) {
        const Dataset data = generate_synthetic(benchmark_config(s, 1.0)).dataset;
        const TrainRunResult trained =
            train_run(data, benchmark_experiment(TransferKind::Target, 1.0, s));
        EvalOptions options;
        options.retrieval = true;
        options.retrieval_draws = 5;
        options.seed = s;
        options.source_checkpoint = trained.source;
        const EvalResult result = eval_run(data, trained.audio, options);
        for (const RetrievalSetting& setting : result.retrieval) {
            if (setting.name != "audio->visual") continue;
            mean_hit += setting.prec_at[0];
            queries_total += result.test_samples * options.retrieval_draws;
            log << "  seed " << s << " audio->visual hit@1 " << format_double(setting.prec_at[0])
                << "\n";
        }
    }
    mean_hit /= 3.0;
    log << "  mean hit@1 " << format_double(mean_hit) << " over " << queries_total
        << " queries (chance 0.1, need >= 0.2)\n";
    return queries_total >= 500 && mean_hit >= 0.2;
}

// ---- criterion 8 ----

bool clustering_components(std::ostream& log) {
    bool ok = true;
    const std::vector<Vec> points = {{0.0}, {1.0}, {10.0}, {11.0}};
    const KMeansResult km = kmeans(points, 2, 42);
    ok &= km.assignment[0] == km.assignment[1];
    ok &= km.assignment[2] == km.assignment[3];
    ok &= km.assignment[0] != km.assignment[2];
    std::vector<double> centers = {km.centers[0][0], km.centers[1][0]};
    std::sort(centers.begin(), centers.end());
    ok &= std::abs(centers[0] - 0.5) < 1e-12 && std::abs(centers[1] - 10.5) < 1e-12;
    log << "  kmeans {0,1,10,11} -> centers " << format_double(centers[0]) << ", "
        << format_double(centers[1]) << " (want 0.5, 10.5)\n";

    Rng rng(88);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<Vec> cloud;
        const int n = 8 + static_cast<int>(bounded(rng, 20));
        for (int i = 0; i < n; ++i) cloud.push_back({gaussian(rng), gaussian(rng), gaussian(rng)});
        const KMeansResult result = kmeans(cloud, 3, trial);  // throws on any inertia increase
        for (std::size_t i = 1; i < result.inertia_history.size(); ++i)
            ok &= result.inertia_history[i] <= result.inertia_history[i - 1] + 1e-9;
    }
    log << "  Lloyd inertia non-increasing over 40 random instances\n";

    const MergeTrace trace = agglomerative({{0.0}, {1.0}, {5.0}});
    ok &= trace.merges.size() == 2;
    ok &= trace.merges[0].left == 0 && trace.merges[0].right == 1 &&
          std::abs(trace.merges[0].distance - 1.0) < 1e-12;
    ok &= trace.merges[1].distance == 4.5;
    log << "  agglomerative {0,1,5}: merge (0,1) at 1, then at 4.5\n";
    return ok;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"criterion-1 gradient-correctness", gradient_correctness},
        {"criterion-2 triplet-set-oracle-equivalence", triplet_set_oracles},
        {"criterion-3 metric-oracles", metric_oracles},
        {"criterion-4 lambda-zero-reduction", lambda_zero_reduction},
        {"criterion-5 directional-eer-reproduction", directional_reproduction},
        {"criterion-6 hypersphere-and-determinism", hypersphere_and_determinism},
        {"criterion-7 crossmodal-retrieval", crossmodal_consistency},
        {"criterion-8 clustering-components", clustering_components},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::stringstream log;
        bool ok = false;
        try {
            ok = c.run(log);
        } catch (const std::exception& e) {
            log << "  exception: " << e.what() << "\n";
        }
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << c.name << "\n" << log.str();
        failures += ok ? 0 : 1;
    }
    std::cout << (failures == 0 ? "ACCEPTANCE: all criteria passed"
                                : "ACCEPTANCE: " + std::to_string(failures) + " criteria FAILED")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
