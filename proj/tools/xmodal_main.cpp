// xmodal: generate synthetic crossmodal data, train embeddings with the
// three transfer strategies, evaluate, and sweep hyperparameters.
//
// Exit codes: 0 success, 1 partial sweep failure, 2 configuration error,
// 3 data error, 4 numeric failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "xmodal/checkpoint.hpp"
#include "xmodal/data.hpp"
#include "xmodal/rng.hpp"
#include "xmodal/runner.hpp"
#include "xmodal/svg.hpp"

namespace fs = std::filesystem;
using namespace xmodal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int classify(const std::exception& e) {
    if (dynamic_cast<const InvalidConfig*>(&e)) return kExitConfig;
    if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
    if (dynamic_cast<const Error*>(&e)) return kExitData;
    return kExitPartial;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const std::uint64_t lo = std::stoull(text.substr(0, dots));
        const std::uint64_t hi = std::stoull(text.substr(dots + 2));
        if (hi < lo) throw InvalidConfig("seeds: empty range '" + text + "'");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string token = text.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!token.empty()) seeds.push_back(std::stoull(token));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (seeds.empty()) throw InvalidConfig("seeds: nothing parsed from '" + text + "'");
    return seeds;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string token = text.substr(start, comma == std::string::npos ? comma : comma - start);
        if (!token.empty()) values.push_back(std::stod(token));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (values.empty()) throw InvalidConfig("expected a comma-separated list, got '" + text + "'");
    return values;
}

std::vector<int> parse_ints(const std::string& text) {
    std::vector<int> values;
    for (double v : parse_doubles(text)) values.push_back(static_cast<int>(v));
    return values;
}

void write_history_csv(const std::vector<EpochStats>& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "epoch,primary_loss,transfer_loss,total_loss,primary_triplets,transfer_triplets,steps\n";
    for (const EpochStats& e : history)
        out << e.epoch << ',' << format_double(e.primary_loss) << ',' << format_double(e.transfer_loss)
            << ',' << format_double(e.total_loss) << ',' << e.primary_triplets << ','
            << e.transfer_triplets << ',' << e.steps << '\n';
}

void write_curve_csv(const ClusteringCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "num_clusters,wcp,wce,ocik\n";
    for (const CurvePoint& pt : curve.points)
        out << pt.num_clusters << ',' << format_double(pt.wcp) << ',' << format_double(pt.wce) << ','
            << pt.oci_k << '\n';
}

void write_retrieval_csv(const std::vector<RetrievalSetting>& settings, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "setting,k,prec\n";
    for (const RetrievalSetting& s : settings)
        for (std::size_t k = 0; k < s.prec_at.size(); ++k)
            out << s.name << ',' << k + 1 << ',' << format_double(s.prec_at[k]) << '\n';
}

int threads_from_env() {
    const char* env = std::getenv("XMODAL_THREADS");
    if (!env) return 1;
    const int value = std::atoi(env);
    return value >= 1 ? value : 1;
}

std::string strip(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r");
    return text.substr(begin, end - begin + 1);
}

// key=value config file with '#' comments. Keys mirror the long option names
// of the subcommand; values already given on the command line win.
std::vector<std::string> config_file_tokens(const std::string& path,
                                            const std::vector<std::string>& command_line) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("config: cannot open '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig("config: expected key=value at " + path + ":" + std::to_string(line_no));
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty())
            throw InvalidConfig("config: empty key at " + path + ":" + std::to_string(line_no));
        const std::string flag = "--" + key;
        bool overridden = false;
        for (const std::string& arg : command_line)
            if (arg == flag || arg.rfind(flag + "=", 0) == 0) overridden = true;
        if (!overridden) tokens.push_back(flag + "=" + value);
    }
    return tokens;
}

// replaces every "--config FILE" with the file's tokens
std::vector<std::string> expand_config_args(const std::vector<std::string>& args) {
    std::vector<std::string> expanded;
    for (std::size_t i = 0; i < args.size(); ++i) {
        std::string path;
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw InvalidConfig("--config needs a file path");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            expanded.push_back(args[i]);
            continue;
        }
        for (std::string& token : config_file_tokens(path, args)) expanded.push_back(std::move(token));
    }
    return expanded;
}

// ---- gen ----

struct GenArgs {
    SyntheticConfig config;
    std::string out_dir;
};

int run_gen(const GenArgs& args) {
    const SyntheticData data = generate_synthetic(args.config);
    fs::create_directories(args.out_dir);
    const std::string dataset_path = (fs::path(args.out_dir) / "dataset.jsonl").string();
    const std::string groups_path = (fs::path(args.out_dir) / "groups.csv").string();
    save_jsonl(data.dataset, dataset_path);
    save_group_labels(data.group_of, groups_path);

    std::size_t audio = 0, visual = 0;
    for (const Sample& s : data.dataset.samples) (s.modality == Modality::Audio ? audio : visual) += 1;
    std::cout << "wrote " << dataset_path << " and " << groups_path << '\n'
              << "identities: " << args.config.num_identities << " (train "
              << data.dataset.identities("train").size() << ", test "
              << data.dataset.identities("test").size() << ")\n"
              << "samples: " << audio << " audio, " << visual << " visual\n";
    return kExitOk;
}

// ---- train ----

struct TrainArgs {
    std::string data_path;
    std::string out_dir;
    std::string transfer = "none";
    ExperimentConfig experiment;
    std::string source_checkpoint_path;
    bool no_hard = false;
    bool no_semihard = false;
    std::size_t within_cap = 10000;
};

int run_train(TrainArgs& args) {
    args.experiment.train.transfer = transfer_kind_from_string(args.transfer);
    args.experiment.train.mining.use_hard = !args.no_hard;
    args.experiment.train.mining.use_semihard = !args.no_semihard;
    args.experiment.train.mining.cap = args.within_cap;
    args.experiment.train.mining.seed = derive_seed(args.experiment.train.seed, 0x31);
    args.experiment.train.validate();
    if (!args.source_checkpoint_path.empty())
        args.experiment.source_checkpoint = load_checkpoint(args.source_checkpoint_path);

    const Dataset dataset = load_jsonl(args.data_path);
    const TrainRunResult result = train_run(dataset, args.experiment);

    fs::create_directories(args.out_dir);
    const std::string ckpt_path = (fs::path(args.out_dir) / "checkpoint.txt").string();
    save_checkpoint(result.audio, ckpt_path);
    if (result.source && args.source_checkpoint_path.empty()) {
        const std::string source_path = (fs::path(args.out_dir) / "source_checkpoint.txt").string();
        save_checkpoint(*result.source, source_path);
        std::cout << "wrote " << source_path << '\n';
    }
    const std::string history_path = (fs::path(args.out_dir) / "history.csv").string();
    write_history_csv(result.history, history_path);

    std::cout << "wrote " << ckpt_path << " and " << history_path << '\n';
    for (const EpochStats& e : result.history)
        std::cout << "epoch " << e.epoch << ": loss " << format_double(e.total_loss) << " (primary "
                  << format_double(e.primary_loss) << ", transfer " << format_double(e.transfer_loss)
                  << "), mined " << e.primary_triplets << " primary / " << e.transfer_triplets
                  << " transfer triplets\n";
    return kExitOk;
}

// ---- eval ----

struct EvalArgs {
    std::string data_path;
    std::string checkpoint_path;
    std::string out_dir = ".";
    std::string source_checkpoint_path;
    std::string svg_prefix;
    EvalOptions options;
    std::string run_id = "eval";
    std::string transfer_label = "none";
    double lambda_label = 0.0;
    int clusters_label = 0;
};

int run_eval(EvalArgs& args) {
    const Dataset dataset = load_jsonl(args.data_path);
    const Checkpoint audio = load_checkpoint(args.checkpoint_path);
    if (!args.source_checkpoint_path.empty())
        args.options.source_checkpoint = load_checkpoint(args.source_checkpoint_path);
    const EvalResult result = eval_run(dataset, audio, args.options);

    fs::create_directories(args.out_dir);
    MetricsRow row;
    row.run_id = args.run_id;
    row.transfer_kind = args.transfer_label;
    row.lambda = args.lambda_label;
    row.clusters = args.clusters_label;
    row.eer = result.eer;
    row.auc = result.auc;
    row.min_ocik = result.curve.min_ocik;
    row.min_ocik_nclusters = result.curve.min_ocik_nclusters;
    row.ocik_at_ideal = result.curve.ocik_at_ideal;
    row.seed = args.options.seed;
    const std::string metrics_path = (fs::path(args.out_dir) / "metrics.csv").string();
    export_metrics_csv({row}, metrics_path);
    const std::string curve_path = (fs::path(args.out_dir) / "curve.csv").string();
    write_curve_csv(result.curve, curve_path);

    std::cout << "test: " << result.test_samples << " samples, " << result.test_identities
              << " identities\n"
              << "eer " << format_double(result.eer) << ", auc " << format_double(result.auc)
              << ", min OCI-k " << result.curve.min_ocik << " at " << result.curve.min_ocik_nclusters
              << " clusters, OCI-k@" << result.curve.ideal_nclusters << " = "
              << result.curve.ocik_at_ideal << '\n'
              << "wrote " << metrics_path << " and " << curve_path << '\n';

    if (!result.retrieval.empty()) {
        const std::string retrieval_path = (fs::path(args.out_dir) / "retrieval.csv").string();
        write_retrieval_csv(result.retrieval, retrieval_path);
        for (const RetrievalSetting& s : result.retrieval)
            std::cout << "prec@1 " << s.name << ": " << format_double(s.prec_at[0]) << '\n';
        std::cout << "wrote " << retrieval_path << '\n';
    }

    if (!args.svg_prefix.empty()) {
        PlotSeries wcp_series{"wcp", {}}, wce_series{"wce", {}}, ocik_series{"ocik", {}};
        for (const CurvePoint& pt : result.curve.points) {
            wcp_series.points.push_back({static_cast<double>(pt.num_clusters), pt.wcp});
            wce_series.points.push_back({static_cast<double>(pt.num_clusters), pt.wce});
            ocik_series.points.push_back(
                {static_cast<double>(pt.num_clusters), static_cast<double>(pt.oci_k)});
        }
        write_svg_plot(args.svg_prefix + "_purity.svg", "clustering quality", "clusters", "metric",
                       {wcp_series, wce_series});
        write_svg_plot(args.svg_prefix + "_ocik.svg", "annotation cost", "clusters", "OCI-k",
                       {ocik_series});
        std::cout << "wrote " << args.svg_prefix << "_purity.svg and " << args.svg_prefix
                  << "_ocik.svg\n";
    }
    return kExitOk;
}

// ---- sweep ----

struct SweepArgs {
    std::string data_path;
    std::string out_dir;
    std::string transfer = "target";
    std::string lambdas = "1.0";
    std::string clusters_list;
    std::string seeds = "1..5";
    std::string svg_prefix;
    ExperimentConfig base;
    EvalOptions eval;
};

int run_sweep(SweepArgs& args) {
    SweepConfig config;
    config.base = args.base;
    config.base.train.transfer = transfer_kind_from_string(args.transfer);
    config.base.train.mining.seed = derive_seed(args.base.train.seed, 0x31);
    config.base.train.mining.cap = 10000;
    config.eval = args.eval;
    config.threads = threads_from_env();
    config.seeds = parse_seeds(args.seeds);

    const std::vector<double> lambdas = parse_doubles(args.lambdas);
    std::vector<int> clusters;
    if (!args.clusters_list.empty()) clusters = parse_ints(args.clusters_list);
    if (clusters.empty()) clusters.push_back(config.base.train.structure_clusters);
    for (double lambda : lambdas)
        for (int c : clusters) config.points.push_back({lambda, c});

    if (config.base.train.transfer == TransferKind::Structure)
        for (const SweepPoint& p : config.points)
            if (p.clusters < 2) throw InvalidConfig("sweep: structure transfer needs --clusters-list");

    const Dataset dataset = load_jsonl(args.data_path);
    const SweepResult result = sweep_run(dataset, config);

    fs::create_directories(args.out_dir);
    const std::string csv_path = (fs::path(args.out_dir) / "sweep.csv").string();
    export_metrics_csv(sweep_rows(result, args.transfer), csv_path);
    std::cout << "wrote " << csv_path << " (" << config.points.size() << " points x "
              << config.seeds.size() << " seeds)\n";

    if (!args.svg_prefix.empty() && lambdas.size() > 1) {
        PlotSeries eer_series{"mean eer", {}};
        for (double lambda : lambdas) {
            double mean = 0.0;
            int count = 0;
            for (const SweepCell& cell : result.cells)
                if (cell.ok && cell.point.lambda == lambda) {
                    mean += cell.eer;
                    ++count;
                }
            if (count) eer_series.points.push_back({lambda, mean / count});
        }
        write_svg_plot(args.svg_prefix + "_eer.svg", "verification vs lambda", "lambda", "EER",
                       {eer_series});
        std::cout << "wrote " << args.svg_prefix << "_eer.svg\n";
    }

    for (const SweepCell& cell : result.cells)
        if (!cell.ok)
            std::cerr << "sweep cell lambda=" << format_double(cell.point.lambda)
                      << " clusters=" << cell.point.clusters << " seed=" << cell.seed
                      << " failed: " << cell.error << '\n';
    return result.all_ok ? kExitOk : kExitPartial;
}

void add_train_options(CLI::App* cmd, TrainArgs& args) {
    cmd->add_option("--data", args.data_path, "dataset JSONL path")->required();
    cmd->add_option("--out", args.out_dir, "output directory")->required();
    cmd->add_option("--transfer", args.transfer, "none|target|relative|structure")
        ->check(CLI::IsMember({"none", "target", "relative", "structure"}))
        ->capture_default_str();
    cmd->add_option("--lambda", args.experiment.train.loss.lambda,
                    "transfer loss weight (optimal value is data dependent; sweep it)")
        ->capture_default_str();
    cmd->add_option("--margin", args.experiment.train.loss.margin, "triplet margin alpha")
        ->capture_default_str();
    cmd->add_option("--transfer-margin", args.experiment.train.loss.transfer_margin,
                    "override alpha for the transfer term only");
    cmd->add_option("--lr", args.experiment.train.learning_rate, "RMSProp learning rate")
        ->capture_default_str();
    cmd->add_option("--epochs", args.experiment.train.epochs, "training epochs")->capture_default_str();
    cmd->add_option("--batch-identities", args.experiment.train.batch_identities,
                    "identities per mini-batch")
        ->capture_default_str();
    cmd->add_option("--batch-samples", args.experiment.train.batch_samples,
                    "samples per identity per mini-batch")
        ->capture_default_str();
    cmd->add_option("--clusters", args.experiment.train.structure_clusters,
                    "cluster count for structure transfer");
    cmd->add_option("--hidden-dim", args.experiment.hidden_dim, "encoder hidden layer width")
        ->capture_default_str();
    cmd->add_option("--embedding-dim", args.experiment.embedding_dim, "embedding dimension d")
        ->capture_default_str();
    cmd->add_option("--seed", args.experiment.train.seed, "run seed")->capture_default_str();
    cmd->add_option("--cap", args.within_cap, "within-modality triplet cap per batch")
        ->capture_default_str();
    cmd->add_option("--transfer-cap", args.experiment.train.transfer_cap,
                    "transfer triplet cap per epoch")
        ->capture_default_str();
    cmd->add_flag("--no-hard", args.no_hard, "drop hard negatives from mining");
    cmd->add_flag("--no-semihard", args.no_semihard, "drop semi-hard negatives from mining");
    cmd->add_flag("--literal-alg3", args.experiment.train.literal_alg3,
                  "use the literal printed structure-transfer condition");
    cmd->add_flag("--renormalize-centroids", args.experiment.train.renormalize_centroids,
                  "push identity centroids back onto the sphere");
    cmd->add_option("--source-checkpoint", args.source_checkpoint_path,
                    "frozen source encoder (otherwise pre-trained here)");
    cmd->add_option("--source-epochs", args.experiment.source_epochs,
                    "source pre-training epochs (0 = same as --epochs)")
        ->capture_default_str();
    cmd->add_option("--rho", args.experiment.train.rmsprop_decay, "RMSProp decay")
        ->capture_default_str();
    cmd->add_option("--eps", args.experiment.train.rmsprop_epsilon, "RMSProp epsilon")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crossmodal speaker/face embedding transfer toolkit"};
    app.require_subcommand(1);
    std::string config_path;  // expanded before parsing; kept for --help

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic crossmodal dataset");
    gen->add_option("--config", config_path, "key=value config file ('#' comments); flags override");
    gen->add_option("--out", gen_args.out_dir, "output directory")->required();
    gen->add_option("--identities", gen_args.config.num_identities, "identity count")
        ->capture_default_str();
    gen->add_option("--groups", gen_args.config.groups, "latent attribute groups")
        ->capture_default_str();
    gen->add_option("--latent-dim", gen_args.config.latent_dim, "latent dimension")
        ->capture_default_str();
    gen->add_option("--audio-frame-dim", gen_args.config.audio_frame_dim, "audio frame dimension")
        ->capture_default_str();
    gen->add_option("--visual-frame-dim", gen_args.config.visual_frame_dim, "visual frame dimension")
        ->capture_default_str();
    gen->add_option("--frames", gen_args.config.frames_per_audio_sample, "frames per audio sample")
        ->capture_default_str();
    gen->add_option("--samples", gen_args.config.samples_per_identity,
                    "samples per identity per modality")
        ->capture_default_str();
    gen->add_option("--noise-audio", gen_args.config.noise_sigma_audio, "audio noise sigma")
        ->capture_default_str();
    gen->add_option("--noise-visual", gen_args.config.noise_sigma_visual, "visual noise sigma")
        ->capture_default_str();
    gen->add_option("--share", gen_args.config.crossmodal_share, "shared latent fraction in [0,1]")
        ->capture_default_str();
    gen->add_option("--within-sigma", gen_args.config.within_group_sigma,
                    "within-group latent noise sigma")
        ->capture_default_str();
    gen->add_option("--test-fraction", gen_args.config.test_fraction, "identity test fraction")
        ->capture_default_str();
    gen->add_option("--seed", gen_args.config.seed, "generator seed")->capture_default_str();

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train", "train the audio encoder");
    train_cmd->add_option("--config", config_path, "key=value config file ('#' comments); flags override");
    add_train_options(train_cmd, train_args);

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a trained encoder on the test split");
    eval_cmd->add_option("--config", config_path, "key=value config file ('#' comments); flags override");
    eval_cmd->add_option("--data", eval_args.data_path, "dataset JSONL path")->required();
    eval_cmd->add_option("--checkpoint", eval_args.checkpoint_path, "trained audio checkpoint")
        ->required();
    eval_cmd->add_option("--out", eval_args.out_dir, "output directory")->capture_default_str();
    eval_cmd->add_option("--ideal-clusters", eval_args.options.ideal_clusters,
                         "cluster count for the OCI-k report (0 = test identity count)")
        ->capture_default_str();
    eval_cmd->add_flag("--retrieval", eval_args.options.retrieval,
                       "run the four query/gallery retrieval settings");
    eval_cmd->add_option("--retrieval-draws", eval_args.options.retrieval_draws,
                         "gallery draws per query")
        ->capture_default_str();
    eval_cmd->add_flag("--strict-precision", eval_args.options.strict_precision,
                       "report hits/K instead of hit rate");
    eval_cmd->add_option("--source-checkpoint", eval_args.source_checkpoint_path,
                         "frozen source encoder for the visual side");
    eval_cmd->add_option("--seed", eval_args.options.seed, "retrieval gallery seed")
        ->capture_default_str();
    eval_cmd->add_option("--svg", eval_args.svg_prefix, "SVG plot path prefix");
    eval_cmd->add_option("--run-id", eval_args.run_id, "run id column value")->capture_default_str();
    eval_cmd->add_option("--transfer", eval_args.transfer_label, "transfer kind column value")
        ->capture_default_str();
    eval_cmd->add_option("--lambda", eval_args.lambda_label, "lambda column value")
        ->capture_default_str();
    eval_cmd->add_option("--clusters", eval_args.clusters_label, "clusters column value")
        ->capture_default_str();

    SweepArgs sweep_args;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "grid of train+eval runs over lambda/clusters");
    sweep_cmd->add_option("--config", config_path, "key=value config file ('#' comments); flags override");
    sweep_cmd->add_option("--data", sweep_args.data_path, "dataset JSONL path")->required();
    sweep_cmd->add_option("--out", sweep_args.out_dir, "output directory")->required();
    sweep_cmd->add_option("--transfer", sweep_args.transfer, "none|target|relative|structure")
        ->check(CLI::IsMember({"none", "target", "relative", "structure"}))
        ->capture_default_str();
    sweep_cmd->add_option("--lambdas,--lambda", sweep_args.lambdas, "comma list of lambda values")
        ->capture_default_str();
    sweep_cmd->add_option("--clusters-list", sweep_args.clusters_list,
                          "comma list of cluster counts (structure transfer)");
    sweep_cmd->add_option("--seeds", sweep_args.seeds, "comma list or inclusive range a..b")
        ->capture_default_str();
    sweep_cmd->add_option("--epochs", sweep_args.base.train.epochs, "training epochs")
        ->capture_default_str();
    sweep_cmd->add_option("--margin", sweep_args.base.train.loss.margin, "triplet margin alpha")
        ->capture_default_str();
    sweep_cmd->add_option("--transfer-margin", sweep_args.base.train.loss.transfer_margin,
                          "override alpha for the transfer term only");
    sweep_cmd->add_option("--lr", sweep_args.base.train.learning_rate, "RMSProp learning rate")
        ->capture_default_str();
    sweep_cmd->add_option("--batch-identities", sweep_args.base.train.batch_identities,
                          "identities per mini-batch")
        ->capture_default_str();
    sweep_cmd->add_option("--batch-samples", sweep_args.base.train.batch_samples,
                          "samples per identity per mini-batch")
        ->capture_default_str();
    sweep_cmd->add_option("--hidden-dim", sweep_args.base.hidden_dim, "encoder hidden layer width")
        ->capture_default_str();
    sweep_cmd->add_option("--embedding-dim", sweep_args.base.embedding_dim, "embedding dimension d")
        ->capture_default_str();
    sweep_cmd->add_option("--source-epochs", sweep_args.base.source_epochs,
                          "source pre-training epochs (0 = same as --epochs)")
        ->capture_default_str();
    sweep_cmd->add_option("--ideal-clusters", sweep_args.eval.ideal_clusters,
                          "cluster count for the OCI-k report (0 = test identity count)")
        ->capture_default_str();
    sweep_cmd->add_option("--svg", sweep_args.svg_prefix, "SVG plot path prefix");

    try {
        std::vector<std::string> args = expand_config_args({argv + 1, argv + argc});
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (gen->parsed()) return run_gen(gen_args);
        if (train_cmd->parsed()) return run_train(train_args);
        if (eval_cmd->parsed()) return run_eval(eval_args);
        if (sweep_cmd->parsed()) return run_sweep(sweep_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return classify(e);
    }
    return kExitConfig;
}
