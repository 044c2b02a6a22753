#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xmodal/checkpoint.hpp"
#include "xmodal/data.hpp"
#include "xmodal/metrics.hpp"
#include "xmodal/train.hpp"

namespace xmodal {

// One experiment = optional source pre-training, target training, evaluation.
// Everything here is in-memory; the CLI adds the file IO.
struct ExperimentConfig {
    TrainConfig train;
    int hidden_dim = 64;
    int embedding_dim = 128;
    int source_epochs = 0;  // 0 -> same as train.epochs
    std::optional<Checkpoint> source_checkpoint;
};

struct TrainRunResult {
    Checkpoint audio;
    std::optional<Checkpoint> source;  // present when transfer needed one
    std::vector<EpochStats> history;
};

// Needs a source encoder when the transfer term is active: loads the given
// checkpoint or pre-trains one on the visual training split, freezes it, and
// trains the audio encoder.
TrainRunResult train_run(const Dataset& dataset, const ExperimentConfig& config);

struct RetrievalSetting {
    std::string name;                // e.g. "audio->visual"
    std::vector<double> prec_at;     // index k-1 -> Prec@k, k = 1..10
};

struct EvalOptions {
    int ideal_clusters = 0;  // 0 -> number of test identities
    bool retrieval = false;
    int retrieval_draws = 5;
    bool strict_precision = false;
    std::optional<Checkpoint> source_checkpoint;  // needed for visual/crossmodal retrieval
    std::uint64_t seed = 0;
};

struct EvalResult {
    double eer = 0.0;
    double auc = 0.0;
    ClusteringCurve curve;
    std::vector<RetrievalSetting> retrieval;
    int test_identities = 0;
    int test_samples = 0;
};

// All-pairs verification on the test audio split, agglomerative clustering
// curve, optional four-setting retrieval.
EvalResult eval_run(const Dataset& dataset, const Checkpoint& audio, const EvalOptions& options);

struct SweepPoint {
    double lambda = 1.0;
    int clusters = 0;  // used by structure transfer
};

struct SweepConfig {
    ExperimentConfig base;
    std::vector<SweepPoint> points;
    std::vector<std::uint64_t> seeds;
    EvalOptions eval;
    int threads = 1;
};

struct SweepCell {
    SweepPoint point;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double eer = 0.0;
    double auc = 0.0;
    long min_ocik = 0;
    int min_ocik_nclusters = 0;
    long ocik_at_ideal = 0;
};

struct SweepResult {
    std::vector<SweepCell> cells;  // one per (point, seed), in grid order
    bool all_ok = true;
};

// Runs train+eval per grid cell; failures are recorded and do not stop the
// sweep. Cells are independent, so they may run on XMODAL_THREADS threads;
// the result order is fixed by the grid either way.
SweepResult sweep_run(const Dataset& dataset, const SweepConfig& config);

// Metric rows for a sweep: one row per successful cell plus mean/stddev
// summary rows per point.
std::vector<MetricsRow> sweep_rows(const SweepResult& sweep, const std::string& transfer_kind);

}  // namespace xmodal
