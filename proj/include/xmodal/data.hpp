#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "xmodal/geometry.hpp"

namespace xmodal {

// One observation: an identity label, a modality tag, and a sequence of
// feature frames (visual samples carry a single frame).
struct Sample {
    std::string sample_id;
    std::string identity;
    Modality modality = Modality::Audio;
    std::string split = "train";  // "train" or "test"
    std::vector<Vec> frames;
};

struct Dataset {
    std::vector<Sample> samples;

    std::set<std::string> identities(const std::string& split) const;
    // throws on empty frames, ragged frame dims, overlapping split identities
    void validate() const;
};

struct SyntheticConfig {
    int num_identities = 20;        // K
    int groups = 4;                 // G latent attribute clusters
    int latent_dim = 8;             // L
    int audio_frame_dim = 20;
    int visual_frame_dim = 16;
    int frames_per_audio_sample = 8;  // F
    int samples_per_identity = 4;     // per modality
    double noise_sigma_audio = 0.4;
    double noise_sigma_visual = 0.05;
    double crossmodal_share = 1.0;   // fraction of latent dims seen by both modalities
    double within_group_sigma = 0.15;
    double test_fraction = 0.25;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SyntheticData {
    Dataset dataset;
    std::map<std::string, int> group_of;  // ground-truth sidecar, never fed to training
};

// Latent factor generator: G group centroids on the unit L-sphere, identity
// latents around them, visual samples as a noisy linear view of the identity
// latent, audio samples as frame sequences of a noisy linear view of a latent
// sharing floor(share*L) leading dimensions. Deterministic given seed.
SyntheticData generate_synthetic(const SyntheticConfig& config);

// Identity-disjoint split: shuffles identities with the seed and re-tags
// samples. Returns (train, test).
std::pair<Dataset, Dataset> split_by_identity(const Dataset& dataset, double test_fraction,
                                              std::uint64_t seed);

// One JSON object per line:
// {"sample_id": str, "identity": str, "modality": "audio"|"visual",
//  "split": "train"|"test", "frames": [[number,...],...]}
Dataset load_jsonl(const std::string& path);
void save_jsonl(const Dataset& dataset, const std::string& path);

// Sidecar ground-truth group labels, CSV "identity,group".
void save_group_labels(const std::map<std::string, int>& group_of, const std::string& path);
std::map<std::string, int> load_group_labels(const std::string& path);

struct MetricsRow {
    std::string run_id;
    std::string transfer_kind;
    double lambda = 0.0;
    int clusters = 0;
    double eer = 0.0;
    double auc = 0.0;
    long min_ocik = 0;
    int min_ocik_nclusters = 0;
    long ocik_at_ideal = 0;
    std::uint64_t seed = 0;
};

void export_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);

// Shortest-round-trip decimal formatting, locale independent.
std::string format_double(double value);

}  // namespace xmodal
