#include "xmodal/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "xmodal/rng.hpp"

namespace xmodal {

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::set<std::string> Dataset::identities(const std::string& split) const {
    std::set<std::string> out;
    for (const Sample& s : samples)
        if (s.split == split) out.insert(s.identity);
    return out;
}

void Dataset::validate() const {
    for (const Sample& s : samples) {
        if (s.identity.empty()) throw SchemaError("sample '" + s.sample_id + "' has empty identity", 0);
        if (s.split != "train" && s.split != "test")
            throw SchemaError("sample '" + s.sample_id + "' has unknown split '" + s.split + "'", 0);
        if (s.frames.empty()) throw InconsistentFrameDim("sample '" + s.sample_id + "' has no frames");
        const std::size_t dim = s.frames.front().size();
        if (dim == 0) throw InconsistentFrameDim("sample '" + s.sample_id + "' has zero-dim frames");
        for (const Vec& f : s.frames)
            if (f.size() != dim)
                throw InconsistentFrameDim("sample '" + s.sample_id + "' has ragged frame dims");
    }
    std::set<std::string> train = identities("train");
    for (const std::string& id : identities("test"))
        if (train.count(id))
            throw SchemaError("identity '" + id + "' appears in both train and test splits", 0);
}

void SyntheticConfig::validate() const {
    if (groups < 1) throw InvalidConfig("groups must be >= 1");
    if (num_identities < groups) throw InvalidConfig("identities must be >= groups");
    if (latent_dim < 1) throw InvalidConfig("latent_dim must be >= 1");
    if (audio_frame_dim < 1 || visual_frame_dim < 1) throw InvalidConfig("frame dims must be >= 1");
    if (frames_per_audio_sample < 1) throw InvalidConfig("frames_per_audio_sample must be >= 1");
    if (samples_per_identity < 1) throw InvalidConfig("samples_per_identity must be >= 1");
    if (noise_sigma_audio < 0 || noise_sigma_visual < 0) throw InvalidConfig("noise sigmas must be >= 0");
    if (within_group_sigma < 0) throw InvalidConfig("within_group_sigma must be >= 0");
    if (crossmodal_share < 0.0 || crossmodal_share > 1.0)
        throw InvalidConfig("crossmodal_share must lie in [0, 1]");
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw InvalidConfig("test_fraction must lie in (0, 1)");
}

namespace {

Vec random_unit(Rng& rng, int dim) {
    Vec v(static_cast<std::size_t>(dim));
    double norm_sq = 0.0;
    while (norm_sq < 1e-12) {
        for (double& x : v) x = gaussian(rng);
        norm_sq = 0.0;
        for (double x : v) norm_sq += x * x;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& x : v) x *= inv;
    return v;
}

// dense rows x cols projection with 1/sqrt(cols) scale
std::vector<Vec> random_projection(Rng& rng, int rows, int cols) {
    std::vector<Vec> p(static_cast<std::size_t>(rows), Vec(static_cast<std::size_t>(cols)));
    const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
    for (auto& row : p)
        for (double& x : row) x = gaussian(rng) * scale;
    return p;
}

Vec project(const std::vector<Vec>& p, const Vec& u) {
    Vec out(p.size(), 0.0);
    for (std::size_t r = 0; r < p.size(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < u.size(); ++c) s += p[r][c] * u[c];
        out[r] = s;
    }
    return out;
}

std::string identity_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "id%03d", i);
    return buf;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& config) {
    config.validate();

    Rng structure_rng(derive_seed(config.seed, 0));
    const int L = config.latent_dim;
    std::vector<Vec> group_centroids;
    group_centroids.reserve(static_cast<std::size_t>(config.groups));
    for (int g = 0; g < config.groups; ++g) group_centroids.push_back(random_unit(structure_rng, L));

    const auto proj_audio = random_projection(structure_rng, config.audio_frame_dim, L);
    const auto proj_visual = random_projection(structure_rng, config.visual_frame_dim, L);

    SyntheticData out;
    std::vector<Vec> identity_latents(static_cast<std::size_t>(config.num_identities));
    for (int i = 0; i < config.num_identities; ++i) {
        const int group = i % config.groups;  // every group populated
        Vec latent = group_centroids[static_cast<std::size_t>(group)];
        for (double& x : latent) x += config.within_group_sigma * gaussian(structure_rng);
        identity_latents[static_cast<std::size_t>(i)] = l2_normalize(latent);
        out.group_of[identity_name(i)] = group;
    }

    const int shared_dims = static_cast<int>(std::floor(config.crossmodal_share * L));
    Rng sample_rng(derive_seed(config.seed, 1));
    for (int i = 0; i < config.num_identities; ++i) {
        const std::string identity = identity_name(i);
        const Vec& latent = identity_latents[static_cast<std::size_t>(i)];

        for (int s = 0; s < config.samples_per_identity; ++s) {
            Sample visual;
            visual.sample_id = identity + "_v" + std::to_string(s);
            visual.identity = identity;
            visual.modality = Modality::Visual;
            Vec frame = project(proj_visual, latent);
            for (double& x : frame) x += config.noise_sigma_visual * gaussian(sample_rng);
            visual.frames.push_back(std::move(frame));
            out.dataset.samples.push_back(std::move(visual));
        }

        for (int s = 0; s < config.samples_per_identity; ++s) {
            // audio sees only the leading shared dims of the identity latent;
            // the rest is redrawn per sample
            Vec audio_latent = latent;
            if (shared_dims < L) {
                for (int d = shared_dims; d < L; ++d)
                    audio_latent[static_cast<std::size_t>(d)] = gaussian(sample_rng);
                audio_latent = l2_normalize(audio_latent);
            }
            Sample audio;
            audio.sample_id = identity + "_a" + std::to_string(s);
            audio.identity = identity;
            audio.modality = Modality::Audio;
            const Vec clean = project(proj_audio, audio_latent);
            for (int f = 0; f < config.frames_per_audio_sample; ++f) {
                Vec frame = clean;
                for (double& x : frame) x += config.noise_sigma_audio * gaussian(sample_rng);
                audio.frames.push_back(std::move(frame));
            }
            out.dataset.samples.push_back(std::move(audio));
        }
    }

    auto [train, test] = split_by_identity(out.dataset, config.test_fraction, derive_seed(config.seed, 2));
    out.dataset.samples.clear();
    out.dataset.samples.insert(out.dataset.samples.end(), train.samples.begin(), train.samples.end());
    out.dataset.samples.insert(out.dataset.samples.end(), test.samples.begin(), test.samples.end());
    out.dataset.validate();
    return out;
}

std::pair<Dataset, Dataset> split_by_identity(const Dataset& dataset, double test_fraction,
                                              std::uint64_t seed) {
    if (test_fraction <= 0.0 || test_fraction >= 1.0)
        throw InvalidConfig("split_by_identity: test_fraction must lie in (0, 1)");
    std::set<std::string> id_set;
    for (const Sample& s : dataset.samples) id_set.insert(s.identity);
    if (id_set.size() < 2) throw TooFewIdentities("split_by_identity: need at least two identities");

    std::vector<std::string> ids(id_set.begin(), id_set.end());
    Rng rng(seed);
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
        const std::size_t j = i + bounded(rng, ids.size() - i);
        std::swap(ids[i], ids[j]);
    }
    std::size_t n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(ids.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, ids.size() - 1);
    std::set<std::string> test_ids(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));

    std::pair<Dataset, Dataset> out;
    for (const Sample& s : dataset.samples) {
        Sample copy = s;
        if (test_ids.count(s.identity)) {
            copy.split = "test";
            out.second.samples.push_back(std::move(copy));
        } else {
            copy.split = "train";
            out.first.samples.push_back(std::move(copy));
        }
    }
    return out;
}

Dataset load_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    Dataset dataset;
    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
        if (record.is_discarded()) throw SchemaError("invalid JSON", line_number);
        for (const char* key : {"sample_id", "identity", "modality", "split", "frames"})
            if (!record.contains(key)) throw SchemaError(std::string("missing key '") + key + "'", line_number);

        Sample s;
        try {
            s.sample_id = record["sample_id"].get<std::string>();
            s.identity = record["identity"].get<std::string>();
            s.split = record["split"].get<std::string>();
            const std::string modality = record["modality"].get<std::string>();
            if (modality == "audio") s.modality = Modality::Audio;
            else if (modality == "visual") s.modality = Modality::Visual;
            else throw SchemaError("unknown modality '" + modality + "'", line_number);
            s.frames = record["frames"].get<std::vector<Vec>>();
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("bad field type: ") + e.what(), line_number);
        }
        if (s.identity.empty()) throw SchemaError("empty identity", line_number);
        if (s.split != "train" && s.split != "test")
            throw SchemaError("split must be 'train' or 'test'", line_number);
        if (s.frames.empty()) throw SchemaError("frames must be non-empty", line_number);
        const std::size_t dim = s.frames.front().size();
        if (dim == 0) throw SchemaError("frames must have positive dimension", line_number);
        for (const Vec& f : s.frames)
            if (f.size() != dim)
                throw InconsistentFrameDim("ragged frames in sample '" + s.sample_id + "' at line " +
                                           std::to_string(line_number));
        dataset.samples.push_back(std::move(s));
    }
    dataset.validate();
    return dataset;
}

void save_jsonl(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (const Sample& s : dataset.samples) {
        nlohmann::json record;
        record["sample_id"] = s.sample_id;
        record["identity"] = s.identity;
        record["modality"] = to_string(s.modality);
        record["split"] = s.split;
        record["frames"] = s.frames;
        out << record.dump() << '\n';
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

void save_group_labels(const std::map<std::string, int>& group_of, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "identity,group\n";
    for (const auto& [identity, group] : group_of) out << identity << ',' << group << '\n';
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::map<std::string, int> load_group_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::map<std::string, int> out;
    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line_number == 1 || line.empty()) continue;  // header
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw SchemaError("expected 'identity,group'", line_number);
        int group = 0;
        const auto* last = line.data() + line.size();
        auto [ptr, ec] = std::from_chars(line.data() + comma + 1, last, group);
        if (ec != std::errc() || ptr != last) throw SchemaError("bad group id", line_number);
        out[line.substr(0, comma)] = group;
    }
    return out;
}

void export_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "run_id,transfer_kind,lambda,clusters,eer,auc,min_ocik,min_ocik_nclusters,ocik_at_ideal,seed\n";
    for (const MetricsRow& r : rows) {
        out << r.run_id << ',' << r.transfer_kind << ',' << format_double(r.lambda) << ',' << r.clusters
            << ',' << format_double(r.eer) << ',' << format_double(r.auc) << ',' << r.min_ocik << ','
            << r.min_ocik_nclusters << ',' << r.ocik_at_ideal << ',' << r.seed << '\n';
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace xmodal
