#include "xmodal/mining.hpp"

#include <algorithm>
#include <numeric>

#include "xmodal/rng.hpp"

namespace xmodal {

namespace {
constexpr Modality A = Modality::Audio;
constexpr Modality V = Modality::Visual;
}  // namespace

const std::array<ModalityCombo, 5>& valid_modality_combos() {
    static const std::array<ModalityCombo, 5> combos = {{
        {A, A, V},
        {A, V, A},
        {A, V, V},
        {V, A, A},
        {V, A, V},
    }};
    return combos;
}

bool is_valid_combo(Modality anchor, Modality positive, Modality negative) {
    for (const ModalityCombo& c : valid_modality_combos())
        if (c.anchor == anchor && c.positive == positive && c.negative == negative) return true;
    return false;
}

namespace {

void check_parallel(const std::vector<Vec>& embeddings, const std::vector<std::string>& identities,
                    const char* what) {
    if (embeddings.size() != identities.size())
        throw DimensionMismatch(std::string(what) + ": embeddings/identities size mismatch");
}

template <typename Set>
Set sample_without_replacement(const Set& triples, std::size_t cap, std::uint64_t seed) {
    std::vector<std::size_t> index(triples.size());
    std::iota(index.begin(), index.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < cap; ++i) {
        const std::size_t j = i + bounded(rng, index.size() - i);
        std::swap(index[i], index[j]);
    }
    index.resize(cap);
    Set out;
    out.reserve(cap);
    for (std::size_t i : index) out.push_back(triples[i]);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TripletSet mine_within_modality(const std::vector<Vec>& embeddings,
                                const std::vector<std::string>& identities, double alpha,
                                const MiningPolicy& policy) {
    check_parallel(embeddings, identities, "mine_within_modality");
    if (!policy.use_hard && !policy.use_semihard)
        throw InvalidConfig("mine_within_modality: policy selects no negatives");

    const int n = static_cast<int>(embeddings.size());
    bool has_positive_pair = false;
    bool has_two_identities = false;
    for (int i = 0; i < n && !(has_positive_pair && has_two_identities); ++i)
        for (int j = i + 1; j < n; ++j) {
            if (identities[i] == identities[j]) has_positive_pair = true;
            else has_two_identities = true;
        }
    if (!has_positive_pair || !has_two_identities)
        throw DegenerateBatch("mine_within_modality: no valid anchor/positive/negative structure in batch");

    TripletSet out;
    for (int a = 0; a < n; ++a) {
        for (int p = 0; p < n; ++p) {
            if (p == a || identities[p] != identities[a]) continue;
            const double d_ap = pairwise_distance(embeddings[a], embeddings[p]);
            for (int neg = 0; neg < n; ++neg) {
                if (identities[neg] == identities[a]) continue;
                const double d_an = pairwise_distance(embeddings[a], embeddings[neg]);
                const bool hard = d_an < d_ap;
                const bool semihard = d_ap <= d_an && d_an < d_ap + alpha;
                if ((policy.use_hard && hard) || (policy.use_semihard && semihard))
                    out.push_back({a, p, neg});
            }
        }
    }
    if (policy.cap && out.size() > *policy.cap) out = cap_triplets(out, *policy.cap, policy.seed);
    return out;
}

CrossmodalTripletSet build_target_set(const std::vector<Vec>& audio_embeddings,
                                      const std::vector<std::string>& audio_identities,
                                      const std::vector<Vec>& visual_embeddings,
                                      const std::vector<std::string>& visual_identities, double alpha) {
    check_parallel(audio_embeddings, audio_identities, "build_target_set");
    check_parallel(visual_embeddings, visual_identities, "build_target_set");
    if (audio_embeddings.empty()) throw EmptyModality("build_target_set: no audio embeddings");
    if (visual_embeddings.empty()) throw EmptyModality("build_target_set: no visual embeddings");

    auto list = [&](Modality m) -> const std::vector<Vec>& {
        return m == A ? audio_embeddings : visual_embeddings;
    };
    auto ids = [&](Modality m) -> const std::vector<std::string>& {
        return m == A ? audio_identities : visual_identities;
    };

    CrossmodalTripletSet out;
    for (const ModalityCombo& combo : valid_modality_combos()) {
        const auto& anchor_ids = ids(combo.anchor);
        const auto& positive_ids = ids(combo.positive);
        const auto& negative_ids = ids(combo.negative);
        const int na = static_cast<int>(anchor_ids.size());
        const int np = static_cast<int>(positive_ids.size());
        const int nn = static_cast<int>(negative_ids.size());
        for (int a = 0; a < na; ++a) {
            for (int p = 0; p < np; ++p) {
                if (combo.anchor == combo.positive && a == p) continue;
                if (positive_ids[p] != anchor_ids[a]) continue;
                const double d_ap =
                    pairwise_distance(list(combo.anchor)[a], list(combo.positive)[p]);
                for (int neg = 0; neg < nn; ++neg) {
                    if (negative_ids[neg] == anchor_ids[a]) continue;
                    const double d_an =
                        pairwise_distance(list(combo.anchor)[a], list(combo.negative)[neg]);
                    if (d_ap + alpha > d_an)
                        out.push_back({combo.anchor, a, combo.positive, p, combo.negative, neg});
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

TripletSet build_relative_set(const std::vector<Vec>& audio_embeddings,
                              const std::vector<std::string>& audio_identities,
                              const std::map<std::string, Vec>& visual_centroids, double alpha) {
    check_parallel(audio_embeddings, audio_identities, "build_relative_set");
    for (const std::string& id : audio_identities)
        if (!visual_centroids.count(id))
            throw MissingCentroid("build_relative_set: no visual centroid for identity '" + id + "'");

    const int n = static_cast<int>(audio_embeddings.size());
    // centroid distances are reused heavily; cache per identity pair
    std::map<std::pair<std::string, std::string>, double> centroid_dist;
    auto cdist = [&](const std::string& y1, const std::string& y2) {
        auto key = y1 < y2 ? std::make_pair(y1, y2) : std::make_pair(y2, y1);
        auto it = centroid_dist.find(key);
        if (it != centroid_dist.end()) return it->second;
        const double d = pairwise_distance(visual_centroids.at(y1), visual_centroids.at(y2));
        centroid_dist.emplace(key, d);
        return d;
    };

    TripletSet out;
    for (int a = 0; a < n; ++a) {
        for (int p = 0; p < n; ++p) {
            if (p == a || audio_identities[p] == audio_identities[a]) continue;
            const double source_ap = cdist(audio_identities[a], audio_identities[p]);
            const double d_ap = pairwise_distance(audio_embeddings[a], audio_embeddings[p]);
            for (int neg = 0; neg < n; ++neg) {
                if (neg == a || neg == p || audio_identities[neg] == audio_identities[a]) continue;
                if (!(source_ap < cdist(audio_identities[a], audio_identities[neg]))) continue;
                const double d_an = pairwise_distance(audio_embeddings[a], audio_embeddings[neg]);
                if (d_ap + alpha > d_an) out.push_back({a, p, neg});
            }
        }
    }
    return out;
}

TripletSet build_structure_set(const std::vector<Vec>& audio_embeddings,
                               const std::vector<std::string>& audio_identities,
                               const ClusterMapping& mapping, double alpha, bool literal_alg3) {
    check_parallel(audio_embeddings, audio_identities, "build_structure_set");
    std::vector<int> cluster(audio_identities.size());
    for (std::size_t i = 0; i < audio_identities.size(); ++i) {
        auto it = mapping.cluster_of.find(audio_identities[i]);
        if (it == mapping.cluster_of.end())
            throw UnmappedIdentity("build_structure_set: identity '" + audio_identities[i] +
                                   "' has no cluster label");
        cluster[i] = it->second;
    }

    const int n = static_cast<int>(audio_embeddings.size());
    TripletSet out;
    for (int a = 0; a < n; ++a) {
        for (int p = 0; p < n; ++p) {
            if (p == a) continue;
            if (literal_alg3) {
                if (cluster[p] == cluster[a]) continue;
            } else {
                if (cluster[p] != cluster[a] || audio_identities[p] == audio_identities[a]) continue;
            }
            const double d_ap = pairwise_distance(audio_embeddings[a], audio_embeddings[p]);
            for (int neg = 0; neg < n; ++neg) {
                if (neg == a || neg == p || cluster[neg] == cluster[a]) continue;
                const double d_an = pairwise_distance(audio_embeddings[a], audio_embeddings[neg]);
                if (d_ap + alpha > d_an) out.push_back({a, p, neg});
            }
        }
    }
    return out;
}

TripletSet cap_triplets(const TripletSet& triples, std::size_t cap, std::uint64_t seed) {
    if (cap < 1) throw InvalidConfig("cap_triplets: cap must be >= 1");
    if (triples.size() <= cap) return triples;
    return sample_without_replacement(triples, cap, seed);
}

CrossmodalTripletSet cap_triplets(const CrossmodalTripletSet& triples, std::size_t cap,
                                  std::uint64_t seed) {
    if (cap < 1) throw InvalidConfig("cap_triplets: cap must be >= 1");
    if (triples.size() <= cap) return triples;
    return sample_without_replacement(triples, cap, seed);
}

}  // namespace xmodal
