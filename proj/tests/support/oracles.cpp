#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracles {

namespace {

double dist(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

TripletSet within_modality(const std::vector<Vec>& emb, const std::vector<std::string>& ids,
                           double alpha, bool use_hard, bool use_semihard) {
    TripletSet out;
    const int n = static_cast<int>(emb.size());
    for (int a = 0; a < n; ++a)
        for (int p = 0; p < n; ++p)
            for (int g = 0; g < n; ++g) {
                if (a == p) continue;
                if (ids[a] != ids[p]) continue;
                if (ids[g] == ids[a]) continue;
                const double d_ap = dist(emb[a], emb[p]);
                const double d_an = dist(emb[a], emb[g]);
                bool keep = false;
                if (use_hard && d_an < d_ap) keep = true;
                if (use_semihard && d_ap <= d_an && d_an < d_ap + alpha) keep = true;
                if (keep) out.push_back({a, p, g});
            }
    std::sort(out.begin(), out.end());
    return out;
}

CrossmodalTripletSet target_set(const std::vector<Vec>& audio_emb,
                                const std::vector<std::string>& audio_ids,
                                const std::vector<Vec>& visual_emb,
                                const std::vector<std::string>& visual_ids, double alpha) {
    using xmodal::Modality;
    CrossmodalTripletSet out;
    const Modality mods[2] = {Modality::Audio, Modality::Visual};
    auto embeddings = [&](Modality m) { return m == Modality::Audio ? &audio_emb : &visual_emb; };
    auto identities = [&](Modality m) { return m == Modality::Audio ? &audio_ids : &visual_ids; };

    for (Modality ma : mods)
        for (Modality mp : mods)
            for (Modality mn : mods) {
                // excluded combinations: VVV, VVA, AAA
                const bool vvv = ma == Modality::Visual && mp == Modality::Visual && mn == Modality::Visual;
                const bool vva = ma == Modality::Visual && mp == Modality::Visual && mn == Modality::Audio;
                const bool aaa = ma == Modality::Audio && mp == Modality::Audio && mn == Modality::Audio;
                if (vvv || vva || aaa) continue;
                const int na = static_cast<int>(identities(ma)->size());
                const int np = static_cast<int>(identities(mp)->size());
                const int nn = static_cast<int>(identities(mn)->size());
                for (int a = 0; a < na; ++a)
                    for (int p = 0; p < np; ++p)
                        for (int g = 0; g < nn; ++g) {
                            if (ma == mp && a == p) continue;
                            if ((*identities(mp))[p] != (*identities(ma))[a]) continue;
                            if ((*identities(mn))[g] == (*identities(ma))[a]) continue;
                            const double d_ap = dist((*embeddings(ma))[a], (*embeddings(mp))[p]);
                            const double d_an = dist((*embeddings(ma))[a], (*embeddings(mn))[g]);
                            if (d_ap + alpha > d_an) out.push_back({ma, a, mp, p, mn, g});
                        }
            }
    std::sort(out.begin(), out.end());
    return out;
}

TripletSet relative_set(const std::vector<Vec>& audio_emb, const std::vector<std::string>& audio_ids,
                        const std::map<std::string, Vec>& centroids, double alpha) {
    TripletSet out;
    const int n = static_cast<int>(audio_emb.size());
    for (int a = 0; a < n; ++a)
        for (int p = 0; p < n; ++p)
            for (int g = 0; g < n; ++g) {
                if (a == p || a == g || p == g) continue;
                if (audio_ids[p] == audio_ids[a]) continue;
                if (audio_ids[g] == audio_ids[a]) continue;
                const double source_ap = dist(centroids.at(audio_ids[a]), centroids.at(audio_ids[p]));
                const double source_an = dist(centroids.at(audio_ids[a]), centroids.at(audio_ids[g]));
                if (!(source_ap < source_an)) continue;
                const double d_ap = dist(audio_emb[a], audio_emb[p]);
                const double d_an = dist(audio_emb[a], audio_emb[g]);
                if (d_ap + alpha > d_an) out.push_back({a, p, g});
            }
    std::sort(out.begin(), out.end());
    return out;
}

TripletSet structure_set(const std::vector<Vec>& audio_emb, const std::vector<std::string>& audio_ids,
                         const std::map<std::string, int>& cluster_of, double alpha, bool literal) {
    TripletSet out;
    const int n = static_cast<int>(audio_emb.size());
    for (int a = 0; a < n; ++a)
        for (int p = 0; p < n; ++p)
            for (int g = 0; g < n; ++g) {
                if (a == p || a == g || p == g) continue;
                const int ca = cluster_of.at(audio_ids[a]);
                const int cp = cluster_of.at(audio_ids[p]);
                const int cn = cluster_of.at(audio_ids[g]);
                if (literal) {
                    if (ca == cp || ca == cn) continue;
                } else {
                    if (ca != cp || audio_ids[a] == audio_ids[p] || ca == cn) continue;
                }
                const double d_ap = dist(audio_emb[a], audio_emb[p]);
                const double d_an = dist(audio_emb[a], audio_emb[g]);
                if (d_ap + alpha > d_an) out.push_back({a, p, g});
            }
    std::sort(out.begin(), out.end());
    return out;
}

double eer(const std::vector<double>& positives, const std::vector<double>& negatives) {
    std::vector<double> thresholds = positives;
    thresholds.insert(thresholds.end(), negatives.begin(), negatives.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds.push_back(thresholds.back() + 1.0);

    auto rates = [&](double t, double& fnr, double& fpr) {
        int missed = 0;
        for (double v : positives)
            if (v >= t) ++missed;
        int accepted = 0;
        for (double v : negatives)
            if (v < t) ++accepted;
        fnr = static_cast<double>(missed) / static_cast<double>(positives.size());
        fpr = static_cast<double>(accepted) / static_cast<double>(negatives.size());
    };

    double prev_fnr = 0.0, prev_fpr = 0.0;
    rates(thresholds.front(), prev_fnr, prev_fpr);
    if (prev_fnr == prev_fpr) return prev_fnr;
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        double fnr = 0.0, fpr = 0.0;
        rates(thresholds[i], fnr, fpr);
        if (fnr == fpr) return fnr;
        if (fnr < fpr) {
            const double d1 = prev_fnr - prev_fpr;
            const double d2 = fnr - fpr;
            const double s = d1 / (d1 - d2);
            return prev_fnr + s * (fnr - prev_fnr);
        }
        prev_fnr = fnr;
        prev_fpr = fpr;
    }
    return 0.0;
}

double auc(const std::vector<double>& positives, const std::vector<double>& negatives) {
    double favorable = 0.0;
    for (double p : positives)
        for (double n : negatives) {
            if (p < n) favorable += 1.0;
            else if (p == n) favorable += 0.5;
        }
    return favorable / (static_cast<double>(positives.size()) * static_cast<double>(negatives.size()));
}

double best_kmeans_inertia(const std::vector<Vec>& points, int k) {
    const std::size_t n = points.size();
    const std::size_t dim = points.front().size();
    std::vector<int> assignment(n, 0);
    double best = std::numeric_limits<double>::infinity();
    // odometer over all k^n assignments
    while (true) {
        std::vector<Vec> centers(static_cast<std::size_t>(k), Vec(dim, 0.0));
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assignment[i]);
            ++counts[c];
            for (std::size_t d = 0; d < dim; ++d) centers[c][d] += points[i][d];
        }
        for (int c = 0; c < k; ++c)
            if (counts[static_cast<std::size_t>(c)] > 0)
                for (std::size_t d = 0; d < dim; ++d)
                    centers[static_cast<std::size_t>(c)][d] /= counts[static_cast<std::size_t>(c)];
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = dist(points[i], centers[static_cast<std::size_t>(assignment[i])]);
            inertia += d * d;
        }
        best = std::min(best, inertia);

        std::size_t pos = 0;
        while (pos < n && ++assignment[pos] == k) {
            assignment[pos] = 0;
            ++pos;
        }
        if (pos == n) break;
    }
    return best;
}

}  // namespace oracles
