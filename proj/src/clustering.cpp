#include "xmodal/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xmodal/rng.hpp"

namespace xmodal {

namespace {

double squared_distance(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// D^2-weighted center choice (k-means++). Falls back to index 0 when all
// mass is zero (coincident points).
std::size_t sample_weighted(const std::vector<double>& weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) return 0;
    const double r = uniform01(rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (r < acc) return i;
    }
    return weights.size() - 1;
}

std::vector<Vec> seed_centers(const std::vector<Vec>& points, int k, Rng& rng) {
    std::vector<Vec> centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(points[bounded(rng, points.size())]);
    std::vector<double> min_sq(points.size(), std::numeric_limits<double>::infinity());
    while (static_cast<int>(centers.size()) < k) {
        for (std::size_t i = 0; i < points.size(); ++i)
            min_sq[i] = std::min(min_sq[i], squared_distance(points[i], centers.back()));
        centers.push_back(points[sample_weighted(min_sq, rng)]);
    }
    return centers;
}

struct LloydOutcome {
    std::vector<Vec> centers;
    std::vector<int> assignment;
    double inertia = 0.0;
    std::vector<double> inertia_history;
};

int nearest_center(const Vec& p, const std::vector<Vec>& centers) {
    int best = 0;
    double best_sq = squared_distance(p, centers[0]);
    for (int c = 1; c < static_cast<int>(centers.size()); ++c) {
        const double sq = squared_distance(p, centers[static_cast<std::size_t>(c)]);
        if (sq < best_sq) {
            best_sq = sq;
            best = c;
        }
    }
    return best;
}

LloydOutcome lloyd(const std::vector<Vec>& points, int k, Rng& rng) {
    constexpr int kMaxIterations = 100;
    LloydOutcome out;
    out.centers = seed_centers(points, k, rng);
    out.assignment.assign(points.size(), -1);

    const std::size_t dim = points.front().size();
    double previous_inertia = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        std::vector<int> assignment(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) assignment[i] = nearest_center(points[i], out.centers);

        // reseed empty clusters to the point farthest from its current center;
        // pointless when every point already sits on its center
        for (int c = 0; c < k; ++c) {
            if (std::find(assignment.begin(), assignment.end(), c) != assignment.end()) continue;
            std::size_t farthest = 0;
            double farthest_sq = 0.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                const double sq =
                    squared_distance(points[i], out.centers[static_cast<std::size_t>(assignment[i])]);
                if (sq > farthest_sq) {
                    farthest_sq = sq;
                    farthest = i;
                }
            }
            if (farthest_sq <= 0.0) continue;
            out.centers[static_cast<std::size_t>(c)] = points[farthest];
            assignment[farthest] = c;
        }

        double inertia = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            inertia += squared_distance(points[i], out.centers[static_cast<std::size_t>(assignment[i])]);
        // Lloyd monotonicity; a violation means the update step is broken
        if (inertia > previous_inertia + 1e-9)
            throw NumericError("kmeans: inertia increased across a Lloyd iteration");
        out.inertia_history.push_back(inertia);
        previous_inertia = inertia;

        const bool converged = assignment == out.assignment;
        out.assignment = assignment;
        out.inertia = inertia;
        if (converged) break;

        std::vector<Vec> sums(static_cast<std::size_t>(k), Vec(dim, 0.0));
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto c = static_cast<std::size_t>(assignment[i]);
            for (std::size_t d = 0; d < dim; ++d) sums[c][d] += points[i][d];
            ++counts[c];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] == 0) continue;  // reseeded next round
            Vec& center = out.centers[static_cast<std::size_t>(c)];
            for (std::size_t d = 0; d < dim; ++d)
                center[d] = sums[static_cast<std::size_t>(c)][d] /
                            static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }
    }

    // canonical final assignment: nearest center, ties to the lowest index
    out.inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.assignment[i] = nearest_center(points[i], out.centers);
        out.inertia += squared_distance(points[i], out.centers[static_cast<std::size_t>(out.assignment[i])]);
    }
    return out;
}

}  // namespace

KMeansResult kmeans(const std::vector<Vec>& points, int num_clusters, std::uint64_t seed) {
    if (num_clusters < 1) throw InvalidConfig("kmeans: need at least one cluster");
    if (static_cast<std::size_t>(num_clusters) > points.size())
        throw TooFewPoints("kmeans: more clusters than points");

    constexpr int kRestarts = 10;
    LloydOutcome best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < kRestarts; ++restart) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(restart)));
        LloydOutcome outcome = lloyd(points, num_clusters, rng);
        if (outcome.inertia < best.inertia) best = std::move(outcome);
    }

    KMeansResult result;
    result.centers = std::move(best.centers);
    result.assignment = std::move(best.assignment);
    result.inertia = best.inertia;
    result.inertia_history = std::move(best.inertia_history);
    return result;
}

ClusterMapping cluster_mapping(const KMeansResult& result, const std::vector<std::string>& identities) {
    if (result.assignment.size() != identities.size())
        throw DimensionMismatch("cluster_mapping: identities do not align with kmeans points");
    ClusterMapping mapping;
    mapping.num_clusters = static_cast<int>(result.centers.size());
    for (std::size_t i = 0; i < identities.size(); ++i) mapping.cluster_of[identities[i]] = result.assignment[i];
    return mapping;
}

MergeTrace agglomerative(const std::vector<Vec>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw TooFewPoints("agglomerative: need at least two points");

    struct Cluster {
        Vec mean;
        int size = 0;
        bool alive = false;
    };
    std::vector<Cluster> clusters;
    clusters.reserve(static_cast<std::size_t>(2 * n - 1));
    for (const Vec& p : points) {
        if (p.size() != points.front().size())
            throw DimensionMismatch("agglomerative: ragged point dimensions");
        clusters.push_back({p, 1, true});
    }

    MergeTrace trace;
    trace.num_leaves = n;
    trace.merges.reserve(static_cast<std::size_t>(n - 1));
    for (int step = 0; step < n - 1; ++step) {
        int best_i = -1, best_j = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        const int live_end = static_cast<int>(clusters.size());
        for (int i = 0; i < live_end; ++i) {
            if (!clusters[static_cast<std::size_t>(i)].alive) continue;
            for (int j = i + 1; j < live_end; ++j) {
                if (!clusters[static_cast<std::size_t>(j)].alive) continue;
                const double d = pairwise_distance(clusters[static_cast<std::size_t>(i)].mean,
                                                   clusters[static_cast<std::size_t>(j)].mean);
                // strict < keeps the lexicographically smallest (i, j) on ties
                if (d < best_dist) {
                    best_dist = d;
                    best_i = i;
                    best_j = j;
                }
            }
        }

        Cluster& left = clusters[static_cast<std::size_t>(best_i)];
        Cluster& right = clusters[static_cast<std::size_t>(best_j)];
        Cluster merged;
        merged.size = left.size + right.size;
        merged.mean.resize(left.mean.size());
        for (std::size_t d = 0; d < merged.mean.size(); ++d)
            merged.mean[d] = (left.mean[d] * left.size + right.mean[d] * right.size) /
                             static_cast<double>(merged.size);
        merged.alive = true;
        left.alive = false;
        right.alive = false;
        const int merged_id = static_cast<int>(clusters.size());
        clusters.push_back(std::move(merged));
        trace.merges.push_back({best_i, best_j, best_dist, merged_id});
    }
    return trace;
}

}  // namespace xmodal
