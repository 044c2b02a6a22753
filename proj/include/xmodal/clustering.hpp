#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xmodal/geometry.hpp"
#include "xmodal/mining.hpp"

namespace xmodal {

struct KMeansResult {
    std::vector<Vec> centers;
    std::vector<int> assignment;          // per input point, nearest center (ties: lowest index)
    double inertia = 0.0;                 // sum of squared distances to assigned centers
    std::vector<double> inertia_history;  // per Lloyd iteration of the winning restart
};

// Lloyd's algorithm with k-means++ seeding, best of 10 restarts, at most 100
// iterations each, empty clusters reseeded to the farthest point.
// Deterministic given seed.
KMeansResult kmeans(const std::vector<Vec>& points, int num_clusters, std::uint64_t seed);

// Attach identities (aligned with the kmeans input points) to the result.
ClusterMapping cluster_mapping(const KMeansResult& result, const std::vector<std::string>& identities);

struct MergeEvent {
    int left = 0;   // smaller creation-order cluster id
    int right = 0;  // larger creation-order cluster id
    double distance = 0.0;
    int merged = 0;  // id of the new cluster
};

// Full agglomerative merge history: leaves are clusters 0..N-1, merge k
// creates cluster N+k. Exactly N-1 merges.
struct MergeTrace {
    int num_leaves = 0;
    std::vector<MergeEvent> merges;
};

// Mean-linkage agglomerative clustering: repeatedly merges the pair of live
// clusters whose means are closest, ties broken on the lexicographically
// smallest (left, right) creation-order ids.
MergeTrace agglomerative(const std::vector<Vec>& points);

}  // namespace xmodal
