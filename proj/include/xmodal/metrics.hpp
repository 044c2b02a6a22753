#pragma once

#include <string>
#include <vector>

#include "xmodal/clustering.hpp"
#include "xmodal/geometry.hpp"

namespace xmodal {

// Verification scores: distances of same-identity and different-identity
// pairs. Smaller distance means "same".
struct ScorePairs {
    std::vector<double> positives;
    std::vector<double> negatives;
};

// Equal error rate. Sweeps a threshold t (predict same when distance < t)
// over the pooled scores; FNR = fraction of positives >= t, FPR = fraction of
// negatives < t. Returns the crossing of the two rates, linearly
// interpolated between adjacent thresholds where their difference changes
// sign.
double eer(const ScorePairs& scores);

// Probability that a random positive pair scores a smaller distance than a
// random negative pair, ties counted one half.
double roc_auc(const ScorePairs& scores);

// A clustering of segments described only by their identity labels.
using LabeledPartition = std::vector<std::vector<std::string>>;

// Weighted cluster purity: (1/N) * sum_c n_c * (max_i n^c_i / n_c).
double wcp(const LabeledPartition& partition);

// Weighted cluster entropy, base-2: (1/N) * sum_c n_c * entropy_c.
double wce(const LabeledPartition& partition);

// Operator clicks index: sum_c (1 + n_c - max_i n^c_i).
long oci_k(const LabeledPartition& partition);

// One retrieval run: a query embedding ranked against a 10-item gallery of
// one correct-identity embedding and nine distractors.
struct RetrievalQuery {
    Vec query;
    Vec correct;
    std::vector<Vec> distractors;  // exactly 9
};

// Fraction of queries whose correct item ranks in the top K by ascending
// distance; on ties the correct item loses. strict_precision divides each
// hit by K instead (single-relevant-item precision@K).
double prec_at_k(const std::vector<RetrievalQuery>& queries, int k, bool strict_precision = false);

struct CurvePoint {
    int num_clusters = 0;
    double wcp = 0.0;
    double wce = 0.0;
    long oci_k = 0;
};

struct ClusteringCurve {
    std::vector<CurvePoint> points;  // from N singletons down to 1 cluster
    long min_ocik = 0;
    int min_ocik_nclusters = 0;
    long ocik_at_ideal = 0;
    int ideal_nclusters = 0;
};

// Replays a merge trace against ground-truth labels, emitting WCP/WCE/OCI-k
// at every cluster count from N down to 1, plus the minimum OCI-k (ties keep
// the larger cluster count) and OCI-k at the caller's ideal cluster count.
ClusteringCurve clustering_curve(const MergeTrace& trace, const std::vector<std::string>& labels,
                                 int ideal_nclusters);

}  // namespace xmodal
