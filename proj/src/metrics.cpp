#include "xmodal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace xmodal {

namespace {

void check_scores(const ScorePairs& scores, const char* what) {
    if (scores.positives.empty() || scores.negatives.empty())
        throw EmptyScores(std::string(what) + ": needs at least one positive and one negative pair");
    for (double v : scores.positives)
        if (!std::isfinite(v)) throw EmptyScores(std::string(what) + ": non-finite positive score");
    for (double v : scores.negatives)
        if (!std::isfinite(v)) throw EmptyScores(std::string(what) + ": non-finite negative score");
}

}  // namespace

double eer(const ScorePairs& scores) {
    check_scores(scores, "eer");
    std::vector<double> pos = scores.positives;
    std::vector<double> neg = scores.negatives;
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());

    std::vector<double> thresholds;
    thresholds.reserve(pos.size() + neg.size() + 1);
    thresholds.insert(thresholds.end(), pos.begin(), pos.end());
    thresholds.insert(thresholds.end(), neg.begin(), neg.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds.push_back(thresholds.back() + 1.0);  // sentinel past every score

    const double p = static_cast<double>(pos.size());
    const double n = static_cast<double>(neg.size());
    auto fnr_at = [&](double t) {
        const auto below = std::lower_bound(pos.begin(), pos.end(), t) - pos.begin();
        return static_cast<double>(pos.size() - static_cast<std::size_t>(below)) / p;
    };
    auto fpr_at = [&](double t) {
        const auto below = std::lower_bound(neg.begin(), neg.end(), t) - neg.begin();
        return static_cast<double>(below) / n;
    };

    // FNR - FPR is non-increasing across the sweep: starts at FNR(min) >= 0
    // and ends at -1 past the maximum.
    double prev_fnr = fnr_at(thresholds.front());
    double prev_fpr = fpr_at(thresholds.front());
    if (prev_fnr == prev_fpr) return prev_fnr;
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        const double fnr = fnr_at(thresholds[i]);
        const double fpr = fpr_at(thresholds[i]);
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
    return 0.0;  // unreachable: the sentinel forces a crossing
}

double roc_auc(const ScorePairs& scores) {
    check_scores(scores, "roc_auc");
    std::vector<double> neg = scores.negatives;
    std::sort(neg.begin(), neg.end());
    double favorable = 0.0;
    for (double p : scores.positives) {
        const auto lo = std::lower_bound(neg.begin(), neg.end(), p) - neg.begin();
        const auto hi = std::upper_bound(neg.begin(), neg.end(), p) - neg.begin();
        favorable += static_cast<double>(neg.size() - static_cast<std::size_t>(hi));  // strictly larger
        favorable += 0.5 * static_cast<double>(hi - lo);                              // ties
    }
    return favorable /
           (static_cast<double>(scores.positives.size()) * static_cast<double>(scores.negatives.size()));
}

namespace {

struct ClusterStats {
    long size = 0;
    long max_count = 0;
    double entropy_contrib = 0.0;  // n_c * entropy_c, base 2
};

ClusterStats stats_of(const std::map<std::string, long>& counts) {
    ClusterStats s;
    for (const auto& [label, c] : counts) {
        s.size += c;
        s.max_count = std::max(s.max_count, c);
    }
    for (const auto& [label, c] : counts) {
        if (c == 0) continue;
        const double frac = static_cast<double>(c) / static_cast<double>(s.size);
        s.entropy_contrib -= static_cast<double>(c) * std::log2(frac);
    }
    // n_c * entropy_c = -sum_i n_i log2(n_i/n_c); exactly 0 for a pure cluster
    if (counts.size() == 1) s.entropy_contrib = 0.0;
    return s;
}

std::vector<std::map<std::string, long>> count_partition(const LabeledPartition& partition,
                                                         const char* what) {
    if (partition.empty()) throw EmptyPartition(std::string(what) + ": no clusters");
    std::vector<std::map<std::string, long>> counts;
    counts.reserve(partition.size());
    for (const auto& cluster : partition) {
        if (cluster.empty()) throw EmptyPartition(std::string(what) + ": empty cluster");
        std::map<std::string, long> c;
        for (const std::string& label : cluster) ++c[label];
        counts.push_back(std::move(c));
    }
    return counts;
}

}  // namespace

double wcp(const LabeledPartition& partition) {
    const auto counts = count_partition(partition, "wcp");
    long total = 0, total_max = 0;
    for (const auto& c : counts) {
        const ClusterStats s = stats_of(c);
        total += s.size;
        total_max += s.max_count;
    }
    return static_cast<double>(total_max) / static_cast<double>(total);
}

double wce(const LabeledPartition& partition) {
    const auto counts = count_partition(partition, "wce");
    long total = 0;
    double sum = 0.0;
    for (const auto& c : counts) {
        const ClusterStats s = stats_of(c);
        total += s.size;
        sum += s.entropy_contrib;
    }
    return sum / static_cast<double>(total);
}

long oci_k(const LabeledPartition& partition) {
    const auto counts = count_partition(partition, "oci_k");
    long clicks = 0;
    for (const auto& c : counts) {
        const ClusterStats s = stats_of(c);
        clicks += 1 + (s.size - s.max_count);
    }
    return clicks;
}

double prec_at_k(const std::vector<RetrievalQuery>& queries, int k, bool strict_precision) {
    if (k < 1 || k > 10) throw InvalidConfig("prec_at_k: K must be in [1, 10]");
    if (queries.empty()) throw EmptyScores("prec_at_k: no queries");
    double sum = 0.0;
    for (const RetrievalQuery& q : queries) {
        if (q.distractors.size() != 9)
            throw BadGallerySize("prec_at_k: gallery must hold exactly 1 correct + 9 distractors");
        const double correct_dist = pairwise_distance(q.query, q.correct);
        int rank = 1;
        for (const Vec& d : q.distractors)
            if (pairwise_distance(q.query, d) <= correct_dist) ++rank;  // ties: correct loses
        const bool hit = rank <= k;
        sum += strict_precision ? (hit ? 1.0 / static_cast<double>(k) : 0.0) : (hit ? 1.0 : 0.0);
    }
    return sum / static_cast<double>(queries.size());
}

ClusteringCurve clustering_curve(const MergeTrace& trace, const std::vector<std::string>& labels,
                                 int ideal_nclusters) {
    const int n = trace.num_leaves;
    if (static_cast<int>(labels.size()) != n)
        throw LabelMismatch("clustering_curve: " + std::to_string(labels.size()) + " labels for " +
                            std::to_string(n) + " leaves");
    if (n < 1) throw EmptyPartition("clustering_curve: empty trace");
    if (ideal_nclusters < 1 || ideal_nclusters > n)
        throw InvalidConfig("clustering_curve: ideal cluster count out of range");

    std::vector<std::map<std::string, long>> counts(static_cast<std::size_t>(2 * n - 1));
    std::vector<ClusterStats> stats(counts.size());
    std::vector<bool> alive(counts.size(), false);
    for (int i = 0; i < n; ++i) {
        counts[static_cast<std::size_t>(i)][labels[static_cast<std::size_t>(i)]] = 1;
        stats[static_cast<std::size_t>(i)] = {1, 1, 0.0};
        alive[static_cast<std::size_t>(i)] = true;
    }

    ClusteringCurve curve;
    curve.ideal_nclusters = ideal_nclusters;
    auto emit = [&](int live_clusters) {
        long total_max = 0;
        double entropy_sum = 0.0;
        for (std::size_t c = 0; c < stats.size(); ++c) {
            if (!alive[c]) continue;
            total_max += stats[c].max_count;
            entropy_sum += stats[c].entropy_contrib;
        }
        CurvePoint pt;
        pt.num_clusters = live_clusters;
        pt.wcp = static_cast<double>(total_max) / static_cast<double>(n);
        pt.wce = entropy_sum / static_cast<double>(n);
        pt.oci_k = live_clusters + (n - total_max);
        curve.points.push_back(pt);
    };

    emit(n);
    int live = n;
    for (const MergeEvent& m : trace.merges) {
        const auto left = static_cast<std::size_t>(m.left);
        const auto right = static_cast<std::size_t>(m.right);
        const auto merged = static_cast<std::size_t>(m.merged);
        if (merged >= counts.size() || left >= merged || right >= merged || !alive[left] || !alive[right])
            throw IndexOutOfRange("clustering_curve: malformed merge trace");
        counts[merged] = counts[left];
        for (const auto& [label, c] : counts[right]) counts[merged][label] += c;
        stats[merged] = stats_of(counts[merged]);
        alive[left] = alive[right] = false;
        alive[merged] = true;
        --live;
        emit(live);
    }

    curve.min_ocik = curve.points.front().oci_k;
    curve.min_ocik_nclusters = curve.points.front().num_clusters;
    for (const CurvePoint& pt : curve.points) {
        if (pt.oci_k < curve.min_ocik) {
            curve.min_ocik = pt.oci_k;
            curve.min_ocik_nclusters = pt.num_clusters;
        }
    }
    curve.ocik_at_ideal = curve.points[static_cast<std::size_t>(n - ideal_nclusters)].oci_k;
    return curve;
}

}  // namespace xmodal
