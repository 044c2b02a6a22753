#include "xmodal/geometry.hpp"

#include <cmath>

namespace xmodal {

double norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

Vec l2_normalize(const Vec& v) {
    if (v.empty()) throw ZeroVector("l2_normalize: empty vector");
    const double n = norm(v);
    if (n < 1e-12) throw ZeroVector("l2_normalize: vector norm below 1e-12");
    Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

double pairwise_distance(const Vec& e1, const Vec& e2) {
    if (e1.size() != e2.size())
        throw DimensionMismatch("pairwise_distance: " + std::to_string(e1.size()) + " vs " +
                                std::to_string(e2.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < e1.size(); ++i) {
        const double d = e1[i] - e2[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double triplet_hinge(const Vec& anchor, const Vec& positive, const Vec& negative, double alpha) {
    const double v = pairwise_distance(anchor, positive) - pairwise_distance(anchor, negative) + alpha;
    return v > 0.0 ? v : 0.0;
}

namespace {

const Vec& at_checked(const std::vector<Vec>& embeddings, int index, const char* what) {
    if (index < 0 || static_cast<std::size_t>(index) >= embeddings.size())
        throw IndexOutOfRange(std::string(what) + ": index " + std::to_string(index) + " out of range");
    return embeddings[static_cast<std::size_t>(index)];
}

}  // namespace

double mean_triplet_loss(const std::vector<Vec>& embeddings, const TripletSet& triples, double alpha) {
    if (triples.empty()) return 0.0;
    double sum = 0.0;
    for (const Triplet& t : triples) {
        sum += triplet_hinge(at_checked(embeddings, t.anchor, "mean_triplet_loss"),
                             at_checked(embeddings, t.positive, "mean_triplet_loss"),
                             at_checked(embeddings, t.negative, "mean_triplet_loss"), alpha);
    }
    return sum / static_cast<double>(triples.size());
}

double mean_triplet_loss(const std::vector<Vec>& audio, const std::vector<Vec>& visual,
                         const CrossmodalTripletSet& triples, double alpha) {
    if (triples.empty()) return 0.0;
    auto pick = [&](Modality m, int index) -> const Vec& {
        return at_checked(m == Modality::Audio ? audio : visual, index, "mean_triplet_loss");
    };
    double sum = 0.0;
    for (const CrossmodalTriplet& t : triples) {
        sum += triplet_hinge(pick(t.anchor_mod, t.anchor), pick(t.positive_mod, t.positive),
                             pick(t.negative_mod, t.negative), alpha);
    }
    return sum / static_cast<double>(triples.size());
}

Vec identity_centroid(const std::vector<Vec>& embeddings) {
    if (embeddings.empty()) throw EmptyIdentity("identity_centroid: no embeddings");
    const std::size_t dim = embeddings.front().size();
    Vec mean(dim, 0.0);
    for (const Vec& e : embeddings) {
        if (e.size() != dim) throw DimensionMismatch("identity_centroid: ragged embedding dims");
        for (std::size_t i = 0; i < dim; ++i) mean[i] += e[i];
    }
    for (double& x : mean) x /= static_cast<double>(embeddings.size());
    return mean;
}

std::map<std::string, Vec> centroids_by_identity(const std::vector<Vec>& embeddings,
                                                 const std::vector<std::string>& identities,
                                                 bool renormalize) {
    if (embeddings.size() != identities.size())
        throw DimensionMismatch("centroids_by_identity: embeddings/identities size mismatch");
    std::map<std::string, std::vector<Vec>> grouped;
    for (std::size_t i = 0; i < embeddings.size(); ++i) grouped[identities[i]].push_back(embeddings[i]);
    std::map<std::string, Vec> out;
    for (const auto& [identity, members] : grouped) {
        Vec c = identity_centroid(members);
        out[identity] = renormalize ? l2_normalize(c) : c;
    }
    return out;
}

}  // namespace xmodal
