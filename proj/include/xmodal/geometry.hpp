#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xmodal/errors.hpp"

namespace xmodal {

using Vec = std::vector<double>;

enum class Modality : std::uint8_t { Audio = 0, Visual = 1 };

inline const char* to_string(Modality m) { return m == Modality::Audio ? "audio" : "visual"; }

// Index triple into one embedding list. Anchor and positive share an
// identity, the negative does not.
struct Triplet {
    int anchor = 0;
    int positive = 0;
    int negative = 0;
    auto operator<=>(const Triplet&) const = default;
};
using TripletSet = std::vector<Triplet>;

// Triple whose members each carry a modality tag selecting the audio or the
// visual embedding list.
struct CrossmodalTriplet {
    Modality anchor_mod = Modality::Audio;
    int anchor = 0;
    Modality positive_mod = Modality::Audio;
    int positive = 0;
    Modality negative_mod = Modality::Audio;
    int negative = 0;
    auto operator<=>(const CrossmodalTriplet&) const = default;
};
using CrossmodalTripletSet = std::vector<CrossmodalTriplet>;

struct LossConfig {
    double margin = 0.2;  // alpha, shared by every loss term
    double lambda = 1.0;  // weight of the transfer term
    std::optional<double> transfer_margin;  // per-term override of alpha

    double effective_transfer_margin() const { return transfer_margin.value_or(margin); }
};

double norm(const Vec& v);

// Projects v onto the unit hypersphere. Throws ZeroVector when the norm is
// below 1e-12 (degenerate encoder output).
Vec l2_normalize(const Vec& v);

// Euclidean distance between two embeddings of equal dimension.
double pairwise_distance(const Vec& e1, const Vec& e2);

// max(0, d(a,p) - d(a,n) + alpha)
double triplet_hinge(const Vec& anchor, const Vec& positive, const Vec& negative, double alpha);

// Mean hinge over the set; 0 for an empty set.
double mean_triplet_loss(const std::vector<Vec>& embeddings, const TripletSet& triples, double alpha);

// Crossmodal variant: each member picks its embedding list by modality tag.
double mean_triplet_loss(const std::vector<Vec>& audio, const std::vector<Vec>& visual,
                         const CrossmodalTripletSet& triples, double alpha);

inline double combined_loss(double primary_loss, double transfer_loss, double lambda) {
    return primary_loss + lambda * transfer_loss;
}

// Component-wise mean of one identity's embeddings. Not renormalized: the
// mean of unit vectors generally lies inside the sphere.
Vec identity_centroid(const std::vector<Vec>& embeddings);

// Per-identity centroids for a full embedded sample list; optionally pushed
// back onto the sphere (off by default).
std::map<std::string, Vec> centroids_by_identity(const std::vector<Vec>& embeddings,
                                                 const std::vector<std::string>& identities,
                                                 bool renormalize = false);

}  // namespace xmodal
