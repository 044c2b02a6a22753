#pragma once

// Brute-force reference implementations used to check the library. These
// deliberately re-derive each result from its definition with straight
// nested loops and no shared code with the implementations under test.

#include <map>
#include <string>
#include <vector>

#include "xmodal/geometry.hpp"
#include "xmodal/mining.hpp"

namespace oracles {

using xmodal::CrossmodalTripletSet;
using xmodal::TripletSet;
using xmodal::Vec;

TripletSet within_modality(const std::vector<Vec>& emb, const std::vector<std::string>& ids,
                           double alpha, bool use_hard, bool use_semihard);

CrossmodalTripletSet target_set(const std::vector<Vec>& audio_emb,
                                const std::vector<std::string>& audio_ids,
                                const std::vector<Vec>& visual_emb,
                                const std::vector<std::string>& visual_ids, double alpha);

TripletSet relative_set(const std::vector<Vec>& audio_emb, const std::vector<std::string>& audio_ids,
                        const std::map<std::string, Vec>& centroids, double alpha);

TripletSet structure_set(const std::vector<Vec>& audio_emb, const std::vector<std::string>& audio_ids,
                         const std::map<std::string, int>& cluster_of, double alpha, bool literal);

// threshold-sweep EER over brute-force counted rates
double eer(const std::vector<double>& positives, const std::vector<double>& negatives);

// all-pairs AUC, ties one half
double auc(const std::vector<double>& positives, const std::vector<double>& negatives);

// exact k-means optimum by enumerating every assignment (tiny instances only)
double best_kmeans_inertia(const std::vector<Vec>& points, int k);

}  // namespace oracles
