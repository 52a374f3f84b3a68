// Local average distance ad_n (mean distance to the K nearest other points)
// and the frame-global mean mu. Despite the usual "density" phrasing, both
// are distances in meters: smaller means denser.

#ifndef DMNR_DENSITY_HPP
#define DMNR_DENSITY_HPP

#include <cstddef>
#include <vector>

#include "dmnr/errors.hpp"
#include "dmnr/kdtree.hpp"

namespace dmnr {

struct DensityProfile {
    std::vector<double> ad;  // per-point local average distance, meters
    double mu = 0.0;         // arithmetic mean of ad, meters
};

// Mean Euclidean distance from a point to its K nearest OTHER points.
// When fewer than K others exist the mean runs over all of them, so tiny
// clouds remain filterable. Summation is in ascending distance order.
inline double knn_mean_distance(const KdTree& index, std::size_t query_index,
                                int k) {
    if (k < 1) {
        throw Error("knn_mean_distance: K must be >= 1");
    }
    const auto neighbors = index.knn(query_index, static_cast<std::size_t>(k));
    double sum = 0.0;
    for (const auto& nb : neighbors) sum += nb.distance;
    return sum / static_cast<double>(neighbors.size());
}

// ad for every point plus their mean mu. mu is summed in index order no
// matter how the per-point queries are scheduled, so the result is
// deterministic.
inline DensityProfile density_profile(const KdTree& index, int k) {
    if (index.size() < 2) {
        throw EmptyNeighborhoodError(
            "density_profile: need at least 2 points");
    }
    DensityProfile profile;
    profile.ad.resize(index.size());
    for (std::size_t n = 0; n < index.size(); ++n) {
        profile.ad[n] = knn_mean_distance(index, n, k);
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < index.size(); ++n) {
        sum += profile.ad[n];
    }
    profile.mu = sum / static_cast<double>(index.size());
    return profile;
}

}  // namespace dmnr

#endif  // DMNR_DENSITY_HPP
