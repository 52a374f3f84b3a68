// The DMNR filter: stage 1 retains points above a range-dependent height
// threshold H (sparse structure at altitude is real, not noise); stage 2
// keeps a point when its local average distance beats a dynamic threshold T
// combining range decay, exponential aggressiveness, and intensity. Plus the
// classic SOR/ROR baselines behind the same Partition interface.

#ifndef DMNR_FILTER_HPP
#define DMNR_FILTER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dmnr/density.hpp"
#include "dmnr/errors.hpp"
#include "dmnr/kdtree.hpp"
#include "dmnr/types.hpp"

namespace dmnr {

// Guard for the division in the height threshold; a return exactly at the
// sensor origin is physically meaningless but must not crash batch jobs.
inline constexpr double kMinHeightRange = 1e-6;

struct HeightParams {
    double h1 = 100.0;  // numerator constant, m^2/m
    double h2 = -5.0;   // offset constant, m
};

// Per-scan height constants. Adaptive derives them from the frame itself
// (h1 = max distance / 2, h2 = min height - 1); Fixed uses the configured
// constants.
inline HeightParams height_params(const PointCloud& cloud,
                                  const DmnrParams& params) {
    if (cloud.empty()) {
        throw EmptyCloudError("height_params: empty cloud");
    }
    if (params.height_mode == HeightMode::Fixed) {
        return HeightParams{params.fixed_h1, params.fixed_h2};
    }
    double max_d = 0.0;
    double min_z = cloud.points[0].z;
    for (const Point& p : cloud.points) {
        max_d = std::max(max_d, sensor_distance(p));
        min_z = std::min(min_z, p.z);
    }
    return HeightParams{max_d / 2.0, min_z - 1.0};
}

// H = h1 / d + h2, with d clamped away from zero.
inline double height_threshold(double d, const HeightParams& hp) {
    return hp.h1 / std::max(d, kMinHeightRange) + hp.h2;
}

// T = mu * (k1 * e^(k2 * d) + k3 * i) * d
inline double dynamic_threshold(double mu, double d, double intensity,
                                const DmnrParams& params) {
    return mu * (params.k1 * std::exp(params.k2 * d) + params.k3 * intensity) * d;
}

// Dynamic multi-threshold outlier removal. ad and mu are computed over ALL
// points first (including those stage 1 later retains); then per point:
// z > H keeps directly, otherwise ad < T keeps, otherwise outlier. Both
// comparisons are strict, so boundary-equal points fall through.
inline Partition dmnr(const PointCloud& cloud, const DmnrParams& params) {
    if (cloud.empty()) {
        throw EmptyCloudError("dmnr: empty cloud");
    }
    const KdTree index(cloud);
    const DensityProfile profile = density_profile(index, params.k_neighbors);
    const HeightParams hp = height_params(cloud, params);

    Partition out;
    out.verdicts.resize(cloud.size());
    out.tags.resize(cloud.size());
    for (std::size_t n = 0; n < cloud.size(); ++n) {
        const Point& p = cloud.points[n];
        const double d = sensor_distance(p);
        if (p.z > height_threshold(d, hp)) {
            out.verdicts[n] = Verdict::Kept;
            out.tags[n] = StageTag::HeightRetained;
        } else if (profile.ad[n] <
                   dynamic_threshold(profile.mu, d, p.intensity, params)) {
            out.verdicts[n] = Verdict::Kept;
            out.tags[n] = StageTag::DensityRetained;
        } else {
            out.verdicts[n] = Verdict::Outlier;
            out.tags[n] = StageTag::DensityRejected;
        }
    }
    return out;
}

// Statistical outlier removal: keep a point when its local average distance
// is within alpha population standard deviations of the frame mean.
inline Partition sor_baseline(const PointCloud& cloud, int k, double alpha) {
    if (cloud.empty()) {
        throw EmptyCloudError("sor: empty cloud");
    }
    const KdTree index(cloud);
    const DensityProfile profile = density_profile(index, k);

    double var = 0.0;
    for (double ad : profile.ad) {
        const double diff = ad - profile.mu;
        var += diff * diff;
    }
    var /= static_cast<double>(profile.ad.size());
    const double threshold = profile.mu + alpha * std::sqrt(var);

    Partition out;
    out.verdicts.resize(cloud.size());
    out.tags.resize(cloud.size());
    for (std::size_t n = 0; n < cloud.size(); ++n) {
        const bool keep = profile.ad[n] <= threshold;
        out.verdicts[n] = keep ? Verdict::Kept : Verdict::Outlier;
        out.tags[n] = keep ? StageTag::DensityRetained : StageTag::DensityRejected;
    }
    return out;
}

// Radius outlier removal: keep a point when at least min_neighbors other
// points lie within `radius` (inclusive).
inline Partition ror_baseline(const PointCloud& cloud, double radius,
                              std::size_t min_neighbors) {
    if (cloud.empty()) {
        throw EmptyCloudError("ror: empty cloud");
    }
    if (radius <= 0.0) {
        throw Error("ror: radius must be > 0");
    }
    const KdTree index(cloud);

    Partition out;
    out.verdicts.resize(cloud.size());
    out.tags.resize(cloud.size());
    for (std::size_t n = 0; n < cloud.size(); ++n) {
        const bool keep = min_neighbors == 0 ||
                          index.count_within(n, radius) >= min_neighbors;
        out.verdicts[n] = keep ? Verdict::Kept : Verdict::Outlier;
        out.tags[n] = keep ? StageTag::DensityRetained : StageTag::DensityRejected;
    }
    return out;
}

}  // namespace dmnr

#endif  // DMNR_FILTER_HPP
