// Core value types: points, clouds, filter parameters, and the kept/outlier
// partition every filter in the toolkit produces. All types are plain values,
// immutable by convention after construction, and safe to share across
// threads.

#ifndef DMNR_TYPES_HPP
#define DMNR_TYPES_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dmnr/errors.hpp"

namespace dmnr {

// One LiDAR return. Coordinates in meters, intensity exactly as stored in
// the source file (datasets disagree on scale; see load_points' rescale).
struct Point {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double intensity = 0.0;

    bool is_finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z) &&
               std::isfinite(intensity);
    }
};

// Euclidean distance from the sensor origin.
inline double sensor_distance(const Point& p) {
    return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
}

// One frame. Index n identifies the same point across every operation on
// the frame; labels, when present, are parallel to points.
struct PointCloud {
    std::vector<Point> points;
    std::vector<std::uint32_t> labels;  // empty means "no ground truth"

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_labels() const { return !labels.empty(); }

    void check_labels() const {
        if (has_labels() && labels.size() != points.size()) {
            throw LengthMismatchError(
                "label count " + std::to_string(labels.size()) +
                " does not match point count " + std::to_string(points.size()));
        }
    }
};

enum class HeightMode : std::uint8_t {
    Adaptive,  // h1, h2 derived per scan from the point distribution
    Fixed,     // h1, h2 taken from DmnrParams::fixed_h1 / fixed_h2
};

// Filter parameters. Defaults are the values used for all reported
// experiments: K=10, k1=0.015, k2=0.055, k3=100, h=5.
struct DmnrParams {
    int k_neighbors = 10;   // K: neighbor count for local average distance
    double k1 = 0.015;      // aggressiveness
    double k2 = 0.055;      // range aggressiveness, 1/m
    double k3 = 100.0;      // intensity weight
    int rescue_clusters = 5;  // h: clusters eligible for the DMNR-H rescue

    HeightMode height_mode = HeightMode::Adaptive;
    double fixed_h1 = 100.0;  // used when height_mode == Fixed
    double fixed_h2 = -5.0;
};

enum class Verdict : std::uint8_t {
    Kept = 0,
    Outlier = 1,
};

// Which stage of the pipeline decided a point's verdict.
enum class StageTag : std::uint8_t {
    HeightRetained = 0,   // stage 1: z above the height threshold
    DensityRetained = 1,  // stage 2: local average distance under T
    DensityRejected = 2,  // stage 2: rejected
    Rescued = 3,          // DMNR-H: returned from O to F by clustering
};

// Filter output: a total split of the frame into kept set F and outlier
// set O, with a per-point tag recording the deciding stage.
struct Partition {
    std::vector<Verdict> verdicts;
    std::vector<StageTag> tags;

    std::size_t size() const { return verdicts.size(); }

    bool kept(std::size_t n) const { return verdicts[n] == Verdict::Kept; }

    std::size_t kept_count() const {
        std::size_t c = 0;
        for (Verdict v : verdicts) c += (v == Verdict::Kept) ? 1 : 0;
        return c;
    }

    std::size_t outlier_count() const { return verdicts.size() - kept_count(); }

    void check_covers(std::size_t n_points) const {
        if (verdicts.size() != n_points || tags.size() != n_points) {
            throw LengthMismatchError(
                "partition covers " + std::to_string(verdicts.size()) +
                " points, cloud has " + std::to_string(n_points));
        }
    }
};

}  // namespace dmnr

#endif  // DMNR_TYPES_HPP
