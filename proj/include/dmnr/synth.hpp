// Deterministic synthetic outdoor scene with exact noise ground truth:
// a dense ground plane and wall clusters (clean) plus near-range,
// low-intensity airborne clutter (noise). Seeded generation is
// bit-reproducible: the engine is the standardized mt19937_64 and all
// variates are derived with explicit arithmetic, never through
// implementation-defined distributions.

#ifndef DMNR_SYNTH_HPP
#define DMNR_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "dmnr/errors.hpp"
#include "dmnr/types.hpp"

namespace dmnr {

struct SynthSpec {
    // clean geometry
    double ground_half_extent = 34.0;  // ground covers [-e, e]^2, meters
    double ground_spacing = 0.5;
    double ground_z = -1.8;  // sensor sits at the origin, above the ground

    struct Wall {
        double center_x = 0.0;
        double center_y = 0.0;
        double yaw = 0.0;  // in-plane direction of the wall face, radians
        double width = 10.0;
        double height = 3.0;
        double spacing = 0.5;
    };
    std::vector<Wall> walls;

    struct Pole {
        double x = 0.0;
        double y = 0.0;
        double height = 6.0;
        double spacing = 0.5;
    };
    std::vector<Pole> poles;  // far sparse verticals; also set the max range

    // airborne clutter
    double clutter_fraction = 0.05;  // of the FINAL total point count
    double clutter_min_range = 1.0;  // horizontal, meters
    double clutter_max_range = 8.0;
    double clutter_z_min = -1.0;
    double clutter_z_max = 2.0;
    double clutter_intensity_max = 0.002;  // low tail unless the toggle is on
    bool high_intensity_clutter = false;   // adversarial: clutter gets clean-range intensity

    double clean_intensity_min = 0.15;
    double clean_intensity_max = 0.60;

    double jitter = 0.05;  // position jitter on clean structure, meters
    std::uint64_t seed = 1;
};

// Default scene: ~20k points, four walls at 15-30 m, two far poles that fix
// the maximum range near 100 m, 5% clutter inside 8 m.
inline SynthSpec default_synth_spec() {
    SynthSpec spec;
    spec.walls = {
        {20.0, 5.0, 1.2, 12.0, 3.0, 0.5},
        {-18.0, 12.0, -0.4, 10.0, 2.5, 0.5},
        {6.0, -24.0, 0.3, 14.0, 3.0, 0.5},
        {-10.0, -15.0, 2.0, 8.0, 2.0, 0.5},
    };
    spec.poles = {
        {95.0, 20.0, 6.0, 0.5},
        {-80.0, -55.0, 5.0, 0.5},
    };
    return spec;
}

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Coordinates are snapped to float32 so that a write -> load round trip of
// generated scenes is bit-identical.
inline double snap(double v) { return static_cast<double>(static_cast<float>(v)); }

inline Point make_point(double x, double y, double z, double intensity) {
    return Point{snap(x), snap(y), snap(z), snap(intensity)};
}

}  // namespace detail

// Returns the scene and its noise mask (true = airborne clutter). Points are
// emitted clean structure first, clutter last; the mask is exact.
inline std::pair<PointCloud, std::vector<bool>> generate_synthetic(
    const SynthSpec& spec) {
    if (spec.ground_half_extent <= 0.0 || spec.ground_spacing <= 0.0) {
        throw InvalidSpecError("synth: ground extent and spacing must be > 0");
    }
    if (spec.clutter_fraction < 0.0 || spec.clutter_fraction >= 1.0) {
        throw InvalidSpecError("synth: clutter_fraction must be in [0, 1)");
    }
    if (spec.clutter_max_range <= spec.clutter_min_range ||
        spec.clutter_min_range < 0.0) {
        throw InvalidSpecError("synth: clutter range is empty");
    }
    if (spec.clutter_z_max < spec.clutter_z_min) {
        throw InvalidSpecError("synth: clutter z range is empty");
    }
    for (const auto& w : spec.walls) {
        if (w.width <= 0.0 || w.height <= 0.0 || w.spacing <= 0.0) {
            throw InvalidSpecError("synth: wall dimensions must be > 0");
        }
    }
    for (const auto& p : spec.poles) {
        if (p.height <= 0.0 || p.spacing <= 0.0) {
            throw InvalidSpecError("synth: pole dimensions must be > 0");
        }
    }

    std::mt19937_64 rng(spec.seed);
    PointCloud cloud;
    std::vector<bool> noise_mask;

    const auto clean_intensity = [&]() {
        return detail::uniform(rng, spec.clean_intensity_min,
                               spec.clean_intensity_max);
    };
    const auto emit_clean = [&](double x, double y, double z) {
        const double jx = detail::uniform(rng, -spec.jitter, spec.jitter);
        const double jy = detail::uniform(rng, -spec.jitter, spec.jitter);
        const double jz = detail::uniform(rng, -spec.jitter, spec.jitter);
        cloud.points.push_back(
            detail::make_point(x + jx, y + jy, z + jz, clean_intensity()));
        noise_mask.push_back(false);
    };

    // ground plane
    const auto steps =
        static_cast<long>(std::floor(spec.ground_half_extent / spec.ground_spacing));
    for (long ix = -steps; ix <= steps; ++ix) {
        for (long iy = -steps; iy <= steps; ++iy) {
            emit_clean(static_cast<double>(ix) * spec.ground_spacing,
                       static_cast<double>(iy) * spec.ground_spacing,
                       spec.ground_z);
        }
    }

    // walls: vertical grids of points rising from the ground
    for (const auto& w : spec.walls) {
        const double ux = std::cos(w.yaw);
        const double uy = std::sin(w.yaw);
        const auto nu = static_cast<long>(std::floor(w.width / w.spacing));
        const auto nz = static_cast<long>(std::floor(w.height / w.spacing));
        for (long iu = 0; iu <= nu; ++iu) {
            const double along =
                (static_cast<double>(iu) - static_cast<double>(nu) / 2.0) * w.spacing;
            for (long iz = 0; iz <= nz; ++iz) {
                emit_clean(w.center_x + along * ux, w.center_y + along * uy,
                           spec.ground_z + static_cast<double>(iz) * w.spacing);
            }
        }
    }

    // far poles
    for (const auto& p : spec.poles) {
        const auto nz = static_cast<long>(std::floor(p.height / p.spacing));
        for (long iz = 0; iz <= nz; ++iz) {
            emit_clean(p.x, p.y, spec.ground_z + static_cast<double>(iz) * p.spacing);
        }
    }

    // clutter count m chosen so that m == floor(fraction * final_total)
    const std::size_t clean_count = cloud.size();
    const double f = spec.clutter_fraction;
    std::size_t m = 0;
    if (f > 0.0) {
        m = static_cast<std::size_t>(
            std::floor(static_cast<double>(clean_count) * f / (1.0 - f)));
        while (static_cast<double>(m + 1) <=
               f * static_cast<double>(clean_count + m + 1)) {
            ++m;
        }
        while (m > 0 &&
               static_cast<double>(m) > f * static_cast<double>(clean_count + m)) {
            --m;
        }
    }

    for (std::size_t i = 0; i < m; ++i) {
        double x = 0.0, y = 0.0;
        // uniform over the horizontal annulus, by rejection
        for (;;) {
            x = detail::uniform(rng, -spec.clutter_max_range, spec.clutter_max_range);
            y = detail::uniform(rng, -spec.clutter_max_range, spec.clutter_max_range);
            const double r2 = x * x + y * y;
            if (r2 <= spec.clutter_max_range * spec.clutter_max_range &&
                r2 >= spec.clutter_min_range * spec.clutter_min_range) {
                break;
            }
        }
        const double z = detail::uniform(rng, spec.clutter_z_min, spec.clutter_z_max);
        const double intensity =
            spec.high_intensity_clutter
                ? detail::uniform(rng, spec.clean_intensity_min,
                                  spec.clean_intensity_max)
                : detail::uniform(rng, 0.0, spec.clutter_intensity_max);
        cloud.points.push_back(detail::make_point(x, y, z, intensity));
        noise_mask.push_back(true);
    }

    return {std::move(cloud), std::move(noise_mask)};
}

}  // namespace dmnr

#endif  // DMNR_SYNTH_HPP
