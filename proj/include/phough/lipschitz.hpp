#pragma once

#include <cmath>
#include <span>

#include "phough/geometry.hpp"

namespace phough {

// Axis-aligned box [r_lo, r_hi] x [theta_lo, theta_hi] in line-parameter space.
struct ParamBox {
    double r_lo = 0.0;
    double r_hi = 0.0;
    double theta_lo = 0.0;
    double theta_hi = 0.0;

    double r_mid() const { return 0.5 * (r_lo + r_hi); }
    double theta_mid() const { return 0.5 * (theta_lo + theta_hi); }
    double diameter() const { return std::hypot(r_hi - r_lo, theta_hi - theta_lo); }
    bool contains(double r, double theta) const {
        return r >= r_lo && r <= r_hi && theta >= theta_lo && theta <= theta_hi;
    }
    bool valid() const {
        return std::isfinite(r_lo) && std::isfinite(r_hi) && std::isfinite(theta_lo) &&
               std::isfinite(theta_hi) && r_lo < r_hi && theta_lo < theta_hi;
    }
};

// Gradient bound for the score of any cloud within `radius` of the origin:
// kernel_lipschitz(k) * sqrt(1 + radius^2). With unit-disk clouds this is
// sqrt(2) * kernel_lipschitz(k).
double global_lipschitz(const KernelSpec& k, double radius);

// Lipschitz constant of the kernel restricted to arguments >= delta.
// Non-increasing in delta; equals kernel_lipschitz(k) at delta = 0.
double kernel_tail_lipschitz(const KernelSpec& k, double delta);

// Amplitude/phase form of a point's dual curve: r(theta) = A*cos(theta - phase).
// Precompute one per point when many boxes are tested against the same cloud.
struct DualCurve {
    double amplitude = 0.0;
    double phase = 0.0;

    DualCurve() = default;
    explicit DualCurve(const Point& p) : amplitude(std::hypot(p.x, p.y)), phase(std::atan2(p.y, p.x)) {}

    double eval(double theta) const { return amplitude * std::cos(theta - phase); }
};

// Minimum over theta in [theta_lo, theta_hi] of the vertical distance from
// the dual curve of p to the r-interval of the box; zero iff the curve meets
// the closed box. Evaluated exactly from the box ends and the single interior
// extremum of the curve.
double vertical_distance(const ParamBox& box, const Point& p);
double vertical_distance(const ParamBox& box, const DualCurve& curve);

// Box-local gradient bound for the score restricted to `box`:
//   sqrt(2)/|P| * sum_p kernel_tail_lipschitz(k, vertical_distance(box, p))
// (Sum mode omits the 1/|P|). Requires a normalized cloud; never exceeds the
// matching global bound, and shrinks as boxes move away from every curve.
double local_lipschitz(const ParamBox& box, const PointCloud& cloud, const KernelSpec& k,
                       NormalizationMode mode = NormalizationMode::Mean);
double local_lipschitz(const ParamBox& box, std::span<const DualCurve> curves, const KernelSpec& k,
                       NormalizationMode mode = NormalizationMode::Mean);

}  // namespace phough
