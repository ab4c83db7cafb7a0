#include "phough/lipschitz.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace phough {

double global_lipschitz(const KernelSpec& k, double radius) {
    if (!std::isfinite(radius) || radius < 0.0) {
        throw std::invalid_argument("cloud radius must be non-negative and finite");
    }
    return kernel_lipschitz(k) * std::sqrt(1.0 + radius * radius);
}

double kernel_tail_lipschitz(const KernelSpec& k, double delta) {
    if (!(delta >= 0.0)) {
        throw std::invalid_argument("tail offset must be non-negative");
    }
    switch (k.kind) {
        case KernelKind::Hat:
            return delta <= k.sigma ? 1.0 / k.sigma : 0.0;
        case KernelKind::Rbf: {
            if (delta <= k.sigma) return kernel_lipschitz(k);
            // |kappa'(x)| = (x/sigma^2) exp(-x^2/2sigma^2), decreasing past sigma.
            const double z = delta / k.sigma;
            return (delta / (k.sigma * k.sigma)) * std::exp(-0.5 * z * z);
        }
    }
    return 0.0;
}

double vertical_distance(const ParamBox& box, const Point& p) {
    return vertical_distance(box, DualCurve(p));
}

double vertical_distance(const ParamBox& box, const DualCurve& curve) {
    if (!box.valid()) {
        throw std::invalid_argument("parameter box is degenerate");
    }
    // Candidate angles: box ends plus the curve's single interior extremum
    // (extrema of A*cos(theta - phase) repeat with period pi, so a box with
    // theta-range inside [0, pi] sees at most one strictly inside).
    double cand[3];
    int n = 0;
    cand[n++] = box.theta_lo;
    double crit = std::fmod(curve.phase, kPi);
    if (crit < 0.0) crit += kPi;
    if (crit > box.theta_lo && crit < box.theta_hi) cand[n++] = crit;
    cand[n++] = box.theta_hi;

    // Between consecutive candidates the curve is monotone, so it meets the
    // r-interval iff some candidate value lies inside or two consecutive
    // candidates sit on opposite sides.
    double best = std::numeric_limits<double>::infinity();
    int prev_side = 0;
    for (int i = 0; i < n; ++i) {
        const double v = curve.eval(cand[i]);
        int side;
        double gap;
        if (v < box.r_lo) {
            side = -1;
            gap = box.r_lo - v;
        } else if (v > box.r_hi) {
            side = 1;
            gap = v - box.r_hi;
        } else {
            return 0.0;
        }
        if (i > 0 && side != prev_side) return 0.0;
        prev_side = side;
        best = std::min(best, gap);
    }
    return best;
}

double local_lipschitz(const ParamBox& box, const PointCloud& cloud, const KernelSpec& k,
                       NormalizationMode mode) {
    std::vector<DualCurve> curves;
    curves.reserve(cloud.size());
    for (const Point& p : cloud.points()) curves.emplace_back(p);
    return local_lipschitz(box, std::span<const DualCurve>(curves), k, mode);
}

double local_lipschitz(const ParamBox& box, std::span<const DualCurve> curves, const KernelSpec& k,
                       NormalizationMode mode) {
    if (curves.empty()) {
        throw std::invalid_argument("point cloud must contain at least one point");
    }
    double sum = 0.0;
    for (const DualCurve& c : curves) {
        sum += kernel_tail_lipschitz(k, vertical_distance(box, c));
    }
    const double bound = std::sqrt(2.0) * sum;
    return mode == NormalizationMode::Mean ? bound / static_cast<double>(curves.size()) : bound;
}

}  // namespace phough
