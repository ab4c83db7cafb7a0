#include "phough/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace phough {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

}  // namespace

double norm(const Point& p) { return std::hypot(p.x, p.y); }

KernelSpec::KernelSpec(KernelKind kind_, double sigma_) : kind(kind_), sigma(sigma_) {
    if (!std::isfinite(sigma) || !(sigma > 0.0)) {
        throw std::invalid_argument("kernel sigma must be positive and finite");
    }
}

LineParams canonicalize(const LineParams& lp) {
    require_finite(lp.r, "r");
    require_finite(lp.theta, "theta");
    double theta = std::fmod(lp.theta, 2.0 * kPi);
    if (theta < 0.0) theta += 2.0 * kPi;
    double r = lp.r;
    // After the wrap theta lies in [0, 2*pi]; the endpoint itself can occur
    // through rounding, hence the second reduction step.
    for (int pass = 0; pass < 2 && theta >= kPi; ++pass) {
        theta -= kPi;
        r = -r;
    }
    return {r, theta};
}

double point_line_distance(const Point& p, const LineParams& lp) {
    require_finite(p.x, "p.x");
    require_finite(p.y, "p.y");
    require_finite(lp.r, "r");
    require_finite(lp.theta, "theta");
    return std::abs(lp.r - p.x * std::cos(lp.theta) - p.y * std::sin(lp.theta));
}

double sinusoid(const Point& p, double theta) {
    return p.x * std::cos(theta) + p.y * std::sin(theta);
}

double kernel_eval(const KernelSpec& k, double x) {
    if (!(x >= 0.0)) {  // also rejects NaN
        throw std::invalid_argument("kernel argument must be non-negative");
    }
    switch (k.kind) {
        case KernelKind::Hat:
            return std::max(0.0, 1.0 - x / k.sigma);
        case KernelKind::Rbf: {
            const double z = x / k.sigma;
            return std::exp(-0.5 * z * z);
        }
    }
    return 0.0;
}

double kernel_lipschitz(const KernelSpec& k) {
    switch (k.kind) {
        case KernelKind::Hat:
            return 1.0 / k.sigma;
        case KernelKind::Rbf:
            // |kappa'| peaks at x = sigma with value 1/(sigma*sqrt(e)).
            return 1.0 / (k.sigma * std::sqrt(std::exp(1.0)));
    }
    return 0.0;
}

Point Frame::to_normalized(const Point& p) const {
    return {(p.x - center.x) / scale, (p.y - center.y) / scale};
}

Point Frame::to_raw(const Point& p) const {
    return {center.x + scale * p.x, center.y + scale * p.y};
}

LineParams Frame::line_to_normalized(const LineParams& lp) const {
    const LineParams c = canonicalize(lp);
    const double shift = center.x * std::cos(c.theta) + center.y * std::sin(c.theta);
    return {(c.r - shift) / scale, c.theta};
}

LineParams Frame::line_to_raw(const LineParams& lp) const {
    const LineParams c = canonicalize(lp);
    const double shift = center.x * std::cos(c.theta) + center.y * std::sin(c.theta);
    return {scale * c.r + shift, c.theta};
}

PointCloud PointCloud::normalize(std::span<const Point> raw) {
    if (raw.empty()) {
        throw std::invalid_argument("point cloud must contain at least one point");
    }
    double min_x = std::numeric_limits<double>::infinity();
    double max_x = -min_x, min_y = min_x, max_y = -min_x;
    for (const Point& p : raw) {
        require_finite(p.x, "point x");
        require_finite(p.y, "point y");
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    const Point center{0.5 * (min_x + max_x), 0.5 * (min_y + max_y)};
    double radius = 0.0;
    for (const Point& p : raw) {
        radius = std::max(radius, std::hypot(p.x - center.x, p.y - center.y));
    }
    // Slight inflation keeps every normalized norm <= 1 despite rounding.
    const double scale = radius > 0.0 ? radius * (1.0 + 1e-12) : 1.0;

    PointCloud cloud;
    cloud.frame_ = Frame{scale, center};
    cloud.points_.reserve(raw.size());
    for (const Point& p : raw) {
        cloud.points_.push_back(cloud.frame_.to_normalized(p));
    }
    return cloud;
}

PointCloud PointCloud::from_normalized(std::vector<Point> points) {
    if (points.empty()) {
        throw std::invalid_argument("point cloud must contain at least one point");
    }
    for (const Point& p : points) {
        require_finite(p.x, "point x");
        require_finite(p.y, "point y");
        if (norm(p) > 1.0 + 1e-9) {
            throw std::invalid_argument("normalized points must lie in the closed unit disk");
        }
    }
    PointCloud cloud;
    cloud.points_ = std::move(points);
    return cloud;
}

double score(const PointCloud& cloud, const LineParams& lp, const ScoreConfig& cfg) {
    require_finite(lp.r, "r");
    require_finite(lp.theta, "theta");
    const double ct = std::cos(lp.theta);
    const double st = std::sin(lp.theta);
    double acc = 0.0;
    if (cfg.kernel.kind == KernelKind::Hat) {
        const double inv_sigma = 1.0 / cfg.kernel.sigma;
        for (const Point& p : cloud.points()) {
            const double d = std::abs(lp.r - p.x * ct - p.y * st);
            acc += std::max(0.0, 1.0 - d * inv_sigma);
        }
    } else {
        const double inv_sigma = 1.0 / cfg.kernel.sigma;
        for (const Point& p : cloud.points()) {
            const double z = (lp.r - p.x * ct - p.y * st) * inv_sigma;
            acc += std::exp(-0.5 * z * z);
        }
    }
    if (cfg.mode == NormalizationMode::Mean) {
        acc /= static_cast<double>(cloud.size());
    }
    return acc;
}

}  // namespace phough
