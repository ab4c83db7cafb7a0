#include "phough/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace phough {

namespace {

void require_extent(double extent) {
    if (!std::isfinite(extent) || !(extent > 0.0)) {
        throw std::invalid_argument("extent must be positive and finite");
    }
}

}  // namespace

std::optional<std::pair<Point, Point>> clip_line_to_square(const LineParams& lp, double extent) {
    require_extent(extent);
    const LineParams c = canonicalize(lp);
    const double ct = std::cos(c.theta), st = std::sin(c.theta);
    // Anchor r*(ct, st) plus the unit direction (-st, ct); Liang-Barsky clip
    // of the parameter t against both slabs.
    const Point anchor{c.r * ct, c.r * st};
    const double dir_x = -st, dir_y = ct;
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    const double pos[2] = {anchor.x, anchor.y};
    const double dir[2] = {dir_x, dir_y};
    for (int axis = 0; axis < 2; ++axis) {
        if (std::abs(dir[axis]) < 1e-15) {
            if (pos[axis] < 0.0 || pos[axis] > extent) return std::nullopt;
            continue;
        }
        double ta = (0.0 - pos[axis]) / dir[axis];
        double tb = (extent - pos[axis]) / dir[axis];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (!(t0 < t1)) return std::nullopt;
    return std::make_pair(Point{anchor.x + t0 * dir_x, anchor.y + t0 * dir_y},
                          Point{anchor.x + t1 * dir_x, anchor.y + t1 * dir_y});
}

std::vector<Point> sample_line(const LineSpec& spec, double extent, Rng& rng) {
    require_extent(extent);
    if (spec.n_points < 1) {
        throw std::invalid_argument("line must carry at least one point");
    }
    if (spec.noise_halfwidth < 0.0 || !std::isfinite(spec.noise_halfwidth)) {
        throw std::invalid_argument("noise halfwidth must be non-negative and finite");
    }
    const auto chord = clip_line_to_square(spec.params, extent);
    if (!chord) {
        throw std::invalid_argument("line misses the extent");
    }
    const LineParams c = canonicalize(spec.params);
    const double nx = std::cos(c.theta), ny = std::sin(c.theta);
    const auto& [a, b] = *chord;
    std::vector<Point> points;
    points.reserve(spec.n_points);
    for (int i = 0; i < spec.n_points; ++i) {
        const double t = rng.unit();
        Point p{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        if (spec.noise_halfwidth > 0.0) {
            double u;
            do {
                u = rng.uniform(-spec.noise_halfwidth, spec.noise_halfwidth);
            } while (u <= -spec.noise_halfwidth);  // keep the support open
            p.x += u * nx;
            p.y += u * ny;
        }
        points.push_back(p);
    }
    return points;
}

Scene gen_scene(const std::vector<LineSpec>& specs, double extent, std::uint64_t seed) {
    require_extent(extent);
    if (specs.empty()) {
        throw std::invalid_argument("scene needs at least one line");
    }
    Scene scene;
    scene.truth = specs;
    scene.extent = extent;
    scene.seed = seed;
    Rng rng(seed);
    for (const LineSpec& spec : specs) {
        const auto pts = sample_line(spec, extent, rng);
        scene.points.insert(scene.points.end(), pts.begin(), pts.end());
    }
    return scene;
}

LineSpec random_line_spec(double extent, int n_points, double noise_halfwidth, Rng& rng) {
    require_extent(extent);
    if (n_points < 1) {
        throw std::invalid_argument("line must carry at least one point");
    }
    // Require the chord to hold the points at reasonable spacing and to span
    // most of the frame; corner-grazing segments concentrate the points and
    // make the trial geometry degenerate.
    const double min_chord = std::max(0.5 * n_points, 0.75 * extent);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const double theta = rng.uniform(0.0, kPi);
        // Offsets of lines meeting the square: r between the extreme corner
        // projections onto the normal (cos theta, sin theta).
        const double ct = std::cos(theta), st = std::sin(theta);
        double r_min = 0.0, r_max = 0.0;
        for (const double cx : {0.0, extent}) {
            for (const double cy : {0.0, extent}) {
                const double proj = cx * ct + cy * st;
                r_min = std::min(r_min, proj);
                r_max = std::max(r_max, proj);
            }
        }
        const double r = rng.uniform(r_min, r_max);
        const auto chord = clip_line_to_square({r, theta}, extent);
        if (!chord) continue;
        const double len = std::hypot(chord->second.x - chord->first.x,
                                      chord->second.y - chord->first.y);
        if (len < min_chord) continue;
        return LineSpec{{r, theta}, n_points, noise_halfwidth};
    }
    throw std::runtime_error("failed to draw a line with an adequate chord");
}

Scene gen_random_scene(const std::vector<int>& points_per_line, double noise_halfwidth,
                       double extent, std::uint64_t seed) {
    if (points_per_line.empty()) {
        throw std::invalid_argument("scene needs at least one line");
    }
    Rng rng(seed);
    std::vector<LineSpec> specs;
    specs.reserve(points_per_line.size());
    for (const int n : points_per_line) {
        specs.push_back(random_line_spec(extent, n, noise_halfwidth, rng));
    }
    // Re-seed so point sampling is decoupled from how many draws the
    // rejection loop consumed.
    Scene scene = gen_scene(specs, extent, substream_seed(seed, 0x5ce11e));
    scene.seed = seed;
    return scene;
}

Scene demo_three_lines(std::uint64_t seed) {
    const std::vector<LineSpec> specs = {
        {{10.0, 0.3}, 18, 0.5},
        {{22.0, 1.8}, 12, 0.5},
        {{-5.0, 2.6}, 8, 0.5},
    };
    return gen_scene(specs, 32.0, seed);
}

}  // namespace phough
