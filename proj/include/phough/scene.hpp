#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "phough/geometry.hpp"
#include "phough/rng.hpp"

namespace phough {

struct LineSpec {
    LineParams params;            // ground-truth line
    int n_points = 0;
    double noise_halfwidth = 0.0; // orthogonal displacement drawn from (-w, w)
};

struct Scene {
    std::vector<Point> points;    // concatenated in truth order
    std::vector<LineSpec> truth;
    double extent = 0.0;          // square [0, extent]^2
    std::uint64_t seed = 0;
};

// Chord of the line inside the square [0, extent]^2, or nullopt if the line
// misses it.
std::optional<std::pair<Point, Point>> clip_line_to_square(const LineParams& lp, double extent);

// Points at uniformly random positions along the chord, displaced along the
// line normal by a uniform draw from (-noise_halfwidth, noise_halfwidth).
// Errors if the line misses the extent.
std::vector<Point> sample_line(const LineSpec& spec, double extent, Rng& rng);

Scene gen_scene(const std::vector<LineSpec>& specs, double extent, std::uint64_t seed);

// Random truth line: theta uniform in [0, pi), r uniform over offsets whose
// line crosses the extent, rejection-sampled until the chord is at least
// max(n_points / 2, 0.75 * extent) long (at most 1000 attempts), so the
// sampled points span the frame instead of piling up near a corner.
LineSpec random_line_spec(double extent, int n_points, double noise_halfwidth, Rng& rng);

Scene gen_random_scene(const std::vector<int>& points_per_line, double noise_halfwidth,
                       double extent, std::uint64_t seed);

// Fixed demo scene: three well-separated lines in a 32x32 extent with point
// densities 18, 12 and 8 and light orthogonal noise.
Scene demo_three_lines(std::uint64_t seed);

}  // namespace phough
