#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "phough/geometry.hpp"

namespace phough {

// Classical discretized Hough accumulator: r in [-r_max, r_max] split into
// r_bins rows, theta in [0, pi) split into theta_bins columns.
struct Accumulator {
    int r_bins = 0;
    int theta_bins = 0;
    double r_max = 0.0;
    std::vector<std::uint32_t> counts;  // row-major [r][theta]

    std::uint32_t at(int ri, int ti) const { return counts[ri * theta_bins + ti]; }
    // Line named by a bin: the bin-center parameters.
    LineParams bin_center(int ri, int ti) const;
};

// One vote per point per theta column, cast at the column center's r value.
// Requires r_max >= max ||p|| so no vote falls outside the grid.
Accumulator accumulate(std::span<const Point> points, int r_bins, int theta_bins, double r_max);

// Difference between the k-th and (k+1)-th largest bin counts (1-based k),
// over the nonzero bins ordered by count descending, ties by row-major bin
// index ascending. Errors if fewer than k+1 nonzero bins exist.
int vote_gap(const Accumulator& acc, int k);

// Bin-center lines of the k largest bins, in the same order.
std::vector<LineParams> top_bin_lines(const Accumulator& acc, int k);

}  // namespace phough
