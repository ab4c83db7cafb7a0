#include "phough/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phough {

namespace {

// Nonzero bins ordered by count descending, ties by row-major index.
std::vector<std::pair<std::uint32_t, std::size_t>> ranked_bins(const Accumulator& acc) {
    std::vector<std::pair<std::uint32_t, std::size_t>> bins;
    for (std::size_t i = 0; i < acc.counts.size(); ++i) {
        if (acc.counts[i] > 0) bins.emplace_back(acc.counts[i], i);
    }
    std::sort(bins.begin(), bins.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    return bins;
}

}  // namespace

LineParams Accumulator::bin_center(int ri, int ti) const {
    const double dr = 2.0 * r_max / r_bins;
    const double dt = kPi / theta_bins;
    return {-r_max + (ri + 0.5) * dr, (ti + 0.5) * dt};
}

Accumulator accumulate(std::span<const Point> points, int r_bins, int theta_bins, double r_max) {
    if (r_bins < 1 || theta_bins < 1) {
        throw std::invalid_argument("accumulator needs at least one bin per axis");
    }
    if (!std::isfinite(r_max) || !(r_max > 0.0)) {
        throw std::invalid_argument("r_max must be positive and finite");
    }
    for (const Point& p : points) {
        if (norm(p) > r_max) {
            throw std::invalid_argument("r_max must cover the largest point norm");
        }
    }
    Accumulator acc;
    acc.r_bins = r_bins;
    acc.theta_bins = theta_bins;
    acc.r_max = r_max;
    acc.counts.assign(static_cast<std::size_t>(r_bins) * theta_bins, 0);

    const double dt = kPi / theta_bins;
    const double inv_dr = r_bins / (2.0 * r_max);
    for (int ti = 0; ti < theta_bins; ++ti) {
        const double theta = (ti + 0.5) * dt;
        const double ct = std::cos(theta), st = std::sin(theta);
        for (const Point& p : points) {
            const double r = p.x * ct + p.y * st;
            int ri = static_cast<int>(std::floor((r + r_max) * inv_dr));
            if (ri == r_bins && r <= r_max) ri = r_bins - 1;  // top-row closed end
            if (ri < 0 || ri >= r_bins) continue;             // cannot occur when r_max covers P
            ++acc.counts[static_cast<std::size_t>(ri) * theta_bins + ti];
        }
    }
    return acc;
}

int vote_gap(const Accumulator& acc, int k) {
    if (k < 1) throw std::invalid_argument("vote gap requires k >= 1");
    const auto bins = ranked_bins(acc);
    if (bins.size() < static_cast<std::size_t>(k) + 1) {
        throw std::invalid_argument("accumulator has fewer than k+1 nonzero bins");
    }
    return static_cast<int>(bins[k - 1].first) - static_cast<int>(bins[k].first);
}

std::vector<LineParams> top_bin_lines(const Accumulator& acc, int k) {
    if (k < 1) throw std::invalid_argument("top bins require k >= 1");
    const auto bins = ranked_bins(acc);
    if (bins.size() < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("accumulator has fewer than k nonzero bins");
    }
    std::vector<LineParams> lines;
    lines.reserve(k);
    for (int i = 0; i < k; ++i) {
        const int ri = static_cast<int>(bins[i].second) / acc.theta_bins;
        const int ti = static_cast<int>(bins[i].second) % acc.theta_bins;
        lines.push_back(acc.bin_center(ri, ti));
    }
    return lines;
}

}  // namespace phough
