#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "phough/lipschitz.hpp"

namespace phough {

struct ApproxConfig {
    // Sup-norm budget for the piecewise-constant approximation, in the score
    // units of the chosen normalization mode.
    double epsilon = 0.02;
    // Guard rails: cells that still fail the stopping predicate at max_depth
    // (or below min_cell_diameter) are emitted flagged rather than split.
    int max_depth = 30;
    double min_cell_diameter = 1e-12;
    // Replace the box-local bound by the uniform global bound (coarser but
    // cheaper to evaluate; useful for comparisons).
    bool use_global_lipschitz = false;
};

// Leaf of the quad-tree subdivision. The integer coordinates (depth, ix, iy)
// place the box on the dyadic grid of the domain, which makes adjacency and
// point location exact.
struct Cell {
    ParamBox box;
    double value = 0.0;
    std::uint32_t id = 0;
    std::uint32_t ix = 0;
    std::uint32_t iy = 0;
    std::uint8_t depth = 0;
    bool guard_stopped = false;
};

// Piecewise-constant certified approximation of the score over the strip
// [-r0, r0] x [0, pi]; every leaf satisfies |score - value| <= epsilon on its
// closed box, and the score is <= epsilon outside the strip.
struct CellField {
    std::vector<Cell> cells;
    ParamBox domain{};
    double r0 = 0.0;
    double epsilon = 0.0;
    NormalizationMode mode = NormalizationMode::Mean;
    int max_depth_seen = 0;
    bool truncated = false;  // some cell was guard-stopped
};

// Smallest strip half-width 1 + kappa^{-1}(epsilon) outside of which the
// score provably stays below epsilon (cloud normalized to the unit disk).
double initial_r0(const PointCloud& cloud, const KernelSpec& k, double epsilon,
                  NormalizationMode mode = NormalizationMode::Mean);

// Breadth-first quad-tree refinement: a box becomes a leaf once
// lambda(box) * diameter(box) / 2 <= epsilon, with lambda the box-local (or
// global) Lipschitz bound; its value is the score at the box midpoint.
// Ids are dense and assigned in finalization order, so identical inputs
// produce identical fields.
CellField build_approximation(const PointCloud& cloud, const KernelSpec& k,
                              const ApproxConfig& cfg,
                              NormalizationMode mode = NormalizationMode::Mean);

// Leaf whose closed box contains (r, theta); ties on shared boundaries go to
// the smallest id. Returns nullptr outside the domain. Linear scan.
const Cell* locate(const CellField& field, double r, double theta);

// Hash-grid index over (depth, ix, iy) for repeated point location in the
// same field; agrees with locate() everywhere.
class CellLocator {
public:
    explicit CellLocator(const CellField& field);
    const Cell* locate(double r, double theta) const;

private:
    const CellField* field_;
    int max_depth_;
    std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

}  // namespace phough
