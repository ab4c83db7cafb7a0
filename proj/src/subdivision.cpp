#include "phough/subdivision.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace phough {

namespace {

// Box of the dyadic grid cell (depth, ix, iy). (i * 2^-d) is exact, so two
// cells sharing a grid line compute bit-identical boundary coordinates.
ParamBox box_of(const ParamBox& domain, int depth, std::uint32_t ix, std::uint32_t iy) {
    const double inv = std::ldexp(1.0, -depth);
    const double w = domain.r_hi - domain.r_lo;
    const double h = domain.theta_hi - domain.theta_lo;
    return {domain.r_lo + w * (ix * inv), domain.r_lo + w * ((ix + 1) * inv),
            domain.theta_lo + h * (iy * inv), domain.theta_lo + h * ((iy + 1) * inv)};
}

// Linear index of node (depth, ix, iy) in a complete quad-tree; injective
// over all depths up to 30.
std::uint64_t grid_key(int depth, std::uint64_t ix, std::uint64_t iy) {
    const std::uint64_t level_base = ((1ull << (2 * depth)) - 1ull) / 3ull;
    return level_base + (iy << depth) + ix;
}

double score_range(const PointCloud& cloud, NormalizationMode mode) {
    return mode == NormalizationMode::Sum ? static_cast<double>(cloud.size()) : 1.0;
}

void require_normalized(const PointCloud& cloud) {
    for (const Point& p : cloud.points()) {
        if (norm(p) > 1.0 + 1e-9) {
            throw std::invalid_argument("cloud must be normalized to the unit disk");
        }
    }
}

}  // namespace

double initial_r0(const PointCloud& cloud, const KernelSpec& k, double epsilon,
                  NormalizationMode mode) {
    if (!std::isfinite(epsilon) || !(epsilon > 0.0)) {
        throw std::invalid_argument("epsilon must be positive and finite");
    }
    const double eps = epsilon / score_range(cloud, mode);
    if (eps >= 1.0) {
        throw std::invalid_argument("epsilon must be below the score range");
    }
    // Outside |r| <= 1 + kappa^{-1}(eps) every point is farther than
    // kappa^{-1}(eps) from the line, so each kernel term is below eps.
    double inv_kappa = 0.0;
    switch (k.kind) {
        case KernelKind::Hat:
            inv_kappa = k.sigma * (1.0 - eps);
            break;
        case KernelKind::Rbf:
            inv_kappa = k.sigma * std::sqrt(2.0 * std::log(1.0 / eps));
            break;
    }
    return 1.0 + inv_kappa;
}

CellField build_approximation(const PointCloud& cloud, const KernelSpec& k,
                              const ApproxConfig& cfg, NormalizationMode mode) {
    if (!std::isfinite(cfg.epsilon) || !(cfg.epsilon > 0.0)) {
        throw std::invalid_argument("epsilon must be positive and finite");
    }
    if (cfg.max_depth < 0 || cfg.max_depth > 30) {
        throw std::invalid_argument("max_depth must lie in [0, 30]");
    }
    if (!(cfg.min_cell_diameter > 0.0)) {
        throw std::invalid_argument("min_cell_diameter must be positive");
    }
    require_normalized(cloud);

    // epsilon at or above the score range: any constant is within budget,
    // so the root box is already a valid leaf.
    const bool trivial = cfg.epsilon >= score_range(cloud, mode);
    const double r0 = trivial ? 1.0 : initial_r0(cloud, k, cfg.epsilon, mode);

    CellField field;
    field.domain = ParamBox{-r0, r0, 0.0, kPi};
    field.r0 = r0;
    field.epsilon = cfg.epsilon;
    field.mode = mode;

    std::vector<DualCurve> curves;
    curves.reserve(cloud.size());
    for (const Point& p : cloud.points()) curves.emplace_back(p);

    const ScoreConfig scfg{k, mode};
    const double global_bound =
        global_lipschitz(k, 1.0) * (mode == NormalizationMode::Sum ? cloud.size() : 1.0);

    struct Node {
        std::uint32_t ix, iy;
        std::uint8_t depth;
    };
    std::deque<Node> queue;
    queue.push_back({0, 0, 0});
    while (!queue.empty()) {
        const Node nd = queue.front();
        queue.pop_front();
        const ParamBox box = box_of(field.domain, nd.depth, nd.ix, nd.iy);
        const double diam = box.diameter();
        bool leaf = trivial;
        bool guard = false;
        if (!leaf) {
            const double lambda = cfg.use_global_lipschitz
                                      ? global_bound
                                      : local_lipschitz(box, curves, k, mode);
            leaf = lambda * diam * 0.5 <= cfg.epsilon;
            if (!leaf && (nd.depth >= cfg.max_depth || diam <= cfg.min_cell_diameter)) {
                leaf = true;
                guard = true;
            }
        }
        if (leaf) {
            Cell cell;
            cell.box = box;
            cell.value = score(cloud, {box.r_mid(), box.theta_mid()}, scfg);
            cell.id = static_cast<std::uint32_t>(field.cells.size());
            cell.ix = nd.ix;
            cell.iy = nd.iy;
            cell.depth = nd.depth;
            cell.guard_stopped = guard;
            field.cells.push_back(cell);
            field.max_depth_seen = std::max(field.max_depth_seen, static_cast<int>(nd.depth));
            field.truncated = field.truncated || guard;
        } else {
            const std::uint32_t ix2 = nd.ix * 2, iy2 = nd.iy * 2;
            const std::uint8_t d = static_cast<std::uint8_t>(nd.depth + 1);
            queue.push_back({ix2, iy2, d});
            queue.push_back({ix2 + 1, iy2, d});
            queue.push_back({ix2, iy2 + 1, d});
            queue.push_back({ix2 + 1, iy2 + 1, d});
        }
    }
    return field;
}

const Cell* locate(const CellField& field, double r, double theta) {
    if (!field.domain.contains(r, theta)) return nullptr;
    for (const Cell& cell : field.cells) {
        if (cell.box.contains(r, theta)) return &cell;
    }
    return nullptr;
}

CellLocator::CellLocator(const CellField& field)
    : field_(&field), max_depth_(field.max_depth_seen) {
    index_.reserve(field.cells.size() * 2);
    for (const Cell& cell : field.cells) {
        index_.emplace(grid_key(cell.depth, cell.ix, cell.iy), cell.id);
    }
}

const Cell* CellLocator::locate(double r, double theta) const {
    const ParamBox& dom = field_->domain;
    if (!dom.contains(r, theta)) return nullptr;
    const double u = (r - dom.r_lo) / (dom.r_hi - dom.r_lo);
    const double v = (theta - dom.theta_lo) / (dom.theta_hi - dom.theta_lo);
    for (int d = 0; d <= max_depth_; ++d) {
        const double n = std::ldexp(1.0, d);
        const std::uint64_t ix = static_cast<std::uint64_t>(std::min(n - 1.0, std::floor(u * n)));
        const std::uint64_t iy = static_cast<std::uint64_t>(std::min(n - 1.0, std::floor(v * n)));
        const auto it = index_.find(grid_key(d, ix, iy));
        if (it == index_.end()) continue;
        const Cell& cell = field_->cells[it->second];
        // Fast path only for strictly interior queries: on a shared boundary
        // the smallest-id tie rule applies, which the scan below resolves.
        if (r > cell.box.r_lo && r < cell.box.r_hi && theta > cell.box.theta_lo &&
            theta < cell.box.theta_hi) {
            return &cell;
        }
        break;
    }
    return phough::locate(*field_, r, theta);
}

}  // namespace phough
