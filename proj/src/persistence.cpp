#include "phough/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace phough {

namespace {

// Closed integer interval on the finest grid level.
struct Span {
    std::uint64_t lo, hi;
    std::uint32_t id;
};

// All pairs (a, b) with closed overlap between two families of intervals
// with pairwise disjoint interiors (quad-tree cells along a shared grid
// line). Both families sorted by lo; each family's hi is then sorted too,
// so the partners of each a form one contiguous window.
void sweep_overlaps(std::vector<Span>& a, std::vector<Span>& b,
                    std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    auto by_lo = [](const Span& x, const Span& y) { return x.lo < y.lo; };
    std::sort(a.begin(), a.end(), by_lo);
    std::sort(b.begin(), b.end(), by_lo);
    std::size_t j = 0;
    for (const Span& sa : a) {
        while (j < b.size() && b[j].hi < sa.lo) ++j;
        for (std::size_t jj = j; jj < b.size() && b[jj].lo <= sa.hi; ++jj) {
            if (sa.id != b[jj].id) {
                edges.emplace_back(std::min(sa.id, b[jj].id), std::max(sa.id, b[jj].id));
            }
        }
    }
}

}  // namespace

NerveGraph build_nerve(const CellField& field, bool mobius) {
    if (field.cells.empty()) {
        throw std::invalid_argument("cell field is empty");
    }
    const std::uint32_t n = static_cast<std::uint32_t>(field.cells.size());
    const int depth = field.max_depth_seen;
    const std::uint64_t extent = 1ull << depth;

    // Cell footprints on the finest grid level.
    std::vector<std::uint64_t> x0(n), x1(n), y0(n), y1(n);
    for (const Cell& c : field.cells) {
        const int shift = depth - c.depth;
        x0[c.id] = static_cast<std::uint64_t>(c.ix) << shift;
        x1[c.id] = static_cast<std::uint64_t>(c.ix + 1) << shift;
        y0[c.id] = static_cast<std::uint64_t>(c.iy) << shift;
        y1[c.id] = static_cast<std::uint64_t>(c.iy + 1) << shift;
    }

    NerveGraph g;
    g.mobius = mobius;
    g.background = n;
    g.values.resize(n + 1, 0.0);
    for (const Cell& c : field.cells) g.values[c.id] = c.value;

    auto& edges = g.edges;

    // Planar adjacency across every interior grid line, in both directions.
    {
        std::unordered_map<std::uint64_t, std::pair<std::vector<Span>, std::vector<Span>>> at_x;
        std::unordered_map<std::uint64_t, std::pair<std::vector<Span>, std::vector<Span>>> at_y;
        for (std::uint32_t id = 0; id < n; ++id) {
            if (x1[id] < extent) at_x[x1[id]].first.push_back({y0[id], y1[id], id});
            if (x0[id] > 0) at_x[x0[id]].second.push_back({y0[id], y1[id], id});
            if (y1[id] < extent) at_y[y1[id]].first.push_back({x0[id], x1[id], id});
            if (y0[id] > 0) at_y[y0[id]].second.push_back({x0[id], x1[id], id});
        }
        for (auto& [line, sides] : at_x) sweep_overlaps(sides.first, sides.second, edges);
        for (auto& [line, sides] : at_y) sweep_overlaps(sides.first, sides.second, edges);
    }

    // Twisted seam: theta = 0 at r-range [a, b] meets theta = pi at r-ranges
    // intersecting [-b, -a]; with the symmetric domain the reflection is
    // x -> extent - x on the integer grid.
    if (mobius) {
        std::vector<Span> bottom, top;
        for (std::uint32_t id = 0; id < n; ++id) {
            if (y0[id] == 0) bottom.push_back({extent - x1[id], extent - x0[id], id});
            if (y1[id] == extent) top.push_back({x0[id], x1[id], id});
        }
        sweep_overlaps(bottom, top, edges);
    }

    // Background vertex adjacent to all cells on the r = +-r0 boundary.
    for (std::uint32_t id = 0; id < n; ++id) {
        if (x0[id] == 0 || x1[id] == extent) edges.emplace_back(id, g.background);
    }

    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    // CSR adjacency over both edge directions.
    const std::size_t vcount = g.values.size();
    g.adj_offsets.assign(vcount + 1, 0);
    for (const auto& [u, v] : edges) {
        ++g.adj_offsets[u + 1];
        ++g.adj_offsets[v + 1];
    }
    for (std::size_t i = 1; i <= vcount; ++i) g.adj_offsets[i] += g.adj_offsets[i - 1];
    g.adj.resize(edges.size() * 2);
    std::vector<std::uint32_t> cursor(g.adj_offsets.begin(), g.adj_offsets.end() - 1);
    for (const auto& [u, v] : edges) {
        g.adj[cursor[u]++] = v;
        g.adj[cursor[v]++] = u;
    }
    return g;
}

std::vector<PersistencePair> compute_persistence(const NerveGraph& g) {
    const std::size_t vcount = g.vertex_count();
    if (vcount == 0) throw std::invalid_argument("nerve graph is empty");

    std::vector<std::uint32_t> order(vcount);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (g.values[a] != g.values[b]) return g.values[a] > g.values[b];
        return a < b;
    });

    std::vector<std::uint32_t> parent(vcount);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    std::vector<double> birth(vcount, 0.0);
    std::vector<std::uint32_t> rep(vcount, 0);
    std::vector<char> active(vcount, 0);

    std::vector<PersistencePair> pairs;
    for (const std::uint32_t v : order) {
        active[v] = 1;
        birth[v] = g.values[v];
        rep[v] = v;
        for (std::uint32_t e = g.adj_offsets[v]; e < g.adj_offsets[v + 1]; ++e) {
            const std::uint32_t u = g.adj[e];
            if (!active[u]) continue;
            const std::uint32_t ru = find(u);
            const std::uint32_t rv = find(v);
            if (ru == rv) continue;
            // Elder rule: the component with the higher birth survives; on a
            // tie the one whose representative has the smaller id does.
            const bool u_elder =
                birth[ru] > birth[rv] || (birth[ru] == birth[rv] && rep[ru] < rep[rv]);
            const std::uint32_t live = u_elder ? ru : rv;
            const std::uint32_t dead = u_elder ? rv : ru;
            if (birth[dead] > g.values[v]) {
                pairs.push_back({birth[dead], g.values[v], rep[dead]});
            }
            parent[dead] = live;
        }
    }
    // The surviving component is the essential class; by convention it dies
    // at level 0, the value of the background vertex.
    const std::uint32_t root = find(order.front());
    pairs.push_back({birth[root], 0.0, rep[root]});

    std::sort(pairs.begin(), pairs.end(), [](const PersistencePair& a, const PersistencePair& b) {
        if (a.persistence() != b.persistence()) return a.persistence() > b.persistence();
        if (a.birth != b.birth) return a.birth > b.birth;
        return a.representative < b.representative;
    });
    return pairs;
}

std::vector<std::int64_t> superlevel_components(const NerveGraph& g, double level) {
    const std::size_t vcount = g.vertex_count();
    std::vector<std::int64_t> root(vcount, -1);
    std::vector<std::uint32_t> parent(vcount);
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& [u, v] : g.edges) {
        if (g.values[u] >= level && g.values[v] >= level) {
            const std::uint32_t ru = find(u), rv = find(v);
            if (ru != rv) parent[std::max(ru, rv)] = std::min(ru, rv);
        }
    }
    for (std::uint32_t v = 0; v < vcount; ++v) {
        if (g.values[v] >= level) root[v] = find(v);
    }
    return root;
}

SelectionPolicy SelectionPolicy::top_k(int k) {
    if (k < 1) throw std::invalid_argument("top_k requires k >= 1");
    SelectionPolicy p;
    p.kind = Kind::TopK;
    p.k = k;
    return p;
}

SelectionPolicy SelectionPolicy::threshold(double alpha) {
    if (!std::isfinite(alpha) || alpha < 0.0) {
        throw std::invalid_argument("threshold requires alpha >= 0");
    }
    SelectionPolicy p;
    p.kind = Kind::Threshold;
    p.alpha = alpha;
    return p;
}

std::vector<DetectedLine> select_lines(const std::vector<PersistencePair>& pairs,
                                       const CellField& field, const PointCloud& cloud,
                                       const SelectionPolicy& policy) {
    std::vector<PersistencePair> sorted = pairs;
    std::sort(sorted.begin(), sorted.end(),
              [](const PersistencePair& a, const PersistencePair& b) {
                  if (a.persistence() != b.persistence()) return a.persistence() > b.persistence();
                  if (a.birth != b.birth) return a.birth > b.birth;
                  return a.representative < b.representative;
              });

    std::vector<DetectedLine> out;
    for (const PersistencePair& p : sorted) {
        if (policy.kind == SelectionPolicy::Kind::TopK) {
            if (out.size() >= static_cast<std::size_t>(policy.k)) break;
        } else if (p.persistence() < policy.alpha) {
            break;
        }
        if (p.representative >= field.cells.size()) {
            throw std::invalid_argument("representative does not name a cell of the field");
        }
        const ParamBox& box = field.cells[p.representative].box;
        const LineParams mid = canonicalize({box.r_mid(), box.theta_mid()});
        out.push_back({cloud.denormalize_line(mid), p.birth, p.persistence()});
    }
    return out;
}

}  // namespace phough
