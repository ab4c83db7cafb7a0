#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "phough/persistence.hpp"
#include "phough/rng.hpp"

using namespace phough;
using testing_oracles::make_graph;
using testing_oracles::nerve_edges_oracle;
using testing_oracles::persistence_oracle;
using testing_oracles::random_connected_graph;
using testing_oracles::random_disk_cloud;

namespace {

// Hand-built 2x2 field over [-1, 1] x [0, pi] (depth-1 dyadic grid).
CellField four_leaf_field() {
    CellField field;
    field.domain = ParamBox{-1.0, 1.0, 0.0, kPi};
    field.r0 = 1.0;
    field.epsilon = 0.5;
    field.max_depth_seen = 1;
    const double values[4] = {0.9, 0.4, 0.3, 0.2};
    std::uint32_t id = 0;
    for (std::uint32_t iy = 0; iy < 2; ++iy) {
        for (std::uint32_t ix = 0; ix < 2; ++ix) {
            Cell c;
            c.box = ParamBox{-1.0 + static_cast<double>(ix), -1.0 + static_cast<double>(ix + 1),
                             0.5 * kPi * iy, 0.5 * kPi * (iy + 1)};
            c.value = values[id];
            c.id = id;
            c.ix = ix;
            c.iy = iy;
            c.depth = 1;
            field.cells.push_back(c);
            ++id;
        }
    }
    return field;
}

PointCloud disk_cloud(std::uint64_t seed, int n) {
    Rng rng(seed);
    return PointCloud::from_normalized(random_disk_cloud(rng, n));
}

using EdgeSet = std::set<std::pair<std::uint32_t, std::uint32_t>>;

EdgeSet edge_set(const NerveGraph& g) { return {g.edges.begin(), g.edges.end()}; }

}  // namespace

TEST_CASE("nerve of a 2x2 split: all pairs adjacent, plus background") {
    const CellField field = four_leaf_field();
    const NerveGraph g = build_nerve(field, true);
    REQUIRE(g.vertex_count() == 5);
    CHECK(g.background == 4);
    CHECK(g.values[4] == 0.0);
    // the centre corner joins all four leaves; the twisted seam adds the
    // reflected pairs, which coincide with already-present corner pairs here
    const EdgeSet expected = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3},
                              {0, 4}, {1, 4}, {2, 4}, {3, 4}};
    CHECK(edge_set(g) == expected);
    CHECK(edge_set(build_nerve(field, false)) == expected);
    const auto oracle = nerve_edges_oracle(field, true);
    CHECK(edge_set(g) == EdgeSet(oracle.begin(), oracle.end()));
}

TEST_CASE("nerve of a single root cell is one edge to the background") {
    const PointCloud cloud = disk_cloud(51, 6);
    const CellField field =
        build_approximation(cloud, KernelSpec(KernelKind::Hat, 0.3), ApproxConfig{1.5});
    REQUIRE(field.cells.size() == 1);
    const NerveGraph g = build_nerve(field, true);
    REQUIRE(g.vertex_count() == 2);
    CHECK(edge_set(g) == EdgeSet{{0, 1}});
}

TEST_CASE("nerve edges equal the all-pairs box-intersection oracle") {
    Rng rng(52);
    for (int trial = 0; trial < 6; ++trial) {
        const PointCloud cloud = disk_cloud(520 + trial, 4 + 3 * trial);
        const KernelSpec k(trial % 2 ? KernelKind::Rbf : KernelKind::Hat, 0.3);
        const double eps = trial % 3 ? 0.08 : 0.15;
        const CellField field = build_approximation(cloud, k, ApproxConfig{eps});
        for (const bool mobius : {true, false}) {
            const NerveGraph g = build_nerve(field, mobius);
            const auto oracle = nerve_edges_oracle(field, mobius);
            CHECK(g.edges.size() == oracle.size());
            CHECK(edge_set(g) == EdgeSet(oracle.begin(), oracle.end()));
            // CSR mirrors the edge list
            std::size_t total = 0;
            for (std::size_t v = 0; v < g.vertex_count(); ++v) {
                for (std::uint32_t i = g.adj_offsets[v]; i < g.adj_offsets[v + 1]; ++i) {
                    const std::uint32_t w = g.adj[i];
                    CHECK(edge_set(g).count({std::min<std::uint32_t>(v, w),
                                             std::max<std::uint32_t>(v, w)}) == 1);
                    ++total;
                }
            }
            CHECK(total == 2 * g.edges.size());
        }
    }
}

TEST_CASE("seam gluing changes connectivity only across theta = 0 / pi") {
    // A field fine enough that some cells touch only one seam side.
    const PointCloud cloud = disk_cloud(53, 8);
    const CellField field =
        build_approximation(cloud, KernelSpec(KernelKind::Hat, 0.25), ApproxConfig{0.05});
    const NerveGraph glued = build_nerve(field, true);
    const NerveGraph cut = build_nerve(field, false);
    CHECK(glued.edges.size() > cut.edges.size());
    const EdgeSet a = edge_set(glued), b = edge_set(cut);
    for (const auto& e : b) CHECK(a.count(e) == 1);
    for (const auto& e : a) {
        if (b.count(e)) continue;
        // extra edges connect a bottom-row cell with a top-row cell
        REQUIRE(e.second < field.cells.size());
        const ParamBox& lo = field.cells[e.first].box;
        const ParamBox& hi = field.cells[e.second].box;
        const bool first_bottom = lo.theta_lo == 0.0 && hi.theta_hi == kPi;
        const bool second_bottom = hi.theta_lo == 0.0 && lo.theta_hi == kPi;
        CHECK((first_bottom || second_bottom));
    }
}

TEST_CASE("persistence of a path graph") {
    const NerveGraph g = make_graph({1.0, 0.2, 0.8}, {{0, 1}, {1, 2}});
    const auto pairs = compute_persistence(g);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].birth == 1.0);
    CHECK(pairs[0].death == 0.0);
    CHECK(pairs[0].representative == 0);
    CHECK(pairs[1].birth == 0.8);
    CHECK(pairs[1].death == 0.2);
    CHECK(pairs[1].representative == 2);
    CHECK(pairs[1].persistence() == doctest::Approx(0.6));
}

TEST_CASE("two secondary maxima with persistence 0.1 each") {
    // One dominant peak (1.0); a peak born at 0.8 merging into it at 0.7 and
    // a peak born at 0.7 merging at 0.6.
    const NerveGraph g =
        make_graph({1.0, 0.8, 0.7, 0.7, 0.6}, {{0, 2}, {1, 2}, {0, 4}, {3, 4}});
    const auto pairs = compute_persistence(g);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0].birth == 1.0);
    CHECK(pairs[0].death == 0.0);
    CHECK(pairs[1].birth == 0.8);
    CHECK(pairs[1].death == doctest::Approx(0.7));
    CHECK(pairs[1].persistence() == doctest::Approx(0.1));
    CHECK(pairs[1].representative == 1);
    CHECK(pairs[2].birth == doctest::Approx(0.7));
    CHECK(pairs[2].death == doctest::Approx(0.6));
    CHECK(pairs[2].persistence() == doctest::Approx(0.1));
    CHECK(pairs[2].representative == 3);
}

TEST_CASE("union-find persistence equals the level-sweep oracle") {
    Rng rng(54);
    for (int trial = 0; trial < 60; ++trial) {
        const NerveGraph g = random_connected_graph(rng, 25);
        const auto got = compute_persistence(g);
        const auto want = persistence_oracle(g);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].birth == want[i].birth);
            CHECK(got[i].death == want[i].death);
            CHECK(got[i].representative == want[i].representative);
        }
    }
}

TEST_CASE("zero-persistence merges are suppressed") {
    // Two equal-value vertices joined directly: one component, no echo pair.
    const NerveGraph g = make_graph({0.5, 0.5, 0.1}, {{0, 1}, {1, 2}});
    const auto pairs = compute_persistence(g);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].birth == 0.5);
    CHECK(pairs[0].representative == 0);
}

TEST_CASE("superlevel components partition the kept vertices") {
    Rng rng(55);
    for (int trial = 0; trial < 30; ++trial) {
        const NerveGraph g = random_connected_graph(rng, 20);
        const double level = rng.unit();
        const auto roots = superlevel_components(g, level);
        REQUIRE(roots.size() == g.vertex_count());
        for (std::size_t v = 0; v < g.vertex_count(); ++v) {
            if (g.values[v] < level) {
                CHECK(roots[v] == -1);
            } else {
                REQUIRE(roots[v] >= 0);
                // root is a member of the component with the smallest id
                CHECK(static_cast<std::size_t>(roots[v]) <= v);
                CHECK(roots[roots[v]] == roots[v]);
            }
        }
        // edge-connected kept vertices share a root
        for (const auto& [u, v] : g.edges) {
            if (g.values[u] >= level && g.values[v] >= level) {
                CHECK(roots[u] == roots[v]);
            }
        }
        // all kept vertices excluded above the maximum
        const double top = *std::max_element(g.values.begin(), g.values.end());
        for (const auto root : superlevel_components(g, top + 1.0)) CHECK(root == -1);
    }
}

TEST_CASE("line selection policies") {
    const PointCloud cloud = disk_cloud(56, 16);
    const KernelSpec k(KernelKind::Hat, 0.25);
    const CellField field = build_approximation(cloud, k, ApproxConfig{0.03});
    const NerveGraph g = build_nerve(field, true);
    const auto pairs = compute_persistence(g);
    REQUIRE(!pairs.empty());

    SUBCASE("top-1 returns the global maximum cell's midpoint line") {
        const auto lines = select_lines(pairs, field, cloud, SelectionPolicy::top_k(1));
        REQUIRE(lines.size() == 1);
        const Cell* best = &field.cells[0];
        for (const Cell& c : field.cells) {
            if (c.value > best->value) best = &c;
        }
        const LineParams expect =
            cloud.denormalize_line(canonicalize({best->box.r_mid(), best->box.theta_mid()}));
        CHECK(lines[0].line.r == doctest::Approx(expect.r).epsilon(1e-12));
        CHECK(lines[0].line.theta == doctest::Approx(expect.theta).epsilon(1e-12));
        CHECK(lines[0].score == best->value);
        CHECK(lines[0].persistence == pairs[0].persistence());
    }

    SUBCASE("threshold zero keeps every feature") {
        const auto lines = select_lines(pairs, field, cloud, SelectionPolicy::threshold(0.0));
        CHECK(lines.size() == pairs.size());
        // sorted by persistence descending
        for (std::size_t i = 1; i < lines.size(); ++i) {
            CHECK(lines[i - 1].persistence >= lines[i].persistence);
        }
    }

    SUBCASE("k larger than the diagram returns all pairs") {
        const auto lines =
            select_lines(pairs, field, cloud, SelectionPolicy::top_k(1000000));
        CHECK(lines.size() == pairs.size());
    }
}
