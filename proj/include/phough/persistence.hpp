#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "phough/subdivision.hpp"

namespace phough {

// Nerve of the closed leaf cover of the strip, plus one background vertex.
// Vertices 0..n-1 are the leaf cells (same ids as in the field) carrying the
// cell values; the background vertex carries value 0 and is adjacent to every
// cell touching r = +-r0, modelling the connected outside region where the
// score is below epsilon. Two cells are adjacent iff their closed boxes
// intersect (shared edges and corners both count). With the Moebius gluing
// enabled, a cell touching theta = 0 with r-range [a, b] is also adjacent to
// cells touching theta = pi whose r-range meets [-b, -a].
struct NerveGraph {
    std::vector<double> values;  // one per vertex; background last, value 0
    std::uint32_t background = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // u < v, sorted, unique
    std::vector<std::uint32_t> adj_offsets;                      // CSR adjacency
    std::vector<std::uint32_t> adj;
    bool mobius = true;

    std::size_t vertex_count() const { return values.size(); }
};

// `mobius = false` drops the twisted seam edges (diagnostic mode; the
// background vertex is kept either way).
NerveGraph build_nerve(const CellField& field, bool mobius = true);

// Feature of the super-levelset filtration of the cell values: a component
// born at `birth` (value of its highest cell) that merges into an older
// component at `death`. The last surviving component is reported with
// death = 0. `representative` is the cell id of the component maximum.
struct PersistencePair {
    double birth = 0.0;
    double death = 0.0;
    std::uint32_t representative = 0;

    double persistence() const { return birth - death; }
};

// Zero-dimensional persistence of the descending sweep over the nerve.
// Vertices are processed by decreasing value (ties: smaller id first); when
// components merge, the one with the lower birth dies (ties: the one whose
// representative has the larger id). Same-level merge events (birth == death)
// are not reported. Output is sorted by persistence descending, ties by
// birth descending, then representative id.
std::vector<PersistencePair> compute_persistence(const NerveGraph& g);

// Component root per vertex of the subgraph induced by {value >= level};
// -1 for excluded vertices. Roots are canonical (smallest vertex id).
std::vector<std::int64_t> superlevel_components(const NerveGraph& g, double level);

// Either the k most persistent features or all features with
// persistence >= alpha.
struct SelectionPolicy {
    enum class Kind { TopK, Threshold };
    Kind kind = Kind::TopK;
    int k = 1;
    double alpha = 0.0;

    static SelectionPolicy top_k(int k);
    static SelectionPolicy threshold(double alpha);
};

struct DetectedLine {
    LineParams line;  // raw input coordinates, canonical theta in [0, pi)
    double score = 0.0;
    double persistence = 0.0;
};

// Maps selected features to lines: each representative cell's box midpoint,
// canonicalized and transformed back to the cloud's raw coordinates.
std::vector<DetectedLine> select_lines(const std::vector<PersistencePair>& pairs,
                                       const CellField& field, const PointCloud& cloud,
                                       const SelectionPolicy& policy);

}  // namespace phough
