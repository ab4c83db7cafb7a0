#pragma once

#include <span>

#include "phough/persistence.hpp"

namespace phough {

struct DetectorConfig {
    KernelSpec kernel;  // sigma in raw input units; rescaled internally
    double epsilon = 0.02;
    NormalizationMode mode = NormalizationMode::Mean;
    int max_depth = 30;
    double min_cell_diameter = 1e-12;
    bool use_global_lipschitz = false;
    bool mobius = true;  // diagnostic switch for the seam gluing
};

struct DetectionResult {
    PointCloud cloud;
    CellField field;  // normalized frame
    NerveGraph nerve;
    std::vector<PersistencePair> pairs;
    std::vector<DetectedLine> lines;
    double build_ms = 0.0;
    double persistence_ms = 0.0;
};

// Full pipeline: normalize points, build the certified approximation over
// the strip, take 0-dimensional persistence of the nerve sweep, and map the
// selected features back to raw-coordinate lines.
DetectionResult detect(std::span<const Point> raw, const DetectorConfig& cfg,
                       const SelectionPolicy& policy);

// Persistence value of pairs[index] in a descending-sorted list; 0 past the end.
double persistence_at(const std::vector<PersistencePair>& pairs, std::size_t index);

}  // namespace phough
