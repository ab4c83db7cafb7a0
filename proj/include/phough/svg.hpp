#pragma once

#include <span>
#include <string>
#include <vector>

#include "phough/geometry.hpp"
#include "phough/persistence.hpp"

namespace phough {

// Scene plot: points as dots, truth lines dashed grey, detected lines solid
// red, all clipped to a padded bounding box of the points.
void write_scene_svg(const std::string& path, std::span<const Point> points,
                     std::span<const LineParams> truth, std::span<const LineParams> detected);

// Persistence diagram: (birth, death) scatter with the diagonal; the essential
// feature sits on the death = 0 axis.
void write_diagram_svg(const std::string& path, const std::vector<PersistencePair>& pairs);

}  // namespace phough
