#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phough/persistence.hpp"
#include "phough/scene.hpp"

namespace phough {

// All floating-point output uses 9 significant digits.
std::string format_sig(double v);
// Value after a 9-significant-digit round trip (for stable JSON output).
double round_sig(double v);

// Input failure with the location of the first offending line.
struct ParseError : std::runtime_error {
    ParseError(const std::string& path, int line, const std::string& what);
    int line = 0;
};

// "x,y" per line; blank lines and lines starting with '#' are skipped.
std::vector<Point> read_points_csv(const std::string& path);
// Either a top-level array of [x, y] pairs or an object with a "points" key
// holding one (so scene files work directly as detector input).
std::vector<Point> read_points_json(const std::string& path);
// Dispatch on the ".json" extension, else CSV.
std::vector<Point> read_points_auto(const std::string& path);
void write_points_csv(const std::string& path, std::span<const Point> points);

void write_scene_json(const std::string& path, const Scene& scene);
Scene read_scene_json(const std::string& path);

void write_lines_json(const std::string& path, std::span<const DetectedLine> lines);

struct DiagramRow {
    double birth = 0.0;
    double death = 0.0;
    LineParams line;  // representative line in raw coordinates
};

std::vector<DiagramRow> diagram_rows(const std::vector<PersistencePair>& pairs,
                                     const CellField& field, const Frame& frame);

// CSV with header birth,death,persistence,r,theta.
void write_diagram_csv(const std::string& path, std::span<const DiagramRow> rows);

// Cell-field cache: domain, epsilon and the leaf list, plus the frame so a
// later run can map representatives back to raw coordinates.
void write_field_json(const std::string& path, const CellField& field, const Frame& frame);

struct LoadedField {
    CellField field;
    Frame frame;
};
LoadedField read_field_json(const std::string& path);

}  // namespace phough
