#include "phough/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace phough {

namespace {

using nlohmann::json;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

json parse_json_file(const std::string& path) {
    auto in = open_input(path);
    json j = json::parse(in, nullptr, true, true);
    return j;
}

std::vector<Point> points_from_json(const json& j, const std::string& path) {
    const json* arr = &j;
    if (j.is_object()) {
        if (!j.contains("points")) throw ParseError(path, 1, "object lacks a points array");
        arr = &j.at("points");
    }
    if (!arr->is_array()) throw ParseError(path, 1, "expected an array of [x, y] pairs");
    std::vector<Point> points;
    points.reserve(arr->size());
    for (const auto& e : *arr) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw ParseError(path, 1, "expected an array of [x, y] pairs");
        }
        points.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return points;
}

double num(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ParseError(path, 1, std::string("missing numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

}  // namespace

std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

double round_sig(double v) { return std::strtod(format_sig(v).c_str(), nullptr); }

ParseError::ParseError(const std::string& path, int line_, const std::string& what)
    : std::runtime_error(path + ":" + std::to_string(line_) + ": " + what), line(line_) {}

std::vector<Point> read_points_csv(const std::string& path) {
    auto in = open_input(path);
    std::vector<Point> points;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        if (line[begin] == '#') continue;
        const std::size_t comma = line.find(',', begin);
        if (comma == std::string::npos) {
            throw ParseError(path, line_no, "expected 'x,y'");
        }
        char* end = nullptr;
        const std::string xs = line.substr(begin, comma - begin);
        const std::string ys = line.substr(comma + 1);
        const double x = std::strtod(xs.c_str(), &end);
        if (end == xs.c_str() || *end != '\0') {
            // allow trailing spaces
            while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
            if (!end || *end != '\0' || end == xs.c_str()) {
                throw ParseError(path, line_no, "expected 'x,y'");
            }
        }
        const double y = std::strtod(ys.c_str(), &end);
        if (end == ys.c_str() || *end != '\0') {
            while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
            if (!end || *end != '\0' || end == ys.c_str()) {
                throw ParseError(path, line_no, "expected 'x,y'");
            }
        }
        if (!std::isfinite(x) || !std::isfinite(y)) {
            throw ParseError(path, line_no, "coordinates must be finite");
        }
        points.push_back({x, y});
    }
    return points;
}

std::vector<Point> read_points_json(const std::string& path) {
    json j;
    try {
        j = parse_json_file(path);
    } catch (const json::parse_error& e) {
        throw ParseError(path, 1, e.what());
    }
    return points_from_json(j, path);
}

std::vector<Point> read_points_auto(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        return read_points_json(path);
    }
    return read_points_csv(path);
}

void write_points_csv(const std::string& path, std::span<const Point> points) {
    auto out = open_output(path);
    for (const Point& p : points) {
        out << format_sig(p.x) << ',' << format_sig(p.y) << '\n';
    }
}

void write_scene_json(const std::string& path, const Scene& scene) {
    json truth = json::array();
    for (const LineSpec& spec : scene.truth) {
        truth.push_back({{"r", round_sig(spec.params.r)},
                         {"theta", round_sig(spec.params.theta)},
                         {"n", spec.n_points},
                         {"noise", round_sig(spec.noise_halfwidth)}});
    }
    json points = json::array();
    for (const Point& p : scene.points) {
        points.push_back({round_sig(p.x), round_sig(p.y)});
    }
    const json j = {{"extent", round_sig(scene.extent)},
                    {"seed", scene.seed},
                    {"truth", truth},
                    {"points", points}};
    open_output(path) << j.dump(2) << '\n';
}

Scene read_scene_json(const std::string& path) {
    json j;
    try {
        j = parse_json_file(path);
    } catch (const json::parse_error& e) {
        throw ParseError(path, 1, e.what());
    }
    if (!j.is_object()) throw ParseError(path, 1, "expected a scene object");
    Scene scene;
    scene.extent = num(j, "extent", path);
    scene.seed = j.value("seed", 0ull);
    if (!j.contains("truth") || !j.at("truth").is_array()) {
        throw ParseError(path, 1, "missing truth array");
    }
    for (const auto& t : j.at("truth")) {
        LineSpec spec;
        spec.params.r = num(t, "r", path);
        spec.params.theta = num(t, "theta", path);
        spec.n_points = static_cast<int>(num(t, "n", path));
        spec.noise_halfwidth = num(t, "noise", path);
        scene.truth.push_back(spec);
    }
    scene.points = points_from_json(j, path);
    return scene;
}

void write_lines_json(const std::string& path, std::span<const DetectedLine> lines) {
    json j = json::array();
    for (const DetectedLine& l : lines) {
        j.push_back({{"r", round_sig(l.line.r)},
                     {"theta", round_sig(l.line.theta)},
                     {"score", round_sig(l.score)},
                     {"persistence", round_sig(l.persistence)}});
    }
    open_output(path) << j.dump(2) << '\n';
}

std::vector<DiagramRow> diagram_rows(const std::vector<PersistencePair>& pairs,
                                     const CellField& field, const Frame& frame) {
    std::vector<DiagramRow> rows;
    rows.reserve(pairs.size());
    for (const PersistencePair& p : pairs) {
        const ParamBox& box = field.cells.at(p.representative).box;
        const LineParams mid = canonicalize({box.r_mid(), box.theta_mid()});
        rows.push_back({p.birth, p.death, frame.line_to_raw(mid)});
    }
    return rows;
}

void write_diagram_csv(const std::string& path, std::span<const DiagramRow> rows) {
    auto out = open_output(path);
    out << "birth,death,persistence,r,theta\n";
    for (const DiagramRow& row : rows) {
        out << format_sig(row.birth) << ',' << format_sig(row.death) << ','
            << format_sig(row.birth - row.death) << ',' << format_sig(row.line.r) << ','
            << format_sig(row.line.theta) << '\n';
    }
}

void write_field_json(const std::string& path, const CellField& field, const Frame& frame) {
    json cells = json::array();
    for (const Cell& c : field.cells) {
        cells.push_back({{"r_lo", round_sig(c.box.r_lo)},
                         {"r_hi", round_sig(c.box.r_hi)},
                         {"theta_lo", round_sig(c.box.theta_lo)},
                         {"theta_hi", round_sig(c.box.theta_hi)},
                         {"value", round_sig(c.value)},
                         {"id", c.id}});
    }
    const json j = {{"domain",
                     {{"r_lo", round_sig(field.domain.r_lo)},
                      {"r_hi", round_sig(field.domain.r_hi)},
                      {"theta_lo", round_sig(field.domain.theta_lo)},
                      {"theta_hi", round_sig(field.domain.theta_hi)}}},
                    {"epsilon", round_sig(field.epsilon)},
                    {"r0", round_sig(field.r0)},
                    {"mode", field.mode == NormalizationMode::Mean ? "mean" : "sum"},
                    {"normalization",
                     {{"scale", round_sig(frame.scale)},
                      {"center", {round_sig(frame.center.x), round_sig(frame.center.y)}}}},
                    {"cells", cells}};
    open_output(path) << j.dump() << '\n';
}

LoadedField read_field_json(const std::string& path) {
    json j;
    try {
        j = parse_json_file(path);
    } catch (const json::parse_error& e) {
        throw ParseError(path, 1, e.what());
    }
    if (!j.is_object() || !j.contains("domain") || !j.contains("cells")) {
        throw ParseError(path, 1, "expected a cell-field object");
    }
    LoadedField loaded;
    CellField& field = loaded.field;
    const json& dom = j.at("domain");
    field.domain = {num(dom, "r_lo", path), num(dom, "r_hi", path), num(dom, "theta_lo", path),
                    num(dom, "theta_hi", path)};
    if (!field.domain.valid()) throw ParseError(path, 1, "degenerate domain");
    field.epsilon = num(j, "epsilon", path);
    field.r0 = j.contains("r0") ? num(j, "r0", path) : field.domain.r_hi;
    if (j.value("mode", "mean") == std::string("sum")) field.mode = NormalizationMode::Sum;
    if (j.contains("normalization")) {
        const json& n = j.at("normalization");
        loaded.frame.scale = num(n, "scale", path);
        if (n.contains("center") && n.at("center").is_array() && n.at("center").size() == 2) {
            loaded.frame.center = {n.at("center")[0].get<double>(),
                                   n.at("center")[1].get<double>()};
        }
    }
    const json& cells = j.at("cells");
    if (!cells.is_array() || cells.empty()) throw ParseError(path, 1, "cells array is empty");
    field.cells.resize(cells.size());
    const double dom_w = field.domain.r_hi - field.domain.r_lo;
    const double dom_h = field.domain.theta_hi - field.domain.theta_lo;
    std::vector<char> seen(cells.size(), 0);
    for (const auto& e : cells) {
        Cell c;
        c.box = {num(e, "r_lo", path), num(e, "r_hi", path), num(e, "theta_lo", path),
                 num(e, "theta_hi", path)};
        if (!c.box.valid()) throw ParseError(path, 1, "degenerate cell box");
        c.value = num(e, "value", path);
        const double id = num(e, "id", path);
        if (id < 0 || id >= static_cast<double>(cells.size()) || id != std::floor(id)) {
            throw ParseError(path, 1, "cell ids must be dense");
        }
        c.id = static_cast<std::uint32_t>(id);
        if (seen[c.id]) throw ParseError(path, 1, "duplicate cell id");
        seen[c.id] = 1;
        // Re-derive the dyadic grid position from the box (coordinates are
        // stored rounded, so snap to the nearest grid index).
        const double depth_f = std::log2(dom_w / (c.box.r_hi - c.box.r_lo));
        const int depth = static_cast<int>(std::lround(depth_f));
        if (depth < 0 || depth > 30 || std::abs(depth_f - depth) > 0.01) {
            throw ParseError(path, 1, "cell is not on the dyadic grid of the domain");
        }
        c.depth = static_cast<std::uint8_t>(depth);
        const double n = std::ldexp(1.0, depth);
        c.ix = static_cast<std::uint32_t>(std::lround((c.box.r_lo - field.domain.r_lo) / dom_w * n));
        c.iy = static_cast<std::uint32_t>(
            std::lround((c.box.theta_lo - field.domain.theta_lo) / dom_h * n));
        field.cells[c.id] = c;
        field.max_depth_seen = std::max(field.max_depth_seen, depth);
    }
    return loaded;
}

}  // namespace phough
