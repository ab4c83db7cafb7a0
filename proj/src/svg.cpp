#include "phough/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "phough/io.hpp"

namespace phough {

namespace {

constexpr double kCanvas = 640.0;
constexpr double kPad = 40.0;

std::ofstream open_svg(const std::string& path, double width, double height) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return out;
}

// World rectangle -> pixel coordinates, y axis flipped.
struct Mapper {
    double x0, y0, scale, height;

    double px(double x) const { return kPad + (x - x0) * scale; }
    double py(double y) const { return height - kPad - (y - y0) * scale; }
};

// Segment of the line r = x cos(theta) + y sin(theta) inside the axis-aligned
// rectangle [x0, x1] x [y0, y1], if any (Liang-Barsky on the dual direction).
std::optional<std::array<double, 4>> clip_line_to_rect(const LineParams& lp, double x0, double x1,
                                                       double y0, double y1) {
    const double c = std::cos(lp.theta), s = std::sin(lp.theta);
    const double ax = lp.r * c, ay = lp.r * s;  // foot point
    const double dx = -s, dy = c;               // direction along the line
    double t_lo = -1e18, t_hi = 1e18;
    const auto clip = [&](double d, double lo, double hi, double a) {
        if (std::abs(d) < 1e-300) return lo <= a && a <= hi;
        double t0 = (lo - a) / d, t1 = (hi - a) / d;
        if (t0 > t1) std::swap(t0, t1);
        t_lo = std::max(t_lo, t0);
        t_hi = std::min(t_hi, t1);
        return true;
    };
    if (!clip(dx, x0, x1, ax) || !clip(dy, y0, y1, ay) || t_lo >= t_hi) return std::nullopt;
    return std::array<double, 4>{ax + t_lo * dx, ay + t_lo * dy, ax + t_hi * dx, ay + t_hi * dy};
}

void draw_lines(std::ofstream& out, std::span<const LineParams> lines, const Mapper& m, double x0,
                double x1, double y0, double y1, const char* style) {
    for (const LineParams& lp : lines) {
        const auto seg = clip_line_to_rect(lp, x0, x1, y0, y1);
        if (!seg) continue;
        out << "<line x1=\"" << m.px((*seg)[0]) << "\" y1=\"" << m.py((*seg)[1]) << "\" x2=\""
            << m.px((*seg)[2]) << "\" y2=\"" << m.py((*seg)[3]) << "\" " << style << "/>\n";
    }
}

}  // namespace

void write_scene_svg(const std::string& path, std::span<const Point> points,
                     std::span<const LineParams> truth, std::span<const LineParams> detected) {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    if (!points.empty()) {
        x0 = x1 = points[0].x;
        y0 = y1 = points[0].y;
        for (const Point& p : points) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
    }
    const double side = std::max({x1 - x0, y1 - y0, 1e-9});
    const double margin = 0.05 * side;
    x0 -= margin;
    x1 = x0 + side + 2 * margin;
    y0 -= margin;
    y1 = y0 + side + 2 * margin;

    const double inner = kCanvas - 2 * kPad;
    const Mapper m{x0, y0, inner / (x1 - x0), kCanvas};
    auto out = open_svg(path, kCanvas, kCanvas);

    out << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << inner << "\" height=\""
        << inner << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
    draw_lines(out, truth, m, x0, x1, y0, y1,
               "stroke=\"#888\" stroke-width=\"1\" stroke-dasharray=\"6 4\"");
    draw_lines(out, detected, m, x0, x1, y0, y1, "stroke=\"#d62728\" stroke-width=\"1.5\"");
    for (const Point& p : points) {
        out << "<circle cx=\"" << m.px(p.x) << "\" cy=\"" << m.py(p.y)
            << "\" r=\"2.5\" fill=\"#1f77b4\"/>\n";
    }
    out << "</svg>\n";
}

void write_diagram_svg(const std::string& path, const std::vector<PersistencePair>& pairs) {
    double top = 1e-9;
    for (const PersistencePair& p : pairs) top = std::max(top, p.birth);
    top *= 1.05;

    const double inner = kCanvas - 2 * kPad;
    const double scale = inner / top;
    auto out = open_svg(path, kCanvas, kCanvas);
    const auto px = [&](double v) { return kPad + v * scale; };
    const auto py = [&](double v) { return kCanvas - kPad - v * scale; };

    out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(top) << "\" y2=\""
        << py(0) << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0) << "\" y2=\""
        << py(top) << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(top) << "\" y2=\""
        << py(top) << "\" stroke=\"#aaa\" stroke-dasharray=\"4 4\"/>\n"
        << "<text x=\"" << px(top) - 4 << "\" y=\"" << py(0) + 16
        << "\" font-size=\"11\" text-anchor=\"end\">birth " << format_sig(top / 1.05)
        << "</text>\n"
        << "<text x=\"" << px(0) + 4 << "\" y=\"" << py(top) + 12
        << "\" font-size=\"11\">death</text>\n";
    for (const PersistencePair& p : pairs) {
        out << "<circle cx=\"" << px(p.birth) << "\" cy=\"" << py(p.death)
            << "\" r=\"3.5\" fill=\"#1f77b4\" fill-opacity=\"0.8\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace phough
