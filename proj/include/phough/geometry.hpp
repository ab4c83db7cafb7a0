#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace phough {

inline constexpr double kPi = 3.14159265358979323846;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

double norm(const Point& p);

// Line in Hesse normal form: { (x, y) : r = x*cos(theta) + y*sin(theta) }.
// The parameter strip is a Moebius band: (r, theta) and (-r, theta + pi)
// name the same line. Canonical parameters have theta in [0, pi).
struct LineParams {
    double r = 0.0;
    double theta = 0.0;
};

enum class KernelKind { Hat, Rbf };

// Monotone non-increasing kernel with kappa(0) = 1 and values in [0, 1].
//   hat: max(0, 1 - x/sigma)       rbf: exp(-x^2 / (2 sigma^2))
struct KernelSpec {
    KernelKind kind = KernelKind::Hat;
    double sigma = 1.0;

    KernelSpec() = default;
    KernelSpec(KernelKind kind_, double sigma_);
};

// Mean divides the accumulated kernel mass by |P| (score range [0, 1]);
// Sum keeps raw vote-like units (score range [0, |P|]).
enum class NormalizationMode { Mean, Sum };

struct ScoreConfig {
    KernelSpec kernel;
    NormalizationMode mode = NormalizationMode::Mean;
};

LineParams canonicalize(const LineParams& lp);

// |r - x*cos(theta) - y*sin(theta)|: Euclidean distance from p to the line.
double point_line_distance(const Point& p, const LineParams& lp);

// r-coordinate of the dual curve of p (the set of lines through p).
double sinusoid(const Point& p, double theta);

double kernel_eval(const KernelSpec& k, double x);

// Lipschitz constant of the kernel: 1/sigma (hat), 1/(sigma*sqrt(e)) (rbf).
double kernel_lipschitz(const KernelSpec& k);

// Similarity transform between raw input coordinates and the normalized
// frame in which the point cloud lies inside the closed unit disk.
struct Frame {
    double scale = 1.0;
    Point center{};

    Point to_normalized(const Point& p) const;
    Point to_raw(const Point& p) const;
    // theta is preserved; r is shifted by the projection of the center and
    // scaled. Inputs are canonicalized first.
    LineParams line_to_normalized(const LineParams& lp) const;
    LineParams line_to_raw(const LineParams& lp) const;
};

// Point set stored in normalized coordinates (all norms <= 1) together with
// the frame that maps back to the raw input coordinates.
class PointCloud {
public:
    // Translate the enclosing-disk center to the origin and divide by the
    // enclosing-disk radius.
    static PointCloud normalize(std::span<const Point> raw);
    // Adopt points that already lie in the closed unit disk (identity frame).
    static PointCloud from_normalized(std::vector<Point> points);

    const std::vector<Point>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double scale() const { return frame_.scale; }
    const Point& center() const { return frame_.center; }
    const Frame& frame() const { return frame_; }

    Point normalize_point(const Point& p) const { return frame_.to_normalized(p); }
    Point denormalize_point(const Point& p) const { return frame_.to_raw(p); }
    LineParams normalize_line(const LineParams& lp) const { return frame_.line_to_normalized(lp); }
    LineParams denormalize_line(const LineParams& lp) const { return frame_.line_to_raw(lp); }

private:
    PointCloud() = default;

    std::vector<Point> points_;
    Frame frame_{};
};

// Kernel-weighted support of a line in the cloud's coordinate frame:
//   Mean: (1/|P|) * sum_p kernel(distance(p, line)); Sum omits the 1/|P|.
double score(const PointCloud& cloud, const LineParams& lp, const ScoreConfig& cfg);

}  // namespace phough
