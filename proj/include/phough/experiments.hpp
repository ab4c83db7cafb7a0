#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phough/detect.hpp"

namespace phough {

// ---------------------------------------------------------------------------
// Line matching
// ---------------------------------------------------------------------------

// Distance between two lines in normalized parameter space: r is divided by
// r_max, theta by pi, and the twisted identification (r, theta) ~ (-r,
// theta +- pi) is taken into account by the minimum over both branches.
double line_distance_mobius(const LineParams& a, const LineParams& b, double r_max);

struct MatchedLine {
    std::size_t truth_index = 0;
    std::size_t detected_index = 0;
    double distance = 0.0;   // normalized metric
    double abs_dr = 0.0;     // raw r units, along the chosen branch
    double abs_dtheta = 0.0; // radians, along the chosen branch
};

struct MatchReport {
    std::vector<MatchedLine> per_line;
    double mean_distance = 0.0;
    double mean_abs_dr = 0.0;
    double mean_abs_dtheta = 0.0;
    std::array<double, 3> distance_quartiles{};  // q1, median, q3
};

// Minimum-total-distance assignment between equally sized sets (exact,
// supports up to 9 lines).
MatchReport match_lines(std::span<const LineParams> detected, std::span<const LineParams> truth,
                        double r_max);

// ---------------------------------------------------------------------------
// Threshold-gap experiment: persistence gap vs. accumulator vote gap
// ---------------------------------------------------------------------------

struct GapConfig {
    int trials = 200;
    std::uint64_t seed = 1;
    double extent = 32.0;
    std::vector<int> points_per_line = {18, 17, 16, 15};
    double noise_halfwidth = 1.0;
    KernelKind kernel = KernelKind::Hat;
    double sigma = 5.0;          // raw units
    double epsilon_votes = 5.0;  // vote-scale (Sum-mode) units
    int theta_bins = 180;
    int threads = 0;  // 0: PHOUGH_THREADS env var, else hardware default
};

struct GapRow {
    int trial = 0;
    double delta_pers = 0.0;  // persistence[k-1] - persistence[k], 0-based
    int delta_vote = 0;       // k-th minus (k+1)-th largest bin count
};

struct GapResult {
    GapConfig config;
    double epsilon_mean = 0.0;  // epsilon_votes / |P|, the Mean-mode budget used
    std::vector<GapRow> rows;
    double frac_pers_positive = 0.0;
    double frac_vote_zero = 0.0;
};

GapResult gap_experiment(const GapConfig& cfg);

// ---------------------------------------------------------------------------
// Kernel-bandwidth sweep over noise levels
// ---------------------------------------------------------------------------

struct SigmaSweepConfig {
    std::vector<double> sigmas = {1, 1.5, 2, 2.5, 3, 4, 5, 6, 8, 10, 12, 14, 16, 18, 20};
    std::vector<double> noise_levels = {3, 5, 8};
    int trials = 20;
    std::uint64_t seed = 1;
    double extent = 32.0;
    int n_points = 18;
    KernelKind kernel = KernelKind::Hat;
    double epsilon_votes = 5.0;
};

struct SigmaSweepRow {
    double noise = 0.0;
    double sigma = 0.0;
    int trial = 0;
    double error = 0.0;  // normalized match distance to the truth line
};

struct SigmaSweepResult {
    SigmaSweepConfig config;
    std::vector<SigmaSweepRow> rows;
    struct MeanRow {
        double noise = 0.0;
        double sigma = 0.0;
        double mean_error = 0.0;
    };
    std::vector<MeanRow> means;
    std::vector<std::pair<double, double>> best_sigma;  // (noise, argmin-sigma)
};

SigmaSweepResult sigma_sweep(const SigmaSweepConfig& cfg);

// ---------------------------------------------------------------------------
// Approximation-budget sweep: accuracy and runtime vs. epsilon
// ---------------------------------------------------------------------------

struct EpsilonSweepConfig {
    std::vector<double> epsilons_votes = {1, 2, 3, 5, 8, 13};
    int trials = 20;
    std::uint64_t seed = 1;
    double extent = 32.0;
    int n_points = 18;
    double noise_halfwidth = 5.0;
    KernelKind kernel = KernelKind::Hat;
    double sigma = 5.0;
};

struct EpsilonSweepRow {
    double epsilon_votes = 0.0;
    int trial = 0;
    double error = 0.0;
    double detect_ms = 0.0;
    std::size_t cells = 0;
};

struct EpsilonSweepResult {
    EpsilonSweepConfig config;
    std::vector<EpsilonSweepRow> rows;
    struct Stat {
        double epsilon_votes = 0.0;
        double q1 = 0.0, median = 0.0, q3 = 0.0;
        double mean_ms = 0.0;
        double mean_cells = 0.0;
    };
    std::vector<Stat> stats;  // in config order
};

EpsilonSweepResult epsilon_sweep(const EpsilonSweepConfig& cfg);

// ---------------------------------------------------------------------------
// Match-quality comparison on multi-line scenes
// ---------------------------------------------------------------------------

struct QualityConfig {
    int trials = 100;
    std::uint64_t seed = 1;
    double extent = 32.0;
    std::vector<int> points_per_line = {18, 17, 16, 15};
    double noise_halfwidth = 1.0;
    KernelKind kernel = KernelKind::Hat;
    double sigma = 5.0;
    double epsilon_votes = 5.0;
    int theta_bins = 180;
    int threads = 0;
};

struct QualityRow {
    int trial = 0;
    bool persistence_ok = false;  // method produced a full set of lines
    MatchReport persistence_match;
    bool votes_ok = false;
    MatchReport votes_match;
};

struct QualityResult {
    QualityConfig config;
    std::vector<QualityRow> rows;
    int n_both_ok = 0;  // aggregates below are over these trials
    double persistence_mean_distance = 0.0;
    double votes_mean_distance = 0.0;
    double persistence_mean_abs_dr = 0.0;
    double votes_mean_abs_dr = 0.0;
    double persistence_mean_abs_dtheta = 0.0;
    double votes_mean_abs_dtheta = 0.0;
};

QualityResult quality_experiment(const QualityConfig& cfg);

// ---------------------------------------------------------------------------
// Output files: <prefix>_raw.csv and <prefix>_summary.json
// ---------------------------------------------------------------------------

void write_gap_outputs(const GapResult& result, const std::string& prefix);
void write_sigma_outputs(const SigmaSweepResult& result, const std::string& prefix);
void write_epsilon_outputs(const EpsilonSweepResult& result, const std::string& prefix);
void write_quality_outputs(const QualityResult& result, const std::string& prefix);

// Linear-interpolation quantile of a sample (p in [0, 1]).
double quantile(std::vector<double> values, double p);

// Worker count used by trial-parallel experiments: `requested` if positive,
// else the PHOUGH_THREADS environment variable, else a hardware default.
int resolve_threads(int requested);

}  // namespace phough
