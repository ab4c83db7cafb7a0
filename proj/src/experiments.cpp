#include "phough/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "phough/baseline.hpp"
#include "phough/io.hpp"
#include "phough/rng.hpp"
#include "phough/scene.hpp"

namespace phough {

namespace {

using nlohmann::json;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

// Largest |r| a line can have and still meet the square [0, extent]^2.
double extent_r_max(double extent) { return extent * std::sqrt(2.0); }

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

DetectorConfig sum_units_detector(KernelKind kind, double sigma, double epsilon_votes,
                                  std::size_t n_points) {
    // Vote-scale budgets are quoted in Sum-mode units; the detector runs in
    // Mean mode with the equivalent per-point budget.
    DetectorConfig cfg;
    cfg.kernel = KernelSpec(kind, sigma);
    cfg.epsilon = epsilon_votes / static_cast<double>(n_points);
    cfg.mode = NormalizationMode::Mean;
    return cfg;
}

Accumulator scene_accumulator(const Scene& scene, int theta_bins) {
    double max_norm = 0.0;
    for (const Point& p : scene.points) max_norm = std::max(max_norm, norm(p));
    const double r_max = std::max(1.0, std::ceil(max_norm));
    const int r_bins = static_cast<int>(2.0 * r_max);  // one-unit r resolution
    return accumulate(scene.points, r_bins, theta_bins, r_max);
}

std::vector<LineParams> truth_lines(const Scene& scene) {
    std::vector<LineParams> lines;
    lines.reserve(scene.truth.size());
    for (const LineSpec& spec : scene.truth) lines.push_back(spec.params);
    return lines;
}

}  // namespace

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("PHOUGH_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (values.size() - 1) * std::clamp(p, 0.0, 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

double line_distance_mobius(const LineParams& a_in, const LineParams& b_in, double r_max) {
    if (!std::isfinite(r_max) || !(r_max > 0.0)) {
        throw std::invalid_argument("r_max must be positive and finite");
    }
    const LineParams a = canonicalize(a_in);
    const LineParams b = canonicalize(b_in);
    const double direct = std::hypot((a.r - b.r) / r_max, (a.theta - b.theta) / kPi);
    const double wrapped =
        std::hypot((a.r + b.r) / r_max, (kPi - std::abs(a.theta - b.theta)) / kPi);
    return std::min(direct, wrapped);
}

MatchReport match_lines(std::span<const LineParams> detected, std::span<const LineParams> truth,
                        double r_max) {
    const std::size_t n = truth.size();
    if (detected.size() != n) {
        throw std::invalid_argument("matching needs equally many detected and truth lines");
    }
    if (n == 0) throw std::invalid_argument("matching needs at least one line");
    if (n > 9) throw std::invalid_argument("exact assignment supports at most 9 lines");

    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cost[i * n + j] = line_distance_mobius(truth[i], detected[j], r_max);
        }
    }
    std::vector<std::size_t> perm(n), best(n);
    std::iota(perm.begin(), perm.end(), 0u);
    best = perm;
    double best_total = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += cost[i * n + perm[i]];
        if (total < best_total) {
            best_total = total;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    MatchReport report;
    std::vector<double> distances;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = best[i];
        const LineParams a = canonicalize(truth[i]);
        const LineParams b = canonicalize(detected[j]);
        const double direct = std::hypot((a.r - b.r) / r_max, (a.theta - b.theta) / kPi);
        const double wrapped =
            std::hypot((a.r + b.r) / r_max, (kPi - std::abs(a.theta - b.theta)) / kPi);
        MatchedLine m;
        m.truth_index = i;
        m.detected_index = j;
        m.distance = std::min(direct, wrapped);
        if (direct <= wrapped) {
            m.abs_dr = std::abs(a.r - b.r);
            m.abs_dtheta = std::abs(a.theta - b.theta);
        } else {
            m.abs_dr = std::abs(a.r + b.r);
            m.abs_dtheta = kPi - std::abs(a.theta - b.theta);
        }
        report.per_line.push_back(m);
        report.mean_distance += m.distance;
        report.mean_abs_dr += m.abs_dr;
        report.mean_abs_dtheta += m.abs_dtheta;
        distances.push_back(m.distance);
    }
    report.mean_distance /= n;
    report.mean_abs_dr /= n;
    report.mean_abs_dtheta /= n;
    report.distance_quartiles = {quantile(distances, 0.25), quantile(distances, 0.5),
                                 quantile(distances, 0.75)};
    return report;
}

GapResult gap_experiment(const GapConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("need at least one trial");
    const std::size_t total_points =
        std::accumulate(cfg.points_per_line.begin(), cfg.points_per_line.end(), std::size_t{0});
    const int k = static_cast<int>(cfg.points_per_line.size());

    GapResult result;
    result.config = cfg;
    result.epsilon_mean = cfg.epsilon_votes / static_cast<double>(total_points);
    result.rows.resize(cfg.trials);

    parallel_for(cfg.trials, resolve_threads(cfg.threads), [&](int trial) {
        const Scene scene = gen_random_scene(cfg.points_per_line, cfg.noise_halfwidth, cfg.extent,
                                             substream_seed(cfg.seed, trial));
        const DetectorConfig det =
            sum_units_detector(cfg.kernel, cfg.sigma, cfg.epsilon_votes, total_points);
        const DetectionResult res = detect(scene.points, det, SelectionPolicy::top_k(k));
        GapRow row;
        row.trial = trial;
        row.delta_pers = persistence_at(res.pairs, k - 1) - persistence_at(res.pairs, k);
        try {
            row.delta_vote = vote_gap(scene_accumulator(scene, cfg.theta_bins), k);
        } catch (const std::invalid_argument&) {
            row.delta_vote = 0;  // degenerate accumulator: no usable gap
        }
        result.rows[trial] = row;
    });

    int pers_positive = 0, vote_zero = 0;
    for (const GapRow& row : result.rows) {
        if (row.delta_pers > 0.0) ++pers_positive;
        if (row.delta_vote == 0) ++vote_zero;
    }
    result.frac_pers_positive = static_cast<double>(pers_positive) / cfg.trials;
    result.frac_vote_zero = static_cast<double>(vote_zero) / cfg.trials;
    return result;
}

SigmaSweepResult sigma_sweep(const SigmaSweepConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("need at least one trial");
    if (cfg.sigmas.empty() || cfg.noise_levels.empty()) {
        throw std::invalid_argument("sweep grids must be non-empty");
    }
    SigmaSweepResult result;
    result.config = cfg;
    const double r_max = extent_r_max(cfg.extent);

    for (std::size_t ni = 0; ni < cfg.noise_levels.size(); ++ni) {
        const double noise = cfg.noise_levels[ni];
        // One scene set per noise level, shared across the sigma grid so the
        // comparison is paired.
        std::vector<Scene> scenes;
        scenes.reserve(cfg.trials);
        for (int t = 0; t < cfg.trials; ++t) {
            scenes.push_back(gen_random_scene({cfg.n_points}, noise, cfg.extent,
                                              substream_seed(cfg.seed, ni * 100003ull + t)));
        }
        double best_sigma = cfg.sigmas.front();
        double best_err = std::numeric_limits<double>::infinity();
        for (const double sigma : cfg.sigmas) {
            double sum_err = 0.0;
            for (int t = 0; t < cfg.trials; ++t) {
                const Scene& scene = scenes[t];
                const DetectorConfig det =
                    sum_units_detector(cfg.kernel, sigma, cfg.epsilon_votes, scene.points.size());
                const DetectionResult res =
                    detect(scene.points, det, SelectionPolicy::top_k(1));
                const double err =
                    line_distance_mobius(res.lines.at(0).line, scene.truth.at(0).params, r_max);
                result.rows.push_back({noise, sigma, t, err});
                sum_err += err;
            }
            const double mean_err = sum_err / cfg.trials;
            result.means.push_back({noise, sigma, mean_err});
            if (mean_err < best_err) {
                best_err = mean_err;
                best_sigma = sigma;
            }
        }
        result.best_sigma.emplace_back(noise, best_sigma);
    }
    return result;
}

EpsilonSweepResult epsilon_sweep(const EpsilonSweepConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("need at least one trial");
    if (cfg.epsilons_votes.empty()) throw std::invalid_argument("sweep grid must be non-empty");
    EpsilonSweepResult result;
    result.config = cfg;
    const double r_max = extent_r_max(cfg.extent);

    std::vector<Scene> scenes;
    scenes.reserve(cfg.trials);
    for (int t = 0; t < cfg.trials; ++t) {
        scenes.push_back(gen_random_scene({cfg.n_points}, cfg.noise_halfwidth, cfg.extent,
                                          substream_seed(cfg.seed, t)));
    }

    for (const double eps : cfg.epsilons_votes) {
        std::vector<double> errors;
        double sum_ms = 0.0, sum_cells = 0.0;
        for (int t = 0; t < cfg.trials; ++t) {
            const Scene& scene = scenes[t];
            const DetectorConfig det =
                sum_units_detector(cfg.kernel, cfg.sigma, eps, scene.points.size());
            const auto t0 = std::chrono::steady_clock::now();
            const DetectionResult res = detect(scene.points, det, SelectionPolicy::top_k(1));
            const auto t1 = std::chrono::steady_clock::now();
            const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            const double err =
                line_distance_mobius(res.lines.at(0).line, scene.truth.at(0).params, r_max);
            result.rows.push_back({eps, t, err, ms, res.field.cells.size()});
            errors.push_back(err);
            sum_ms += ms;
            sum_cells += static_cast<double>(res.field.cells.size());
        }
        result.stats.push_back({eps, quantile(errors, 0.25), quantile(errors, 0.5),
                                quantile(errors, 0.75), sum_ms / cfg.trials,
                                sum_cells / cfg.trials});
    }
    return result;
}

QualityResult quality_experiment(const QualityConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("need at least one trial");
    const std::size_t total_points =
        std::accumulate(cfg.points_per_line.begin(), cfg.points_per_line.end(), std::size_t{0});
    const int k = static_cast<int>(cfg.points_per_line.size());

    QualityResult result;
    result.config = cfg;
    result.rows.resize(cfg.trials);
    const double r_max = extent_r_max(cfg.extent);

    parallel_for(cfg.trials, resolve_threads(cfg.threads), [&](int trial) {
        const Scene scene = gen_random_scene(cfg.points_per_line, cfg.noise_halfwidth, cfg.extent,
                                             substream_seed(cfg.seed, trial));
        const std::vector<LineParams> truth = truth_lines(scene);
        QualityRow row;
        row.trial = trial;

        const DetectorConfig det =
            sum_units_detector(cfg.kernel, cfg.sigma, cfg.epsilon_votes, total_points);
        const DetectionResult res = detect(scene.points, det, SelectionPolicy::top_k(k));
        if (res.lines.size() == static_cast<std::size_t>(k)) {
            std::vector<LineParams> lines;
            for (const DetectedLine& l : res.lines) lines.push_back(l.line);
            row.persistence_match = match_lines(lines, truth, r_max);
            row.persistence_ok = true;
        }
        try {
            const std::vector<LineParams> lines =
                top_bin_lines(scene_accumulator(scene, cfg.theta_bins), k);
            row.votes_match = match_lines(lines, truth, r_max);
            row.votes_ok = true;
        } catch (const std::invalid_argument&) {
            row.votes_ok = false;
        }
        result.rows[trial] = row;
    });

    for (const QualityRow& row : result.rows) {
        if (!row.persistence_ok || !row.votes_ok) continue;
        ++result.n_both_ok;
        result.persistence_mean_distance += row.persistence_match.mean_distance;
        result.votes_mean_distance += row.votes_match.mean_distance;
        result.persistence_mean_abs_dr += row.persistence_match.mean_abs_dr;
        result.votes_mean_abs_dr += row.votes_match.mean_abs_dr;
        result.persistence_mean_abs_dtheta += row.persistence_match.mean_abs_dtheta;
        result.votes_mean_abs_dtheta += row.votes_match.mean_abs_dtheta;
    }
    if (result.n_both_ok > 0) {
        const double inv = 1.0 / result.n_both_ok;
        result.persistence_mean_distance *= inv;
        result.votes_mean_distance *= inv;
        result.persistence_mean_abs_dr *= inv;
        result.votes_mean_abs_dr *= inv;
        result.persistence_mean_abs_dtheta *= inv;
        result.votes_mean_abs_dtheta *= inv;
    }
    return result;
}

void write_gap_outputs(const GapResult& result, const std::string& prefix) {
    {
        auto out = open_output(prefix + "_raw.csv");
        out << "trial,delta_pers,delta_vote\n";
        for (const GapRow& row : result.rows) {
            out << row.trial << ',' << format_sig(row.delta_pers) << ',' << row.delta_vote << '\n';
        }
    }
    const json j = {{"trials", result.config.trials},
                    {"seed", result.config.seed},
                    {"extent", round_sig(result.config.extent)},
                    {"points_per_line", result.config.points_per_line},
                    {"noise_halfwidth", round_sig(result.config.noise_halfwidth)},
                    {"sigma", round_sig(result.config.sigma)},
                    {"epsilon_votes", round_sig(result.config.epsilon_votes)},
                    {"epsilon_mean", round_sig(result.epsilon_mean)},
                    {"theta_bins", result.config.theta_bins},
                    {"frac_delta_pers_positive", round_sig(result.frac_pers_positive)},
                    {"frac_delta_vote_zero", round_sig(result.frac_vote_zero)}};
    open_output(prefix + "_summary.json") << j.dump(2) << '\n';
}

void write_sigma_outputs(const SigmaSweepResult& result, const std::string& prefix) {
    {
        auto out = open_output(prefix + "_raw.csv");
        out << "noise,sigma,trial,error\n";
        for (const SigmaSweepRow& row : result.rows) {
            out << format_sig(row.noise) << ',' << format_sig(row.sigma) << ',' << row.trial << ','
                << format_sig(row.error) << '\n';
        }
    }
    json means = json::array();
    for (const auto& m : result.means) {
        means.push_back({{"noise", round_sig(m.noise)},
                         {"sigma", round_sig(m.sigma)},
                         {"mean_error", round_sig(m.mean_error)}});
    }
    json best = json::array();
    for (const auto& [noise, sigma] : result.best_sigma) {
        best.push_back({{"noise", round_sig(noise)}, {"best_sigma", round_sig(sigma)}});
    }
    const json j = {{"trials", result.config.trials},
                    {"seed", result.config.seed},
                    {"extent", round_sig(result.config.extent)},
                    {"n_points", result.config.n_points},
                    {"epsilon_votes", round_sig(result.config.epsilon_votes)},
                    {"means", means},
                    {"best_sigma", best}};
    open_output(prefix + "_summary.json") << j.dump(2) << '\n';
}

void write_epsilon_outputs(const EpsilonSweepResult& result, const std::string& prefix) {
    {
        auto out = open_output(prefix + "_raw.csv");
        out << "epsilon_votes,trial,error,detect_ms,cells\n";
        for (const EpsilonSweepRow& row : result.rows) {
            out << format_sig(row.epsilon_votes) << ',' << row.trial << ','
                << format_sig(row.error) << ',' << format_sig(row.detect_ms) << ',' << row.cells
                << '\n';
        }
    }
    json stats = json::array();
    for (const auto& s : result.stats) {
        stats.push_back({{"epsilon_votes", round_sig(s.epsilon_votes)},
                         {"error_q1", round_sig(s.q1)},
                         {"error_median", round_sig(s.median)},
                         {"error_q3", round_sig(s.q3)},
                         {"mean_detect_ms", round_sig(s.mean_ms)},
                         {"mean_cells", round_sig(s.mean_cells)}});
    }
    double ratio = 0.0;
    if (result.stats.size() >= 2) {
        const auto [min_it, max_it] = std::minmax_element(
            result.stats.begin(), result.stats.end(),
            [](const auto& a, const auto& b) { return a.epsilon_votes < b.epsilon_votes; });
        if (max_it->mean_ms > 0.0) ratio = min_it->mean_ms / max_it->mean_ms;
    }
    const json j = {{"trials", result.config.trials},
                    {"seed", result.config.seed},
                    {"noise_halfwidth", round_sig(result.config.noise_halfwidth)},
                    {"sigma", round_sig(result.config.sigma)},
                    {"stats", stats},
                    {"runtime_ratio_smallest_over_largest_eps", round_sig(ratio)}};
    open_output(prefix + "_summary.json") << j.dump(2) << '\n';
}

void write_quality_outputs(const QualityResult& result, const std::string& prefix) {
    {
        auto out = open_output(prefix + "_raw.csv");
        out << "trial,method,ok,mean_distance,mean_abs_dr,mean_abs_dtheta\n";
        for (const QualityRow& row : result.rows) {
            out << row.trial << ",persistence," << (row.persistence_ok ? 1 : 0) << ','
                << format_sig(row.persistence_match.mean_distance) << ','
                << format_sig(row.persistence_match.mean_abs_dr) << ','
                << format_sig(row.persistence_match.mean_abs_dtheta) << '\n';
            out << row.trial << ",votes," << (row.votes_ok ? 1 : 0) << ','
                << format_sig(row.votes_match.mean_distance) << ','
                << format_sig(row.votes_match.mean_abs_dr) << ','
                << format_sig(row.votes_match.mean_abs_dtheta) << '\n';
        }
    }
    const json j = {{"trials", result.config.trials},
                    {"seed", result.config.seed},
                    {"n_both_ok", result.n_both_ok},
                    {"persistence",
                     {{"mean_distance", round_sig(result.persistence_mean_distance)},
                      {"mean_abs_dr", round_sig(result.persistence_mean_abs_dr)},
                      {"mean_abs_dtheta", round_sig(result.persistence_mean_abs_dtheta)}}},
                    {"votes",
                     {{"mean_distance", round_sig(result.votes_mean_distance)},
                      {"mean_abs_dr", round_sig(result.votes_mean_abs_dr)},
                      {"mean_abs_dtheta", round_sig(result.votes_mean_abs_dtheta)}}}};
    open_output(prefix + "_summary.json") << j.dump(2) << '\n';
}

}  // namespace phough
