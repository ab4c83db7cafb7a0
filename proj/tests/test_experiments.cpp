#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "phough/experiments.hpp"
#include "phough/rng.hpp"

using namespace phough;

namespace {

// Exhaustive assignment oracle, written independently of the library's.
double assignment_cost_oracle(const std::vector<LineParams>& detected,
                              const std::vector<LineParams>& truth, double r_max) {
    std::vector<std::size_t> idx(truth.size());
    std::iota(idx.begin(), idx.end(), 0u);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            total += line_distance_mobius(truth[i], detected[idx[i]], r_max);
        }
        best = std::min(best, total);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("phough_exp_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string prefix(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("line distance respects the twisted identification") {
    const double r_max = 10.0;
    CHECK(line_distance_mobius({3.0, 1.0}, {3.0, 1.0}, r_max) == 0.0);
    // (r, theta) and (-r, theta + pi) name the same line
    CHECK(line_distance_mobius({3.0, 0.2}, {-3.0, 0.2 + kPi}, r_max) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // near-seam pair: theta difference is ~0.01 across the seam, not ~pi
    const double d = line_distance_mobius({4.0, 0.005}, {-4.0, kPi - 0.005}, r_max);
    CHECK(d == doctest::Approx(0.01 / kPi).epsilon(1e-6));

    SUBCASE("metric axioms hold on samples") {
        Rng rng(71);
        for (int i = 0; i < 400; ++i) {
            const LineParams a{rng.uniform(-8.0, 8.0), rng.uniform(0.0, kPi)};
            const LineParams b{rng.uniform(-8.0, 8.0), rng.uniform(0.0, kPi)};
            const LineParams c{rng.uniform(-8.0, 8.0), rng.uniform(0.0, kPi)};
            const double ab = line_distance_mobius(a, b, r_max);
            const double ba = line_distance_mobius(b, a, r_max);
            CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
            CHECK(ab >= 0.0);
            CHECK(line_distance_mobius(a, a, r_max) == 0.0);
            const double ac = line_distance_mobius(a, c, r_max);
            const double cb = line_distance_mobius(c, b, r_max);
            CHECK(ab <= ac + cb + 1e-12);
        }
    }
}

TEST_CASE("matching picks the cost-minimal bijection") {
    const double r_max = 32.0 * std::sqrt(2.0);
    SUBCASE("identity match has zero error") {
        const std::vector<LineParams> truth = {{3.0, 0.3}, {-7.0, 1.9}, {12.0, 2.7}};
        const MatchReport rep = match_lines(truth, truth, r_max);
        CHECK(rep.mean_distance == 0.0);
        CHECK(rep.mean_abs_dr == 0.0);
        CHECK(rep.mean_abs_dtheta == 0.0);
        for (const MatchedLine& m : rep.per_line) {
            CHECK(m.truth_index == m.detected_index);
        }
    }
    SUBCASE("seam-crossing pair reports the identified angle difference") {
        const std::vector<LineParams> truth = {{5.0, 0.005}};
        const std::vector<LineParams> detected = {{-5.0, kPi - 0.005}};
        const MatchReport rep = match_lines(detected, truth, r_max);
        CHECK(rep.per_line[0].abs_dtheta == doctest::Approx(0.01).epsilon(1e-9));
        CHECK(rep.per_line[0].abs_dr == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("random four-line sets match the factorial oracle") {
        Rng rng(72);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<LineParams> truth, detected;
            for (int i = 0; i < 4; ++i) {
                truth.push_back({rng.uniform(-20.0, 20.0), rng.uniform(0.0, kPi)});
                detected.push_back({rng.uniform(-20.0, 20.0), rng.uniform(0.0, kPi)});
            }
            const MatchReport rep = match_lines(detected, truth, r_max);
            double total = 0.0;
            for (const MatchedLine& m : rep.per_line) total += m.distance;
            CHECK(total ==
                  doctest::Approx(assignment_cost_oracle(detected, truth, r_max)).epsilon(1e-12));
        }
    }
    SUBCASE("count mismatch is rejected") {
        CHECK_THROWS_AS(match_lines(std::vector<LineParams>{{1.0, 1.0}},
                                    std::vector<LineParams>{{1.0, 1.0}, {2.0, 2.0}}, r_max),
                        std::invalid_argument);
    }
}

TEST_CASE("sample quantiles interpolate linearly") {
    CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 0.0) == 1.0);
    CHECK(quantile({4.0, 1.0, 3.0, 2.0}, 1.0) == 4.0);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.25) == doctest::Approx(2.0));
    CHECK(quantile({7.0}, 0.75) == 7.0);
    CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
}

TEST_CASE("worker count resolution") {
    CHECK(resolve_threads(3) == 3);
    ::setenv("PHOUGH_THREADS", "2", 1);
    CHECK(resolve_threads(0) == 2);
    ::setenv("PHOUGH_THREADS", "0", 1);
    const int fallback = resolve_threads(0);
    CHECK(fallback >= 1);
    ::unsetenv("PHOUGH_THREADS");
    CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("gap experiment is deterministic and writes complete tables") {
    GapConfig cfg;
    cfg.trials = 6;
    cfg.seed = 5;
    cfg.threads = 2;
    const GapResult a = gap_experiment(cfg);
    const GapResult b = gap_experiment(cfg);
    REQUIRE(a.rows.size() == 6);
    CHECK(a.epsilon_mean == doctest::Approx(5.0 / 66.0));
    for (int i = 0; i < 6; ++i) {
        CHECK(a.rows[i].trial == i);
        CHECK(a.rows[i].delta_pers == b.rows[i].delta_pers);
        CHECK(a.rows[i].delta_vote == b.rows[i].delta_vote);
        CHECK(a.rows[i].delta_pers >= 0.0);
        CHECK(a.rows[i].delta_vote >= 0);
    }
    // thread count must not change results
    cfg.threads = 1;
    const GapResult c = gap_experiment(cfg);
    for (int i = 0; i < 6; ++i) {
        CHECK(a.rows[i].delta_pers == c.rows[i].delta_pers);
    }

    const TempDir dir;
    write_gap_outputs(a, dir.prefix("gap"));
    const std::string raw = slurp(dir.prefix("gap") + "_raw.csv");
    CHECK(std::count(raw.begin(), raw.end(), '\n') == 7);  // header + 6 rows
    CHECK(raw.rfind("trial,delta_pers,delta_vote", 0) == 0);
    const std::string summary = slurp(dir.prefix("gap") + "_summary.json");
    CHECK(summary.find("frac_delta_pers_positive") != std::string::npos);
    write_gap_outputs(b, dir.prefix("gap2"));
    CHECK(slurp(dir.prefix("gap2") + "_raw.csv") == raw);
}

TEST_CASE("noiseless separated lines always leave a persistence gap") {
    GapConfig cfg;
    cfg.trials = 4;
    cfg.seed = 11;
    cfg.noise_halfwidth = 0.0;
    cfg.threads = 2;
    const GapResult res = gap_experiment(cfg);
    for (const GapRow& row : res.rows) CHECK(row.delta_pers > 0.0);
    CHECK(res.frac_pers_positive == 1.0);
}

TEST_CASE("epsilon sweep shares scenes and coarsens monotonically") {
    EpsilonSweepConfig cfg;
    cfg.trials = 3;
    cfg.seed = 13;
    cfg.epsilons_votes = {2.0, 5.0, 11.0};
    const EpsilonSweepResult res = epsilon_sweep(cfg);
    REQUIRE(res.rows.size() == 9);
    REQUIRE(res.stats.size() == 3);
    // per shared scene, leaf counts never increase as the budget grows
    for (int t = 0; t < 3; ++t) {
        std::vector<std::size_t> cells;
        for (const auto& row : res.rows) {
            if (row.trial == t) cells.push_back(row.cells);
        }
        REQUIRE(cells.size() == 3);
        CHECK(cells[0] >= cells[1]);
        CHECK(cells[1] >= cells[2]);
    }
    const TempDir dir;
    write_epsilon_outputs(res, dir.prefix("eps"));
    const std::string summary = slurp(dir.prefix("eps") + "_summary.json");
    CHECK(summary.find("runtime_ratio_smallest_over_largest_eps") != std::string::npos);
}

TEST_CASE("sigma sweep recovers noiseless lines at small widths") {
    SigmaSweepConfig cfg;
    cfg.trials = 3;
    cfg.seed = 17;
    cfg.sigmas = {1.0, 2.0};
    cfg.noise_levels = {0.0};
    const SigmaSweepResult res = sigma_sweep(cfg);
    REQUIRE(res.means.size() == 2);
    for (const auto& m : res.means) {
        CHECK(m.mean_error < 0.02);  // every small sigma nails a noiseless line
    }
    REQUIRE(res.best_sigma.size() == 1);
    CHECK(res.best_sigma[0].first == 0.0);
}

TEST_CASE("quality experiment aggregates only fully verdicted trials") {
    QualityConfig cfg;
    cfg.trials = 4;
    cfg.seed = 19;
    cfg.threads = 2;
    const QualityResult res = quality_experiment(cfg);
    REQUIRE(res.rows.size() == 4);
    CHECK(res.n_both_ok >= 0);
    CHECK(res.n_both_ok <= 4);
    for (const QualityRow& row : res.rows) {
        if (row.persistence_ok) {
            CHECK(row.persistence_match.per_line.size() == 4);
        }
    }
    const TempDir dir;
    write_quality_outputs(res, dir.prefix("q"));
    const std::string raw = slurp(dir.prefix("q") + "_raw.csv");
    CHECK(std::count(raw.begin(), raw.end(), '\n') == 9);  // header + 2 per trial
}
