#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phough/detect.hpp"
#include "phough/experiments.hpp"
#include "phough/io.hpp"
#include "phough/scene.hpp"
#include "phough/svg.hpp"

namespace {

using namespace phough;

KernelKind parse_kernel(const std::string& name) {
    return name == "rbf" ? KernelKind::Rbf : KernelKind::Hat;
}

NormalizationMode parse_mode(const std::string& name) {
    return name == "sum" ? NormalizationMode::Sum : NormalizationMode::Mean;
}

struct DetectArgs {
    std::string input;
    std::string kernel = "hat";
    double sigma = 0.0;
    double epsilon = 0.02;
    std::string mode = "mean";
    int top_k = 0;
    double alpha = 0.0;
    bool has_top_k = false, has_alpha = false;
    std::string lines_path, diagram_path, svg_path, field_path;
    int max_depth = 30;
    double min_cell_diameter = 1e-12;
    bool global_lipschitz = false;
    bool no_glue = false;
};

void run_detect(const DetectArgs& a) {
    const std::vector<Point> points = read_points_auto(a.input);
    if (points.empty()) throw std::runtime_error(a.input + ": empty point cloud");

    DetectorConfig cfg;
    cfg.kernel = KernelSpec(parse_kernel(a.kernel), a.sigma);
    cfg.epsilon = a.epsilon;
    cfg.mode = parse_mode(a.mode);
    cfg.max_depth = a.max_depth;
    cfg.min_cell_diameter = a.min_cell_diameter;
    cfg.use_global_lipschitz = a.global_lipschitz;
    cfg.mobius = !a.no_glue;
    const SelectionPolicy policy =
        a.has_top_k ? SelectionPolicy::top_k(a.top_k) : SelectionPolicy::threshold(a.alpha);

    const DetectionResult res = detect(points, cfg, policy);

    // All computation succeeded; only now touch the filesystem.
    if (!a.lines_path.empty()) {
        write_lines_json(a.lines_path, res.lines);
    } else {
        std::cout << "[";
        for (std::size_t i = 0; i < res.lines.size(); ++i) {
            const DetectedLine& l = res.lines[i];
            std::cout << (i ? ",\n " : "\n ") << "{\"r\": " << format_sig(l.line.r)
                      << ", \"theta\": " << format_sig(l.line.theta)
                      << ", \"score\": " << format_sig(l.score)
                      << ", \"persistence\": " << format_sig(l.persistence) << "}";
        }
        std::cout << "\n]\n";
    }
    if (!a.diagram_path.empty()) {
        const auto rows = diagram_rows(res.pairs, res.field, res.cloud.frame());
        write_diagram_csv(a.diagram_path, rows);
    }
    if (!a.svg_path.empty()) {
        std::vector<LineParams> lines;
        for (const DetectedLine& l : res.lines) lines.push_back(l.line);
        write_scene_svg(a.svg_path, points, {}, lines);
    }
    if (!a.field_path.empty()) {
        write_field_json(a.field_path, res.field, res.cloud.frame());
    }
    std::cerr << "cells=" << res.field.cells.size() << " pairs=" << res.pairs.size()
              << " lines=" << res.lines.size() << " build_ms=" << format_sig(res.build_ms)
              << " persistence_ms=" << format_sig(res.persistence_ms) << "\n";
}

struct GenerateArgs {
    std::uint64_t seed = 0;
    int lines = 0;
    std::vector<int> points;
    double noise = 1.0;
    double extent = 32.0;
    std::string preset;
    std::string out = "scene.json";
    std::string csv_path, svg_path;
};

void run_generate(const GenerateArgs& a) {
    Scene scene;
    if (a.preset == "three-lines") {
        scene = demo_three_lines(a.seed);
    } else {
        std::vector<int> per_line = a.points;
        if (per_line.empty()) {
            per_line.assign(a.lines > 0 ? a.lines : 4, 18);
        } else if (a.lines > 0 && static_cast<std::size_t>(a.lines) != per_line.size()) {
            throw std::runtime_error("--lines disagrees with the length of --points");
        }
        scene = gen_random_scene(per_line, a.noise, a.extent, a.seed);
    }
    write_scene_json(a.out, scene);
    if (!a.csv_path.empty()) write_points_csv(a.csv_path, scene.points);
    if (!a.svg_path.empty()) {
        std::vector<LineParams> truth;
        for (const LineSpec& spec : scene.truth) truth.push_back(spec.params);
        write_scene_svg(a.svg_path, scene.points, truth, {});
    }
    std::cerr << "scene: " << scene.points.size() << " points, " << scene.truth.size()
              << " lines -> " << a.out << "\n";
}

struct DiagramArgs {
    std::string field_path;
    std::string out = "diagram.csv";
    std::string svg_path;
    bool no_glue = false;
};

void run_diagram(const DiagramArgs& a) {
    const LoadedField loaded = read_field_json(a.field_path);
    const NerveGraph nerve = build_nerve(loaded.field, !a.no_glue);
    const std::vector<PersistencePair> pairs = compute_persistence(nerve);
    const auto rows = diagram_rows(pairs, loaded.field, loaded.frame);
    write_diagram_csv(a.out, rows);
    if (!a.svg_path.empty()) write_diagram_svg(a.svg_path, pairs);
    std::cerr << "pairs=" << pairs.size() << " -> " << a.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Line detection in 2-D point clouds via a certified score approximation "
                 "and 0-dimensional persistence"};
    app.require_subcommand(1);

    // ---- detect ----
    DetectArgs det;
    CLI::App* detect_cmd = app.add_subcommand("detect", "Detect lines in a point cloud");
    detect_cmd->add_option("--input", det.input, "Point file (CSV x,y or JSON)")->required();
    detect_cmd->add_option("--kernel", det.kernel, "Kernel family")
        ->check(CLI::IsMember({"hat", "rbf"}))
        ->capture_default_str();
    detect_cmd->add_option("--sigma", det.sigma, "Kernel width in input units")->required();
    detect_cmd->add_option("--epsilon", det.epsilon, "Approximation budget (score units)")
        ->capture_default_str();
    detect_cmd->add_option("--mode", det.mode, "Score normalization")
        ->check(CLI::IsMember({"mean", "sum"}))
        ->capture_default_str();
    CLI::Option* opt_k = detect_cmd->add_option("--top-k", det.top_k, "Select the k most "
                                                "persistent lines");
    CLI::Option* opt_a =
        detect_cmd->add_option("--alpha", det.alpha, "Select lines with persistence >= alpha");
    opt_k->excludes(opt_a);
    opt_a->excludes(opt_k);
    detect_cmd->add_option("--lines", det.lines_path, "Write detected lines JSON here "
                           "(default: stdout)");
    detect_cmd->add_option("--diagram", det.diagram_path, "Write persistence diagram CSV here");
    detect_cmd->add_option("--svg", det.svg_path, "Write a scene plot here");
    detect_cmd->add_option("--save-field", det.field_path, "Cache the cell field JSON here");
    detect_cmd->add_option("--max-depth", det.max_depth, "Subdivision depth guard")
        ->capture_default_str();
    detect_cmd->add_option("--min-cell-diameter", det.min_cell_diameter, "Subdivision size guard")
        ->capture_default_str();
    detect_cmd->add_flag("--global-lipschitz", det.global_lipschitz,
                         "Use the global bound instead of per-box bounds");
    detect_cmd->add_flag("--no-glue", det.no_glue, "Disable the twisted seam identification");
    detect_cmd->callback([&] {
        det.has_top_k = opt_k->count() > 0;
        det.has_alpha = opt_a->count() > 0;
        if (det.has_top_k == det.has_alpha) {
            throw CLI::ValidationError("detect", "exactly one of --top-k / --alpha is required");
        }
        run_detect(det);
    });

    // ---- generate ----
    GenerateArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("generate", "Generate a synthetic scene");
    gen_cmd->add_option("--seed", gen.seed, "RNG seed")->required();
    gen_cmd->add_option("--lines", gen.lines, "Number of random lines");
    gen_cmd->add_option("--points", gen.points, "Points per line, comma separated")
        ->delimiter(',');
    gen_cmd->add_option("--noise", gen.noise, "Orthogonal noise half-width")
        ->capture_default_str();
    gen_cmd->add_option("--extent", gen.extent, "Scene square side length")
        ->capture_default_str();
    gen_cmd->add_option("--preset", gen.preset, "Named scene (three-lines)")
        ->check(CLI::IsMember({"three-lines"}));
    gen_cmd->add_option("--out", gen.out, "Scene JSON output path")->capture_default_str();
    gen_cmd->add_option("--csv", gen.csv_path, "Also write the points as CSV here");
    gen_cmd->add_option("--svg", gen.svg_path, "Write a scene plot here");
    gen_cmd->callback([&] { run_generate(gen); });

    // ---- diagram ----
    DiagramArgs dia;
    CLI::App* dia_cmd = app.add_subcommand("diagram", "Persistence diagram of a cached field");
    dia_cmd->add_option("--field", dia.field_path, "Cell field JSON")->required();
    dia_cmd->add_option("--out", dia.out, "Diagram CSV output path")->capture_default_str();
    dia_cmd->add_option("--svg", dia.svg_path, "Write a diagram plot here");
    dia_cmd->add_flag("--no-glue", dia.no_glue, "Disable the twisted seam identification");
    dia_cmd->callback([&] { run_diagram(dia); });

    // ---- benchmark ----
    CLI::App* bench = app.add_subcommand("benchmark", "Run an experiment and write its tables");
    bench->require_subcommand(1);

    GapConfig gap_cfg;
    std::string gap_prefix = "gap";
    std::string gap_kernel = "hat";
    CLI::App* gap_cmd = bench->add_subcommand("gap", "Persistence gap vs. vote gap");
    gap_cmd->add_option("--seed", gap_cfg.seed, "RNG seed")->required();
    gap_cmd->add_option("--trials", gap_cfg.trials, "Trial count")->capture_default_str();
    gap_cmd->add_option("--extent", gap_cfg.extent, "Scene side")->capture_default_str();
    gap_cmd->add_option("--points", gap_cfg.points_per_line, "Points per line")->delimiter(',');
    gap_cmd->add_option("--noise", gap_cfg.noise_halfwidth, "Noise half-width")
        ->capture_default_str();
    gap_cmd->add_option("--kernel", gap_kernel, "Kernel family")
        ->check(CLI::IsMember({"hat", "rbf"}));
    gap_cmd->add_option("--sigma", gap_cfg.sigma, "Kernel width")->capture_default_str();
    gap_cmd->add_option("--epsilon-votes", gap_cfg.epsilon_votes, "Budget in vote units")
        ->capture_default_str();
    gap_cmd->add_option("--theta-bins", gap_cfg.theta_bins, "Accumulator theta bins")
        ->capture_default_str();
    gap_cmd->add_option("--threads", gap_cfg.threads, "Worker cap (0: env/hardware)");
    gap_cmd->add_option("--out-prefix", gap_prefix, "Output file prefix")->capture_default_str();
    gap_cmd->callback([&] {
        gap_cfg.kernel = parse_kernel(gap_kernel);
        const GapResult res = gap_experiment(gap_cfg);
        write_gap_outputs(res, gap_prefix);
        std::cout << "frac_delta_pers_positive=" << format_sig(res.frac_pers_positive)
                  << " frac_delta_vote_zero=" << format_sig(res.frac_vote_zero) << "\n";
    });

    QualityConfig qual_cfg;
    std::string qual_prefix = "quality";
    std::string qual_kernel = "hat";
    CLI::App* qual_cmd = bench->add_subcommand("quality", "Match quality vs. the vote baseline");
    qual_cmd->add_option("--seed", qual_cfg.seed, "RNG seed")->required();
    qual_cmd->add_option("--trials", qual_cfg.trials, "Trial count")->capture_default_str();
    qual_cmd->add_option("--extent", qual_cfg.extent, "Scene side")->capture_default_str();
    qual_cmd->add_option("--points", qual_cfg.points_per_line, "Points per line")->delimiter(',');
    qual_cmd->add_option("--noise", qual_cfg.noise_halfwidth, "Noise half-width")
        ->capture_default_str();
    qual_cmd->add_option("--kernel", qual_kernel, "Kernel family")
        ->check(CLI::IsMember({"hat", "rbf"}));
    qual_cmd->add_option("--sigma", qual_cfg.sigma, "Kernel width")->capture_default_str();
    qual_cmd->add_option("--epsilon-votes", qual_cfg.epsilon_votes, "Budget in vote units")
        ->capture_default_str();
    qual_cmd->add_option("--theta-bins", qual_cfg.theta_bins, "Accumulator theta bins")
        ->capture_default_str();
    qual_cmd->add_option("--threads", qual_cfg.threads, "Worker cap (0: env/hardware)");
    qual_cmd->add_option("--out-prefix", qual_prefix, "Output file prefix")
        ->capture_default_str();
    qual_cmd->callback([&] {
        qual_cfg.kernel = parse_kernel(qual_kernel);
        const QualityResult res = quality_experiment(qual_cfg);
        write_quality_outputs(res, qual_prefix);
        std::cout << "n_both_ok=" << res.n_both_ok
                  << " persistence_mean_distance=" << format_sig(res.persistence_mean_distance)
                  << " votes_mean_distance=" << format_sig(res.votes_mean_distance) << "\n";
    });

    SigmaSweepConfig sig_cfg;
    std::string sig_prefix = "sigma_sweep";
    std::string sig_kernel = "hat";
    CLI::App* sig_cmd = bench->add_subcommand("sigma-sweep", "Error vs. kernel width");
    sig_cmd->add_option("--seed", sig_cfg.seed, "RNG seed")->required();
    sig_cmd->add_option("--trials", sig_cfg.trials, "Trials per configuration")
        ->capture_default_str();
    sig_cmd->add_option("--sigmas", sig_cfg.sigmas, "Sigma grid")->delimiter(',');
    sig_cmd->add_option("--noise-levels", sig_cfg.noise_levels, "Noise grid")->delimiter(',');
    sig_cmd->add_option("--extent", sig_cfg.extent, "Scene side")->capture_default_str();
    sig_cmd->add_option("--n-points", sig_cfg.n_points, "Points on the line")
        ->capture_default_str();
    sig_cmd->add_option("--kernel", sig_kernel, "Kernel family")
        ->check(CLI::IsMember({"hat", "rbf"}));
    sig_cmd->add_option("--epsilon-votes", sig_cfg.epsilon_votes, "Budget in vote units")
        ->capture_default_str();
    sig_cmd->add_option("--out-prefix", sig_prefix, "Output file prefix")->capture_default_str();
    sig_cmd->callback([&] {
        sig_cfg.kernel = parse_kernel(sig_kernel);
        const SigmaSweepResult res = sigma_sweep(sig_cfg);
        write_sigma_outputs(res, sig_prefix);
        for (const auto& [noise, sigma] : res.best_sigma) {
            std::cout << "noise=" << format_sig(noise) << " best_sigma=" << format_sig(sigma)
                      << "\n";
        }
    });

    EpsilonSweepConfig eps_cfg;
    std::string eps_prefix = "eps_sweep";
    std::string eps_kernel = "hat";
    CLI::App* eps_cmd = bench->add_subcommand("eps-sweep", "Error and runtime vs. budget");
    eps_cmd->add_option("--seed", eps_cfg.seed, "RNG seed")->required();
    eps_cmd->add_option("--trials", eps_cfg.trials, "Trials per budget")->capture_default_str();
    eps_cmd->add_option("--epsilons", eps_cfg.epsilons_votes, "Budget grid in vote units")
        ->delimiter(',');
    eps_cmd->add_option("--extent", eps_cfg.extent, "Scene side")->capture_default_str();
    eps_cmd->add_option("--n-points", eps_cfg.n_points, "Points on the line")
        ->capture_default_str();
    eps_cmd->add_option("--noise", eps_cfg.noise_halfwidth, "Noise half-width")
        ->capture_default_str();
    eps_cmd->add_option("--kernel", eps_kernel, "Kernel family")
        ->check(CLI::IsMember({"hat", "rbf"}));
    eps_cmd->add_option("--sigma", eps_cfg.sigma, "Kernel width")->capture_default_str();
    eps_cmd->add_option("--out-prefix", eps_prefix, "Output file prefix")->capture_default_str();
    eps_cmd->callback([&] {
        eps_cfg.kernel = parse_kernel(eps_kernel);
        const EpsilonSweepResult res = epsilon_sweep(eps_cfg);
        write_epsilon_outputs(res, eps_prefix);
        for (const auto& s : res.stats) {
            std::cout << "epsilon_votes=" << format_sig(s.epsilon_votes)
                      << " median_error=" << format_sig(s.median)
                      << " mean_ms=" << format_sig(s.mean_ms) << "\n";
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
