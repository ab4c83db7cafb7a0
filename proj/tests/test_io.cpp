#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "phough/detect.hpp"
#include "phough/io.hpp"
#include "phough/scene.hpp"

using namespace phough;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("phough_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << text;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("numbers are printed with nine significant digits") {
    CHECK(format_sig(0.5) == "0.5");
    CHECK(format_sig(1.0 / 3.0) == "0.333333333");
    CHECK(format_sig(123456789.25) == "123456789");
    CHECK(format_sig(-0.0001234567891) == "-0.000123456789");
    CHECK(format_sig(0.0) == "0");
    CHECK(round_sig(1.0 / 3.0) == 0.333333333);
    CHECK(round_sig(0.5) == 0.5);
    // round trip of an already-rounded value is the identity
    CHECK(round_sig(round_sig(0.1234567895)) == round_sig(0.1234567895));
}

TEST_CASE("csv point reader") {
    const TempDir dir;
    SUBCASE("skips comments and blank lines") {
        spit(dir.file("pts.csv"), "# header\n\n1.5,2.5\n  \t\n-3,4e1  \n#tail\n0,0\n");
        const auto pts = read_points_csv(dir.file("pts.csv"));
        REQUIRE(pts.size() == 3);
        CHECK(pts[0].x == 1.5);
        CHECK(pts[0].y == 2.5);
        CHECK(pts[1].x == -3.0);
        CHECK(pts[1].y == 40.0);
        CHECK(pts[2].x == 0.0);
    }
    SUBCASE("reports the offending line") {
        spit(dir.file("bad.csv"), "1,2\nnot a point\n3,4\n");
        try {
            read_points_csv(dir.file("bad.csv"));
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line == 2);
            CHECK(std::string(e.what()).find(":2:") != std::string::npos);
        }
    }
    SUBCASE("rejects non-finite coordinates") {
        spit(dir.file("inf.csv"), "1,2\ninf,0\n");
        CHECK_THROWS_AS(read_points_csv(dir.file("inf.csv")), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_points_csv(dir.file("nope.csv")), std::runtime_error);
    }
    SUBCASE("round trips through the writer") {
        const std::vector<Point> pts = {{1.25, -2.5}, {0.0, 3.75}};
        write_points_csv(dir.file("out.csv"), pts);
        const auto back = read_points_csv(dir.file("out.csv"));
        REQUIRE(back.size() == 2);
        CHECK(back[0].x == 1.25);
        CHECK(back[1].y == 3.75);
    }
}

TEST_CASE("json point reader accepts both accepted shapes") {
    const TempDir dir;
    spit(dir.file("arr.json"), "[[1, 2], [3.5, -4]]");
    auto pts = read_points_json(dir.file("arr.json"));
    REQUIRE(pts.size() == 2);
    CHECK(pts[1].x == 3.5);

    spit(dir.file("obj.json"), "{\"points\": [[0, 1]], \"extra\": true}");
    pts = read_points_json(dir.file("obj.json"));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].y == 1.0);

    spit(dir.file("bad.json"), "{\"nope\": 1}");
    CHECK_THROWS_AS(read_points_json(dir.file("bad.json")), ParseError);
    spit(dir.file("mangled.json"), "[[1, 2");
    CHECK_THROWS_AS(read_points_json(dir.file("mangled.json")), ParseError);
    spit(dir.file("triple.json"), "[[1, 2, 3]]");
    CHECK_THROWS_AS(read_points_json(dir.file("triple.json")), ParseError);
}

TEST_CASE("auto reader dispatches on the extension") {
    const TempDir dir;
    spit(dir.file("a.json"), "[[9, 9]]");
    spit(dir.file("a.csv"), "8,8\n");
    CHECK(read_points_auto(dir.file("a.json"))[0].x == 9.0);
    CHECK(read_points_auto(dir.file("a.csv"))[0].x == 8.0);
}

TEST_CASE("scene files survive a write/read cycle") {
    const TempDir dir;
    const Scene scene = demo_three_lines(123);
    write_scene_json(dir.file("scene.json"), scene);
    const Scene back = read_scene_json(dir.file("scene.json"));
    CHECK(back.extent == scene.extent);
    CHECK(back.seed == scene.seed);
    REQUIRE(back.truth.size() == scene.truth.size());
    for (std::size_t i = 0; i < scene.truth.size(); ++i) {
        CHECK(back.truth[i].params.r == doctest::Approx(scene.truth[i].params.r).epsilon(1e-8));
        CHECK(back.truth[i].n_points == scene.truth[i].n_points);
    }
    REQUIRE(back.points.size() == scene.points.size());
    for (std::size_t i = 0; i < scene.points.size(); ++i) {
        CHECK(back.points[i].x == doctest::Approx(scene.points[i].x).epsilon(1e-8));
        CHECK(back.points[i].y == doctest::Approx(scene.points[i].y).epsilon(1e-8));
    }
    // scene files are valid detector input because of the points key
    const auto pts = read_points_auto(dir.file("scene.json"));
    CHECK(pts.size() == scene.points.size());
}

TEST_CASE("detected line list serializes scores and persistences") {
    const TempDir dir;
    const std::vector<DetectedLine> lines = {{{10.0, 0.5}, 0.75, 0.3}, {{-4.0, 2.0}, 0.5, 0.1}};
    write_lines_json(dir.file("lines.json"), lines);
    const std::string text = slurp(dir.file("lines.json"));
    CHECK(text.find("\"r\": 10") != std::string::npos);
    CHECK(text.find("\"persistence\": 0.3") != std::string::npos);
    CHECK(text.find("\"score\": 0.75") != std::string::npos);
}

TEST_CASE("diagram rows map representatives back to raw lines") {
    const Scene scene = demo_three_lines(3);
    DetectorConfig cfg;
    cfg.kernel = KernelSpec(KernelKind::Hat, 2.0);
    cfg.epsilon = 0.05;
    const DetectionResult res = detect(scene.points, cfg, SelectionPolicy::top_k(1));
    const auto rows = diagram_rows(res.pairs, res.field, res.cloud.frame());
    REQUIRE(rows.size() == res.pairs.size());
    int essential = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].birth == res.pairs[i].birth);
        CHECK(rows[i].death == res.pairs[i].death);
        CHECK(rows[i].birth >= rows[i].death);
        if (rows[i].death == 0.0) ++essential;
        // representative midpoint denormalizes to the reported line
        const ParamBox& box = res.field.cells.at(res.pairs[i].representative).box;
        const LineParams raw =
            res.cloud.frame().line_to_raw(canonicalize({box.r_mid(), box.theta_mid()}));
        CHECK(rows[i].line.r == raw.r);
        CHECK(rows[i].line.theta == raw.theta);
    }
    CHECK(essential == 1);

    const TempDir dir;
    write_diagram_csv(dir.file("d.csv"), rows);
    const std::string text = slurp(dir.file("d.csv"));
    CHECK(text.rfind("birth,death,persistence,r,theta\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(rows.size()) + 1);
}

TEST_CASE("cell fields survive a write/read cycle") {
    const Scene scene = demo_three_lines(5);
    DetectorConfig cfg;
    cfg.kernel = KernelSpec(KernelKind::Hat, 3.0);
    cfg.epsilon = 0.06;
    const DetectionResult res = detect(scene.points, cfg, SelectionPolicy::top_k(1));

    const TempDir dir;
    write_field_json(dir.file("field.json"), res.field, res.cloud.frame());
    const LoadedField loaded = read_field_json(dir.file("field.json"));

    REQUIRE(loaded.field.cells.size() == res.field.cells.size());
    CHECK(loaded.field.mode == res.field.mode);
    CHECK(loaded.field.epsilon == doctest::Approx(res.field.epsilon).epsilon(1e-8));
    CHECK(loaded.field.r0 == doctest::Approx(res.field.r0).epsilon(1e-8));
    CHECK(loaded.frame.scale == doctest::Approx(res.cloud.frame().scale).epsilon(1e-8));
    CHECK(loaded.frame.center.x == doctest::Approx(res.cloud.frame().center.x).epsilon(1e-8));
    for (std::size_t i = 0; i < res.field.cells.size(); ++i) {
        const Cell& a = res.field.cells[i];
        const Cell& b = loaded.field.cells[i];
        CHECK(a.id == b.id);
        CHECK(a.depth == b.depth);
        CHECK(a.ix == b.ix);
        CHECK(a.iy == b.iy);
        CHECK(b.value == doctest::Approx(a.value).epsilon(1e-8));
        CHECK(b.box.r_lo == doctest::Approx(a.box.r_lo).epsilon(1e-8));
        CHECK(b.box.theta_hi == doctest::Approx(a.box.theta_hi).epsilon(1e-8));
    }
    CHECK(loaded.field.max_depth_seen == res.field.max_depth_seen);

    // the reloaded field supports the same downstream pipeline
    const NerveGraph g_orig = build_nerve(res.field, true);
    const NerveGraph g_back = build_nerve(loaded.field, true);
    CHECK(g_orig.edges == g_back.edges);
    const auto pairs_back = compute_persistence(g_back);
    REQUIRE(pairs_back.size() == res.pairs.size());
    for (std::size_t i = 0; i < pairs_back.size(); ++i) {
        CHECK(pairs_back[i].representative == res.pairs[i].representative);
        CHECK(pairs_back[i].birth == doctest::Approx(res.pairs[i].birth).epsilon(1e-8));
    }

    SUBCASE("malformed field files are rejected") {
        spit(dir.file("bad1.json"), "{\"cells\": []}");
        CHECK_THROWS_AS(read_field_json(dir.file("bad1.json")), ParseError);
        spit(dir.file("bad2.json"),
             "{\"domain\": {\"r_lo\": -1, \"r_hi\": 1, \"theta_lo\": 0, \"theta_hi\": 3}, "
             "\"epsilon\": 0.1, \"cells\": []}");
        CHECK_THROWS_AS(read_field_json(dir.file("bad2.json")), ParseError);
    }
}
