#include <atomic>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "qcausal/explore.hpp"

using namespace qcausal;

namespace {

const double kPi = std::acos(-1.0);

SweepConfig small(const std::string& preset, int nq, int nt) {
    SweepConfig cfg;
    std::istringstream in("preset = " + preset + "\ngrid = " + std::to_string(nq) + "x" + std::to_string(nt) + "\n");
    apply_config(cfg, parse_config_text(in));
    return cfg;
}

struct SvgCell {
    std::string q, theta, value;
};

std::vector<SvgCell> parse_svg(const std::string& svg) {
    std::regex re("<rect[^>]*data-q=\"([^\"]+)\" data-theta=\"([^\"]+)\" data-value=\"([^\"]+)\"");
    std::vector<SvgCell> out;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it)
        out.push_back({(*it)[1], (*it)[2], (*it)[3]});
    return out;
}

}  // namespace

TEST_CASE("config grammar") {
    std::istringstream in(
        "# comment line\n"
        "preset = uniform\n"
        "\n"
        "grid = 7x9   # trailing comment\n"
        "tol=1e-7\n"
        "jobs = 3\n"
        "out = results\n"
        "c15 = 0.01, -0.02\n");
    auto kv = parse_config_text(in);
    CHECK(kv.size() == 6);
    CHECK(kv.at("grid") == "7x9");
    SweepConfig cfg;
    apply_config(cfg, kv);
    CHECK(cfg.grid_q == 7);
    CHECK(cfg.grid_theta == 9);
    CHECK(cfg.tolerance == 1e-7);
    CHECK(cfg.jobs == 3);
    CHECK(cfg.out_dir == "results");
    CHECK(cfg.preset.empty());  // an explicit coefficient makes the set custom
    CHECK(cfg.coefficients.c11 == FCoefficients::preset("uniform").c11);
    CHECK(cfg.coefficients.c15 == cplx(0.01, -0.02));

    // later overrides win
    apply_config(cfg, {{"grid", "3x4"}, {"long", "true"}});
    CHECK(cfg.grid_q == 100);
    CHECK(cfg.grid_theta == 100);

    SweepConfig bare;
    apply_config(bare, {{"c11", "0.1 0"}});
    CHECK(bare.coefficients.c11 == cplx(0.1, 0));
    CHECK(bare.coefficients.c15 == cplx(0, 0));
    CHECK(bare.coefficients.c51 == cplx(0, 0));

    std::istringstream bad("nonsense = 1\n");
    SweepConfig c2;
    CHECK_THROWS_AS(apply_config(c2, parse_config_text(bad)), std::invalid_argument);
    std::istringstream noeq("grid 4x4\n");
    CHECK_THROWS_AS(parse_config_text(noeq), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("44"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config(c2, {{"jobs", "two"}}), std::invalid_argument);
}

TEST_CASE("grid endpoints are inclusive and configs validate") {
    SweepConfig cfg = small("star", 5, 7);
    CHECK(cfg.q_at(0) == 0.0);
    CHECK(cfg.q_at(4) == 1.0);
    CHECK(cfg.q_at(2) == 0.5);
    CHECK(cfg.theta_at(0) == 0.0);
    CHECK(cfg.theta_at(6) == 2 * kPi);
    CHECK(cfg.theta_at(3) == doctest::Approx(kPi));
    CHECK_NOTHROW(cfg.validate());
    cfg.grid_q = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    SweepConfig over;
    over.coefficients = FCoefficients{cplx(0.3, 0)};
    CHECK_THROWS_AS(over.validate(), std::invalid_argument);
}

TEST_CASE("parallel_for rethrows the lowest failing index") {
    std::atomic<int> ran{0};
    try {
        parallel_for(20, 3, [&](int i) {
            ++ran;
            if (i == 7 || i == 13) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "7");
    }
    CHECK(ran == 20);
}

TEST_CASE("sweep output: CSV roundtrip, SVG encodes the CSV values, deterministic across job counts") {
    SweepConfig cfg = small("star", 3, 4);
    SweepResult a = sweep(cfg);
    REQUIRE(a.cells.size() == 12);
    CHECK(a.all_optimal());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) {
            CHECK(a.at(i, j).iq == i);
            CHECK(a.at(i, j).itheta == j);
            CHECK(a.at(i, j).q == cfg.q_at(i));
        }
    // q = 1 is W_OCB in every column
    for (int j = 0; j < 4; ++j) CHECK(a.at(2, j).robustness == doctest::Approx(0.1715728753).epsilon(1e-7));

    std::ostringstream csv;
    write_csv(a, csv);
    std::istringstream back(csv.str());
    std::vector<SweepCell> cells = read_csv(back);
    REQUIRE(cells.size() == a.cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        CHECK(std::abs(cells[k].robustness - a.cells[k].robustness) < 1e-11);
        CHECK(cells[k].status == SolverStatus::optimal);
    }

    std::ostringstream svg;
    write_svg(a, svg, "test");
    std::vector<SvgCell> rects = parse_svg(svg.str());
    REQUIRE(rects.size() == a.cells.size());
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    for (const auto& r : rects) {
        std::getline(lines, line);
        CHECK(line.rfind(r.q + "," + r.theta + "," + r.value + ",", 0) == 0);
    }
    CHECK(svg.str().find("href") == std::string::npos);
    CHECK(svg.str().find("max " + format_value(a.max_robustness())) != std::string::npos);
    CHECK(svg.str().find("min " + format_value(a.min_robustness())) != std::string::npos);

    cfg.jobs = 2;
    SweepResult b = sweep(cfg);
    for (std::size_t k = 0; k < a.cells.size(); ++k) CHECK(std::abs(a.cells[k].robustness - b.cells[k].robustness) < 1e-6);
}

TEST_CASE("zero preset: theta independence and zero crossings") {
    SweepConfig cfg = small("zero", 5, 4);
    SweepResult r = sweep(cfg);
    for (int i = 0; i < 5; ++i) CHECK(r.row_variation(i) < 1e-4);
    CHECK(r.at(0, 0).robustness > 0.1);
    CHECK(r.at(2, 0).robustness < 1e-6);
    std::vector<double> x = robustness_crossings(r, 0, 1e-4);
    REQUIRE(x.size() == 2);
    CHECK(std::abs(x[0] - 0.15) <= 0.01);
    CHECK(std::abs(x[1] - 0.85) <= 0.01);
}

TEST_CASE("quarter preset: every q row has a non-separable cell") {
    SweepResult r = sweep(small("quarter", 5, 6));
    for (int i = 0; i < 5; ++i) {
        double best = 0.0;
        for (int j = 0; j < 6; ++j) best = std::max(best, r.at(i, j).robustness);
        CHECK(best > 1e-4);
    }
}

TEST_CASE("anchor file") {
    std::vector<Anchor> a = load_anchors(default_anchor_path());
    REQUIRE(a.size() == 20);
    CHECK(a[0].label == "a");
    CHECK(a[0].q == 1.0);
    CHECK(a[1].q == 0.0);
    CHECK(a[5].theta == doctest::Approx(kPi));
    CHECK(a.back().label == "v");
    CHECK(a.back().theta == 5.11);
    CHECK_THROWS(load_anchors("/nonexistent/anchors.csv"));
}

TEST_CASE("witness coverage of the star preset on a 50x50 grid") {
    std::vector<Anchor> anchors = load_anchors(default_anchor_path());
    CoverageReport rep = witness_cover(FCoefficients::preset("star"), anchors, 50, 50);
    CHECK(rep.uncovered.empty());
    REQUIRE(rep.regions.size() == 20);
    SweepConfig grid = small("star", 50, 50);
    for (const auto& reg : rep.regions) {
        CHECK(reg.certified);
        CHECK(reg.anchor_value < 0.0);
        for (int k = 0; k < 2500; ++k) CHECK((reg.mask[k] != 0) == (reg.values[k] < 0.0));
    }
    const AnchorRegion& a = rep.regions[0];
    const AnchorRegion& b = rep.regions[1];
    for (int k = 0; k < 2500; ++k) {
        double q = grid.q_at(k / 50);
        if (q >= 0.853553) CHECK(a.mask[k]);
        if (q <= 0.146447) CHECK(b.mask[k]);
    }
}

TEST_CASE("demos") {
    DemoReport h = demo("heralded");
    CHECK(h.passed);
    CHECK(h.text().find("p = 0.5, complement = W#, both branches valid") != std::string::npos);

    DemoReport d = demo("delayed-choice");
    CHECK(d.passed);
    CHECK(d.text().find("z-basis: A≺B, A≺B; x-basis: B≺A, B≺A; λ_min = 0.054") != std::string::npos);

    DemoReport n = demo("nogo");
    CHECK(n.passed);
    CHECK(n.text().find("500/500 trials consistent") != std::string::npos);

    for (const char* name : {"opposing", "classical3", "povm"}) {
        DemoReport r = demo(name);
        INFO(r.text());
        CHECK(r.passed);
    }
    CHECK(demo_names().size() == 6);
    CHECK_THROWS_AS(demo("unknown"), std::invalid_argument);
}
