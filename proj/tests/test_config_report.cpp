#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "billiards/report.hpp"

#include <sstream>

using namespace billiards;

namespace {

ExperimentConfig sample_config() {
    ExperimentConfig cfg;
    cfg.kind = BodyKind::BumpedEllipsoid;
    cfg.dim = 3;
    cfg.semi_axes = {1.0, 1.25, 1.6};
    cfg.bump_amplitude = 0.05;
    cfg.bump_coeffs = {1.0, -1.0, 0.5};
    cfg.p = 3;
    cfg.solver.n_starts = 64;
    cfg.solver.rng_seed = 42;
    cfg.report_path = "out/report.json";
    cfg.export_path = "out/orbits.tsv";
    return cfg;
}

ExperimentConfig kuiper_config(int n_starts) {
    ExperimentConfig cfg;
    cfg.kind = BodyKind::Ellipsoid;
    cfg.dim = 3;
    cfg.semi_axes = {1.0, 1.3, 1.7};
    cfg.p = 2;
    cfg.solver.n_starts = n_starts;
    cfg.solver.rng_seed = 2718;
    return cfg;
}

} // namespace

TEST_CASE("config round trip") {
    const auto cfg = sample_config();
    const std::string text = serialize_config(cfg);
    const auto back = parse_config_text(text, "round-trip");
    CHECK(back == cfg);
    CHECK(serialize_config(back) == text);
}

TEST_CASE("odd double values survive the round trip") {
    auto cfg = sample_config();
    cfg.semi_axes = {1.0, 1.0 / 3.0, 0.1 + 0.2};
    cfg.solver.tol_crit = 3.141592653589793e-11;
    const auto back = parse_config_text(serialize_config(cfg), "round-trip");
    CHECK(back == cfg);
}

TEST_CASE("config errors carry line context") {
    const std::string bad = "body = ellipsoid\ndim = 3\nsemi_axes = 1 x 2\np = 2\n";
    try {
        (void)parse_config_text(bad, "exp.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("exp.cfg:3") != std::string::npos);
    }

    CHECK_THROWS_AS((void)parse_config_text("dim = 3\n", "x"), ConfigError);
    CHECK_THROWS_AS((void)parse_config_text("body = ellipsoid\nbody = ellipsoid\n", "x"),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config_text("nonsense_key = 1\n", "x"), ConfigError);
    CHECK_THROWS_AS(
        (void)parse_config_text("body = ellipsoid\ndim = 3\nsemi_axes = 1 1\np = 2\n", "x"),
        ConfigError); // axes count != dim
}

TEST_CASE("comments and blank lines are ignored") {
    const std::string text = "# kuiper case\n\nbody = ellipsoid\ndim = 2\n"
                             "semi_axes = 2 1\np = 2\n";
    const auto cfg = parse_config_text(text, "x");
    CHECK(cfg.dim == 2);
    CHECK(cfg.semi_axes == std::vector<double>{2.0, 1.0});
}

TEST_CASE("verdict logic covers all branches") {
    CHECK(compute_verdict(3, 3, 5, true, 4, false) == "PASS");
    CHECK(compute_verdict(3, 3, 4, true, 4, true) == "PASS");
    CHECK(compute_verdict(3, 3, 3, true, 4, false) == "FAIL");
    CHECK(compute_verdict(3, 3, 0, true, 4, true) == "INAPPLICABLE-DEGENERATE");
    CHECK(compute_verdict(3, 2, 3, false, 0, false) == "INAPPLICABLE");
    CHECK(compute_verdict(2, 3, 0, false, 0, false) == "INAPPLICABLE");
    CHECK(compute_verdict(3, 9, 0, false, 0, false) == "INAPPLICABLE");
}

TEST_CASE("kuiper search report") {
    const auto report = run_search(kuiper_config(200));
    CHECK(report.certified_count == 3);
    CHECK_FALSE(report.bound_applicable);
    CHECK(report.verdict == "INAPPLICABLE");
    REQUIRE(report.classes.size() == 3);
    CHECK(report.classes[0].perimeter == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(report.classes[1].perimeter == doctest::Approx(5.2).epsilon(1e-10));
    CHECK(report.classes[2].perimeter == doctest::Approx(6.8).epsilon(1e-10));

    const auto j = report_to_json(report);
    CHECK(j["certified_count"] == 3);
    CHECK(j["verdict"] == "INAPPLICABLE");
    CHECK(j["config"]["p"] == 2);
    CHECK(j.contains("timing"));
}

TEST_CASE("reports are deterministic modulo timing") {
    auto a = report_to_json(run_search(kuiper_config(120)));
    auto b = report_to_json(run_search(kuiper_config(120)));
    a.erase("timing");
    b.erase("timing");
    CHECK(a.dump() == b.dump());
}

TEST_CASE("export round trip and verification") {
    const auto report = run_search(kuiper_config(200));
    const std::string text = export_trajectories(report);
    CHECK(text == export_trajectories(report)); // re-export is byte-identical

    const auto parsed = parse_export(text, "orbits.tsv");
    REQUIRE(parsed.orbits.size() == 3);
    CHECK(parsed.config.p == 2);
    CHECK(parsed.config.semi_axes == std::vector<double>{1.0, 1.3, 1.7});
    CHECK(parsed.orbits[0].perimeter == doctest::Approx(4.0).epsilon(1e-12));
    REQUIRE(parsed.orbits[0].vertices.size() == 2);

    const auto outcome = verify_export(parsed);
    CHECK(outcome.all_ok);
    CHECK(outcome.worst <= 1e-8);
}

TEST_CASE("empty searches export a header-only file") {
    ExperimentConfig cfg = kuiper_config(1);
    cfg.solver.rng_seed = 7; // a single start rarely certifies; force empty by p=5 on sphere
    cfg.semi_axes = {1.0, 1.0, 1.0};
    cfg.p = 5;
    const auto report = run_search(cfg);
    CHECK(report.certified_count == 0);
    const std::string text = export_trajectories(report);
    for (const auto& line : {std::string("# billiards orbit export v1")})
        CHECK(text.find(line) != std::string::npos);
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line))
        CHECK((line.empty() || line[0] == '#'));
    const auto parsed = parse_export(text, "empty.tsv");
    CHECK(parsed.orbits.empty());
}

TEST_CASE("export parser rejects malformed input") {
    CHECK_THROWS_AS((void)parse_export("garbage\n", "x"), ConfigError);
    const auto report = run_search(kuiper_config(60));
    std::string text = export_trajectories(report);
    text += "0\tnot_a_number\n";
    CHECK_THROWS_AS((void)parse_export(text, "x"), ConfigError);
}

TEST_CASE("sphere runs are inapplicable-degenerate") {
    ExperimentConfig cfg;
    cfg.kind = BodyKind::Ellipsoid;
    cfg.dim = 3;
    cfg.semi_axes = {1.0, 1.0, 1.0};
    cfg.p = 3;
    cfg.solver.n_starts = 40;
    cfg.solver.rng_seed = 99;
    const auto report = run_search(cfg);
    CHECK(report.certified_count == 0);
    CHECK(!report.continuum_flagged.empty());
    CHECK(report.verdict == "INAPPLICABLE-DEGENERATE");
    const auto j = report_to_json(report);
    CHECK(j["continuum_flagged"].size() == report.continuum_flagged.size());
}

TEST_CASE("cohomology report fragment") {
    const auto j = run_cohomology(4, 5);
    CHECK(j["plane"]["top_degree"] == 12);
    CHECK(j["plane"]["ok"] == true);
    CHECK(j["sphere"]["top_degree"] == 9);
    CHECK(j["sphere"]["ok"] == true);
    CHECK(j["bounds"]["trajectory_bound"] == 10);
    CHECK(j["bounds"]["hind_sphere"] == 9);

    const auto plane_only = run_cohomology(2, 3);
    CHECK(plane_only["plane"]["betti"]["0"] == 1);
    CHECK(plane_only["plane"]["betti"]["1"] == 3);
    CHECK(plane_only["plane"]["betti"]["2"] == 2);
    CHECK_FALSE(plane_only.contains("sphere"));
}

TEST_CASE("merge reports summarizes verdicts") {
    const auto a = report_to_json(run_search(kuiper_config(60)));
    ExperimentConfig scfg;
    scfg.kind = BodyKind::Ellipsoid;
    scfg.dim = 3;
    scfg.semi_axes = {1.0, 1.0, 1.0};
    scfg.p = 3;
    scfg.solver.n_starts = 30;
    scfg.solver.rng_seed = 5;
    const auto b = report_to_json(run_search(scfg));
    const auto merged = merge_reports({a, b});
    CHECK(merged["summary"]["count"] == 2);
    CHECK(merged["summary"]["fail"] == 0);
    CHECK(merged["summary"]["inapplicable"] == 1);
    CHECK(merged["summary"]["inapplicable_degenerate"] == 1);
    CHECK(merged["summary"]["all_ok"] == true);
    CHECK(merged["reports"].size() == 2);
}

TEST_CASE("body construction from config validates") {
    auto cfg = sample_config();
    CHECK_NOTHROW((void)cfg.make_body());
    cfg.semi_axes = {1.0, -1.0, 1.0};
    CHECK_THROWS((void)cfg.make_body());

    auto ell = kuiper_config(5);
    ell.bump_amplitude = 0.1; // ellipsoid kind must not carry bump fields
    CHECK_THROWS_AS(ell.validate(), ConfigError);
}
