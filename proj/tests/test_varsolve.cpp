#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "billiards/dynamics.hpp"
#include "billiards/rng.hpp"
#include "billiards/varsolve.hpp"

#include <cmath>

using namespace billiards;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs)
        v[i++] = x;
    return v;
}

Vec random_unit(GaussianStream& rng, int d) {
    Vec u(d);
    do {
        for (int i = 0; i < d; ++i)
            u[i] = rng.normal();
    } while (u.norm() < 1e-8);
    return u / u.norm();
}

TrajectoryCandidate random_feasible(const BodyModel& body, int p, GaussianStream& rng) {
    const double min_edge = 1e-3 * body.diameter();
    std::vector<Vec> pts(p);
    while (true) {
        for (int i = 0; i < p; ++i)
            pts[i] = body.radial_project(random_unit(rng, body.dim())).position;
        bool ok = true;
        for (int i = 0; i < p && ok; ++i)
            ok = (pts[i] - pts[(i + 1) % p]).norm() >= min_edge;
        if (ok)
            return make_candidate(body, pts);
    }
}

TrajectoryCandidate regular_polygon(const BodyModel& sphere, int p, int turns = 1,
                                    double phase = 0.0) {
    std::vector<Vec> pts;
    for (int i = 0; i < p; ++i) {
        const double a = phase + 2.0 * M_PI * turns * i / p;
        pts.push_back(vec({std::cos(a), std::sin(a), 0.0}));
    }
    return make_candidate(sphere, pts);
}

bool bitwise_equal(const std::vector<TrajectoryCandidate>& a,
                   const std::vector<TrajectoryCandidate>& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].p() != b[i].p() || a[i].perimeter != b[i].perimeter ||
            a[i].kkt_residual != b[i].kkt_residual || a[i].converged != b[i].converged ||
            a[i].continuum_suspect != b[i].continuum_suspect)
            return false;
        for (int j = 0; j < a[i].p(); ++j)
            if (a[i].vertices[j].position != b[i].vertices[j].position)
                return false;
    }
    return true;
}

} // namespace

TEST_CASE("perimeter of reference polygons") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});

    const auto two_gon = make_candidate(sphere, {vec({0, 0, 1}), vec({0, 0, -1})});
    CHECK(two_gon.perimeter == doctest::Approx(4.0).epsilon(1e-14));

    const auto triangle = regular_polygon(sphere, 3);
    CHECK(triangle.perimeter == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-14));

    const auto circle = BodyModel::ellipsoid({1.0, 1.0});
    std::vector<Vec> star;
    for (int i = 0; i < 5; ++i) {
        const double a = 2.0 * M_PI * 2 * i / 5;
        star.push_back(vec({std::cos(a), std::sin(a)}));
    }
    CHECK(make_candidate(circle, star).perimeter ==
          doctest::Approx(10.0 * std::sin(2.0 * M_PI / 5.0)).epsilon(1e-14));
}

TEST_CASE("perimeter rejects coincident vertices") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    const auto bp = sphere.radial_project(vec({1, 0, 0}));
    CHECK_THROWS_AS((void)perimeter({bp, bp, sphere.radial_project(vec({0, 1, 0}))}),
                    DegenerateEdge);
}

TEST_CASE("gradient of a regular polygon is radial") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    const auto traj = regular_polygon(sphere, 5);
    const auto grad = perimeter_gradient(traj.vertices);
    for (int i = 0; i < 5; ++i) {
        const Vec n = traj.vertices[i].normal;
        CHECK((grad[i] - grad[i].dot(n) * n).norm() < 1e-14);
    }

    const auto two_gon = make_candidate(sphere, {vec({0, 0, 1}), vec({0, 0, -1})});
    const auto g2 = perimeter_gradient(two_gon.vertices);
    CHECK((g2[0] - 2.0 * two_gon.vertices[0].position).norm() < 1e-14);
}

TEST_CASE("gradient matches central finite differences") {
    const auto body = BodyModel::bumped_ellipsoid({1.0, 1.25, 1.6}, 0.05, {1.0, -1.0, 0.5});
    GaussianStream rng(4242);
    const double h = 1e-6 * body.diameter();
    for (int rep = 0; rep < 100; ++rep) {
        auto traj = random_feasible(body, 5, rng);
        const auto grad = perimeter_gradient(traj.vertices);
        double num = 0.0, den = 0.0;
        for (int i = 0; i < traj.p(); ++i) {
            for (int k = 0; k < 3; ++k) {
                auto vp = traj.vertices, vm = traj.vertices;
                vp[i].position[k] += h;
                vm[i].position[k] -= h;
                const double fd = (perimeter(vp) - perimeter(vm)) / (2.0 * h);
                num = std::max(num, std::abs(fd - grad[i][k]));
            }
            den = std::max(den, grad[i].norm());
        }
        CHECK(num <= 1e-6 * (1.0 + den));
    }
}

TEST_CASE("kkt residual vanishes exactly at orbits") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    CHECK(kkt_residual(sphere, regular_polygon(sphere, 3)) <= 1e-12);

    const auto ellipsoid = BodyModel::ellipsoid({1.0, 1.3, 1.7});
    const auto axis = make_candidate(ellipsoid, {vec({0, 0, 1.7}), vec({0, 0, -1.7})});
    CHECK(kkt_residual(ellipsoid, axis) <= 1e-12);
}

TEST_CASE("kkt residual is positive away from orbits") {
    const auto body = BodyModel::bumped_ellipsoid({1.0, 1.25, 1.6}, 0.05, {1.0, -1.0, 0.5});
    GaussianStream rng(555);
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        const double r = kkt_residual(body, random_feasible(body, 4, rng));
        CHECK(r > 1e-3);
        worst = std::max(worst, r);
    }
    CHECK(worst > 0.1);
}

TEST_CASE("newton refinement recovers the great-circle triangle") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    auto start = regular_polygon(sphere, 3);
    GaussianStream rng(7);
    for (auto& v : start.vertices) {
        Vec moved = v.position;
        for (int k = 0; k < 3; ++k)
            moved[k] += 1e-2 * rng.normal();
        v = sphere.project_to_boundary(moved);
    }
    SolverConfig cfg;
    const auto refined = newton_refine(sphere, start, cfg);
    CHECK(refined.converged);
    CHECK(refined.kkt_residual <= 1e-10);
    CHECK(refined.perimeter == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(closure_residual(sphere, refined) <= 1e-8);
}

TEST_CASE("nearly coincident starts take the degenerate-edge exit") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    Vec close = vec({1, 1e-9, 0});
    close /= close.norm();
    const auto start =
        make_candidate(sphere, {vec({1, 0, 0}), close, vec({-1, 0, 0})});
    SolverConfig cfg;
    const auto refined = newton_refine(sphere, start, cfg);
    CHECK_FALSE(refined.converged);
    CHECK(refined.degenerate_edge);
}

TEST_CASE("newton refinement finds the major axis") {
    const auto body = BodyModel::ellipsoid({1.0, 1.3, 1.7});
    const auto start = make_candidate(body, {vec({0.05, -0.03, 1.69}), vec({-0.04, 0.02, -1.69})});
    SolverConfig cfg;
    const auto refined = newton_refine(body, start, cfg);
    CHECK(refined.converged);
    CHECK(refined.perimeter == doctest::Approx(4.0 * 1.7).epsilon(1e-12));
}

TEST_CASE("continuum classification separates integrable bodies") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    SolverConfig cfg;

    auto pentagon = newton_refine(sphere, regular_polygon(sphere, 5), cfg);
    REQUIRE(pentagon.converged);
    CHECK(classify_continuum(sphere, pentagon));
    CHECK(pentagon.continuum_suspect);

    const auto bumped = BodyModel::bumped_ellipsoid({1.0, 1.25, 1.6}, 0.05, {1.0, -1.0, 0.5});
    cfg.n_starts = 60;
    cfg.rng_seed = 11;
    auto found = multistart_search(bumped, 3, cfg);
    REQUIRE(!found.empty());
    for (auto& t : found)
        CHECK_FALSE(t.continuum_suspect);

    const auto generic = BodyModel::ellipsoid({1.0, 1.3, 1.7});
    auto axis = newton_refine(
        generic, make_candidate(generic, {vec({0, 0, 1.7}), vec({0, 0, -1.7})}), cfg);
    REQUIRE(axis.converged);
    CHECK_FALSE(classify_continuum(generic, axis));
}

TEST_CASE("reduced hessian of a sphere triangle has zero modes") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    const auto traj = regular_polygon(sphere, 3);
    const Vec spec = reduced_hessian_spectrum(sphere, traj);
    REQUIRE(spec.size() == 6); // p (d-1) tangent directions
    const double scale = spec.cwiseAbs().maxCoeff();
    int zero_modes = 0;
    for (int i = 0; i < spec.size(); ++i)
        if (std::abs(spec[i]) < 1e-8 * scale)
            ++zero_modes;
    CHECK(zero_modes >= 1);
}

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    SolverConfig bad = cfg;
    bad.n_starts = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = cfg;
    bad.tol_crit = 1e-7; // spec caps certification at 1e-8
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = cfg;
    bad.tol_crit = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = cfg;
    bad.edge_factor = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = cfg;
    bad.armijo_shrink = 1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
    bad = cfg;
    bad.deflation_radius = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParams);
}

TEST_CASE("multistart results respect the edge exclusion") {
    const auto body = BodyModel::bumped_ellipsoid({1.0, 1.25, 1.6}, 0.05, {1.0, -1.0, 0.5});
    SolverConfig cfg;
    cfg.n_starts = 40;
    cfg.rng_seed = 3;
    const auto found = multistart_search(body, 3, cfg);
    REQUIRE(!found.empty());
    const double eps_edge = cfg.edge_factor * body.diameter();
    for (const auto& t : found) {
        CHECK(t.converged);
        CHECK(t.min_edge() >= eps_edge);
        CHECK(t.kkt_residual <= cfg.tol_crit);
        for (const auto& v : t.vertices)
            CHECK(std::abs(body.constraint(v.position)) <= body.boundary_tol());
    }
}

TEST_CASE("multistart is deterministic and thread-invariant") {
    const auto body = BodyModel::ellipsoid({1.0, 1.3, 1.7});
    SolverConfig cfg;
    cfg.n_starts = 50;
    cfg.rng_seed = 9001;
    const auto a = multistart_search(body, 2, cfg, 1);
    const auto b = multistart_search(body, 2, cfg, 1);
    const auto c = multistart_search(body, 2, cfg, 4);
    CHECK(bitwise_equal(a, b));
    CHECK(bitwise_equal(a, c));
    CHECK(!a.empty());
}

TEST_CASE("sphere searches are all flagged as continuum") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    SolverConfig cfg;
    cfg.n_starts = 30;
    cfg.rng_seed = 5;
    const auto found = multistart_search(sphere, 3, cfg);
    REQUIRE(!found.empty());
    for (const auto& t : found)
        CHECK(t.continuum_suspect);
}
