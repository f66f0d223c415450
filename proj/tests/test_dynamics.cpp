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

TrajectoryCandidate great_circle_triangle(const BodyModel& sphere, double phase = 0.0) {
    std::vector<Vec> pts;
    for (int i = 0; i < 3; ++i) {
        const double a = phase + 2.0 * M_PI * i / 3.0;
        pts.push_back(vec({std::cos(a), std::sin(a), 0.0}));
    }
    return make_candidate(sphere, pts);
}

} // namespace

TEST_CASE("reflect known directions") {
    const Vec up = vec({0, 0, 1});
    CHECK((reflect(vec({0, 0, 1}), up) - vec({0, 0, -1})).norm() < 1e-15);

    const double c = std::sqrt(2.0) / 2.0;
    CHECK((reflect(vec({c, 0, c}), up) - vec({c, 0, -c})).norm() < 1e-15);

    CHECK_THROWS_AS((void)reflect(vec({1, 0, 0}), up), GrazingImpact);
}

TEST_CASE("reflect properties on random data") {
    GaussianStream rng(99);
    int done = 0;
    while (done < 100) {
        const Vec n = random_unit(rng, 3);
        const Vec v = random_unit(rng, 3);
        if (std::abs(v.dot(n)) < 1e-6)
            continue;
        const Vec r = reflect(v, n);
        CHECK(std::abs(r.norm() - 1.0) <= 1e-14);
        CHECK(r.dot(n) == doctest::Approx(-v.dot(n)).epsilon(1e-12));
        // time reversal: reflecting the reversed outgoing ray returns the
        // reversed incoming ray
        CHECK((reflect(-r, n) - (-v)).norm() < 1e-13);
        ++done;
    }
}

TEST_CASE("billiard step on the unit disc") {
    const auto disc = BodyModel::ellipsoid({1.0, 1.0});

    auto s = billiard_step(disc, RayState::make(disc, vec({-1, 0}), vec({1, 0})));
    CHECK((s.position - vec({1, 0})).norm() < 1e-12);
    CHECK((s.direction - vec({-1, 0})).norm() < 1e-12);

    // chord of the inscribed equilateral triangle
    const Vec target = vec({-0.5, std::sqrt(3.0) / 2.0});
    Vec v = target - vec({1, 0});
    v /= v.norm();
    s = billiard_step(disc, RayState::make(disc, vec({1, 0}), v));
    CHECK((s.position - target).norm() < 1e-12);
    Vec next = vec({-0.5, -std::sqrt(3.0) / 2.0}) - target;
    next /= next.norm();
    CHECK((s.direction - next).norm() < 1e-12);
}

TEST_CASE("billiard step along the major axis") {
    const auto ellipse = BodyModel::ellipsoid({2.0, 1.0});
    const auto s = billiard_step(ellipse, RayState::make(ellipse, vec({2, 0}), vec({-1, 0})));
    CHECK((s.position - vec({-2, 0})).norm() < 1e-12);
    CHECK((s.direction - vec({1, 0})).norm() < 1e-12);
}

TEST_CASE("ray state validation") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    CHECK_THROWS_AS((void)RayState::make(sphere, vec({0.5, 0, 0}), vec({1, 0, 0})),
                    InvalidParams);
    CHECK_THROWS_AS((void)RayState::make(sphere, vec({1, 0, 0}), vec({1, 0, 0})),
                    InvalidParams);
    // slightly non-unit directions are normalized, grossly non-unit rejected
    const auto s = RayState::make(sphere, vec({1, 0, 0}), vec({-1.0 + 1e-7, 0, 0}));
    CHECK(std::abs(s.direction.norm() - 1.0) <= 1e-15);
    CHECK_THROWS_AS((void)RayState::make(sphere, vec({1, 0, 0}), vec({-2, 0, 0})),
                    InvalidParams);
}

TEST_CASE("closure residual of exact orbits") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    CHECK(closure_residual(sphere, great_circle_triangle(sphere)) <= 1e-10);

    const auto ellipsoid = BodyModel::ellipsoid({1.0, 1.3, 1.7});
    const auto axis = make_candidate(ellipsoid, {vec({0, 0, 1.7}), vec({0, 0, -1.7})});
    CHECK(closure_residual(ellipsoid, axis) <= 1e-10);
}

TEST_CASE("closure residual detects perturbation") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    auto traj = great_circle_triangle(sphere);
    Vec moved = traj.vertices[1].position;
    moved[2] += 1e-2;
    traj.vertices[1] = sphere.project_to_boundary(moved);
    CHECK(closure_residual(sphere, traj) > 1e-4);
}

TEST_CASE("closed orbits close in reverse") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    auto traj = great_circle_triangle(sphere, 0.3);
    std::reverse(traj.vertices.begin(), traj.vertices.end());
    CHECK(closure_residual(sphere, traj) <= 1e-10);
}

TEST_CASE("closure residual rejects tiny polygons") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    TrajectoryCandidate traj;
    traj.vertices = {sphere.radial_project(vec({1, 0, 0}))};
    CHECK_THROWS_AS((void)closure_residual(sphere, traj), InvalidParams);
}

TEST_CASE("step failures surface as infinite residual") {
    const auto sphere = BodyModel::ellipsoid({1.0, 1.0, 1.0});
    // nearly tangential polygon: the first shot grazes
    const Vec a = vec({1, 0, 0});
    Vec b = vec({1, 1e-10, 0});
    b /= b.norm();
    TrajectoryCandidate traj;
    traj.vertices = {sphere.project_to_boundary(a), sphere.project_to_boundary(b)};
    CHECK(std::isinf(closure_residual(sphere, traj)));
}
