#include "billiards/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace billiards {

RayState RayState::make(const BodyModel& body, Vec position, Vec direction) {
    if (position.size() != body.dim() || direction.size() != body.dim())
        throw InvalidParams("ray state dimension mismatch");
    if (std::abs(body.constraint(position)) > body.boundary_tol())
        throw InvalidParams("ray origin is not on the boundary");
    const double norm = direction.norm();
    if (std::abs(norm - 1.0) > 1e-6)
        throw InvalidParams("ray direction must be a unit vector");
    direction /= norm;
    const Vec n = body.unit_normal(position);
    if (!(direction.dot(n) < 0.0))
        throw InvalidParams("ray direction must point strictly inward");
    return RayState{std::move(position), std::move(direction)};
}

Vec reflect(const Vec& v, const Vec& n) {
    const double vn = v.dot(n);
    if (std::abs(vn) < kGrazingTol)
        throw GrazingImpact("tangential impact");
    Vec out = v - 2.0 * vn * n;
    return out / out.norm();
}

RayState billiard_step(const BodyModel& body, const RayState& state, double min_chord) {
    const double diam = body.diameter();
    if (min_chord <= 0.0)
        min_chord = 1e-3 * diam;
    const Vec& x = state.position;
    const Vec& v = state.direction;

    auto h = [&](double t) { return body.constraint(x + t * v); };

    // Bracket the far root of h(t) = g(x + t v) by walking outward from the
    // minimum chord. The increment cap keeps the walk from stepping clear
    // across the positive region between the body and a far component of
    // {g <= 0} (quartic bumps with negative coefficients have those).
    double lo = 0.0;
    double hi = min_chord;
    double h_hi = h(hi);
    if (h_hi >= 0.0)
        throw GrazingImpact("chord shorter than the minimum arc parameter");
    const double cap = 0.25 * diam;
    while (h_hi < 0.0) {
        lo = hi;
        hi = std::min(2.0 * hi, hi + cap);
        if (hi > 3.0 * diam)
            throw NoConvergence("no boundary impact within the search range");
        h_hi = h(hi);
    }

    // safeguarded Newton within [lo, hi]
    double t = hi;
    double best_t = hi;
    double best_h = std::abs(h_hi);
    for (int iter = 0; iter < 100; ++iter) {
        const double ht = h(t);
        if (std::abs(ht) < best_h) {
            best_h = std::abs(ht);
            best_t = t;
        }
        if (std::abs(ht) <= 1e-15)
            break;
        if (ht < 0.0)
            lo = t;
        else
            hi = t;
        const double dh = body.constraint_gradient(x + t * v).dot(v);
        double next = (std::abs(dh) > 1e-300) ? t - ht / dh : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-17 * (1.0 + std::abs(t)))
            break;
        t = next;
    }
    if (best_h > body.boundary_tol())
        throw NoConvergence("impact root-find stalled");

    Vec y = x + best_t * v;
    const Vec n = body.unit_normal(y);
    Vec w = reflect(v, n);
    return RayState{std::move(y), std::move(w)};
}

double closure_residual(const BodyModel& body, const TrajectoryCandidate& traj) {
    const int p = traj.p();
    if (p < 2)
        throw InvalidParams("closure residual needs p >= 2 vertices");
    try {
        Vec chord = traj.vertices[1].position - traj.vertices[0].position;
        const double len = chord.norm();
        if (len < 1e-14)
            throw DegenerateEdge("coincident start vertices");
        RayState s{traj.vertices[0].position, chord / len};
        double worst = 0.0;
        for (int i = 0; i < p; ++i) {
            s = billiard_step(body, s);
            const Vec& target = traj.vertices[(i + 1) % p].position;
            worst = std::max(worst, (s.position - target).norm());
        }
        return worst / body.diameter();
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

} // namespace billiards
