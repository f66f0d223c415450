#pragma once

#include "billiards/trajectory.hpp"

namespace billiards {

// reflection directions below this |v.n| are numerically meaningless
inline constexpr double kGrazingTol = 1e-9;

struct RayState {
    Vec position;  // on the boundary
    Vec direction; // unit, strictly inward

    // validates |g(x)| <= boundary_tol, |v| = 1, v.n(x) < 0
    static RayState make(const BodyModel& body, Vec position, Vec direction);
};

// elastic reflection v - 2(v.n)n; GrazingImpact if |v.n| < kGrazingTol
Vec reflect(const Vec& v, const Vec& n);

// Next impact of the ray with the boundary and the reflected direction.
// The impact is the far root of g(x + t v) along the ray, bracketed by
// doubling from min_chord (default 1e-3 * diameter) and polished by
// safeguarded Newton.
RayState billiard_step(const BodyModel& body, const RayState& state, double min_chord = -1.0);

// Shooting oracle: start at x_1 toward x_2, take p billiard steps and return
// max_i |shot vertex - x_{i+1}| / diameter. Step failures give +infinity.
double closure_residual(const BodyModel& body, const TrajectoryCandidate& traj);

} // namespace billiards
