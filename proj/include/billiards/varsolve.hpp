#pragma once

#include "billiards/trajectory.hpp"

namespace billiards {

// Perimeter of the closed polygon, sum_i |x_i - x_{i+1}| with cyclic indices.
// DegenerateEdge if some edge is below 1e-14.
double perimeter(const std::vector<BoundaryPoint>& vertices);

// d f / d x_i = unit(x_i - x_{i-1}) + unit(x_i - x_{i+1})
std::vector<Vec> perimeter_gradient(const std::vector<BoundaryPoint>& vertices);

// max_i |tangential part of d f / d x_i| / 2; zero exactly at billiard
// trajectories (the gradient is then parallel to the normal at each vertex)
double kkt_residual(const BodyModel& body, const std::vector<BoundaryPoint>& vertices);
double kkt_residual(const BodyModel& body, const TrajectoryCandidate& traj);

// wraps raw positions: projects to the boundary, fills normals/perimeter/residual
TrajectoryCandidate make_candidate(const BodyModel& body, const std::vector<Vec>& positions);

// Damped Newton on the stationarity system of the perimeter restricted to the
// boundary (one multiplier per vertex), re-projecting onto the boundary after
// every step. Never throws for solver failures; the returned candidate
// carries converged / degenerate_edge / grazing flags.
TrajectoryCandidate newton_refine(const BodyModel& body, const TrajectoryCandidate& start,
                                  const SolverConfig& cfg);

// Eigenvalues of the perimeter Hessian reduced to the boundary tangent space
// (ascending). Used for the continuum test and exposed for its tests.
Vec reduced_hessian_spectrum(const BodyModel& body, const TrajectoryCandidate& traj);

// Flags candidates sitting on a continuous critical family (integrable
// bodies): any eigenvalue of the reduced Hessian below 1e-8 relative to the
// largest one counts as a zero mode, and an isolated orbit of a generic body
// has none.
bool classify_continuum(const BodyModel& body, TrajectoryCandidate& traj);

// Multistart search: cfg.n_starts seeded random p-tuples on the boundary
// (rejection-sampled to respect the min-edge exclusion), each refined by
// newton_refine. Returns converged, non-grazing, non-degenerate candidates in
// start order; deterministic for a fixed rng_seed regardless of n_threads.
std::vector<TrajectoryCandidate> multistart_search(const BodyModel& body, int p,
                                                   const SolverConfig& cfg, int n_threads = 0);

} // namespace billiards
