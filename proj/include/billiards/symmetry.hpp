#pragma once

#include "billiards/trajectory.hpp"

namespace billiards {

// default vertexwise dedup tolerance, relative to the diameter
inline constexpr double kDedupTol = 1e-6;

// Equivalence class of trajectories under index rotation and reversal.
struct OrbitClass {
    TrajectoryCandidate representative; // lexicographically smallest dihedral image
    int member_count = 0;
    double perimeter = 0.0;
    std::vector<double> signature; // perimeter + sorted edge lengths, rounded
};

// the p cyclic rotations of the vertex sequence and the p rotations of the
// reversed sequence (2p images, duplicates included)
std::vector<TrajectoryCandidate> dihedral_images(const TrajectoryCandidate& traj);

// true iff some dihedral image of a matches b vertexwise within tol (absolute)
bool same_orbit(const TrajectoryCandidate& a, const TrajectoryCandidate& b, double tol);

// Groups candidates into orbit classes: candidates with nearby perimeters are
// tested pairwise with same_orbit and merged by union-find; the member with
// the smallest residual represents the class. Non-converged and
// continuum-flagged candidates are skipped (the latter are reported
// separately, not deduped). Classes come back sorted by (perimeter,
// signature).
std::vector<OrbitClass> dedup(const std::vector<TrajectoryCandidate>& candidates,
                              double tol_dedup, double diameter);

} // namespace billiards
