#pragma once

#include "billiards/geometry.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace billiards {

// Closed polygon with p vertices on the boundary, indices cyclic.
// Consecutive vertices must stay apart: a converged candidate satisfies
// min-edge >= edge_factor * diameter.
struct TrajectoryCandidate {
    std::vector<BoundaryPoint> vertices;
    double perimeter = 0.0;
    double kkt_residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    bool degenerate_edge = false;
    bool grazing = false;
    bool continuum_suspect = false;

    int p() const { return static_cast<int>(vertices.size()); }
    double min_edge() const;
};

struct SolverConfig {
    int n_starts = 1000;
    std::uint64_t rng_seed = 1;
    int max_newton_iters = 80;
    double tol_crit = 1e-10;
    double edge_factor = 1e-3;     // min edge = edge_factor * diameter
    double deflation_radius = 0.0; // relative to diameter; 0 disables the duplicate pre-filter
    double armijo_slope = 1e-4;
    double armijo_shrink = 0.5;

    bool operator==(const SolverConfig& other) const = default;

    void validate() const; // throws InvalidParams
};

} // namespace billiards
