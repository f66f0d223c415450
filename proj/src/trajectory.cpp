#include "billiards/trajectory.hpp"

#include <limits>

namespace billiards {

double TrajectoryCandidate::min_edge() const {
    const int n = static_cast<int>(vertices.size());
    if (n < 2)
        return 0.0;
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double e = (vertices[i].position - vertices[(i + 1) % n].position).norm();
        if (e < m)
            m = e;
    }
    return m;
}

void SolverConfig::validate() const {
    if (n_starts < 1)
        throw InvalidParams("n_starts must be positive");
    if (max_newton_iters < 1)
        throw InvalidParams("max_newton_iters must be positive");
    if (!(tol_crit > 0.0) || tol_crit > 1e-8)
        throw InvalidParams("tol_crit must lie in (0, 1e-8]");
    if (!(edge_factor > 0.0) || !(edge_factor < 1.0))
        throw InvalidParams("edge_factor must lie in (0, 1)");
    if (!(deflation_radius >= 0.0))
        throw InvalidParams("deflation_radius must be >= 0");
    if (!(armijo_slope > 0.0) || !(armijo_slope < 1.0))
        throw InvalidParams("armijo_slope must lie in (0, 1)");
    if (!(armijo_shrink > 0.0) || !(armijo_shrink < 1.0))
        throw InvalidParams("armijo_shrink must lie in (0, 1)");
}

} // namespace billiards
