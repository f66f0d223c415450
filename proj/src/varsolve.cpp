#include "billiards/varsolve.hpp"

#include "billiards/dynamics.hpp"
#include "billiards/rng.hpp"
#include "billiards/symmetry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>
#include <utility>

namespace billiards {

namespace {

Vec edge_unit(const Vec& a, const Vec& b) {
    Vec e = a - b;
    const double n = e.norm();
    if (n < 1e-14)
        throw DegenerateEdge("coincident consecutive vertices");
    return e / n;
}

// Hessian block of |x - y| with respect to x: (I - u u^T) / |x - y|
Mat edge_curvature(const Vec& x, const Vec& y) {
    Vec e = x - y;
    const double n = e.norm();
    if (n < 1e-14)
        throw DegenerateEdge("coincident consecutive vertices");
    e /= n;
    const int d = static_cast<int>(x.size());
    return (Mat::Identity(d, d) - e * e.transpose()) / n;
}

std::vector<double> least_squares_multipliers(const BodyModel& body,
                                              const std::vector<BoundaryPoint>& vs,
                                              const std::vector<Vec>& fgrad) {
    std::vector<double> lambda(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        const Vec gg = body.constraint_gradient(vs[i].position);
        const double nn = gg.squaredNorm();
        lambda[i] = nn > 0.0 ? fgrad[i].dot(gg) / nn : 0.0;
    }
    return lambda;
}

// Lagrangian Hessian of the perimeter with multipliers, the pd x pd top-left
// block of the KKT Jacobian.
Mat lagrangian_hessian(const BodyModel& body, const std::vector<BoundaryPoint>& vs,
                       const std::vector<double>& lambda) {
    const int p = static_cast<int>(vs.size());
    const int d = body.dim();
    Mat H = Mat::Zero(p * d, p * d);
    for (int i = 0; i < p; ++i) {
        const int prev = (i + p - 1) % p;
        const int next = (i + 1) % p;
        const Mat mp = edge_curvature(vs[i].position, vs[prev].position);
        const Mat mn = edge_curvature(vs[i].position, vs[next].position);
        H.block(i * d, i * d, d, d) += mp + mn - lambda[i] * body.constraint_hessian(vs[i].position);
        H.block(i * d, prev * d, d, d) -= mp;
        H.block(i * d, next * d, d, d) -= mn;
    }
    return H;
}

} // namespace

double perimeter(const std::vector<BoundaryPoint>& vertices) {
    const int p = static_cast<int>(vertices.size());
    if (p < 2)
        throw InvalidParams("perimeter needs at least two vertices");
    double f = 0.0;
    for (int i = 0; i < p; ++i) {
        const double e = (vertices[i].position - vertices[(i + 1) % p].position).norm();
        if (e < 1e-14)
            throw DegenerateEdge("coincident consecutive vertices");
        f += e;
    }
    return f;
}

std::vector<Vec> perimeter_gradient(const std::vector<BoundaryPoint>& vertices) {
    const int p = static_cast<int>(vertices.size());
    if (p < 2)
        throw InvalidParams("perimeter gradient needs at least two vertices");
    std::vector<Vec> grad(p);
    for (int i = 0; i < p; ++i)
        grad[i] = edge_unit(vertices[i].position, vertices[(i + p - 1) % p].position) +
                  edge_unit(vertices[i].position, vertices[(i + 1) % p].position);
    return grad;
}

double kkt_residual(const BodyModel& body, const std::vector<BoundaryPoint>& vertices) {
    const auto grad = perimeter_gradient(vertices);
    double worst = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const Vec n = body.unit_normal(vertices[i].position);
        const double tang = (grad[i] - grad[i].dot(n) * n).norm();
        worst = std::max(worst, tang);
    }
    return 0.5 * worst;
}

double kkt_residual(const BodyModel& body, const TrajectoryCandidate& traj) {
    return kkt_residual(body, traj.vertices);
}

TrajectoryCandidate make_candidate(const BodyModel& body, const std::vector<Vec>& positions) {
    TrajectoryCandidate out;
    out.vertices.reserve(positions.size());
    for (const Vec& x : positions) {
        if (std::abs(body.constraint(x)) <= body.boundary_tol())
            out.vertices.push_back(BoundaryPoint{x, body.unit_normal(x)});
        else
            out.vertices.push_back(body.project_to_boundary(x));
    }
    out.perimeter = perimeter(out.vertices);
    out.kkt_residual = kkt_residual(body, out.vertices);
    return out;
}

TrajectoryCandidate newton_refine(const BodyModel& body, const TrajectoryCandidate& start,
                                  const SolverConfig& cfg) {
    cfg.validate();
    const int p = start.p();
    const int d = body.dim();
    if (p < 2)
        throw InvalidParams("refinement needs at least two vertices");
    const int n = p * d;
    const int m = n + p;
    const double eps_edge = cfg.edge_factor * body.diameter();

    TrajectoryCandidate cur = start;
    cur.converged = false;
    cur.degenerate_edge = false;
    cur.grazing = false;
    cur.continuum_suspect = false;
    cur.kkt_residual = std::numeric_limits<double>::infinity();

    auto finish = [&](std::vector<BoundaryPoint> vs, bool converged) -> TrajectoryCandidate {
        cur.vertices = std::move(vs);
        try {
            cur.perimeter = perimeter(cur.vertices);
            cur.kkt_residual = kkt_residual(body, cur.vertices);
        } catch (const Error&) {
            cur.degenerate_edge = true;
            converged = false;
        }
        if (converged) {
            // a vanishing perimeter gradient means a straight-line "bounce":
            // the reflection is numerically tangential
            const auto fg = perimeter_gradient(cur.vertices);
            for (const Vec& g : fg)
                if (0.5 * g.norm() < kGrazingTol) {
                    cur.grazing = true;
                    converged = false;
                    break;
                }
        }
        if (!converged && !cur.grazing && cur.min_edge() < eps_edge)
            cur.degenerate_edge = true;
        cur.converged = converged;
        return cur;
    };

    std::vector<BoundaryPoint> vs = start.vertices;
    try {
        for (auto& v : vs)
            v = body.project_to_boundary(v.position);
    } catch (const Error&) {
        return finish(start.vertices, false);
    }

    // starts inside the edge-exclusion zone are not points of G(T, p): flag
    // them instead of refining (multistart never generates such starts)
    if (TrajectoryCandidate{vs}.min_edge() < eps_edge)
        return finish(std::move(vs), false);

    // residual of the stationarity system; false on degenerate geometry
    auto eval = [&](const std::vector<BoundaryPoint>& pts, const std::vector<double>& lam,
                    Vec& F) -> bool {
        try {
            const auto fg = perimeter_gradient(pts);
            F.resize(m);
            for (int i = 0; i < p; ++i) {
                F.segment(i * d, d) = fg[i] - lam[i] * body.constraint_gradient(pts[i].position);
                F[n + i] = body.constraint(pts[i].position);
            }
            return true;
        } catch (const Error&) {
            return false;
        }
    };

    std::vector<double> lambda;
    try {
        lambda = least_squares_multipliers(body, vs, perimeter_gradient(vs));
    } catch (const Error&) {
        return finish(std::move(vs), false);
    }

    Vec F(m), Ft(m);
    if (!eval(vs, lambda, F))
        return finish(std::move(vs), false);

    Mat J(m, m);
    std::vector<BoundaryPoint> trial(vs.size());
    std::vector<double> lt(lambda.size());
    bool converged = false;
    int polish_left = -1;

    for (int iter = 0; iter < cfg.max_newton_iters + 4; ++iter) {
        double res;
        try {
            res = kkt_residual(body, vs);
        } catch (const Error&) {
            return finish(std::move(vs), false);
        }
        if (res <= cfg.tol_crit && TrajectoryCandidate{vs}.min_edge() >= eps_edge) {
            if (!converged) {
                converged = true;
                // a few full polish steps push the residual to machine level
                polish_left = 4;
            }
            if (res <= 1e-15)
                break;
        }
        if (converged && polish_left-- <= 0)
            break;
        if (!converged && iter >= cfg.max_newton_iters)
            break;

        J.setZero();
        try {
            J.topLeftCorner(n, n) = lagrangian_hessian(body, vs, lambda);
        } catch (const Error&) {
            return finish(std::move(vs), false);
        }
        for (int i = 0; i < p; ++i) {
            const Vec gg = body.constraint_gradient(vs[i].position);
            J.block(i * d, n + i, d, 1) = -gg;
            J.block(n + i, i * d, 1, d) = gg.transpose();
        }
        const Vec step = J.completeOrthogonalDecomposition().solve(-F);

        const double phi0 = F.squaredNorm();
        double alpha = 1.0;
        bool accepted = false;
        const std::vector<BoundaryPoint> saved = vs;
        for (int ls = 0; ls < 40; ++ls) {
            bool feasible = true;
            for (int i = 0; i < p && feasible; ++i) {
                Vec xt = saved[i].position + alpha * step.segment(i * d, d);
                try {
                    trial[i] = body.project_to_boundary(xt);
                } catch (const Error&) {
                    feasible = false;
                }
            }
            if (feasible) {
                for (int i = 0; i < p; ++i)
                    lt[i] = lambda[i] + alpha * step[n + i];
                if (eval(trial, lt, Ft) &&
                    Ft.squaredNorm() <= (1.0 - 2.0 * cfg.armijo_slope * alpha) * phi0) {
                    vs = trial;
                    lambda = lt;
                    F = Ft;
                    accepted = true;
                    break;
                }
            }
            alpha *= cfg.armijo_shrink;
        }
        if (!accepted) {
            if (converged)
                break; // polish stalled; the converged iterate stands
            return finish(std::move(vs), false);
        }
        if (converged) {
            // never let polish leave the converged set
            double res_t;
            try {
                res_t = kkt_residual(body, vs);
            } catch (const Error&) {
                vs = saved;
                break;
            }
            if (res_t > res || TrajectoryCandidate{vs}.min_edge() < eps_edge) {
                vs = saved;
                break;
            }
        }
    }

    return finish(std::move(vs), converged);
}

Vec reduced_hessian_spectrum(const BodyModel& body, const TrajectoryCandidate& traj) {
    const int p = traj.p();
    const int d = body.dim();
    if (p < 2)
        throw InvalidParams("spectrum needs at least two vertices");
    const auto fg = perimeter_gradient(traj.vertices);
    const auto lambda = least_squares_multipliers(body, traj.vertices, fg);
    const Mat H = lagrangian_hessian(body, traj.vertices, lambda);

    // block-diagonal orthonormal basis of the constraint tangent space
    Mat Q = Mat::Zero(p * d, p * (d - 1));
    for (int i = 0; i < p; ++i) {
        const Vec nrm = body.unit_normal(traj.vertices[i].position);
        Eigen::HouseholderQR<Mat> qr(nrm);
        const Mat full = qr.householderQ();
        Q.block(i * d, i * (d - 1), d, d - 1) = full.rightCols(d - 1);
    }

    Eigen::SelfAdjointEigenSolver<Mat> es(Q.transpose() * H * Q);
    return es.eigenvalues();
}

bool classify_continuum(const BodyModel& body, TrajectoryCandidate& traj) {
    const Vec spec = reduced_hessian_spectrum(body, traj);
    const double scale = spec.cwiseAbs().maxCoeff();
    bool suspect;
    if (scale <= 0.0) {
        suspect = true;
    } else {
        suspect = false;
        for (int i = 0; i < spec.size(); ++i)
            if (std::abs(spec[i]) < 1e-8 * scale) {
                suspect = true;
                break;
            }
    }
    traj.continuum_suspect = suspect;
    return suspect;
}

std::vector<TrajectoryCandidate> multistart_search(const BodyModel& body, int p,
                                                   const SolverConfig& cfg, int n_threads) {
    cfg.validate();
    if (p < 2)
        throw InvalidParams("multistart search needs p >= 2");
    const int d = body.dim();
    const double eps_edge = cfg.edge_factor * body.diameter();

    int threads = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, cfg.n_starts);

    std::vector<std::optional<TrajectoryCandidate>> slots(cfg.n_starts);
    std::atomic<int> cursor{0};

    auto worker = [&]() {
        for (;;) {
            const int k = cursor.fetch_add(1, std::memory_order_relaxed);
            if (k >= cfg.n_starts)
                return;
            GaussianStream rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(k)));

            std::vector<BoundaryPoint> verts;
            bool feasible = false;
            for (int attempt = 0; attempt < 256 && !feasible; ++attempt) {
                verts.clear();
                for (int i = 0; i < p; ++i) {
                    Vec u(d);
                    double nn = 0.0;
                    do {
                        for (int c = 0; c < d; ++c)
                            u[c] = rng.normal();
                        nn = u.norm();
                    } while (nn < 1e-8);
                    verts.push_back(body.radial_project(u / nn));
                }
                feasible = true;
                for (int i = 0; i < p && feasible; ++i)
                    if ((verts[i].position - verts[(i + 1) % p].position).norm() < eps_edge)
                        feasible = false;
            }
            if (!feasible)
                continue;

            TrajectoryCandidate seed;
            seed.vertices = std::move(verts);
            TrajectoryCandidate refined = newton_refine(body, seed, cfg);
            if (refined.converged && !refined.grazing && !refined.degenerate_edge) {
                classify_continuum(body, refined);
                slots[k] = std::move(refined);
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    std::vector<TrajectoryCandidate> out;
    const double defl = cfg.deflation_radius * body.diameter();
    for (auto& slot : slots) {
        if (!slot)
            continue;
        if (defl > 0.0) {
            bool dup = false;
            for (const auto& kept : out)
                if (same_orbit(*slot, kept, defl)) {
                    dup = true;
                    break;
                }
            if (dup)
                continue;
        }
        out.push_back(std::move(*slot));
    }
    return out;
}

} // namespace billiards
