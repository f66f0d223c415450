#include "billiards/geometry.hpp"

#include "billiards/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace billiards {

namespace {

constexpr int kConvexitySamples = 1000;
constexpr int kBoxSamples = 200;
constexpr double kGradientFloor = 1e-12;

} // namespace

BodyModel BodyModel::ellipsoid(std::vector<double> semi_axes) {
    const auto d = semi_axes.size();
    return BodyModel(BodyKind::Ellipsoid, std::move(semi_axes), 0.0, std::vector<double>(d, 0.0));
}

BodyModel BodyModel::bumped_ellipsoid(std::vector<double> semi_axes, double bump_amplitude,
                                      std::vector<double> bump_coeffs) {
    return BodyModel(BodyKind::BumpedEllipsoid, std::move(semi_axes), bump_amplitude,
                     std::move(bump_coeffs));
}

BodyModel::BodyModel(BodyKind kind, std::vector<double> axes, double amp,
                     std::vector<double> coeffs)
    : kind_(kind), axes_(std::move(axes)), bump_amplitude_(amp), bump_coeffs_(std::move(coeffs)) {
    if (axes_.size() < 2)
        throw InvalidParams("body dimension must be at least 2");
    for (double a : axes_)
        if (!(a > 0.0) || !std::isfinite(a))
            throw InvalidParams("semi-axes must be positive");
    if (!(bump_amplitude_ >= 0.0) || !std::isfinite(bump_amplitude_))
        throw InvalidParams("bump amplitude must be >= 0");
    if (bump_coeffs_.size() != axes_.size())
        throw InvalidParams("bump coefficient count must match the dimension");
    for (double c : bump_coeffs_)
        if (!std::isfinite(c))
            throw InvalidParams("bump coefficients must be finite");

    diameter_ = 2.0 * *std::max_element(axes_.begin(), axes_.end());
    boundary_tol_ = 1e-10 * diameter_;

    if (!(constraint(Vec::Zero(dim())) < 0.0))
        throw InvalidParams("origin must be interior"); // cannot happen for this family

    validate_convexity();
}

double BodyModel::constraint(const Vec& x) const {
    double g = -1.0;
    for (int i = 0; i < dim(); ++i) {
        const double r = x[i] / axes_[i];
        g += r * r;
        if (bump_amplitude_ != 0.0) {
            const double x2 = x[i] * x[i];
            g += bump_amplitude_ * bump_coeffs_[i] * x2 * x2;
        }
    }
    return g;
}

Vec BodyModel::constraint_gradient(const Vec& x) const {
    Vec grad(dim());
    for (int i = 0; i < dim(); ++i) {
        grad[i] = 2.0 * x[i] / (axes_[i] * axes_[i]);
        if (bump_amplitude_ != 0.0)
            grad[i] += 4.0 * bump_amplitude_ * bump_coeffs_[i] * x[i] * x[i] * x[i];
    }
    return grad;
}

Mat BodyModel::constraint_hessian(const Vec& x) const {
    Mat hess = Mat::Zero(dim(), dim());
    for (int i = 0; i < dim(); ++i) {
        hess(i, i) = 2.0 / (axes_[i] * axes_[i]);
        if (bump_amplitude_ != 0.0)
            hess(i, i) += 12.0 * bump_amplitude_ * bump_coeffs_[i] * x[i] * x[i];
    }
    return hess;
}

Vec BodyModel::unit_normal(const Vec& x) const {
    Vec grad = constraint_gradient(x);
    const double norm = grad.norm();
    if (norm < kGradientFloor)
        throw DegeneratePoint("constraint gradient vanishes");
    return grad / norm;
}

// Root of g(t u) = 0 for t > 0. g is negative at 0 and increases along the
// ray until the body is left, so the root is simple; Newton falls back to
// bisection whenever it leaves the bracket.
double BodyModel::radial_root(const Vec& u) const {
    const double a_max = 0.5 * diameter_;
    double hi = 2.0 * a_max;
    if (!(constraint(hi * u) > 0.0))
        throw NoConvergence("ray does not leave the body within the bracket");
    double lo = 0.0;

    // exact for the pure ellipsoid, a good initial guess otherwise
    double q = 0.0;
    for (int i = 0; i < dim(); ++i) {
        const double r = u[i] / axes_[i];
        q += r * r;
    }
    double t = (q > 0.0) ? 1.0 / std::sqrt(q) : a_max;
    t = std::clamp(t, 0.25 * lo + 0.75 * 1e-3 * a_max, hi);

    double best_t = t;
    double best_g = std::abs(constraint(t * u));
    for (int iter = 0; iter < 120; ++iter) {
        const double g = constraint(t * u);
        if (std::abs(g) < best_g) {
            best_g = std::abs(g);
            best_t = t;
        }
        if (std::abs(g) <= 1e-15)
            break;
        if (g < 0.0)
            lo = t;
        else
            hi = t;
        const double dg = constraint_gradient(t * u).dot(u);
        double next = (std::abs(dg) > 1e-300) ? t - g / dg : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-17 * (1.0 + std::abs(t)))
            break;
        t = next;
    }
    if (best_g > boundary_tol_)
        throw NoConvergence("radial projection did not reach the boundary tolerance");
    return best_t;
}

BoundaryPoint BodyModel::radial_project(const Vec& u) const {
    const double t = radial_root(u);
    Vec x = t * u;
    return BoundaryPoint{x, unit_normal(x)};
}

// Nearest-point projection: solve y - x + mu * grad g(y) = 0, g(y) = 0 by a
// damped Newton iteration started from the radial projection of x.
BoundaryPoint BodyModel::project_to_boundary(const Vec& x) const {
    const int d = dim();
    if (x.norm() < 1e-14 * diameter_)
        throw NoConvergence("projection undefined near the center");

    Vec y = radial_root(x.normalized()) * x.normalized();
    Vec grad = constraint_gradient(y);
    double mu = grad.squaredNorm() > 0.0 ? (y - x).dot(grad) / grad.squaredNorm() : 0.0;

    auto residual = [&](const Vec& yy, double mm, Vec& out) {
        Vec g = constraint_gradient(yy);
        out.head(d) = yy - x + mm * g;
        out[d] = constraint(yy);
    };

    Vec F(d + 1), Ft(d + 1);
    residual(y, mu, F);
    Mat J(d + 1, d + 1);
    for (int iter = 0; iter < 60; ++iter) {
        const double fn = F.norm();
        const double stat = F.head(d).norm();
        if (std::abs(F[d]) <= boundary_tol_ && stat <= 1e-12 * diameter_ * (1.0 + std::abs(mu)))
            break;
        grad = constraint_gradient(y);
        J.setZero();
        J.topLeftCorner(d, d) = Mat::Identity(d, d) + mu * constraint_hessian(y);
        J.block(0, d, d, 1) = grad;
        J.block(d, 0, 1, d) = grad.transpose();
        Vec step = J.completeOrthogonalDecomposition().solve(-F);

        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            Vec yt = y + alpha * step.head(d);
            double mt = mu + alpha * step[d];
            residual(yt, mt, Ft);
            if (Ft.norm() <= (1.0 - 1e-4 * alpha) * fn) {
                y = yt;
                mu = mt;
                F = Ft;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted)
            break;
    }

    if (std::abs(constraint(y)) > boundary_tol_)
        throw NoConvergence("boundary projection stalled");
    return BoundaryPoint{y, unit_normal(y)};
}

// Sampled strict-convexity test. The Hessian is checked on the boundary, in
// the interior along the sampling rays, and on the coordinate box enclosing
// the sampled boundary (corners and random points). For the quartic family
// the Hessian is diagonal and monotone in x_i^2, so the box corners dominate
// the convex hull of the body.
void BodyModel::validate_convexity() const {
    const int d = dim();
    GaussianStream rng(0x5EEDBA11u);

    auto check = [&](const Vec& x) {
        Eigen::SelfAdjointEigenSolver<Mat> es(constraint_hessian(x));
        const double lo = es.eigenvalues().minCoeff();
        const double hi = std::abs(es.eigenvalues().maxCoeff());
        if (!(lo > 1e-12 * std::max(1.0, hi)))
            throw InvalidParams("constraint Hessian is not positive definite on the body");
    };

    Vec box = Vec::Zero(d);
    for (int k = 0; k < kConvexitySamples; ++k) {
        Vec u(d);
        do {
            for (int i = 0; i < d; ++i)
                u[i] = rng.normal();
        } while (u.norm() < 1e-8);
        u.normalize();
        double t;
        try {
            t = radial_root(u);
        } catch (const NoConvergence&) {
            throw InvalidParams("body is not star-shaped within the bracket");
        }
        const Vec x = t * u;
        check(x);
        check(0.5 * x);
        box = box.cwiseMax(x.cwiseAbs());
    }
    box *= 1.02;

    // corners (all sign patterns of the box extremes) and random box points
    if (d <= 16) {
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            Vec corner(d);
            for (int i = 0; i < d; ++i)
                corner[i] = (mask >> i & 1u) ? box[i] : -box[i];
            check(corner);
        }
    }
    for (int k = 0; k < kBoxSamples; ++k) {
        Vec x(d);
        for (int i = 0; i < d; ++i)
            x[i] = (2.0 * rng.uniform01() - 1.0) * box[i];
        check(x);
    }
}

} // namespace billiards
