#pragma once

#include "billiards/types.hpp"

#include <vector>

namespace billiards {

enum class BodyKind { Ellipsoid, BumpedEllipsoid };

struct BoundaryPoint {
    Vec position;
    Vec normal; // unit, outward
};

// Smooth strictly convex body given as the compact component of {g <= 0}
// around the origin, with
//
//   g(x) = sum_i (x_i/a_i)^2 - 1 + delta * sum_i c_i x_i^4.
//
// Construction validates the axes and samples the Hessian of g over the body
// (boundary, interior and the enclosing coordinate box); bodies on which the
// sampled Hessian is not positive definite are rejected, so every accepted
// body is strictly convex and star-shaped around the origin.
class BodyModel {
public:
    static BodyModel ellipsoid(std::vector<double> semi_axes);
    static BodyModel bumped_ellipsoid(std::vector<double> semi_axes, double bump_amplitude,
                                      std::vector<double> bump_coeffs);

    BodyKind kind() const { return kind_; }
    int dim() const { return static_cast<int>(axes_.size()); }
    const std::vector<double>& semi_axes() const { return axes_; }
    double bump_amplitude() const { return bump_amplitude_; }
    const std::vector<double>& bump_coeffs() const { return bump_coeffs_; }

    // scale constants: diameter estimate 2*max(a_i), boundary tolerance on |g|
    double diameter() const { return diameter_; }
    double boundary_tol() const { return boundary_tol_; }

    double constraint(const Vec& x) const;      // g(x): <0 inside, 0 on the boundary
    Vec constraint_gradient(const Vec& x) const;
    Mat constraint_hessian(const Vec& x) const; // diagonal for this family

    // outward unit normal grad g / |grad g|; DegeneratePoint if the gradient vanishes
    Vec unit_normal(const Vec& x) const;

    // boundary point t*u, t>0, for a unit direction u (safeguarded 1-d Newton)
    BoundaryPoint radial_project(const Vec& u) const;

    // nearest-point projection onto the boundary for x near it (Newton on the
    // first-order optimality system); NoConvergence if it fails
    BoundaryPoint project_to_boundary(const Vec& x) const;

    bool operator==(const BodyModel& other) const = default;

private:
    BodyModel(BodyKind kind, std::vector<double> axes, double amp, std::vector<double> coeffs);

    double radial_root(const Vec& u) const;
    void validate_convexity() const;

    BodyKind kind_;
    std::vector<double> axes_;
    double bump_amplitude_ = 0.0;
    std::vector<double> bump_coeffs_;
    double diameter_ = 0.0;
    double boundary_tol_ = 0.0;
};

} // namespace billiards
