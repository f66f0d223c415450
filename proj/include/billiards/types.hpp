#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace billiards {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// boundary gradient too small to define a normal
struct DegeneratePoint : Error {
    using Error::Error;
};

// iterative solve failed to meet its tolerance
struct NoConvergence : Error {
    using Error::Error;
};

// impact direction numerically tangential to the boundary
struct GrazingImpact : Error {
    using Error::Error;
};

// two consecutive polygon vertices collapsed
struct DegenerateEdge : Error {
    using Error::Error;
};

struct InvalidParams : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace billiards
