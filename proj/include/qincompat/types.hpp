#ifndef QINCOMPAT_TYPES_HPP
#define QINCOMPAT_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qincompat {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotHermitianError : Error {
    using Error::Error;
};

struct DegenerateBlockError : Error {
    using Error::Error;
};

struct SingularFisherError : Error {
    using Error::Error;
};

struct DimensionError : Error {
    using Error::Error;
};

struct InvalidWeightError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct QuadratureFailure : Error {
    using Error::Error;
};

struct GaplessModeError : Error {
    using Error::Error;
};

struct CriticalFieldError : Error {
    using Error::Error;
};

struct InsufficientDataError : Error {
    using Error::Error;
};

struct NonConvergenceError : Error {
    using Error::Error;
};

} // namespace qincompat

#endif
