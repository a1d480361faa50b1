#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sectoria {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed user input (bad file, non-square matrix, invalid params).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Operator violates a structural requirement (singular, not sectorial).
class SingularOperatorError : public Error {
public:
    using Error::Error;
};

/// Requested resolvent point is within spectral-proximity tolerance.
class ResolventError : public Error {
public:
    using Error::Error;
};

/// A quadrature failed to converge within the allotted refinements.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last, double previous)
        : Error(what), last_value(last), previous_value(previous) {}
    double last_value = 0.0;
    double previous_value = 0.0;
};

/// A stated precondition does not hold for the given arguments.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Principal argument in [-pi, pi).  std::arg returns (-pi, pi]; the value
/// pi is folded to -pi so that powers and logarithms use a single branch
/// convention everywhere.
inline double principal_arg(Complex z) {
    double a = std::arg(z);
    if (a >= kPi) a -= 2.0 * kPi;
    return a;
}

/// Principal logarithm with argument in [-pi, pi).
inline Complex principal_log(Complex z) {
    return Complex(std::log(std::abs(z)), principal_arg(z));
}

/// Principal power z^a, continuous on C \ (-inf, 0] with 1^a = 1.
inline Complex principal_pow(Complex z, double a) {
    if (z == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
    return std::exp(a * principal_log(z));
}

/// Principal power with complex exponent.
inline Complex principal_pow(Complex z, Complex a) {
    return std::exp(a * principal_log(z));
}

inline double relative_diff(double a, double b) {
    double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

inline double frobenius_rel_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double scale = std::max(a.norm(), b.norm());
    return scale > 0.0 ? (a - b).norm() / scale : 0.0;
}

} // namespace sectoria
