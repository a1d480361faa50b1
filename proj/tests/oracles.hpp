// Test-only oracles, independent of the library's contour-integral paths:
// spectral function application via a fresh eigendecomposition, the 2x2
// Jordan-block derivative formula, and brute-force 1-D quadrature/scan
// helpers used to freeze expected values.
#pragma once

#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "sectoria/types.hpp"

namespace oracles {

using sectoria::Complex;
using sectoria::ComplexMatrix;
using sectoria::ComplexVector;

/// f(A) = V f(D) V^{-1} for diagonalizable A.
inline ComplexMatrix spectral_apply(const ComplexMatrix& a,
                                    const std::function<Complex(Complex)>& f) {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(a, /*computeEigenvectors=*/true);
    ComplexVector d(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) d[i] = f(es.eigenvalues()[i]);
    const ComplexMatrix& v = es.eigenvectors();
    return v * d.asDiagonal() *
           v.partialPivLu().solve(ComplexMatrix::Identity(a.rows(), a.rows()));
}

/// f(lambda I + eps N) = f(lambda) I + eps f'(lambda) N for the 2x2 block.
inline ComplexMatrix jordan2_apply(Complex lambda, double eps,
                                   const std::function<Complex(Complex)>& f,
                                   const std::function<Complex(Complex)>& fprime) {
    ComplexMatrix m(2, 2);
    m << f(lambda), eps * fprime(lambda), Complex(0, 0), f(lambda);
    return m;
}

/// Composite Simpson on [a, b]; n is forced even.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// ∫_0^inf g(r) dr by log substitution over [e^{lo}, e^{hi}].
inline double integral_halfline(const std::function<double(double)>& g, double lo = -30.0,
                                double hi = 30.0, int n = 60000) {
    return simpson([&](double u) { const double r = std::exp(u); return g(r) * r; }, lo, hi, n);
}

/// sup of g over log-spaced radii in [e^{lo}, e^{hi}].
inline double dense_scan_sup(const std::function<double(double)>& g, double lo = -16.0,
                             double hi = 16.0, int n = 200000) {
    double sup = 0.0;
    const double h = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) sup = std::max(sup, g(std::exp(lo + h * i)));
    return sup;
}

} // namespace oracles
