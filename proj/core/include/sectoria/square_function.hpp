#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sectoria/calculus.hpp"
#include "sectoria/operator.hpp"
#include "sectoria/report.hpp"
#include "sectoria/symbols.hpp"

namespace sectoria {

/// Hermitian PSD matrix G with ||x||_A^2 = x^* G x, where
/// G = ∫ psi_t(A)^* psi_t(A) dt/t over the given grid.
struct GramOperator {
    ComplexMatrix matrix;
    std::string psi_name;
    RadialGrid t_grid;
};

/// Best constants m ||x|| <= ||x||_A <= M ||x||, and kappa = M / m.
struct GapReport {
    double m = 0.0;
    double M = 0.0;
    double kappa = 0.0;
};

/// Default t-grid for the square-function integral of `psi` against A:
/// log-spaced around the reciprocal spectral range.
RadialGrid default_t_grid(const SectorialOperator& a, const ScalarSymbol& psi,
                          std::size_t n0 = 96, double tail_pad = 14.0);

/// Quadrature of psi_t(A)^* psi_t(A) dt/t; every psi_t(A) is evaluated
/// through the contour calculus.  The t-grid is doubled until the result
/// stabilizes; the Hermitian part is enforced on the way out.
GramOperator gram_operator(const SectorialOperator& a, const ScalarSymbol& psi,
                           const RadialGrid& t_grid, const QuadOptions& opts = {});

GramOperator gram_operator(const SectorialOperator& a, const ScalarSymbol& psi,
                           const QuadOptions& opts = {});

/// sqrt(x^* G x), clamped at zero.
double square_norm(const GramOperator& g, const ComplexVector& x);

/// m = sqrt(lambda_min(G)), M = sqrt(lambda_max(G)).  Throws when G has
/// an eigenvalue below -1e-12 ||G|| or is numerically rank-deficient.
GapReport equivalence_constants(const GramOperator& g);

/// kappa between the quadratic forms of two Gram operators (extreme
/// generalized eigenvalues of the (G1, G2) pencil).
Report psi_independence_check(const SectorialOperator& a, const ScalarSymbol& psi1,
                              const ScalarSymbol& psi2, const QuadOptions& opts = {});

/// Compares ∫ ||psi_t(A) x||^2 dt/t (psi = sqrt(z)/(1+z)) against
/// ∫ ||sqrt(A) (-r - A)^{-1} x||^2 dr, the squared boundary L^2 norm of
/// the observation trace on the negative half-axis.
Report mcintosh_identity_check(const SectorialOperator& a, const ComplexVector& x,
                               const QuadOptions& opts = {}, double tol = 1e-4);

/// Empirical constants of the logarithmic gap:
///   c1 = sup ||Lambda_k(A)^{-r} x||_A / ||x||,
///   c2 = sup ||x||_A / ||Lambda_k(A)^{ r} x||,
/// both as exact Gram eigenvalue problems and as sampled sups, with a
/// grid-doubling stability measurement.
Report log_gap_check(const SectorialOperator& a, int k, double r,
                     const std::vector<ComplexVector>& sample_vectors,
                     const QuadOptions& opts = {});

/// ∫_0^inf ||C e^{-tA} x||^2 dt with C = sqrt(A), or
/// C = Lambda_k(A)^{-r} sqrt(A) when a (k, r) weight is given.
/// Requires omega_est < pi/2.
double admissibility_integral(const SectorialOperator& a,
                              std::optional<std::pair<int, double>> weight,
                              const ComplexVector& x, const QuadOptions& opts = {});

/// Duality pairing <x, y>_{H_A} against the boundary pairing
/// <O x, O_* y> on the negative half-axis.  The H_A side uses the
/// bilinear Gram ∫ psi_t(A)^2 dt/t of the normalized psi = sqrt(z)/(1+z).
Report duality_check(const SectorialOperator& a, const ComplexVector& x, const ComplexVector& y,
                     const QuadOptions& opts = {}, double tol = 1e-4);

} // namespace sectoria
