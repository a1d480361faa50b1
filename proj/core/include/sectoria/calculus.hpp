#pragma once

#include <optional>
#include <vector>

#include "sectoria/contour.hpp"
#include "sectoria/operator.hpp"
#include "sectoria/report.hpp"
#include "sectoria/symbols.hpp"
#include "sectoria/types.hpp"

namespace sectoria {

/// Quadrature controls shared by every contour integral.
///
/// When u_min / u_max are unset, the window is placed symbol-aware: it
/// spans the spectrum and the symbol's transition scale, padded by
/// max(tail_pad, 23 / s) in log-radius so that Psi-class tails fall below
/// the adaptive tolerance.
struct QuadOptions {
    double tol = 1e-9;
    int max_doublings = 6;
    std::size_t n0 = 96;
    std::optional<double> u_min;
    std::optional<double> u_max;
    std::optional<double> theta_prime; // contour angle override
    double tail_pad = 14.0;
};

/// Telemetry of an adaptive quadrature run.
struct QuadReport {
    std::size_t nodes = 0;
    int doublings = 0;
    double last_change = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;
    double theta_prime = 0.0;
};

/// Default sector-boundary contour for integrating `psi` against the
/// resolvent of `a`.
Contour contour_for(const SectorialOperator& a, const ScalarSymbol& psi,
                    const QuadOptions& opts = {});

/// psi(A) = (1/2 pi i) ∮ (zI - A)^{-1} psi(z) dz over the sector boundary,
/// node count doubled until the relative Frobenius change drops below
/// opts.tol.  Requires a declared Psi-class exponent on the symbol.
ComplexMatrix dunford_riesz(const SectorialOperator& a, const ScalarSymbol& psi,
                            const QuadOptions& opts = {}, QuadReport* report = nullptr);

/// Same, over an explicitly provided contour (refined in place).
ComplexMatrix dunford_riesz(const SectorialOperator& a, const ScalarSymbol& psi, Contour contour,
                            const QuadOptions& opts = {}, QuadReport* report = nullptr);

/// Resolvent samples on one fixed contour, reused to evaluate the whole
/// family psi(t A), t in [e^{log_t_min}, e^{log_t_max}], as weighted sums.
/// The contour spans the operator band and every scaled-symbol transition
/// with Psi-class tail padding, so each psi_t(A) is the same Cauchy
/// quadrature dunford_riesz would perform, without re-solving per t.
class ResolventSampler {
public:
    ResolventSampler(const SectorialOperator& a, const ScalarSymbol& psi, double log_t_min,
                     double log_t_max, const QuadOptions& opts = {});

    /// psi_t(A) = psi(t A) by weighted resolvent combination.
    ComplexMatrix apply_scaled(double t) const;

    const Contour& contour() const { return contour_; }

private:
    ScalarSymbol psi_;
    Contour contour_;
    std::vector<ComplexMatrix> resolvents_;
};

/// f(A) = phi(A)^{-k} (f phi^k)(A) with phi(z) = z (1+z)^{-2}.  Symbols
/// that already carry a Psi-class exponent short-circuit to dunford_riesz.
/// `decay_override` declares the two-sided decay of f phi^k when f grows
/// (for plain bounded f the product decays at rate k).
ComplexMatrix extended_calculus(const SectorialOperator& a, const ScalarSymbol& f,
                                const QuadOptions& opts = {}, int k = 1,
                                std::optional<double> decay_override = std::nullopt);

/// A^alpha by the extended calculus, cached on the operator.
ComplexMatrix fractional_power(const SectorialOperator& a, double alpha,
                               const QuadOptions& opts = {});

/// Log(A) with the principal branch (argument in [-pi, pi)).
ComplexMatrix principal_log_matrix(const SectorialOperator& a, const QuadOptions& opts = {});

/// Lambda_k(A) = Log(A) + 2 k pi i, built on the cached principal log.
ComplexMatrix logarithm_branch(const SectorialOperator& a, int k);

/// A^{is} by the extended calculus.
ComplexMatrix imaginary_power(const SectorialOperator& a, double s, const QuadOptions& opts = {});

enum class PowerMethod { contour, spectral };

/// Principal power M^p of a dense matrix whose spectrum avoids (-inf, 0],
/// by trapezoidal quadrature on a circle enclosing the spectrum (contour)
/// or via diagonalization (spectral).
ComplexMatrix matrix_power_principal(const ComplexMatrix& m, double p,
                                     PowerMethod method = PowerMethod::contour,
                                     double tol = 1e-11);

/// Lambda_k(A)^{-r} x for k != 0, r > 1/2.
ComplexVector negative_log_power(const SectorialOperator& a, int k, double r,
                                 const ComplexVector& x,
                                 PowerMethod method = PowerMethod::contour);

/// sup_s ||A^{is}|| e^{-mu |s|} over a grid of s values, plus the worst
/// group-law residual ||A^{is} A^{it} - A^{i(s+t)}|| over pairs.
Report group_growth_scan(const SectorialOperator& a, double mu,
                         const std::vector<double>& s_values, const QuadOptions& opts = {});

/// gamma_{alpha,z}(w) = alpha (w^alpha + z^alpha) / (w^alpha - z^alpha).
Complex gamma_alpha(double alpha, Complex z, Complex w);

/// Scalar-level check that eta_z = gamma_{alpha,z} - gamma_{1,z}
/// + (1-alpha)(w-1)/(w+1) stays in Psi_beta with norm controlled by
/// C (|z|^alpha + |z|^{-alpha}); reports the empirical C over z samples.
Report eta_extension_check(double alpha, double mu, const std::vector<Complex>& z_samples,
                           const RadialGrid& w_grid);

} // namespace sectoria
