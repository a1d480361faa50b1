#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sectoria/grid.hpp"
#include "sectoria/types.hpp"

namespace sectoria {

/// Scalar holomorphic symbol on a sector.
///
/// psi_class_exponent declares the two-sided decay rate s of the symbol,
/// |f(w)| <= C |w|^s / (1 + |w|^{2s}); it is metadata supplied with the
/// symbol and only verified numerically.  Symbols without an exponent are
/// merely bounded and go through the extended calculus.
struct ScalarSymbol {
    std::string name;
    std::function<Complex(Complex)> evaluator;
    std::optional<double> psi_class_exponent;
    double sup_angle = kPi;   // validity sector opening
    double scale_hint = 1.0;  // |w| around which the symbol transitions

    Complex operator()(Complex z) const { return evaluator(z); }
};

/// Looks up a symbol by registry name.  Parameterized entries use a colon:
///   sqrt_over_1p | z_over_1pz2 | phi | z_pow:{alpha} | log | z_ipow:{s}
ScalarSymbol symbol_registry(const std::string& name);

/// phi(z) = z (1+z)^{-2}, the regularizer of the extended calculus.
ScalarSymbol phi_symbol();

/// z^alpha with the principal branch (no decay class).
ScalarSymbol power_symbol(double alpha);

/// z^{is} with the principal branch (bounded on every sector).
ScalarSymbol imaginary_power_symbol(double s);

/// f(tz) for fixed t > 0; decay class is preserved, scale hint moves to 1/t.
ScalarSymbol scaled_symbol(const ScalarSymbol& f, double t);

/// Pointwise product; decay exponents add, validity angles intersect.
ScalarSymbol product_symbol(const ScalarSymbol& f, const ScalarSymbol& g);

struct PsiNormResult {
    double value = 0.0;
    bool finite = true;      // false when the sup keeps growing with the window
    double widened_value = 0.0;
};

/// Numeric Psi_s norm  sup (1 + |w|^{2s}) / |w|^s |f(w)|  over the rays
/// arg w = +-theta and the positive axis (maximum-principle surrogate).
/// The scan is repeated on a widened window to detect divergence.
PsiNormResult psi_class_norm(const ScalarSymbol& f, double s, double theta,
                             const RadialGrid& grid);

} // namespace sectoria
