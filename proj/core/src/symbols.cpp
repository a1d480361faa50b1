#include "sectoria/symbols.hpp"

#include <cmath>

namespace sectoria {

ScalarSymbol phi_symbol() {
    ScalarSymbol s;
    s.name = "phi";
    s.evaluator = [](Complex z) {
        const Complex w = 1.0 + z;
        return z / (w * w);
    };
    s.psi_class_exponent = 1.0;
    s.sup_angle = kPi;
    return s;
}

ScalarSymbol symbol_registry(const std::string& name) {
    if (name == "sqrt_over_1p") {
        ScalarSymbol s;
        s.name = name;
        s.evaluator = [](Complex z) { return principal_pow(z, 0.5) / (1.0 + z); };
        s.psi_class_exponent = 0.5;
        return s;
    }
    if (name == "z_over_1pz2" || name == "phi") {
        ScalarSymbol s = phi_symbol();
        s.name = name;
        return s;
    }
    if (name == "log") {
        ScalarSymbol s;
        s.name = name;
        s.evaluator = [](Complex z) { return principal_log(z); };
        return s;
    }
    const auto colon = name.find(':');
    if (colon != std::string::npos) {
        const std::string head = name.substr(0, colon);
        double param = 0.0;
        try {
            param = std::stod(name.substr(colon + 1));
        } catch (const std::exception&) {
            throw InvalidInputError("bad symbol parameter in: " + name);
        }
        if (head == "z_pow") return power_symbol(param);
        if (head == "z_ipow") return imaginary_power_symbol(param);
    }
    throw InvalidInputError("unknown symbol: " + name);
}

ScalarSymbol power_symbol(double alpha) {
    ScalarSymbol s;
    s.name = "z_pow:" + std::to_string(alpha);
    s.evaluator = [alpha](Complex z) { return principal_pow(z, alpha); };
    return s;
}

ScalarSymbol imaginary_power_symbol(double sexp) {
    ScalarSymbol s;
    s.name = "z_ipow:" + std::to_string(sexp);
    s.evaluator = [sexp](Complex z) { return principal_pow(z, Complex(0.0, sexp)); };
    return s;
}

ScalarSymbol scaled_symbol(const ScalarSymbol& f, double t) {
    if (!(t > 0.0)) throw InvalidInputError("scaled_symbol: t must be > 0");
    ScalarSymbol s;
    s.name = f.name + "@t";
    auto eval = f.evaluator;
    s.evaluator = [eval, t](Complex z) { return eval(t * z); };
    s.psi_class_exponent = f.psi_class_exponent;
    s.sup_angle = f.sup_angle;
    s.scale_hint = f.scale_hint / t;
    return s;
}

ScalarSymbol product_symbol(const ScalarSymbol& f, const ScalarSymbol& g) {
    ScalarSymbol s;
    s.name = f.name + "*" + g.name;
    auto fe = f.evaluator, ge = g.evaluator;
    s.evaluator = [fe, ge](Complex z) { return fe(z) * ge(z); };
    if (f.psi_class_exponent && g.psi_class_exponent)
        s.psi_class_exponent = *f.psi_class_exponent + *g.psi_class_exponent;
    else if (f.psi_class_exponent)
        s.psi_class_exponent = f.psi_class_exponent;
    else if (g.psi_class_exponent)
        s.psi_class_exponent = g.psi_class_exponent;
    s.sup_angle = std::min(f.sup_angle, g.sup_angle);
    s.scale_hint = std::sqrt(f.scale_hint * g.scale_hint);
    return s;
}

namespace {

double psi_weighted_sup(const ScalarSymbol& f, double s, double theta, const RadialGrid& grid) {
    double sup = 0.0;
    for (double phi : {theta, -theta, 0.0}) {
        const Complex dir = std::polar(1.0, phi);
        for (double r : grid.nodes) {
            const double rs = std::pow(r, s);
            const double v = (1.0 + rs * rs) / rs * std::abs(f(r * dir));
            if (v > sup) sup = v;
        }
    }
    return sup;
}

} // namespace

PsiNormResult psi_class_norm(const ScalarSymbol& f, double s, double theta,
                             const RadialGrid& grid) {
    if (!(s > 0.0)) throw InvalidInputError("psi_class_norm: s must be > 0");
    if (!(theta > 0.0 && theta < kPi))
        throw InvalidInputError("psi_class_norm: theta must lie in (0, pi)");

    PsiNormResult res;
    res.value = psi_weighted_sup(f, s, theta, grid);

    const double pad = 10.0;
    const std::size_t n_wide = grid.size() + static_cast<std::size_t>(8.0 * 2.0 * pad);
    const RadialGrid wide = RadialGrid::uniform(grid.u_min - pad, grid.u_max + pad, n_wide);
    res.widened_value = psi_weighted_sup(f, s, theta, wide);
    // A genuinely unbounded weighted sup grows exponentially with the
    // window; a sup approached at the window edge moves by O(tail) only.
    res.finite = res.widened_value <= res.value * 1.15 + 1e-300;
    return res;
}

} // namespace sectoria
