#include "sectoria/model.hpp"

#include <algorithm>
#include <cmath>

#include "sectoria/parallel.hpp"

namespace sectoria {

namespace {

constexpr Complex kI(0.0, 1.0);

Contour model_contour(const SectorialOperator& a, double theta, double decay_s,
                      const QuadOptions& opts) {
    if (!(theta > a.omega_est() && theta < kPi))
        throw PreconditionError("model boundary angle must lie in (omega_est, pi)");
    const double w = std::clamp(23.0 / std::max(decay_s, 0.3), opts.tail_pad, 80.0);
    const double u_lo = opts.u_min.value_or(std::log(a.spectral_radius_min()) - w);
    const double u_hi = opts.u_max.value_or(std::log(a.spectral_radius_max()) + w);
    const std::size_t n =
        std::max(opts.n0, static_cast<std::size_t>(std::ceil((u_hi - u_lo) * 7.0)));
    return Contour::sector_boundary(theta, RadialGrid::gauss_legendre(u_lo, u_hi, n));
}

std::vector<ComplexVector> chunked_vector_sum_terms(std::size_t n, Eigen::Index dim,
                                                    const std::function<ComplexVector(std::size_t)>& term) {
    constexpr std::size_t chunk = 64;
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<ComplexVector> partial(n_chunks);
    parallel_for(n_chunks, [&](std::size_t c) {
        ComplexVector acc = ComplexVector::Zero(dim);
        const std::size_t end = std::min(n, (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < end; ++i) acc += term(i);
        partial[c] = std::move(acc);
    });
    return partial;
}

ComplexVector control_quadrature(const SectorialOperator& a, const BoundaryFunction& u) {
    const ComplexMatrix& sq = a.sqrt_matrix();
    const Contour& c = u.contour;
    auto partial = chunked_vector_sum_terms(c.size(), a.dim(), [&](std::size_t i) -> ComplexVector {
        const Contour::Node& nd = c.nodes[i];
        const Complex factor = c.node_weights[i] * nd.dz_du;
        return factor * a.apply_resolvent(nd.point, sq * u.samples[i]);
    });
    ComplexVector total = ComplexVector::Zero(a.dim());
    for (const auto& p : partial) total += p;
    return total / (kPi * kI);
}

} // namespace

BoundaryFunction BoundaryFunction::sample(const Contour& contour,
                                          const std::function<ComplexVector(Complex)>& fn) {
    BoundaryFunction b;
    b.contour = contour;
    b.samples.resize(contour.size());
    for (std::size_t i = 0; i < contour.size(); ++i) b.samples[i] = fn(contour.nodes[i].point);
    return b;
}

ComplexVector RationalVectorFn::evaluate(Complex z) const {
    if (terms.empty()) throw InvalidInputError("RationalVectorFn: no terms");
    ComplexVector acc = ComplexVector::Zero(terms.front().coeff.size());
    for (const Term& t : terms) {
        Complex d(1.0, 0.0);
        for (int j = 0; j < t.order; ++j) d *= (z - t.pole);
        acc += t.coeff / d;
    }
    return acc;
}

bool RationalVectorFn::is_interior_class(double theta, double margin) const {
    for (const Term& t : terms)
        if (std::abs(principal_arg(t.pole)) <= theta + margin) return false;
    return true;
}

bool RationalVectorFn::is_exterior_class(double theta, double margin) const {
    for (const Term& t : terms)
        if (std::abs(t.pole) == 0.0 || std::abs(principal_arg(t.pole)) >= theta - margin)
            return false;
    return true;
}

TestFunction RationalVectorFn::as_test_function(const std::string& name) const {
    TestFunction tf;
    tf.name = name;
    RationalVectorFn self = *this;
    tf.eval = [self](Complex z) { return self.evaluate(z); };
    tf.decay_s = 1.0;
    return tf;
}

RationalVectorFn RationalVectorFn::cauchy_kernel(Complex lambda, const ComplexVector& x) {
    RationalVectorFn f;
    f.terms.push_back(Term{lambda, 1, -x}); // (lambda - z)^{-1} x = -(z - lambda)^{-1} x
    return f;
}

TestFunction log_power_test_function(double r, const ComplexVector& x, int k) {
    if (k == 0)
        throw InvalidInputError("log_power_test_function: k = 0 leaves the Hardy-Smirnov class");
    TestFunction tf;
    tf.name = "phi_{" + std::to_string(r) + ",x;k=" + std::to_string(k) + "}";
    ComplexVector xv = x;
    tf.eval = [r, k, xv](Complex z) -> ComplexVector {
        const Complex lz = principal_log(z) + Complex(0.0, 2.0 * kPi * k);
        return (principal_pow(lz, -r) * principal_pow(z, -0.5)) * xv;
    };
    tf.decay_s = 0.45;
    return tf;
}

CharFn::CharFn(SectorialOperator op, double alpha, double theta)
    : op_(std::move(op)), alpha_(alpha), theta_(theta) {
    if (!(alpha > 0.0)) throw InvalidInputError("CharFn: alpha must be > 0");
    if (!(theta > op_.omega_est() && theta < kPi))
        throw PreconditionError("CharFn: theta must lie in (omega_est, pi)");
    if (!(alpha * theta < kPi))
        throw PreconditionError("CharFn: alpha * theta must stay below pi");
    a_alpha_ = fractional_power(op_, alpha);
}

namespace {

Complex alpha_power_checked(const CharFn& c, Complex z) {
    if (std::abs(z) == 0.0) throw InvalidInputError("characteristic function: z must be non-zero");
    return principal_pow(z, c.alpha());
}

void check_delta_range(const CharFn& c) {
    if (!(c.alpha() * c.theta() < kPi / 2.0))
        throw PreconditionError("delta_alpha requires alpha * theta < pi/2");
}

} // namespace

ComplexMatrix char_fn(const CharFn& c, Complex z) {
    check_delta_range(c);
    const Complex za = alpha_power_checked(c, z);
    ComplexMatrix plus = c.a_alpha();
    plus.diagonal().array() += za;
    ComplexMatrix minus = c.a_alpha();
    minus.diagonal().array() -= za;
    ComplexMatrix x = plus.partialPivLu().solve(minus);
    if (!x.allFinite()) throw ResolventError("char_fn: (A^a + z^a) solve failed");
    return x / c.alpha();
}

ComplexMatrix char_fn_resolvent_form(const CharFn& c, Complex z) {
    check_delta_range(c);
    const Complex za = alpha_power_checked(c, z);
    ComplexMatrix plus = c.a_alpha();
    plus.diagonal().array() += za;
    const Eigen::Index n = c.a_alpha().rows();
    ComplexMatrix x = ComplexMatrix::Identity(n, n) -
                      2.0 * za * plus.partialPivLu().solve(ComplexMatrix::Identity(n, n));
    if (!x.allFinite()) throw ResolventError("char_fn: (A^a + z^a) solve failed");
    return x / c.alpha();
}

ComplexMatrix inv_char_fn(const CharFn& c, Complex z) {
    const Complex za = alpha_power_checked(c, z);
    const ComplexVector& ev = c.op().eigenvalues();
    double min_gap = std::numeric_limits<double>::max(), scale = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const Complex la = principal_pow(ev[i], c.alpha());
        min_gap = std::min(min_gap, std::abs(la - za));
        scale = std::max(scale, std::abs(la));
    }
    if (min_gap <= 1e-12 * std::max(scale, std::abs(za)))
        throw ResolventError("inv_char_fn: z^alpha within tolerance of spec(A^alpha)");

    const Eigen::Index n = c.a_alpha().rows();
    ComplexMatrix minus = c.a_alpha();
    minus.diagonal().array() -= za;
    ComplexMatrix x = ComplexMatrix::Identity(n, n) +
                      2.0 * za * minus.partialPivLu().solve(ComplexMatrix::Identity(n, n));
    if (!x.allFinite()) throw ResolventError("inv_char_fn: (A^a - z^a) solve failed");
    return c.alpha() * x;
}

ComplexVector observation_map(const SectorialOperator& a, const ComplexVector& x, Complex z) {
    return a.sqrt_matrix() * a.apply_resolvent(z, x);
}

ComplexVector control_map(const SectorialOperator& a, const BoundaryFunction& u) {
    if (u.samples.size() != u.contour.size())
        throw InvalidInputError("control_map: sample/node count mismatch");
    if (!(u.contour.theta_prime > a.omega_est()))
        throw PreconditionError("control_map: boundary angle must exceed omega_est");
    return control_quadrature(a, u);
}

ComplexVector control_map(const SectorialOperator& a, const TestFunction& u, double theta,
                          const QuadOptions& opts) {
    Contour contour = model_contour(a, theta, u.decay_s, opts);
    BoundaryFunction bu = BoundaryFunction::sample(contour, u.eval);
    const double u_scale = bu.l2_norm();
    ComplexVector prev = control_quadrature(a, bu);
    for (int d = 0; d < opts.max_doublings; ++d) {
        contour = contour.refined();
        bu = BoundaryFunction::sample(contour, u.eval);
        ComplexVector cur = control_quadrature(a, bu);
        if ((cur - prev).norm() <= opts.tol * cur.norm() + 1e-11 * (1.0 + u_scale)) return cur;
        prev = std::move(cur);
    }
    throw ConvergenceError("control_map: boundary quadrature did not converge", prev.norm(),
                           prev.norm());
}

ComplexVector cauchy_transform(const BoundaryFunction& f, Complex lambda, CauchySide side,
                               double margin) {
    const double gap = std::abs(std::abs(principal_arg(lambda)) - f.contour.theta_prime);
    if (gap < margin)
        throw InvalidInputError("cauchy_transform: evaluation point violates the boundary margin");

    const Contour& c = f.contour;
    ComplexVector acc = ComplexVector::Zero(f.samples.front().size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Contour::Node& nd = c.nodes[i];
        acc += (c.node_weights[i] * nd.dz_du / (nd.point - lambda)) * f.samples[i];
    }
    acc /= 2.0 * kPi * kI;
    return side == CauchySide::interior ? acc : ComplexVector(-acc);
}

HankelOperator::HankelOperator(const CharFn& c, const Contour& contour) : contour_(contour) {
    const ComplexMatrix& aa = c.a_alpha();
    const double scale = aa.norm();
    const Eigen::Index n = aa.rows();
    const std::size_t count = contour_.size();
    dtilde_.resize(count);
    usable_.assign(count, true);
    std::vector<std::size_t> excluded_flags(count, 0);
    parallel_for(count, [&](std::size_t i) {
        ComplexMatrix minus = aa;
        minus.diagonal().array() -= principal_pow(contour_.nodes[i].point, c.alpha());
        Eigen::JacobiSVD<ComplexMatrix> svd(minus);
        if (svd.singularValues().minCoeff() < 1e-10 * scale) {
            excluded_flags[i] = 1;
            return;
        }
        dtilde_[i] = c.alpha() * (ComplexMatrix::Identity(n, n) +
                                  2.0 * principal_pow(contour_.nodes[i].point, c.alpha()) *
                                      minus.partialPivLu().solve(ComplexMatrix::Identity(n, n)));
    });
    for (std::size_t i = 0; i < count; ++i) {
        if (excluded_flags[i]) usable_[i] = false;
        excluded_ += excluded_flags[i];
    }
    if (excluded_ * 100 > count)
        throw SingularOperatorError(
            "HankelOperator: more than 1% of boundary nodes sit on spec(A^alpha)");
}

ComplexVector HankelOperator::apply(const BoundaryFunction& u, Complex lambda) const {
    if (!contour_.same_layout(u.contour))
        throw InvalidInputError("HankelOperator: boundary function lives on a different contour");
    if (std::abs(principal_arg(lambda)) <= contour_.theta_prime + 0.049)
        throw InvalidInputError("HankelOperator: lambda must be exterior with margin");

    ComplexVector acc = ComplexVector::Zero(u.samples.front().size());
    for (std::size_t i = 0; i < contour_.size(); ++i) {
        if (!usable_[i]) continue;
        const Contour::Node& nd = contour_.nodes[i];
        acc += (contour_.node_weights[i] * nd.dz_du / (nd.point - lambda)) *
               (dtilde_[i] * u.samples[i]);
    }
    return -acc / (2.0 * kPi * kI); // exterior projection carries the minus sign
}

ComplexVector hankel_apply(const CharFn& c, const BoundaryFunction& u, Complex lambda) {
    return HankelOperator(c, u.contour).apply(u, lambda);
}

EvalSet EvalSet::defaults(double theta, const SectorialOperator& a, std::size_t n_exterior,
                          std::size_t n_interior) {
    EvalSet e;
    e.margin = std::max(0.12, 0.18 * (kPi - theta));
    const double rmin = a.spectral_radius_min() / std::exp(2.0);
    const double rmax = a.spectral_radius_max() * std::exp(2.0);
    for (std::size_t j = 0; j < n_exterior; ++j) {
        const double frac = (static_cast<double>(j) + 0.5) / static_cast<double>(n_exterior);
        const double ang = theta + e.margin + frac * (kPi - theta - 2.0 * e.margin);
        const double r = rmin * std::pow(rmax / rmin, frac);
        e.exterior_points.push_back(std::polar(r, (j % 2 == 0 ? 1.0 : -1.0) * ang));
    }
    const ComplexVector& ev = a.eigenvalues();
    for (std::size_t j = 0; j < n_interior; ++j) {
        const double frac = (static_cast<double>(j) + 0.5) / static_cast<double>(n_interior);
        const double ang = -(theta - e.margin) + frac * 2.0 * (theta - e.margin);
        double r = rmin * std::pow(rmax / rmin, frac);
        Complex p = std::polar(r, ang);
        for (int tries = 0; tries < 8; ++tries) {
            double gap = std::numeric_limits<double>::max();
            for (Eigen::Index i = 0; i < ev.size(); ++i) gap = std::min(gap, std::abs(p - ev[i]));
            if (gap >= 0.05 * (1.0 + std::abs(p))) break;
            r *= 1.35;
            p = std::polar(r, ang);
        }
        e.interior_points.push_back(p);
    }
    return e;
}

Report verify_factorization(const SectorialOperator& a, double theta, double alpha,
                            const TestFunction& u, const EvalSet& eval, const QuadOptions& opts,
                            double tol) {
    Report rep;
    rep.check = "factorization";
    rep.operator_spec = a.spec_name();
    rep.params = {{"theta", theta}, {"alpha", alpha}, {"u", u.name}};

    const ComplexVector wu = control_map(a, u, theta, opts);
    const CharFn c(a, alpha, theta);

    // The Cauchy kernel puts a pole at each evaluation point; composite
    // panels must be no longer than the point's angular distance to the rays.
    double margin = 1.0;
    for (Complex lambda : eval.exterior_points)
        margin = std::min(margin, std::abs(std::abs(principal_arg(lambda)) - theta));
    Contour contour = model_contour(a, theta, u.decay_s, opts);
    const std::size_t needed = static_cast<std::size_t>(
        std::ceil((contour.grid.u_max - contour.grid.u_min) * 12.0 / std::max(margin, 0.05)));
    while (contour.grid.size() < needed) contour = contour.refined();
    const HankelOperator hankel(c, contour);
    const BoundaryFunction bu = BoundaryFunction::sample(contour, u.eval);
    const double u_scale = bu.l2_norm();

    double worst = 0.0;
    for (Complex lambda : eval.exterior_points) {
        const ComplexVector ow = observation_map(a, wu, lambda);
        const ComplexVector ju = hankel.apply(bu, lambda);
        const double scale = std::max({ow.norm(), ju.norm(), 1e-10 * (1.0 + u_scale)});
        worst = std::max(worst, (ow + ju).norm() / scale);
    }

    rep.residuals["max_relative"] = worst;
    rep.constants["hankel_excluded_nodes"] = static_cast<double>(hankel.excluded_nodes());
    rep.grid = {{"boundary_nodes", contour.size()}};
    rep.pass = worst <= tol;
    return rep;
}

Report kernel_membership_check(const SectorialOperator& a, double theta, double alpha,
                               const TestFunction& h, const QuadOptions& opts, double tol) {
    Report rep;
    rep.check = "kernel_membership";
    rep.operator_spec = a.spec_name();
    rep.params = {{"theta", theta}, {"alpha", alpha}, {"h", h.name}};

    const CharFn c(a, alpha, theta);
    TestFunction u;
    u.name = "delta_alpha * " + h.name;
    auto heval = h.eval;
    u.eval = [c, heval](Complex z) -> ComplexVector {
        return char_fn_resolvent_form(c, z) * heval(z);
    };
    u.decay_s = h.decay_s;

    const ComplexVector w = control_map(a, u, theta, opts);
    const Contour contour = model_contour(a, theta, h.decay_s, opts);
    const double h_norm = BoundaryFunction::sample(contour, h.eval).l2_norm();

    const double ratio = w.norm() / std::max(h_norm, 1e-300);
    rep.residuals["kernel_ratio"] = ratio;
    rep.constants["h_l2"] = h_norm;
    rep.pass = ratio <= tol;
    return rep;
}

Report char_fn_spectrum_check(const CharFn& c, const std::vector<Complex>& probe_points,
                              const ComplexVector& spectrum, double spectral_margin) {
    Report rep;
    rep.check = "char_fn_spectrum";
    rep.operator_spec = c.op().spec_name();
    rep.params = {{"alpha", c.alpha()}, {"theta", c.theta()},
                  {"spectral_margin", spectral_margin}};

    std::size_t mismatches = 0;
    for (Complex p : probe_points) {
        double gap = std::numeric_limits<double>::max();
        for (Eigen::Index i = 0; i < spectrum.size(); ++i)
            gap = std::min(gap, std::abs(p - spectrum[i]) / (1.0 + std::abs(spectrum[i])));
        const bool oracle_singular = gap <= 1e-9;
        if (!oracle_singular && gap < spectral_margin) continue; // inside the ambiguity band

        const ComplexMatrix d = char_fn(c, p);
        Eigen::JacobiSVD<ComplexMatrix> svd(d);
        const bool numeric_singular =
            svd.singularValues().minCoeff() <= 1e-8 * svd.singularValues().maxCoeff();
        if (numeric_singular != oracle_singular) ++mismatches;
    }

    // Uniform boundary bound: delta_alpha stays invertible on the rays.
    const Contour contour = model_contour(c.op(), c.theta(), 1.0, QuadOptions{});
    double boundary_min = std::numeric_limits<double>::max();
    for (const auto& nd : contour.nodes) {
        const ComplexMatrix d = char_fn(c, nd.point);
        Eigen::JacobiSVD<ComplexMatrix> svd(d);
        boundary_min =
            std::min(boundary_min, svd.singularValues().minCoeff() / svd.singularValues().maxCoeff());
    }

    rep.constants["misclassifications"] = static_cast<double>(mismatches);
    rep.constants["boundary_min_sv_ratio"] = boundary_min;
    rep.pass = mismatches == 0 && boundary_min > 1e-8;
    return rep;
}

ComplexVector model_resolvent(const std::function<ComplexVector(Complex)>& f, Complex lambda,
                              Complex w) {
    if (w == lambda)
        throw InvalidInputError("model_resolvent: w = lambda needs a derivative, not supported");
    return (f(w) - f(lambda)) / (w - lambda);
}

Report obs_intertwining_check(const SectorialOperator& a, const ComplexVector& x, Complex lambda,
                              const std::vector<Complex>& eval_points) {
    Report rep;
    rep.check = "obs_intertwining";
    rep.operator_spec = a.spec_name();

    const ComplexVector rx = a.apply_resolvent(lambda, x);
    const ComplexVector ox_lambda = observation_map(a, x, lambda);
    double worst = 0.0;
    for (Complex w : eval_points) {
        if (w == lambda) throw InvalidInputError("obs_intertwining_check: w = lambda rejected");
        const ComplexVector lhs = a.sqrt_matrix() * a.apply_resolvent(w, rx);
        const ComplexVector rhs = (observation_map(a, x, w) - ox_lambda) / (lambda - w);
        worst = std::max(worst, (lhs - rhs).norm() / std::max({lhs.norm(), rhs.norm(), 1e-300}));
    }
    rep.residuals["max_relative"] = worst;
    rep.pass = worst <= 1e-8;
    return rep;
}

Report ctr_intertwining_check(const SectorialOperator& a, const TestFunction& u, Complex lambda,
                              double theta, const QuadOptions& opts, double tol) {
    if (std::abs(principal_arg(lambda)) <= theta)
        throw PreconditionError("ctr_intertwining_check: lambda must lie outside the sector");

    Report rep;
    rep.check = "ctr_intertwining";
    rep.operator_spec = a.spec_name();
    rep.params = {{"theta", theta}, {"u", u.name},
                  {"lambda", {lambda.real(), lambda.imag()}}};

    const ComplexVector wu = control_map(a, u, theta, opts);
    ComplexMatrix shifted = a.matrix();
    shifted.diagonal().array() -= lambda;
    const ComplexVector lhs = shifted.partialPivLu().solve(wu);

    // Multiplication by (z - lambda)^{-1} preserves the interior class,
    // and W intertwines it with the resolvent of A.
    TestFunction v;
    v.name = u.name + "/(z-lambda)";
    auto ueval = u.eval;
    v.eval = [ueval, lambda](Complex z) -> ComplexVector { return ueval(z) / (z - lambda); };
    v.decay_s = u.decay_s;
    const ComplexVector rhs = control_map(a, v, theta, opts);

    const double worst = (lhs - rhs).norm() / std::max({lhs.norm(), rhs.norm(), 1e-300});
    rep.residuals["max_relative"] = worst;
    rep.pass = worst <= tol;
    return rep;
}

Complex boundary_pairing(const BoundaryFunction& f, const BoundaryFunction& g) {
    if (!f.contour.same_layout(g.contour))
        throw InvalidInputError("boundary_pairing: contour mismatch");
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < f.contour.size(); ++i) {
        const Contour::Node& nd = f.contour.nodes[i];
        const ComplexVector& gm = g.samples[nd.mirror]; // g(conj lambda)
        acc += f.contour.node_weights[i] * nd.dz_du * gm.dot(f.samples[i]);
    }
    return acc / (2.0 * kPi * kI);
}

std::vector<TestFunction> default_test_battery(double theta, Eigen::Index dim) {
    std::vector<TestFunction> battery;
    const double pole_angle = std::min(theta + 0.3, kPi - 0.08);
    const std::vector<Complex> poles = {Complex(-1.0, 0.0), Complex(-2.0, 0.0),
                                        std::polar(3.0, pole_angle)};
    for (std::size_t p = 0; p < poles.size(); ++p) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            ComplexVector e = ComplexVector::Zero(dim);
            e[i] = 1.0;
            battery.push_back(RationalVectorFn::cauchy_kernel(poles[p], e).as_test_function(
                "u_{" + std::to_string(p) + ",e" + std::to_string(i) + "}"));
        }
    }
    for (double r : {0.6, 1.0}) {
        ComplexVector e = ComplexVector::Zero(dim);
        e[0] = 1.0;
        battery.push_back(log_power_test_function(r, e));
        if (dim > 1) {
            ComplexVector last = ComplexVector::Zero(dim);
            last[dim - 1] = 1.0;
            battery.push_back(log_power_test_function(r, last));
        }
    }
    return battery;
}

} // namespace sectoria
