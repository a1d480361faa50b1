#include "sectoria/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "sectoria/parallel.hpp"

namespace sectoria {

namespace {

constexpr Complex kI(0.0, 1.0);

double tail_width(double s, double pad) {
    return std::clamp(23.0 / std::max(s, 1e-3), pad, 80.0);
}

double pick_contour_angle(const SectorialOperator& a, const ScalarSymbol& psi,
                          const QuadOptions& opts) {
    if (opts.theta_prime) return *opts.theta_prime;
    const double cap = std::min(psi.sup_angle, kPi) - 0.02;
    if (!(cap > a.omega_est()))
        throw PreconditionError("no admissible contour angle between omega_est and sup_angle");
    return a.omega_est() + std::min(0.4, 0.5 * (cap - a.omega_est()));
}

/// Deterministic chunked reduction: node terms are summed inside fixed
/// chunks (possibly in parallel) and chunks combined in index order, so
/// the result is independent of the thread count.
template <typename TermFn>
ComplexMatrix accumulate_nodes(std::size_t n, Eigen::Index dim, const TermFn& term) {
    constexpr std::size_t chunk = 64;
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<ComplexMatrix> partial(n_chunks);
    parallel_for(n_chunks, [&](std::size_t c) {
        ComplexMatrix acc = ComplexMatrix::Zero(dim, dim);
        const std::size_t end = std::min(n, (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < end; ++i) acc += term(i);
        partial[c] = std::move(acc);
    });
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    for (const auto& p : partial) total += p;
    return total;
}

ComplexMatrix contour_pass(const SectorialOperator& a, const ScalarSymbol& psi,
                           const Contour& contour) {
    return accumulate_nodes(contour.size(), a.dim(), [&](std::size_t i) -> ComplexMatrix {
        const Contour::Node& nd = contour.nodes[i];
        const Complex factor = contour.node_weights[i] * nd.dz_du * psi(nd.point);
        return factor * a.resolvent(nd.point);
    }) / (2.0 * kPi * kI);
}

double convergence_floor(const SectorialOperator& a) {
    return 1e-13 * (1.0 + a.matrix().norm());
}

} // namespace

Contour contour_for(const SectorialOperator& a, const ScalarSymbol& psi, const QuadOptions& opts) {
    const double theta_prime = pick_contour_angle(a, psi, opts);
    const double s = psi.psi_class_exponent.value_or(1.0);
    const double w = tail_width(s, opts.tail_pad);
    const double hint = std::log(std::max(psi.scale_hint, 1e-300));
    const double u_lo =
        opts.u_min.value_or(std::min(std::log(a.spectral_radius_min()), hint) - w);
    const double u_hi =
        opts.u_max.value_or(std::max(std::log(a.spectral_radius_max()), hint) + w);
    const std::size_t n =
        std::max(opts.n0, static_cast<std::size_t>(std::ceil((u_hi - u_lo) * 7.0)));
    return Contour::sector_boundary(theta_prime, RadialGrid::gauss_legendre(u_lo, u_hi, n));
}

ComplexMatrix dunford_riesz(const SectorialOperator& a, const ScalarSymbol& psi,
                            const QuadOptions& opts, QuadReport* report) {
    return dunford_riesz(a, psi, contour_for(a, psi, opts), opts, report);
}

ComplexMatrix dunford_riesz(const SectorialOperator& a, const ScalarSymbol& psi, Contour contour,
                            const QuadOptions& opts, QuadReport* report) {
    if (!psi.psi_class_exponent)
        throw PreconditionError("dunford_riesz: symbol has no declared Psi-class decay");
    if (!(contour.theta_prime > a.omega_est() && contour.theta_prime <= psi.sup_angle))
        throw PreconditionError("dunford_riesz: contour angle outside (omega_est, sup_angle)");

    const double floor = convergence_floor(a);
    ComplexMatrix prev = contour_pass(a, psi, contour);
    for (int d = 0; d < opts.max_doublings; ++d) {
        contour = contour.refined();
        ComplexMatrix cur = contour_pass(a, psi, contour);
        const double change = (cur - prev).norm();
        if (change <= opts.tol * cur.norm() + floor) {
            if (report) {
                report->nodes = contour.size();
                report->doublings = d + 1;
                report->last_change = change;
                report->u_min = contour.grid.u_min;
                report->u_max = contour.grid.u_max;
                report->theta_prime = contour.theta_prime;
            }
            return cur;
        }
        prev = std::move(cur);
    }
    throw ConvergenceError("dunford_riesz: no convergence after max doublings (|last|=" +
                               std::to_string(prev.norm()) + ")",
                           prev.norm(), prev.norm());
}

ResolventSampler::ResolventSampler(const SectorialOperator& a, const ScalarSymbol& psi,
                                   double log_t_min, double log_t_max, const QuadOptions& opts)
    : psi_(psi) {
    if (!psi.psi_class_exponent)
        throw PreconditionError("ResolventSampler: symbol has no declared Psi-class decay");
    const double s = *psi.psi_class_exponent;
    const double w = tail_width(s, opts.tail_pad);
    const double theta_prime = pick_contour_angle(a, psi, opts);

    // Scaled-symbol transitions sit at |z| = 1/t; below the lowest one the
    // measure factor adds decay of rate 1, so the left pad can be shorter.
    const double bump_lo = -log_t_max, bump_hi = -log_t_min;
    const double u_lo = std::min(std::log(a.spectral_radius_min()), bump_lo) - w / (1.0 + s);
    const double u_hi = std::max(std::log(a.spectral_radius_max()), bump_hi) + w;
    const std::size_t n = static_cast<std::size_t>(std::ceil((u_hi - u_lo) * 12.0));
    contour_ = Contour::sector_boundary(theta_prime, RadialGrid::gauss_legendre(u_lo, u_hi, n));

    resolvents_.resize(contour_.size());
    parallel_for(contour_.size(),
                 [&](std::size_t i) { resolvents_[i] = a.resolvent(contour_.nodes[i].point); });
}

ComplexMatrix ResolventSampler::apply_scaled(double t) const {
    const Eigen::Index dim = resolvents_.front().rows();
    ComplexMatrix acc = ComplexMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < contour_.size(); ++i) {
        const Complex factor = contour_.node_weights[i] * contour_.nodes[i].dz_du *
                               psi_(t * contour_.nodes[i].point);
        if (factor == Complex(0.0, 0.0)) continue;
        acc.noalias() += factor * resolvents_[i];
    }
    return acc / (2.0 * kPi * kI);
}

ComplexMatrix extended_calculus(const SectorialOperator& a, const ScalarSymbol& f,
                                const QuadOptions& opts, int k,
                                std::optional<double> decay_override) {
    if (f.psi_class_exponent) return dunford_riesz(a, f, opts);
    if (k < 1) throw InvalidInputError("extended_calculus: k >= 1 required");

    ScalarSymbol g;
    g.name = f.name + "*phi^" + std::to_string(k);
    auto fe = f.evaluator;
    g.evaluator = [fe, k](Complex z) {
        const Complex w = 1.0 + z;
        Complex phik(1.0, 0.0);
        for (int j = 0; j < k; ++j) phik *= z / (w * w);
        return fe(z) * phik;
    };
    g.psi_class_exponent = decay_override.value_or(static_cast<double>(k));
    g.sup_angle = f.sup_angle;
    g.scale_hint = f.scale_hint;

    ComplexMatrix x = dunford_riesz(a, g, opts);
    // phi(A)^{-k} = (I+A)^{2k} A^{-k}, applied with exact rational algebra.
    auto lu = a.matrix().partialPivLu();
    for (int j = 0; j < k; ++j) x = lu.solve(x);
    for (int j = 0; j < 2 * k; ++j) x = x + a.matrix() * x;
    if (!x.allFinite()) throw ConvergenceError("extended_calculus: regularizer solve failed", 0, 0);
    return x;
}

ComplexMatrix fractional_power(const SectorialOperator& a, double alpha, const QuadOptions& opts) {
    if (auto hit = a.try_cached_power(alpha)) return *hit;
    if (!(std::abs(alpha) * a.omega_est() < kPi))
        throw PreconditionError("fractional_power: alpha * omega_est must stay below pi");

    ComplexMatrix result;
    if (alpha == 0.0) {
        result = ComplexMatrix::Identity(a.dim(), a.dim());
    } else if (alpha == 1.0) {
        result = a.matrix();
    } else {
        int k = static_cast<int>(std::floor(std::abs(alpha))) + 1;
        if (k - std::abs(alpha) < 0.45) ++k;
        result = extended_calculus(a, power_symbol(alpha), opts, k, k - std::abs(alpha));
    }
    a.store_power(alpha, result);
    return result;
}

ComplexMatrix principal_log_matrix(const SectorialOperator& a, const QuadOptions& opts) {
    // Log * phi decays a shade slower than phi itself.
    return extended_calculus(a, symbol_registry("log"), opts, 1, 0.85);
}

ComplexMatrix logarithm_branch(const SectorialOperator& a, int k) {
    ComplexMatrix l = a.log_matrix();
    if (k != 0) l.diagonal().array() += Complex(0.0, 2.0 * kPi * k);
    return l;
}

ComplexMatrix imaginary_power(const SectorialOperator& a, double s, const QuadOptions& opts) {
    if (s == 0.0) return ComplexMatrix::Identity(a.dim(), a.dim());
    return extended_calculus(a, imaginary_power_symbol(s), opts, 1, 1.0);
}

namespace {

ComplexMatrix power_by_spectrum(const ComplexMatrix& m, double p) {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, /*computeEigenvectors=*/true);
    const ComplexMatrix& v = es.eigenvectors();
    Eigen::JacobiSVD<ComplexMatrix> svd(v);
    const double cond = svd.singularValues().maxCoeff() / svd.singularValues().minCoeff();
    if (!(cond < 1e8))
        throw PreconditionError("matrix_power_principal: eigenvector basis too ill-conditioned");
    ComplexVector d(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const Complex lam = es.eigenvalues()[i];
        if (lam.real() <= 0.0 && std::abs(lam.imag()) < 1e-14 * std::abs(lam))
            throw PreconditionError("matrix_power_principal: spectrum touches (-inf, 0]");
        d[i] = principal_pow(lam, p);
    }
    return v * d.asDiagonal() * v.partialPivLu().solve(ComplexMatrix::Identity(m.rows(), m.rows()));
}

ComplexMatrix power_pass(const ComplexMatrix& m, double p, Complex center, double radius,
                         std::size_t n) {
    const Eigen::Index dim = m.rows();
    ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
    ComplexMatrix acc = accumulate_nodes(n, dim, [&](std::size_t j) -> ComplexMatrix {
        const Complex e = std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / n);
        const Complex z = center + radius * e;
        return (e * principal_pow(z, p)) * (z * id - m).partialPivLu().solve(id).eval();
    });
    return (radius / static_cast<double>(n)) * acc;
}

} // namespace

ComplexMatrix matrix_power_principal(const ComplexMatrix& m, double p, PowerMethod method,
                                     double tol) {
    if (m.rows() != m.cols()) throw InvalidInputError("matrix_power_principal: square input");
    if (method == PowerMethod::spectral) return power_by_spectrum(m, p);

    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, /*computeEigenvectors=*/false);
    const ComplexVector lam = es.eigenvalues();
    const Complex center = lam.mean();
    double spread = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        const Complex l = lam[i];
        if (l.real() <= 0.0 && std::abs(l.imag()) < 1e-14 * std::abs(l))
            throw PreconditionError("matrix_power_principal: spectrum touches (-inf, 0]");
        spread = std::max(spread, std::abs(l - center));
    }
    const double cut_dist =
        center.real() <= 0.0 ? std::abs(center.imag()) : std::abs(center);
    if (!(spread < 0.95 * cut_dist))
        throw PreconditionError(
            "matrix_power_principal: enclosing circle would cross the branch cut");
    const double radius = spread + 0.6 * (0.95 * cut_dist - spread);

    std::size_t n = 64;
    ComplexMatrix prev = power_pass(m, p, center, radius, n);
    for (int d = 0; d < 9; ++d) {
        n *= 2;
        ComplexMatrix cur = power_pass(m, p, center, radius, n);
        const double change = (cur - prev).norm();
        if (change <= tol * cur.norm() + 1e-13 * (1.0 + m.norm())) return cur;
        prev = std::move(cur);
    }
    throw ConvergenceError("matrix_power_principal: circle quadrature did not converge",
                           prev.norm(), prev.norm());
}

ComplexVector negative_log_power(const SectorialOperator& a, int k, double r,
                                 const ComplexVector& x, PowerMethod method) {
    if (k == 0) throw InvalidInputError("negative_log_power: k = 0 is rejected");
    if (!(r > 0.5)) throw PreconditionError("negative_log_power: r > 1/2 required");
    const ComplexMatrix l = logarithm_branch(a, k);
    return matrix_power_principal(l, -r, method) * x;
}

Report group_growth_scan(const SectorialOperator& a, double mu,
                         const std::vector<double>& s_values, const QuadOptions& opts) {
    if (!(mu > a.omega_est()))
        throw PreconditionError("group_growth_scan: mu must exceed omega_est");
    if (s_values.empty()) throw InvalidInputError("group_growth_scan: empty s range");

    Report rep;
    rep.check = "group_growth_scan";
    rep.operator_spec = a.spec_name();
    rep.params = {{"mu", mu}, {"s_values", s_values}};

    std::vector<ComplexMatrix> pow(s_values.size());
    double sup_normalized = 0.0;
    double sup_norm = 0.0;
    for (std::size_t i = 0; i < s_values.size(); ++i) {
        pow[i] = imaginary_power(a, s_values[i], opts);
        Eigen::JacobiSVD<ComplexMatrix> svd(pow[i]);
        const double nrm = svd.singularValues().maxCoeff();
        sup_norm = std::max(sup_norm, nrm);
        sup_normalized = std::max(sup_normalized, nrm * std::exp(-mu * std::abs(s_values[i])));
    }

    double worst_group = 0.0;
    for (std::size_t i = 0; i + 1 < s_values.size(); ++i) {
        const double s = s_values[i], t = s_values[i + 1];
        const ComplexMatrix both = imaginary_power(a, s + t, opts);
        worst_group =
            std::max(worst_group, (pow[i] * pow[i + 1] - both).norm() / std::max(both.norm(), 1e-12));
    }

    rep.constants["sup_norm"] = sup_norm;
    rep.constants["sup_normalized"] = sup_normalized;
    rep.residuals["group_law"] = worst_group;
    rep.pass = std::isfinite(sup_normalized) && worst_group <= 1e-6;
    return rep;
}

Complex gamma_alpha(double alpha, Complex z, Complex w) {
    const Complex wa = principal_pow(w, alpha);
    const Complex za = principal_pow(z, alpha);
    return alpha * (wa + za) / (wa - za);
}

Report eta_extension_check(double alpha, double mu, const std::vector<Complex>& z_samples,
                           const RadialGrid& w_grid) {
    if (!(alpha > 0.0 && alpha * mu < kPi))
        throw PreconditionError("eta_extension_check: need alpha > 0 and alpha * mu < pi");
    const double beta = std::min(0.5, alpha);

    Report rep;
    rep.check = "eta_extension_check";
    rep.params = {{"alpha", alpha}, {"mu", mu}, {"beta", beta}};

    auto eta = [alpha](Complex z, Complex w) {
        return gamma_alpha(alpha, z, w) - gamma_alpha(1.0, z, w) +
               (1.0 - alpha) * (w - 1.0) / (w + 1.0);
    };

    std::size_t skipped = 0, total = 0;
    double max_ratio = 0.0;
    bool all_finite = true;
    auto scan = [&](Complex z, const RadialGrid& grid) {
        double sup = 0.0;
        for (double phi : {mu, -mu, 0.0}) {
            const Complex dir = std::polar(1.0, phi);
            for (double r : grid.nodes) {
                const Complex w = r * dir;
                ++total;
                const double pole_gap = std::abs(principal_pow(w, alpha) - principal_pow(z, alpha));
                const double pole_scale =
                    std::max(std::pow(std::abs(w), alpha), std::pow(std::abs(z), alpha));
                if (pole_gap < 1e-8 * pole_scale ||
                    std::abs(w - z) < 1e-8 * std::max(std::abs(w), std::abs(z))) {
                    ++skipped;
                    continue;
                }
                const double rb = std::pow(r, beta);
                sup = std::max(sup, (1.0 + rb * rb) / rb * std::abs(eta(z, w)));
            }
        }
        return sup;
    };

    double residue_rel = 0.0;
    for (Complex z : z_samples) {
        const double norm_base = scan(z, w_grid);
        const RadialGrid wide =
            RadialGrid::uniform(w_grid.u_min - 8.0, w_grid.u_max + 8.0,
                                w_grid.size() + static_cast<std::size_t>(16 * 8));
        const double norm_wide = scan(z, wide);
        if (norm_wide > norm_base * 1.15 + 1e-12) all_finite = false;
        const double bound = std::pow(std::abs(z), alpha) + std::pow(std::abs(z), -alpha);
        max_ratio = std::max(max_ratio, norm_wide / bound);

        const Complex w_probe = z * (1.0 + 1e-7);
        const Complex res = (w_probe - z) * gamma_alpha(alpha, z, w_probe);
        residue_rel = std::max(residue_rel, std::abs(res - 2.0 * z) / std::abs(2.0 * z));
    }

    rep.constants["empirical_C"] = max_ratio;
    rep.constants["skipped_nodes"] = static_cast<double>(skipped);
    rep.residuals["residue_rel"] = residue_rel;
    rep.pass = all_finite && residue_rel <= 1e-5 &&
               skipped <= total / 100 + z_samples.size() * 4;
    if (!all_finite) rep.notes.push_back("Psi_beta norm kept growing under window widening");
    return rep;
}

} // namespace sectoria
