#include "sectoria/square_function.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace sectoria {

namespace {

/// One pass of the t-quadrature over precomputed resolvent samples.
/// `bilinear` collects sum w B_t B_t alongside the Hermitian
/// sum w B_t^* B_t when requested.
ComplexMatrix gram_pass(const ResolventSampler& sampler, Eigen::Index n,
                        const RadialGrid& t_grid, ComplexMatrix* bilinear) {
    ComplexMatrix g = ComplexMatrix::Zero(n, n);
    if (bilinear) *bilinear = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const ComplexMatrix bt = sampler.apply_scaled(t_grid.nodes[i]);
        g.noalias() += t_grid.weights[i] * (bt.adjoint() * bt);
        if (bilinear) bilinear->noalias() += t_grid.weights[i] * (bt * bt);
    }
    return g;
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

Eigen::VectorXd hermitian_eigenvalues(const ComplexMatrix& g) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(g));
    return es.eigenvalues();
}

} // namespace

RadialGrid default_t_grid(const SectorialOperator& a, const ScalarSymbol& psi, std::size_t n0,
                          double tail_pad) {
    const double s2 = 2.0 * psi.psi_class_exponent.value_or(1.0);
    const double w = std::clamp(23.0 / std::max(s2, 1e-3), tail_pad, 80.0);
    // psi(t z) transitions around t ~ 1/|z|, so the window tracks the
    // reciprocal spectral range.
    const double u_lo = -std::log(a.spectral_radius_max()) - w;
    const double u_hi = -std::log(a.spectral_radius_min()) + w;
    const std::size_t n =
        std::max(n0, static_cast<std::size_t>(std::ceil((u_hi - u_lo) * 7.0)));
    return RadialGrid::gauss_legendre(u_lo, u_hi, n);
}

GramOperator gram_operator(const SectorialOperator& a, const ScalarSymbol& psi,
                           const RadialGrid& t_grid, const QuadOptions& opts) {
    const double outer_tol = std::max(opts.tol, 1e-8);
    const ResolventSampler sampler(a, psi, t_grid.u_min, t_grid.u_max, opts);
    RadialGrid grid = t_grid;
    ComplexMatrix prev = gram_pass(sampler, a.dim(), grid, nullptr);
    for (int d = 0; d < 4; ++d) {
        grid = grid.refined();
        ComplexMatrix cur = gram_pass(sampler, a.dim(), grid, nullptr);
        if ((cur - prev).norm() <= outer_tol * cur.norm() + 1e-14) {
            return GramOperator{hermitian_part(cur), psi.name, grid};
        }
        prev = std::move(cur);
    }
    throw ConvergenceError("gram_operator: t-quadrature did not stabilize", prev.norm(),
                           prev.norm());
}

GramOperator gram_operator(const SectorialOperator& a, const ScalarSymbol& psi,
                           const QuadOptions& opts) {
    return gram_operator(a, psi, default_t_grid(a, psi, opts.n0, opts.tail_pad), opts);
}

double square_norm(const GramOperator& g, const ComplexVector& x) {
    if (x.size() != g.matrix.rows()) throw InvalidInputError("square_norm: dimension mismatch");
    const double q = (x.adjoint() * g.matrix * x)(0, 0).real();
    return std::sqrt(std::max(q, 0.0));
}

GapReport equivalence_constants(const GramOperator& g) {
    const Eigen::VectorXd ev = hermitian_eigenvalues(g.matrix);
    const double lmin = ev.minCoeff(), lmax = ev.maxCoeff();
    if (lmin < -1e-12 * std::max(lmax, 1e-300) || lmin <= 1e-14 * std::max(lmax, 1e-300))
        throw SingularOperatorError("equivalence_constants: Gram operator is degenerate");
    GapReport r;
    r.m = std::sqrt(lmin);
    r.M = std::sqrt(lmax);
    r.kappa = r.M / r.m;
    return r;
}

namespace {

/// Extreme generalized eigenvalues of the Hermitian pencil (P, Q), Q > 0.
std::pair<double, double> pencil_extremes(const ComplexMatrix& p, const ComplexMatrix& q) {
    Eigen::LLT<ComplexMatrix> llt(hermitian_part(q));
    if (llt.info() != Eigen::Success)
        throw SingularOperatorError("pencil_extremes: right form is not positive definite");
    const ComplexMatrix l = llt.matrixL();
    const ComplexMatrix li =
        l.triangularView<Eigen::Lower>().solve(ComplexMatrix::Identity(p.rows(), p.rows()));
    const Eigen::VectorXd ev = hermitian_eigenvalues(li * hermitian_part(p) * li.adjoint());
    return {ev.minCoeff(), ev.maxCoeff()};
}

} // namespace

Report psi_independence_check(const SectorialOperator& a, const ScalarSymbol& psi1,
                              const ScalarSymbol& psi2, const QuadOptions& opts) {
    Report rep;
    rep.check = "psi_independence";
    rep.operator_spec = a.spec_name();
    rep.params = {{"psi1", psi1.name}, {"psi2", psi2.name}};

    const GramOperator g1 = gram_operator(a, psi1, opts);
    const GramOperator g2 = gram_operator(a, psi2, opts);
    auto [lmin, lmax] = pencil_extremes(g1.matrix, g2.matrix);
    if (!(lmin > 0.0))
        throw SingularOperatorError("psi_independence_check: degenerate Gram pencil");
    const double kappa = std::sqrt(lmax / lmin);

    // Stability probe: one extra doubling of both t-grids.
    QuadOptions finer = opts;
    const GramOperator g1f = gram_operator(a, psi1, g1.t_grid.refined(), finer);
    const GramOperator g2f = gram_operator(a, psi2, g2.t_grid.refined(), finer);
    auto [lminf, lmaxf] = pencil_extremes(g1f.matrix, g2f.matrix);
    const double kappaf = std::sqrt(lmaxf / lminf);

    rep.constants["kappa"] = kappa;
    rep.constants["pencil_min"] = lmin;
    rep.constants["pencil_max"] = lmax;
    rep.residuals["refinement_change"] = relative_diff(kappa, kappaf);
    rep.grid = {{"t_nodes", g1.t_grid.size()}};
    rep.pass = std::isfinite(kappa) && relative_diff(kappa, kappaf) < 1e-2;
    return rep;
}

namespace {

/// ∫_0^inf ||sqrt(A)(-r - A)^{-1} x||^2 dr by adaptive log-grid quadrature.
double observation_trace_norm_sq(const SectorialOperator& a, const ComplexVector& x,
                                 const QuadOptions& opts) {
    const ComplexMatrix& sq = a.sqrt_matrix();
    const double w = std::max(opts.tail_pad, 23.0);
    RadialGrid grid = RadialGrid::gauss_legendre(std::log(a.spectral_radius_min()) - w,
                                                 std::log(a.spectral_radius_max()) + w,
                                                 std::max<std::size_t>(opts.n0, 192));
    auto value = [&](const RadialGrid& g) {
        return g.integrate_dr(
            [&](double r) { return (sq * a.apply_resolvent(Complex(-r, 0.0), x)).squaredNorm(); });
    };
    double prev = value(grid);
    for (int d = 0; d < opts.max_doublings; ++d) {
        grid = grid.refined();
        const double cur = value(grid);
        if (std::abs(cur - prev) <= 1e-8 * std::abs(cur) + 1e-14) return cur;
        prev = cur;
    }
    throw ConvergenceError("observation trace quadrature did not converge", prev, prev);
}

} // namespace

Report mcintosh_identity_check(const SectorialOperator& a, const ComplexVector& x,
                               const QuadOptions& opts, double tol) {
    Report rep;
    rep.check = "mcintosh_identity";
    rep.operator_spec = a.spec_name();

    const GramOperator g = gram_operator(a, symbol_registry("sqrt_over_1p"), opts);
    const double lhs = square_norm(g, x);
    const double rhs = std::sqrt(std::max(observation_trace_norm_sq(a, x, opts), 0.0));
    const double diff = relative_diff(lhs * lhs, rhs * rhs);

    rep.constants["square_norm"] = lhs;
    rep.constants["boundary_norm"] = rhs;
    rep.residuals["relative_diff"] = diff;
    rep.grid = {{"t_nodes", g.t_grid.size()}};
    rep.pass = diff <= tol;
    return rep;
}

Report log_gap_check(const SectorialOperator& a, int k, double r,
                     const std::vector<ComplexVector>& sample_vectors, const QuadOptions& opts) {
    if (k == 0) throw InvalidInputError("log_gap_check: k = 0 is rejected");
    if (!(r > 0.5))
        throw PreconditionError("log_gap_check: r must exceed 1/2 for the gap inequality");

    Report rep;
    rep.check = "log_gap";
    rep.operator_spec = a.spec_name();
    rep.params = {{"k", k}, {"r", r}};

    const ComplexMatrix lam = logarithm_branch(a, k);
    const ComplexMatrix p = matrix_power_principal(lam, -r);
    const ComplexMatrix q = matrix_power_principal(lam, r);

    const GramOperator g = gram_operator(a, symbol_registry("sqrt_over_1p"), opts);
    auto constants_from = [&](const ComplexMatrix& gram) {
        const double c1 = std::sqrt(hermitian_eigenvalues(p.adjoint() * gram * p).maxCoeff());
        const double c2 = std::sqrt(pencil_extremes(gram, q.adjoint() * q).second);
        return std::make_pair(c1, c2);
    };
    auto [c1, c2] = constants_from(g.matrix);

    double c1_sampled = 0.0, c2_sampled = 0.0;
    for (const ComplexVector& x : sample_vectors) {
        const double nx = x.norm();
        if (nx == 0.0) continue;
        c1_sampled = std::max(c1_sampled, square_norm(g, p * x) / nx);
        const double qn = (q * x).norm();
        if (qn > 0.0) c2_sampled = std::max(c2_sampled, square_norm(g, x) / qn);
    }

    const GramOperator gf = gram_operator(a, symbol_registry("sqrt_over_1p"), g.t_grid.refined(),
                                          opts);
    auto [c1f, c2f] = constants_from(gf.matrix);
    const double stability = std::max(relative_diff(c1, c1f), relative_diff(c2, c2f));

    rep.constants["c1"] = c1;
    rep.constants["c2"] = c2;
    rep.constants["c1_sampled"] = c1_sampled;
    rep.constants["c2_sampled"] = c2_sampled;
    rep.residuals["refinement_change"] = stability;
    rep.grid = {{"t_nodes", g.t_grid.size()}};
    rep.pass = std::isfinite(c1) && std::isfinite(c2) && stability < 1e-2;
    return rep;
}

double admissibility_integral(const SectorialOperator& a,
                              std::optional<std::pair<int, double>> weight,
                              const ComplexVector& x, const QuadOptions& opts) {
    if (!(a.omega_est() < kPi / 2.0))
        throw PreconditionError("admissibility_integral: omega_est must be below pi/2");

    ComplexMatrix c = a.sqrt_matrix();
    if (weight) {
        const auto [k, r] = *weight;
        if (k == 0) throw InvalidInputError("admissibility_integral: k = 0 weight is rejected");
        c = matrix_power_principal(logarithm_branch(a, k), -r) * c;
    }

    double re_min = std::numeric_limits<double>::max();
    for (Eigen::Index i = 0; i < a.eigenvalues().size(); ++i)
        re_min = std::min(re_min, a.eigenvalues()[i].real());
    if (!(re_min > 0.0))
        throw PreconditionError("admissibility_integral: semigroup decay requires Re spectrum > 0");

    const double u_lo = std::log(1e-9 / a.spectral_radius_max());
    const double u_hi = std::log(23.0 / re_min);
    RadialGrid grid = RadialGrid::gauss_legendre(
        u_lo, u_hi,
        std::max<std::size_t>(opts.n0, static_cast<std::size_t>((u_hi - u_lo) * 7.0)));

    const ComplexMatrix& m = a.matrix();
    auto value = [&](const RadialGrid& g) {
        return g.integrate_dr([&](double t) {
            const ComplexMatrix e = (-t * m).exp();
            return (c * (e * x)).squaredNorm();
        });
    };
    double prev = value(grid);
    for (int d = 0; d < opts.max_doublings; ++d) {
        grid = grid.refined();
        const double cur = value(grid);
        if (std::abs(cur - prev) <= 1e-8 * std::abs(cur) + 1e-14) return cur;
        prev = cur;
    }
    throw ConvergenceError("admissibility_integral: t-quadrature did not converge", prev, prev);
}

Report duality_check(const SectorialOperator& a, const ComplexVector& x, const ComplexVector& y,
                     const QuadOptions& opts, double tol) {
    Report rep;
    rep.check = "duality";
    rep.operator_spec = a.spec_name();

    // H_A side: duality pairing <x, y> = y^* P x with the bilinear Gram
    // P = ∫ psi_t(A)^2 dt/t, for the normalized psi with ∫ psi^2 dt/t = 1.
    const ScalarSymbol psi = symbol_registry("sqrt_over_1p");
    RadialGrid grid = default_t_grid(a, psi, opts.n0, opts.tail_pad);
    const ResolventSampler sampler(a, psi, grid.u_min, grid.u_max, opts);
    ComplexMatrix bil_prev, bil;
    gram_pass(sampler, a.dim(), grid, &bil_prev);
    Complex lhs(0, 0);
    for (int d = 0; d < 4; ++d) {
        grid = grid.refined();
        gram_pass(sampler, a.dim(), grid, &bil);
        lhs = (y.adjoint() * bil * x)(0, 0);
        if ((bil - bil_prev).norm() <= 1e-8 * bil.norm() + 1e-14) break;
        bil_prev = bil;
    }

    // Boundary side: ∫ <O x(-r), O_* y(-r)> dr with O_* the observation
    // map of the adjoint; sqrt(A^*) = sqrt(A)^* by the principal branch.
    const ComplexMatrix& sq = a.sqrt_matrix();
    const ComplexMatrix sq_adj = sq.adjoint();
    const ComplexMatrix m_adj = a.matrix().adjoint();
    const double w = std::max(opts.tail_pad, 23.0);
    RadialGrid rg = RadialGrid::gauss_legendre(std::log(a.spectral_radius_min()) - w,
                                               std::log(a.spectral_radius_max()) + w,
                                               std::max<std::size_t>(opts.n0, 192));
    auto boundary_value = [&](const RadialGrid& g) {
        return g.integrate_dr([&](double r) -> Complex {
            const ComplexVector ox = sq * a.apply_resolvent(Complex(-r, 0.0), x);
            ComplexMatrix madj = -m_adj;
            madj.diagonal().array() += Complex(-r, 0.0);
            const ComplexVector oy = sq_adj * madj.partialPivLu().solve(y).eval();
            return oy.dot(ox); // <O x, O_* y>_H
        });
    };
    Complex rhs = boundary_value(rg);
    for (int d = 0; d < opts.max_doublings; ++d) {
        rg = rg.refined();
        const Complex cur = boundary_value(rg);
        if (std::abs(cur - rhs) <= 1e-8 * std::abs(cur) + 1e-14) {
            rhs = cur;
            break;
        }
        rhs = cur;
    }

    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-12});
    const double diff = std::abs(lhs - rhs) / scale;
    rep.constants["pairing_ha_re"] = lhs.real();
    rep.constants["pairing_ha_im"] = lhs.imag();
    rep.constants["pairing_boundary_re"] = rhs.real();
    rep.constants["pairing_boundary_im"] = rhs.imag();
    rep.residuals["relative_diff"] = diff;
    rep.pass = diff <= tol;
    return rep;
}

} // namespace sectoria
