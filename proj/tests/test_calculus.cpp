#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sectoria/calculus.hpp"
#include "sectoria/operator.hpp"
#include "sectoria/symbols.hpp"

using namespace sectoria;

namespace {

SectorialOperator diag_op(std::vector<double> d) {
    FamilyParams p;
    p.diagonal = std::move(d);
    return make_family(Family::positive_diagonal, p);
}

SectorialOperator random_op(Eigen::Index dim, std::uint64_t seed) {
    FamilyParams p;
    p.dim = dim;
    p.seed = seed;
    return make_family(Family::random_accretive, p);
}

ScalarSymbol one_symbol() {
    ScalarSymbol s;
    s.name = "one";
    s.evaluator = [](Complex) { return Complex(1.0, 0.0); };
    return s;
}

} // namespace

TEST_CASE("dunford sign pin: psi(diag(1)) = +1/4 for psi = z/(1+z)^2") {
    const SectorialOperator a = diag_op({1.0});
    const ComplexMatrix r = dunford_riesz(a, symbol_registry("z_over_1pz2"));
    CHECK(std::abs(r(0, 0) - Complex(0.25, 0.0)) < 1e-8);
}

TEST_CASE("dunford matches the spectral oracle on diag(1,2,3)") {
    const SectorialOperator a = diag_op({1.0, 2.0, 3.0});
    const ScalarSymbol psi = symbol_registry("sqrt_over_1p");
    const ComplexMatrix got = dunford_riesz(a, psi);
    const ComplexMatrix want = oracles::spectral_apply(
        a.matrix(), [](Complex z) { return std::sqrt(z) / (1.0 + z); });
    CHECK(frobenius_rel_diff(got, want) < 1e-8);
}

TEST_CASE("dunford on a Jordan block matches the derivative oracle") {
    FamilyParams p;
    p.dim = 2;
    p.lambda = Complex(1.0, 0.0);
    p.epsilon = 1.0;
    const SectorialOperator a = make_family(Family::jordan_shifted, p);
    const ComplexMatrix got = dunford_riesz(a, symbol_registry("z_over_1pz2"));
    const ComplexMatrix want = oracles::jordan2_apply(
        Complex(1.0, 0.0), 1.0,
        [](Complex z) { return z / ((1.0 + z) * (1.0 + z)); },
        [](Complex z) { return (1.0 - z) / std::pow(1.0 + z, 3); });
    CHECK(frobenius_rel_diff(got, want) < 1e-6);
}

TEST_CASE("dunford requires a declared decay class and a valid angle") {
    const SectorialOperator a = diag_op({1.0});
    CHECK_THROWS_AS(dunford_riesz(a, one_symbol()), PreconditionError);

    const Contour too_low = Contour::sector_boundary(
        a.omega_est() * 0.5 + 1e-6, RadialGrid::gauss_legendre(-20.0, 20.0, 128));
    CHECK_THROWS_AS(dunford_riesz(a, symbol_registry("phi"), too_low), PreconditionError);
}

TEST_CASE("results are bit-identical across thread counts") {
    const SectorialOperator a = random_op(5, 77);
    const ScalarSymbol psi = symbol_registry("sqrt_over_1p");
    setenv("SECTORIA_THREADS", "1", 1);
    const ComplexMatrix serial = dunford_riesz(a, psi);
    setenv("SECTORIA_THREADS", "4", 1);
    const ComplexMatrix threaded = dunford_riesz(a, psi);
    unsetenv("SECTORIA_THREADS");
    CHECK((serial - threaded).norm() == 0.0);
}

TEST_CASE("dunford reports non-convergence when the doubling budget is exhausted") {
    const SectorialOperator a = diag_op({1.0});
    QuadOptions starved;
    starved.n0 = 12;
    starved.max_doublings = 1;
    starved.tol = 1e-14;
    CHECK_THROWS_AS(dunford_riesz(a, symbol_registry("sqrt_over_1p"), starved), ConvergenceError);
}

TEST_CASE("contour-angle independence of the calculus") {
    const SectorialOperator a = diag_op({1.0, 2.0});
    const ScalarSymbol psi = symbol_registry("z_over_1pz2");
    QuadOptions o1, o2;
    o1.theta_prime = 0.8;
    o2.theta_prime = 1.9;
    const ComplexMatrix r1 = dunford_riesz(a, psi, o1);
    const ComplexMatrix r2 = dunford_riesz(a, psi, o2);
    CHECK(frobenius_rel_diff(r1, r2) < 1e-8);
}

TEST_CASE("homomorphism: (psi1 psi2)(A) = psi1(A) psi2(A)") {
    const SectorialOperator a = random_op(4, 21);
    const ScalarSymbol p1 = symbol_registry("z_over_1pz2");
    const ScalarSymbol p2 = symbol_registry("sqrt_over_1p");
    const ComplexMatrix lhs = dunford_riesz(a, product_symbol(p1, p2));
    const ComplexMatrix rhs = dunford_riesz(a, p1) * dunford_riesz(a, p2);
    CHECK(frobenius_rel_diff(lhs, rhs) < 1e-6);
}

TEST_CASE("extended calculus: f = 1 gives the identity") {
    const SectorialOperator a = diag_op({1.0, 3.0});
    const ComplexMatrix r = extended_calculus(a, one_symbol());
    CHECK(frobenius_rel_diff(r, ComplexMatrix::Identity(2, 2)) < 1e-8);
}

TEST_CASE("extended calculus: sqrt on diag(1,2)") {
    const SectorialOperator a = diag_op({1.0, 2.0});
    const ComplexMatrix r = extended_calculus(a, symbol_registry("z_pow:0.5"), QuadOptions{}, 1, 0.5);
    CHECK(std::abs(r(0, 0) - 1.0) < 1e-8);
    CHECK(std::abs(r(1, 1) - std::sqrt(2.0)) < 1e-8);
}

TEST_CASE("extended calculus short-circuits Psi symbols to the same code path") {
    const SectorialOperator a = diag_op({1.0, 2.0});
    const ComplexMatrix via_ext = extended_calculus(a, symbol_registry("phi"));
    const ComplexMatrix via_dr = dunford_riesz(a, symbol_registry("phi"));
    CHECK((via_ext - via_dr).norm() == 0.0);
}

TEST_CASE("fractional powers: values, cache, and power law") {
    const SectorialOperator a = diag_op({4.0, 9.0});
    const ComplexMatrix h = fractional_power(a, 0.5);
    CHECK(std::abs(h(0, 0) - 2.0) < 1e-8);
    CHECK(std::abs(h(1, 1) - 3.0) < 1e-8);
    CHECK((fractional_power(a, 0.5) - h).norm() == 0.0); // cached

    const SectorialOperator b = random_op(5, 2);
    const ComplexMatrix p13 = fractional_power(b, 1.0 / 3.0);
    const ComplexMatrix p23 = fractional_power(b, 2.0 / 3.0);
    CHECK(frobenius_rel_diff(p13 * p23, b.matrix()) < 1e-6);
    const ComplexMatrix sq = fractional_power(b, 0.5);
    CHECK(frobenius_rel_diff(sq * sq, b.matrix()) < 1e-6);
    // power law over sampled exponent pairs
    for (auto [al, be] : std::vector<std::pair<double, double>>{
             {0.2, 0.3}, {0.45, 0.25}, {0.15, 0.7}}) {
        const ComplexMatrix lhs = fractional_power(b, al) * fractional_power(b, be);
        CHECK(frobenius_rel_diff(lhs, fractional_power(b, al + be)) < 1e-6);
    }
    // spectral-oracle cross check
    const ComplexMatrix want =
        oracles::spectral_apply(b.matrix(), [](Complex z) { return principal_pow(z, 1.0 / 3.0); });
    CHECK(frobenius_rel_diff(p13, want) < 1e-6);
}

TEST_CASE("fractional power rejects alpha*omega >= pi") {
    FamilyParams p;
    p.entries = {std::polar(1.0, 2.5)};
    const SectorialOperator a = make_family(Family::complex_diagonal, p);
    CHECK_THROWS_AS(fractional_power(a, 1.3), PreconditionError);
}

TEST_CASE("logarithm branches") {
    FamilyParams p;
    p.diagonal = {std::exp(1.0)};
    const SectorialOperator ae = make_family(Family::positive_diagonal, p);
    const ComplexMatrix l1 = logarithm_branch(ae, 1);
    CHECK(std::abs(l1(0, 0) - Complex(1.0, 2.0 * kPi)) < 1e-8);

    const SectorialOperator id = diag_op({1.0, 1.0});
    CHECK(logarithm_branch(id, 0).norm() < 1e-8);

    // branch consistency is exact arithmetic
    const SectorialOperator a = diag_op({1.0, 4.0});
    ComplexMatrix shift = logarithm_branch(a, 3) - logarithm_branch(a, 0);
    shift.diagonal().array() -= Complex(0.0, 6.0 * kPi);
    CHECK(shift.norm() == 0.0);

    // |Lambda_{-1}(lambda)| >= 2 pi on (0, inf), so the inverse norm caps at 1/(2 pi)
    const ComplexMatrix lm1 = logarithm_branch(a, -1);
    Eigen::JacobiSVD<ComplexMatrix> svd(lm1);
    const double inv_norm = 1.0 / svd.singularValues().minCoeff();
    CHECK(inv_norm <= 1.0 / (2.0 * kPi) + 1e-6);
}

TEST_CASE("negative log powers: scalar values and the dual-path oracle") {
    const SectorialOperator a1 = diag_op({1.0});
    ComplexVector x = ComplexVector::Ones(1);
    const ComplexVector v = negative_log_power(a1, 1, 1.0, x);
    CHECK(std::abs(v[0] - 1.0 / (2.0 * kPi * Complex(0, 1))) < 1e-9);

    FamilyParams p;
    p.diagonal = {std::exp(1.0)};
    const SectorialOperator ae = make_family(Family::positive_diagonal, p);
    const double r = 0.5 + 1e-3;
    const ComplexVector w = negative_log_power(ae, 1, r, x);
    CHECK(std::abs(w[0] - principal_pow(Complex(1.0, 2.0 * kPi), -r)) < 1e-9);

    const SectorialOperator b = random_op(4, 5);
    ComplexVector xb = ComplexVector::Ones(4);
    const ComplexVector vc = negative_log_power(b, 1, 0.8, xb, PowerMethod::contour);
    const ComplexVector vs = negative_log_power(b, 1, 0.8, xb, PowerMethod::spectral);
    CHECK((vc - vs).norm() < 1e-6 * vs.norm());
}

TEST_CASE("negative log power rejects k = 0 and r <= 1/2") {
    const SectorialOperator a = diag_op({2.0});
    ComplexVector x = ComplexVector::Ones(1);
    CHECK_THROWS_AS(negative_log_power(a, 0, 1.0, x), InvalidInputError);
    CHECK_THROWS_AS(negative_log_power(a, 1, 0.5, x), PreconditionError);
}

TEST_CASE("matrix_power_principal guards the branch cut") {
    ComplexMatrix m(1, 1);
    m(0, 0) = Complex(-1.0, 0.0);
    CHECK_THROWS_AS(matrix_power_principal(m, 0.5), PreconditionError);
}

TEST_CASE("imaginary powers") {
    const SectorialOperator id = diag_op({1.0, 1.0});
    CHECK(frobenius_rel_diff(imaginary_power(id, 2.3), ComplexMatrix::Identity(2, 2)) < 1e-8);

    FamilyParams p;
    p.diagonal = {std::exp(1.0)};
    const SectorialOperator ae = make_family(Family::positive_diagonal, p);
    const ComplexMatrix r = imaginary_power(ae, kPi);
    CHECK(std::abs(r(0, 0) - Complex(-1.0, 0.0)) < 1e-8);
}

TEST_CASE("group growth scan on a positive diagonal is unitary") {
    const SectorialOperator a = diag_op({0.5, 1.0, 3.0});
    const Report rep = group_growth_scan(a, 0.5, {-5.0, -2.0, -0.5, 0.5, 2.0, 5.0});
    CHECK(rep.pass);
    CHECK(std::abs(rep.constants.at("sup_norm") - 1.0) < 1e-6);
    CHECK(rep.residuals.at("group_law") < 1e-6);
}

TEST_CASE("psi class norm: sqrt(z)/(1+z) at s=1/2, theta=pi/2 gives sqrt(2)") {
    const RadialGrid g = RadialGrid::uniform(-16.0, 16.0, 4001);
    const auto res = psi_class_norm(symbol_registry("sqrt_over_1p"), 0.5, kPi / 2.0, g);
    CHECK(res.finite);
    CHECK(std::abs(res.value - std::sqrt(2.0)) < 1e-4);
}

TEST_CASE("psi class norm matches the dense 1-D scan oracle for phi") {
    const double s = 1.0, theta = 0.4;
    const RadialGrid g = RadialGrid::uniform(-16.0, 16.0, 4001);
    const auto res = psi_class_norm(symbol_registry("phi"), s, theta, g);
    auto weighted = [](double phi_angle) {
        return [phi_angle](double r) {
            const Complex z = std::polar(r, phi_angle);
            const Complex w = 1.0 + z;
            return (1.0 + r * r) / r * std::abs(z / (w * w));
        };
    };
    const double oracle = std::max({oracles::dense_scan_sup(weighted(theta)),
                                    oracles::dense_scan_sup(weighted(-theta)),
                                    oracles::dense_scan_sup(weighted(0.0))});
    CHECK(res.finite);
    CHECK(std::abs(res.value - oracle) < 1e-3 * oracle);
}

TEST_CASE("psi class norm: zero symbol and divergence detection") {
    ScalarSymbol zero;
    zero.name = "zero";
    zero.evaluator = [](Complex) { return Complex(0.0, 0.0); };
    const RadialGrid g = RadialGrid::uniform(-10.0, 10.0, 501);
    CHECK(psi_class_norm(zero, 1.0, 1.0, g).value == 0.0);

    // z^{1/2} has no two-sided decay: the weighted sup grows with the window
    const auto res = psi_class_norm(symbol_registry("z_pow:0.5"), 0.5, 1.0, g);
    CHECK_FALSE(res.finite);
}

TEST_CASE("calculus contractivity surrogate on a self-adjoint operator") {
    const SectorialOperator a = diag_op({1.0, 2.0, 5.0});
    const double theta = 0.5;
    QuadOptions o;
    o.theta_prime = 0.3;
    const ComplexMatrix fa = dunford_riesz(a, symbol_registry("phi"), o);
    const double sup = oracles::dense_scan_sup([theta](double r) {
        const Complex z = std::polar(r, theta);
        const Complex w = 1.0 + z;
        return std::abs(z / (w * w));
    });
    Eigen::JacobiSVD<ComplexMatrix> svd(fa);
    CHECK(svd.singularValues().maxCoeff() <= sup + 1e-8);
}

TEST_CASE("eta extension check: alpha = 1 collapses to zero") {
    const RadialGrid g = RadialGrid::uniform(-8.0, 8.0, 801);
    const Report rep = eta_extension_check(1.0, kPi / 2.0, {Complex(1.0, 0.0), Complex(0.5, 0.3)}, g);
    CHECK(rep.pass);
    CHECK(rep.constants.at("empirical_C") < 1e-12);
}

TEST_CASE("eta extension check: alpha = 1/2 is finite, stable, and has residue 2z") {
    const RadialGrid g = RadialGrid::uniform(-8.0, 8.0, 1601);
    const Report rep =
        eta_extension_check(0.5, kPi / 2.0, {Complex(1.0, 0.0), Complex(2.0, 1.0)}, g);
    CHECK(rep.pass);
    CHECK(rep.constants.at("empirical_C") > 0.0);
    CHECK(rep.residuals.at("residue_rel") < 1e-5);
}
