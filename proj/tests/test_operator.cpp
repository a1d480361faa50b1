#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sectoria/operator.hpp"

using namespace sectoria;

namespace {

SectorialOperator diag_op(std::vector<double> d) {
    FamilyParams p;
    p.diagonal = std::move(d);
    return make_family(Family::positive_diagonal, p);
}

const double kAngleRes = kPi / 257.0;

} // namespace

TEST_CASE("positive diagonal loads with near-zero type angle") {
    const SectorialOperator a = diag_op({1.0, 2.0});
    CHECK(a.omega_est() < kAngleRes + 1e-12);
}

TEST_CASE("jordan block with eigenvalue 1 is accepted with small positive angle") {
    FamilyParams p;
    p.dim = 2;
    p.lambda = Complex(1.0, 0.0);
    p.epsilon = 1.0;
    const SectorialOperator a = make_family(Family::jordan_shifted, p);
    CHECK(a.omega_est() > 0.0);
    CHECK(a.omega_est() < 0.2);
}

TEST_CASE("singular matrices are rejected") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(1, 1) = 1.0; // diag(0, 1)
    CHECK_THROWS_AS(SectorialOperator{m}, SingularOperatorError);
}

TEST_CASE("non-square matrices are rejected") {
    ComplexMatrix m = ComplexMatrix::Ones(2, 3);
    CHECK_THROWS_AS(SectorialOperator{m}, InvalidInputError);
}

TEST_CASE("resolvent of diag(1,2) at z=-1") {
    const SectorialOperator a = diag_op({1.0, 2.0});
    const ComplexMatrix r = a.resolvent(Complex(-1.0, 0.0));
    CHECK(std::abs(r(0, 0) - Complex(-0.5, 0.0)) < 1e-14);
    CHECK(std::abs(r(1, 1) - Complex(-1.0 / 3.0, 0.0)) < 1e-14);
    CHECK(std::abs(r(0, 1)) < 1e-14);
}

TEST_CASE("resolvent of diag(1) at z=2 is [1]") {
    const SectorialOperator a = diag_op({1.0});
    CHECK(std::abs(a.resolvent(Complex(2.0, 0.0))(0, 0) - 1.0) < 1e-14);
}

TEST_CASE("resolvent matches the spectral oracle on a random accretive 5x5") {
    FamilyParams p;
    p.dim = 5;
    p.seed = 11;
    const SectorialOperator a = make_family(Family::random_accretive, p);
    const Complex z(-1.0, 0.0);
    const ComplexMatrix got = a.resolvent(z);
    const ComplexMatrix want = oracles::spectral_apply(a.matrix(), [z](Complex l) { return 1.0 / (z - l); });
    CHECK(frobenius_rel_diff(got, want) < 1e-10);
}

TEST_CASE("resolvent rejects points on the spectrum") {
    const SectorialOperator a = diag_op({1.0, 2.0});
    CHECK_THROWS_AS(a.resolvent(Complex(1.0, 0.0)), ResolventError);
}

TEST_CASE("certify diag(1) at theta=pi/2 against the dense ray-scan oracle") {
    const SectorialOperator a = diag_op({1.0});
    const double c = certify_sectoriality(a, Sector(kPi / 2.0), a.default_ray_grid());
    // sup over all probed rays is attained on the closest one; for a single
    // eigenvalue at 1 the sup tends to 1 from below as r -> infinity.
    const double oracle = oracles::dense_scan_sup(
        [](double r) { return r / std::abs(Complex(0.0, r) - Complex(1.0, 0.0)); });
    CHECK(std::abs(c - oracle) < 2e-3);
    CHECK(a.c_theta().count(kPi / 2.0) == 1);
}

TEST_CASE("certify saturates under grid doubling for the identity") {
    const SectorialOperator a = diag_op({1.0});
    const RadialGrid g = a.default_ray_grid();
    const double c1 = certify_sectoriality(a, Sector(3.0 * kPi / 4.0), g);
    const double c2 = certify_sectoriality(a, Sector(3.0 * kPi / 4.0), g.refined());
    CHECK(std::abs(c1 - c2) < 1e-3 * std::max(c1, c2));
}

TEST_CASE("certify at theta=pi scans the negative axis: C = sup r/(r+1) = 1") {
    const SectorialOperator a = diag_op({1.0, 2.0});
    const double c = certify_sectoriality(a, Sector(kPi), a.default_ray_grid());
    CHECK(std::abs(c - 1.0) < 1e-3);
}

TEST_CASE("certify is monotone in the angle") {
    const SectorialOperator a = diag_op({1.0});
    const RadialGrid g = a.default_ray_grid();
    const double c1 = certify_sectoriality(a, Sector(kPi / 2.0), g);
    const double c2 = certify_sectoriality(a, Sector(3.0 * kPi / 4.0), g);
    CHECK(c1 >= c2);
}

TEST_CASE("certify rejects angles at or below omega_est") {
    FamilyParams p;
    p.entries = {std::polar(1.0, 1.0)};
    const SectorialOperator a = make_family(Family::complex_diagonal, p);
    CHECK_THROWS_AS(certify_sectoriality(a, Sector(0.5), a.default_ray_grid()),
                    PreconditionError);
}

TEST_CASE("type angle of diag(1,4) is zero within grid resolution") {
    CHECK(diag_op({1.0, 4.0}).omega_est() < kAngleRes + 1e-12);
}

TEST_CASE("type angle of diag(e^{i pi/4}) is pi/4 within grid resolution") {
    FamilyParams p;
    p.entries = {std::polar(1.0, kPi / 4.0)};
    const SectorialOperator a = make_family(Family::complex_diagonal, p);
    CHECK(std::abs(a.omega_est() - kPi / 4.0) < kAngleRes + 1e-12);
}

TEST_CASE("conjugated accretive with args +-pi/3 has angle >= pi/3") {
    FamilyParams p;
    p.entries = {std::polar(1.0, kPi / 3.0), std::polar(1.0, -kPi / 3.0)};
    const SectorialOperator a = make_family(Family::conjugated_accretive, p);
    CHECK(a.omega_est() >= kPi / 3.0 - 1e-9);
    // the eigenvalue-argument oracle agrees
    double spectral = 0.0;
    for (Eigen::Index i = 0; i < a.eigenvalues().size(); ++i)
        spectral = std::max(spectral, std::abs(std::arg(a.eigenvalues()[i])));
    CHECK(std::abs(spectral - kPi / 3.0) < 1e-8);
}

TEST_CASE("resolvent identity holds for sampled points outside the sector") {
    FamilyParams p;
    p.dim = 4;
    p.seed = 3;
    const SectorialOperator a = make_family(Family::random_accretive, p);
    for (int i = 0; i < 6; ++i) {
        const Complex z = std::polar(0.3 + 1.7 * i, 2.2 + 0.12 * i);
        const Complex w = std::polar(5.0 - 0.6 * i, -(2.3 + 0.1 * i));
        const ComplexMatrix rz = a.resolvent(z), rw = a.resolvent(w);
        const ComplexMatrix lhs = rz - rw;
        const ComplexMatrix rhs = (w - z) * (rz * rw);
        CHECK(frobenius_rel_diff(lhs, rhs) < 1e-10);
    }
}

TEST_CASE("graded norm scalar cases") {
    const SectorialOperator a4 = diag_op({4.0});
    ComplexVector e1 = ComplexVector::Ones(1);
    // T_A = sqrt(4)/(1+4) = 2/5, so ||T^{-1} e1|| = 5/2.
    CHECK(std::abs(graded_norm(a4, 1, e1) - 2.5) < 1e-7);
    CHECK(graded_norm(a4, 0, e1) == e1.norm());

    const SectorialOperator a19 = diag_op({1.0, 9.0});
    ComplexVector x = ComplexVector::Ones(2);
    // T = diag(1/2, 3/10): ||T x|| = ||(1/2, 3/10)||
    const double want = std::sqrt(0.25 + 0.09);
    CHECK(std::abs(graded_norm(a19, -1, x) - want) < 1e-7);
}

TEST_CASE("graded norm is the range norm: ||T^n y||_n = ||y||") {
    const SectorialOperator a = diag_op({1.0, 3.0, 7.0});
    const ComplexMatrix& t = a.t_matrix();
    ComplexVector y(3);
    y << Complex(1, 0.5), Complex(-2, 0), Complex(0, 1);
    const ComplexVector ty = t * (t * y);
    CHECK(std::abs(graded_norm(a, 2, ty) - y.norm()) < 1e-6 * y.norm());
}

TEST_CASE("approximate identity: scalar value and both algebraic forms") {
    const SectorialOperator a = diag_op({1.0});
    ComplexVector x = ComplexVector::Ones(1);
    const ComplexVector v = approximate_identity(a, x, 0.5);
    CHECK(std::abs(v[0] - Complex(1.0 / 3.0, 0.0)) < 1e-14);

    FamilyParams p;
    p.dim = 4;
    p.seed = 9;
    const SectorialOperator b = make_family(Family::random_accretive, p);
    ComplexVector xb = ComplexVector::Ones(4);
    for (double eps : {0.3, 0.05}) {
        const ComplexVector v1 = approximate_identity(b, xb, eps);
        const ComplexVector v2 = approximate_identity_partial_fraction(b, xb, eps);
        CHECK((v1 - v2).norm() < 1e-12 * v1.norm());
    }
}

TEST_CASE("approximate identity converges monotonically as eps -> 0") {
    const SectorialOperator a = diag_op({1.0, 2.0});
    ComplexVector x = ComplexVector::Ones(2);
    double prev = std::numeric_limits<double>::max();
    for (double eps : {0.1, 0.01, 0.001}) {
        const double err = (approximate_identity(a, x, eps) - x).norm();
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-2);
}

TEST_CASE("families: fixed values and determinism") {
    const SectorialOperator d = make_family("positive_diagonal:1,2,3");
    CHECK(d.dim() == 3);
    CHECK(std::abs(d.matrix()(2, 2) - Complex(3.0, 0.0)) < 1e-15);

    const SectorialOperator j = make_family("jordan_shifted:2,1,1");
    ComplexMatrix want(2, 2);
    want << 1, 1, 0, 1;
    CHECK((j.matrix() - want).norm() == 0.0);

    FamilyParams p;
    p.dim = 4;
    p.seed = 7;
    const SectorialOperator c1 = make_family(Family::conjugated_accretive, p);
    const SectorialOperator c2 = make_family(Family::conjugated_accretive, p);
    CHECK((c1.matrix() - c2.matrix()).norm() == 0.0); // bit-identical re-run
}

TEST_CASE("family parsing rejects bad input") {
    CHECK_THROWS_AS(make_family("positive_diagonal:"), InvalidInputError);
    CHECK_THROWS_AS(make_family("no_such_family:1"), InvalidInputError);
    CHECK_THROWS_AS(make_family("jordan_shifted:2,1"), InvalidInputError);
    CHECK_THROWS_AS(make_family("positive_diagonal:1,-2"), InvalidInputError);
}

TEST_CASE("matrices with spectrum on the negative axis are not sectorial") {
    ComplexMatrix m(1, 1);
    m(0, 0) = Complex(-1.0, 0.0);
    CHECK_THROWS_AS(SectorialOperator{m}, SingularOperatorError);
}

TEST_CASE("graded norm reports ill-conditioned power solves") {
    const SectorialOperator a = diag_op({1.0, 100.0});
    // cond(T_A) ~ 5, so 40 inverse applications exceed the 1e15 budget
    CHECK_THROWS_AS(graded_norm(a, 40, ComplexVector::Ones(2)), PreconditionError);
}

TEST_CASE("sample vectors start with the canonical basis and are unit norm") {
    const auto vecs = sample_vectors(3, 5, 42);
    CHECK(vecs.size() == 8);
    CHECK(std::abs(vecs[0][0] - Complex(1, 0)) < 1e-15);
    for (const auto& v : vecs) CHECK(std::abs(v.norm() - 1.0) < 1e-12);
}
