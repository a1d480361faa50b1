#include <doctest.h>

#include <cmath>

#include "sectoria/contour.hpp"
#include "sectoria/grid.hpp"

using namespace sectoria;

TEST_CASE("gauss-legendre weights sum to the window length") {
    const RadialGrid g = RadialGrid::gauss_legendre(-3.0, 5.0, 128);
    double sum = 0.0;
    for (double w : g.weights) sum += w;
    CHECK(std::abs(sum - 8.0) < 1e-12);
}

TEST_CASE("uniform grid weights sum to the window length") {
    const RadialGrid g = RadialGrid::uniform(-2.0, 2.0, 33);
    double sum = 0.0;
    for (double w : g.weights) sum += w;
    CHECK(std::abs(sum - 4.0) < 1e-12);
}

TEST_CASE("dlog quadrature integrates a scale-invariant bump exactly") {
    // ∫_0^inf (r / (1+r)^2) dr/r = 1
    const RadialGrid g = RadialGrid::gauss_legendre(-28.0, 28.0, 320);
    const double v = g.integrate_dlog([](double r) { return r / ((1.0 + r) * (1.0 + r)); });
    CHECK(std::abs(v - 1.0) < 1e-10);
}

TEST_CASE("dr quadrature integrates (1+r)^{-2} to 1") {
    const RadialGrid g = RadialGrid::gauss_legendre(-28.0, 28.0, 320);
    const double v = g.integrate_dr([](double r) { return 1.0 / ((1.0 + r) * (1.0 + r)); });
    CHECK(std::abs(v - 1.0) < 1e-9);
}

TEST_CASE("refinement doubles the node count and keeps bounds") {
    const RadialGrid g = RadialGrid::gauss_legendre(-1.0, 1.0, 48);
    const RadialGrid f = g.refined();
    CHECK(f.size() == 2 * g.size());
    CHECK(f.u_min == g.u_min);
    CHECK(f.u_max == g.u_max);
}

TEST_CASE("contour orientation: decaying Cauchy integral picks up +psi(1)") {
    // (1/2 pi i) ∮ psi(z)/(z - 1) dz = psi(1) = 1/4 for psi = z/(1+z)^2,
    // which pins the traversal direction of the boundary.
    const Contour c =
        Contour::sector_boundary(kPi / 2.0, RadialGrid::gauss_legendre(-18.0, 18.0, 1024));
    const Complex v = c.integrate([](Complex z) {
        const Complex w = 1.0 + z;
        return z / (w * w) / (z - 1.0);
    }) / (2.0 * kPi * Complex(0, 1));
    CHECK(std::abs(v - 0.25) < 1e-8);
}

TEST_CASE("contour mirror indices pair conjugate nodes") {
    const Contour c = Contour::sector_boundary(2.0, RadialGrid::gauss_legendre(-4.0, 4.0, 48));
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Complex z = c.nodes[i].point;
        const Complex zm = c.nodes[c.nodes[i].mirror].point;
        CHECK(std::abs(z - std::conj(zm)) < 1e-14 * (1.0 + std::abs(z)));
    }
}

TEST_CASE("rejects inverted windows") {
    CHECK_THROWS_AS(RadialGrid::gauss_legendre(2.0, -2.0, 32), InvalidInputError);
}
