#pragma once

#include <cstddef>
#include <vector>

#include "sectoria/types.hpp"

namespace sectoria {

/// Discretization of a half-line (0, inf) in log-radius coordinates.
///
/// Every integral against dr/r becomes an integral against du on
/// [u_min, u_max] after the substitution r = e^u, so nodes are radii
/// r_i = e^{u_i} and weights are plain quadrature weights for du.
/// Integrals against dr pick up an extra factor r_i at each node.
struct RadialGrid {
    double u_min = 0.0;
    double u_max = 0.0;
    std::vector<double> nodes;   // radii r_i = e^{u_i}
    std::vector<double> weights; // du-measure weights, sum = u_max - u_min

    std::size_t size() const { return nodes.size(); }

    /// Composite Gauss-Legendre grid for integration.
    static RadialGrid gauss_legendre(double u_min, double u_max, std::size_t n_nodes);

    /// Uniformly log-spaced grid (trapezoid weights) for sup scans.
    static RadialGrid uniform(double u_min, double u_max, std::size_t n_nodes);

    /// Same bounds, twice the nodes.
    RadialGrid refined() const;

    /// ∫ f(r) dr/r  ≈  Σ w_i f(r_i)
    template <typename F>
    auto integrate_dlog(F&& f) const {
        auto acc = decltype(f(nodes[0]))(weights[0] * f(nodes[0]));
        for (std::size_t i = 1; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }

    /// ∫ f(r) dr  ≈  Σ w_i r_i f(r_i)
    template <typename F>
    auto integrate_dr(F&& f) const {
        auto acc = decltype(f(nodes[0]))((weights[0] * nodes[0]) * f(nodes[0]));
        for (std::size_t i = 1; i < nodes.size(); ++i) acc += (weights[i] * nodes[i]) * f(nodes[i]);
        return acc;
    }

private:
    bool uniform_ = false;
};

/// Nodes and weights of the q-point Gauss-Legendre rule on [-1, 1].
/// Computed once per order by Newton iteration and cached.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_rule(std::size_t q);

} // namespace sectoria
