#pragma once

#include <cstddef>
#include <vector>

#include "sectoria/grid.hpp"
#include "sectoria/types.hpp"

namespace sectoria {

/// Traversal convention for sector boundaries.  There is exactly one:
/// down the upper ray (from infinity to 0), then up the lower ray
/// (from 0 back to infinity).  This orients the contour positively
/// around the sector interior once closed at infinity.
enum class Orientation { down_upper_then_up_lower };

/// Discretized boundary of a sector { |arg z| <= theta_prime }.
///
/// Nodes live on the two rays arg z = +-theta_prime at the radii of a
/// RadialGrid.  Each node carries the complex line element dz/du of the
/// oriented traversal, so a contour integral is a plain weighted sum:
///
///   ∮ g(z) dz  ≈  Σ_i w_i * dz_du_i * g(z_i)
struct Contour {
    struct Node {
        Complex point;       // z_i on the ray
        Complex dz_du;       // oriented dz/du at the node (includes the radius)
        double abs_dz_du;    // |dz|/du = r_i, for L^2-type boundary norms
        std::size_t mirror;  // index of the complex-conjugate node
    };

    double theta_prime = 0.0;
    RadialGrid grid;
    Orientation orientation = Orientation::down_upper_then_up_lower;
    std::vector<Node> nodes;   // upper-ray nodes first, then lower-ray
    std::vector<double> node_weights;

    static Contour sector_boundary(double theta_prime, const RadialGrid& grid);

    std::size_t size() const { return nodes.size(); }

    Contour refined() const { return sector_boundary(theta_prime, grid.refined()); }

    bool same_layout(const Contour& other) const {
        return theta_prime == other.theta_prime && size() == other.size() &&
               grid.u_min == other.grid.u_min && grid.u_max == other.grid.u_max;
    }

    /// ∮ g(z) dz over the oriented boundary.
    template <typename F>
    auto integrate(F&& g) const {
        auto acc = decltype(g(nodes[0].point))(
            (node_weights[0] * nodes[0].dz_du) * g(nodes[0].point));
        for (std::size_t i = 1; i < nodes.size(); ++i)
            acc += (node_weights[i] * nodes[i].dz_du) * g(nodes[i].point);
        return acc;
    }

    /// ∮ values_i dz with per-node samples already evaluated.
    template <typename T>
    T integrate_samples(const std::vector<T>& values) const {
        T acc = (node_weights[0] * nodes[0].dz_du) * values[0];
        for (std::size_t i = 1; i < nodes.size(); ++i)
            acc += (node_weights[i] * nodes[i].dz_du) * values[i];
        return acc;
    }

    /// ∮ ||f(z)||^2 |dz| for per-node vector samples.
    double l2_norm_sq(const std::vector<ComplexVector>& values) const;
};

} // namespace sectoria
