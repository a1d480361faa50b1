#include "sectoria/contour.hpp"

#include <cmath>

namespace sectoria {

Contour Contour::sector_boundary(double theta_prime, const RadialGrid& grid) {
    if (!(theta_prime > 0.0 && theta_prime <= kPi))
        throw InvalidInputError("Contour: theta_prime must lie in (0, pi]");
    Contour c;
    c.theta_prime = theta_prime;
    c.grid = grid;
    const std::size_t n = grid.size();
    c.nodes.resize(2 * n);
    c.node_weights.resize(2 * n);
    const Complex up = std::polar(1.0, theta_prime);
    const Complex down = std::conj(up);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = grid.nodes[i];
        // Upper ray traversed from infinity toward 0: dz = -e^{i theta} dr.
        c.nodes[i] = Node{r * up, -r * up, r, n + i};
        c.node_weights[i] = grid.weights[i];
        // Lower ray traversed from 0 toward infinity: dz = +e^{-i theta} dr.
        c.nodes[n + i] = Node{r * down, r * down, r, i};
        c.node_weights[n + i] = grid.weights[i];
    }
    return c;
}

double Contour::l2_norm_sq(const std::vector<ComplexVector>& values) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        acc += node_weights[i] * nodes[i].abs_dz_du * values[i].squaredNorm();
    return acc;
}

} // namespace sectoria
