#include "sectoria/grid.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace sectoria {

namespace {

std::pair<std::vector<double>, std::vector<double>> compute_gl_rule(std::size_t q) {
    std::vector<double> x(q), w(q);
    // Newton iteration on P_q from the Chebyshev-like initial guess.
    for (std::size_t i = 0; i < (q + 1) / 2; ++i) {
        double t = std::cos(kPi * (static_cast<double>(i) + 0.75) / (static_cast<double>(q) + 0.5));
        double p0 = 0.0, p1 = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            p1 = 0.0;
            for (std::size_t k = 0; k < q; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * t * p1 - k * p2) / (k + 1.0);
            }
            double dp = q * (t * p0 - p1) / (t * t - 1.0);
            double dt = p0 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        // p0 holds P_q(t); recompute derivative at the converged node.
        double dp = q * (t * p0 - p1) / (t * t - 1.0);
        x[i] = -t;
        x[q - 1 - i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        w[q - 1 - i] = w[i];
    }
    return {x, w};
}

constexpr std::size_t kPanelOrder = 12;

} // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_rule(std::size_t q) {
    static std::mutex mtx;
    static std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(q);
    if (it == cache.end()) it = cache.emplace(q, compute_gl_rule(q)).first;
    return it->second;
}

RadialGrid RadialGrid::gauss_legendre(double u_min, double u_max, std::size_t n_nodes) {
    if (!(u_min < u_max)) throw InvalidInputError("RadialGrid: u_min must be < u_max");
    if (n_nodes < kPanelOrder) n_nodes = kPanelOrder;
    const std::size_t panels = (n_nodes + kPanelOrder - 1) / kPanelOrder;
    const auto& [gx, gw] = gauss_legendre_rule(kPanelOrder);

    RadialGrid g;
    g.u_min = u_min;
    g.u_max = u_max;
    g.nodes.reserve(panels * kPanelOrder);
    g.weights.reserve(panels * kPanelOrder);
    const double h = (u_max - u_min) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = u_min + h * static_cast<double>(p);
        for (std::size_t j = 0; j < kPanelOrder; ++j) {
            const double u = a + 0.5 * h * (gx[j] + 1.0);
            g.nodes.push_back(std::exp(u));
            g.weights.push_back(0.5 * h * gw[j]);
        }
    }
    return g;
}

RadialGrid RadialGrid::uniform(double u_min, double u_max, std::size_t n_nodes) {
    if (!(u_min < u_max)) throw InvalidInputError("RadialGrid: u_min must be < u_max");
    if (n_nodes < 2) n_nodes = 2;
    RadialGrid g;
    g.u_min = u_min;
    g.u_max = u_max;
    g.uniform_ = true;
    const double h = (u_max - u_min) / static_cast<double>(n_nodes - 1);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        g.nodes.push_back(std::exp(u_min + h * static_cast<double>(i)));
        g.weights.push_back((i == 0 || i + 1 == n_nodes) ? 0.5 * h : h);
    }
    return g;
}

RadialGrid RadialGrid::refined() const {
    return uniform_ ? uniform(u_min, u_max, 2 * size()) : gauss_legendre(u_min, u_max, 2 * size());
}

} // namespace sectoria
