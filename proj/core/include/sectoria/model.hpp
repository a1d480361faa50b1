#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sectoria/calculus.hpp"
#include "sectoria/contour.hpp"
#include "sectoria/operator.hpp"
#include "sectoria/report.hpp"

namespace sectoria {

/// H-valued samples of a function on a discretized sector boundary.
struct BoundaryFunction {
    Contour contour;
    std::vector<ComplexVector> samples;

    static BoundaryFunction sample(const Contour& contour,
                                   const std::function<ComplexVector(Complex)>& fn);

    double l2_norm() const { return std::sqrt(contour.l2_norm_sq(samples)); }
};

/// Vector-valued analytic test function with a known decay rate in
/// log-radius, so contour windows can be sized for it.
struct TestFunction {
    std::string name;
    std::function<ComplexVector(Complex)> eval;
    double decay_s = 1.0;
};

/// Sum of vector-coefficient pole terms  c (z - p)^{-order}.  Membership
/// in the interior/exterior Hardy-Smirnov class is decided from the
/// declared pole locations, never from samples.
struct RationalVectorFn {
    struct Term {
        Complex pole;
        int order = 1;
        ComplexVector coeff;
    };
    std::vector<Term> terms;

    ComplexVector evaluate(Complex z) const;
    bool is_interior_class(double theta, double margin = 1e-6) const;
    bool is_exterior_class(double theta, double margin = 1e-6) const;

    TestFunction as_test_function(const std::string& name) const;

    /// u_{lambda,x}(z) = (lambda - z)^{-1} x.
    static RationalVectorFn cauchy_kernel(Complex lambda, const ComplexVector& x);
};

/// phi_{r,x}(z) = Lambda_k(z)^{-r} z^{-1/2} x for k != 0 (k = 0 would put a
/// branch point of Lambda_0^{-r} at z = 1 inside the sector, leaving E^2).
TestFunction log_power_test_function(double r, const ComplexVector& x, int k = 1);

/// Characteristic-function pair for a fixed operator, exponent and angle.
/// delta_alpha requires alpha * theta < pi/2; the inverse function
/// tilde-delta admits the doubled range alpha * theta < pi.
class CharFn {
public:
    CharFn(SectorialOperator op, double alpha, double theta);

    const SectorialOperator& op() const { return op_; }
    double alpha() const { return alpha_; }
    double theta() const { return theta_; }
    const ComplexMatrix& a_alpha() const { return a_alpha_; }

private:
    SectorialOperator op_;
    double alpha_;
    double theta_;
    ComplexMatrix a_alpha_;
};

/// delta_alpha(z) = (1/alpha) (A^a - z^a)(A^a + z^a)^{-1}; needs a*theta < pi/2.
ComplexMatrix char_fn(const CharFn& c, Complex z);

/// Same value through the one-solve form (1/alpha)(I - 2 z^a (A^a + z^a)^{-1}).
ComplexMatrix char_fn_resolvent_form(const CharFn& c, Complex z);

/// tilde-delta_alpha(z) = alpha (A^a + z^a)(A^a - z^a)^{-1}; needs a*theta < pi.
ComplexMatrix inv_char_fn(const CharFn& c, Complex z);

/// O x (z) = sqrt(A) (z - A)^{-1} x.
ComplexVector observation_map(const SectorialOperator& a, const ComplexVector& x, Complex z);

/// W_theta(u) = (1/pi i) ∮ (xi - A)^{-1} sqrt(A) u(xi) dxi over the
/// sampled boundary.
ComplexVector control_map(const SectorialOperator& a, const BoundaryFunction& u);

/// Adaptive variant for analytic evaluators: the boundary is resampled on
/// doubled grids until the value stabilizes.
ComplexVector control_map(const SectorialOperator& a, const TestFunction& u, double theta,
                          const QuadOptions& opts = {});

enum class CauchySide { interior, exterior };

/// P_int f(z) =  (1/2 pi i) ∮ f(xi)/(xi - z) dxi   (z inside the sector),
/// P_out f(l) = -(1/2 pi i) ∮ f(xi)/(xi - l) dxi   (l outside).
/// The evaluation point must keep an angular margin from the boundary.
ComplexVector cauchy_transform(const BoundaryFunction& f, Complex lambda, CauchySide side,
                               double margin = 0.049);

/// Hankel-like operator J_{tilde-delta}: u -> P_out(tilde-delta u) with the
/// inverse characteristic samples cached on the contour.  Nodes where
/// A^alpha - xi^alpha is numerically singular are excluded and counted;
/// more than 1% exclusions fails construction.
class HankelOperator {
public:
    HankelOperator(const CharFn& c, const Contour& contour);

    ComplexVector apply(const BoundaryFunction& u, Complex lambda) const;
    std::size_t excluded_nodes() const { return excluded_; }
    const Contour& contour() const { return contour_; }

private:
    Contour contour_;
    std::vector<ComplexMatrix> dtilde_;
    std::vector<bool> usable_;
    std::size_t excluded_ = 0;
};

/// One-shot convenience wrapper over HankelOperator.
ComplexVector hankel_apply(const CharFn& c, const BoundaryFunction& u, Complex lambda);

/// Evaluation points with a fixed relative margin from the boundary rays.
struct EvalSet {
    std::vector<Complex> exterior_points;
    std::vector<Complex> interior_points;
    double margin = 0.05;

    static EvalSet defaults(double theta, const SectorialOperator& a, std::size_t n_exterior = 8,
                            std::size_t n_interior = 6);
};

/// Max relative residual of O(W u)(lambda) = -J_{tilde-delta_alpha} u (lambda)
/// over the exterior evaluation points.
Report verify_factorization(const SectorialOperator& a, double theta, double alpha,
                            const TestFunction& u, const EvalSet& eval,
                            const QuadOptions& opts = {}, double tol = 1e-4);

/// ||W(delta_alpha h)|| <= tol ||h|| for an interior-class test function h.
Report kernel_membership_check(const SectorialOperator& a, double theta, double alpha,
                               const TestFunction& h, const QuadOptions& opts = {},
                               double tol = 1e-4);

/// Classification of probe points as singular/regular for delta_alpha,
/// compared against the eigenvalue oracle `spectrum`; also scans the
/// boundary for a uniform lower bound on the smallest singular value.
Report char_fn_spectrum_check(const CharFn& c, const std::vector<Complex>& probe_points,
                              const ComplexVector& spectrum, double spectral_margin = 1e-3);

/// ((M_z^T - lambda)^{-1} f)(w) = (f(w) - f(lambda)) / (w - lambda).
ComplexVector model_resolvent(const std::function<ComplexVector(Complex)>& f, Complex lambda,
                              Complex w);

/// Residual of sqrt(A)(w-A)^{-1}(lambda-A)^{-1} x
///   = (O x(w) - O x(lambda)) / (lambda - w)  over the evaluation points.
Report obs_intertwining_check(const SectorialOperator& a, const ComplexVector& x, Complex lambda,
                              const std::vector<Complex>& eval_points);

/// Residual of (A - lambda)^{-1} W(u) = W(v) with v(z) = u(z) / (z - lambda),
/// for lambda outside the sector.
Report ctr_intertwining_check(const SectorialOperator& a, const TestFunction& u, Complex lambda,
                              double theta, const QuadOptions& opts = {}, double tol = 1e-4);

/// <f, g> = (1/2 pi i) ∮ <f(l), g(conj l)>_H dl on a shared contour.
Complex boundary_pairing(const BoundaryFunction& f, const BoundaryFunction& g);

/// Standard test battery: Cauchy kernels u_{lambda, e_i} for exterior
/// poles {-1, -2, 3 e^{i(theta+0.3)}} plus log-power functions with
/// r in {0.6, 1}.
std::vector<TestFunction> default_test_battery(double theta, Eigen::Index dim);

} // namespace sectoria
