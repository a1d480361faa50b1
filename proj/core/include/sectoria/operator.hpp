#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sectoria/grid.hpp"
#include "sectoria/types.hpp"

namespace sectoria {

/// Closed sector { |arg z| <= theta } around the positive half-axis.
/// theta = pi is admitted and denotes the slit-plane limit case, whose
/// boundary degenerates to the negative half-axis.
struct Sector {
    double theta;

    explicit Sector(double t) : theta(t) {
        if (!(t > 0.0 && t <= kPi)) throw InvalidInputError("Sector: theta must lie in (0, pi]");
    }
};

/// Knobs for the sectoriality certification scan.
struct CertifyOptions {
    double saturation_tol = 1e-3; // doubling must move the sup less than this
    int max_refinements = 3;
    double cap = 1e8;             // constants above this count as divergence
    std::size_t ray_angles = 5;   // probe rays between theta and pi
};

/// Dense matrix viewed as a sectorial operator.
///
/// Construction certifies injectivity (smallest singular value above the
/// kernel tolerance) and estimates the sectoriality type angle.  Instances
/// are immutable and cheap to copy; derived quantities such as fractional
/// powers are memoized behind a lock.
class SectorialOperator {
public:
    /// Wraps a matrix, rejecting non-square data and numerically singular
    /// matrices (smallest singular value <= 1e-12 * ||A||).
    explicit SectorialOperator(ComplexMatrix matrix, std::string spec_name = "matrix");

    const ComplexMatrix& matrix() const;
    Eigen::Index dim() const;
    const std::string& spec_name() const;

    /// Estimated type angle, filled at construction.
    double omega_est() const;

    /// Eigenvalues of the matrix (locations only; used for spectral
    /// proximity guards and grid placement, never as a calculus route).
    const ComplexVector& eigenvalues() const;
    double spectral_radius_min() const;
    double spectral_radius_max() const;

    /// (zI - A)^{-1} by pivoted linear solve.  Throws ResolventError when
    /// z is within spectral-proximity tolerance or the solve degenerates.
    ComplexMatrix resolvent(Complex z) const;

    /// Applies the resolvent to a single vector.
    ComplexVector apply_resolvent(Complex z, const ComplexVector& x) const;

    /// Certified constants, keyed by tested angle.
    const std::map<double, double>& c_theta() const;

    /// Default radial grid for ray scans, spanning the spectrum with the
    /// given log-padding on both sides.
    RadialGrid default_ray_grid(double pad = 14.0, std::size_t n = 96) const;

    /// Square root of A, computed once through the contour calculus.
    const ComplexMatrix& sqrt_matrix() const;

    /// T_A = sqrt(A) (1+A)^{-1}, computed once through the contour calculus.
    const ComplexMatrix& t_matrix() const;

    /// Principal logarithm of A, computed once through the contour calculus.
    const ComplexMatrix& log_matrix() const;

    // Internal memo shared by the calculus layer (fractional powers).
    std::optional<ComplexMatrix> try_cached_power(double alpha) const;
    void store_power(double alpha, const ComplexMatrix& value) const;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
    friend double certify_sectoriality(const SectorialOperator&, Sector, const RadialGrid&,
                                       const CertifyOptions&);
};

/// Scans |z| ||(z-A)^{-1}|| over rays arg z = +-theta' for a handful of
/// angles theta' in (theta, pi], refining until the sup saturates.  The
/// certified constant is stored on the operator.  Throws
/// SingularOperatorError when the sup keeps growing under refinement.
double certify_sectoriality(const SectorialOperator& a, Sector theta, const RadialGrid& ray_grid,
                            const CertifyOptions& opts = {});

/// Smallest angle on a uniform grid of (0, pi) at which certification
/// saturates below the cap, cross-checked against the spectral angle
/// max |arg lambda_i|.  Throws SingularOperatorError when no angle passes.
double estimate_type_angle(const ComplexMatrix& a, std::size_t angle_grid = 256,
                           const CertifyOptions& opts = {});

/// || T_A^{-n} x ||, the H_n norm of x.  n may be negative (then T_A^{|n|}
/// is applied instead of inverted).
double graded_norm(const SectorialOperator& a, int n, const ComplexVector& x);

/// x_eps = (1 - eps^2) A (A + eps)^{-1} (1 + eps A)^{-1} x.
ComplexVector approximate_identity(const SectorialOperator& a, const ComplexVector& x, double eps);

/// Same vector through the partial-fraction form
/// eps^{-1} (A + eps^{-1})^{-1} x - eps (A + eps)^{-1} x.
ComplexVector approximate_identity_partial_fraction(const SectorialOperator& a,
                                                    const ComplexVector& x, double eps);

// ---------------------------------------------------------------------------
// Built-in operator families (deterministic test corpus)
// ---------------------------------------------------------------------------

enum class Family {
    positive_diagonal,
    complex_diagonal,
    jordan_shifted,
    conjugated_accretive,
    random_accretive,
};

Family family_from_name(const std::string& name);
std::string family_name(Family f);

struct FamilyParams {
    std::vector<double> diagonal;        // positive_diagonal
    std::vector<Complex> entries;        // complex_diagonal / explicit eigenvalues
    Eigen::Index dim = 0;                // jordan / conjugated / random
    Complex lambda = Complex(1.0, 0.0);  // jordan_shifted
    double epsilon = 1.0;                // jordan_shifted
    std::uint64_t seed = 0;
};

/// Builds a family member.  All randomized families are driven by the
/// explicit seed and reproduce bit-identical matrices on re-run.
SectorialOperator make_family(Family family, const FamilyParams& params);

/// Convenience for CLI-style specs: "jordan_shifted:2,1,1".
SectorialOperator make_family(const std::string& spec, std::uint64_t seed = 0);

/// Seeded unit vectors: canonical basis followed by pseudo-random points
/// on the unit sphere.
std::vector<ComplexVector> sample_vectors(Eigen::Index dim, std::size_t n_random,
                                          std::uint64_t seed);

} // namespace sectoria
