#include "sectoria/operator.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>

#include "sectoria/calculus.hpp"
#include "sectoria/symbols.hpp"

namespace sectoria {

namespace {

/// ||(zI - A)^{-1}||_2 estimated by inverse power iteration on M M^*
/// with a warm-startable seed vector.  One LU factorization plus a handful
/// of O(n^2) solves per point, which keeps ray scans cheap at dim 32.
double resolvent_norm(const ComplexMatrix& a, Complex z, ComplexVector* warm = nullptr) {
    const Eigen::Index n = a.rows();
    ComplexMatrix m = -a;
    m.diagonal().array() += z;
    Eigen::PartialPivLU<ComplexMatrix> lu(m);

    ComplexVector v;
    if (warm && warm->size() == n) {
        v = *warm;
    } else {
        v = ComplexVector::Ones(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] += Complex(0.13 * static_cast<double>(i), 0.41);
        v /= v.norm();
    }

    double sigma_sq = 0.0;
    for (int iter = 0; iter < 16; ++iter) {
        ComplexVector w = lu.solve(v);
        ComplexVector u = lu.adjoint().solve(w);
        const double growth = u.norm();
        if (!std::isfinite(growth) || growth == 0.0)
            return std::numeric_limits<double>::infinity();
        u /= growth;
        const double change = std::abs(growth - sigma_sq);
        sigma_sq = growth;
        v = std::move(u);
        if (iter >= 3 && change <= 1e-8 * sigma_sq) break;
    }
    if (warm) *warm = v;
    return std::sqrt(sigma_sq);
}

/// Probe angles strictly above theta, up to and including pi.
std::vector<double> probe_angles(double theta, std::size_t count) {
    std::vector<double> out;
    if (theta >= kPi) return {kPi};
    for (std::size_t j = 1; j <= count; ++j) {
        const double f = static_cast<double>(j) / static_cast<double>(count);
        out.push_back(theta + f * (kPi - theta));
    }
    return out;
}

double scan_constant(const ComplexMatrix& a, double theta, const RadialGrid& grid,
                     std::size_t ray_angles) {
    double c = 0.0;
    for (double phi : probe_angles(theta, ray_angles)) {
        const bool on_axis = phi >= kPi - 1e-15;
        for (int sign : {+1, -1}) {
            if (on_axis && sign < 0) continue; // the two pi-rays coincide
            const Complex dir = std::polar(1.0, sign * phi);
            ComplexVector warm; // singular directions vary smoothly along a ray
            for (double r : grid.nodes) {
                const double v = r * resolvent_norm(a, r * dir, &warm);
                if (v > c) c = v;
            }
        }
    }
    return c;
}

/// Refines the ray scan until the sup saturates.  Returns the constant and
/// whether saturation was reached.
std::pair<double, bool> certify_scan(const ComplexMatrix& a, double theta, RadialGrid grid,
                                     const CertifyOptions& opts) {
    double prev = scan_constant(a, theta, grid, opts.ray_angles);
    for (int k = 0; k < opts.max_refinements; ++k) {
        grid = grid.refined();
        const double cur = scan_constant(a, theta, grid, opts.ray_angles);
        if (std::abs(cur - prev) <= opts.saturation_tol * std::max(cur, 1e-300))
            return {cur, cur <= opts.cap};
        prev = cur;
    }
    return {prev, false};
}

RadialGrid spectrum_spanning_grid(const ComplexVector& eigvals, double pad, std::size_t n) {
    double rmin = std::numeric_limits<double>::max(), rmax = 0.0;
    for (Eigen::Index i = 0; i < eigvals.size(); ++i) {
        const double r = std::abs(eigvals[i]);
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    if (!(rmin > 0.0)) rmin = 1e-2;
    if (!(rmax > 0.0)) rmax = 1.0;
    const double span = std::log(rmax) - std::log(rmin);
    const std::size_t nodes = std::max<std::size_t>(n, static_cast<std::size_t>(4.0 * (span + 2.0 * pad)));
    return RadialGrid::uniform(std::log(rmin) - pad, std::log(rmax) + pad, nodes);
}

/// Deterministic uniform/normal-free random source.  Values are derived
/// from raw mt19937_64 output so runs are reproducible bit-for-bit.
struct Rng {
    explicit Rng(std::uint64_t seed) : gen(seed ^ 0x9e3779b97f4a7c15ull) {}
    std::mt19937_64 gen;

    double unit() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * unit(); }
    Complex disk() {
        // rejection sampling in the unit disk
        for (;;) {
            const double x = uniform(-1.0, 1.0), y = uniform(-1.0, 1.0);
            if (x * x + y * y <= 1.0) return Complex(x, y);
        }
    }
};

} // namespace

struct SectorialOperator::Impl {
    ComplexMatrix matrix;
    std::string name;
    ComplexVector eigvals;
    double omega = 0.0;
    double rho_min = 0.0;
    double rho_max = 0.0;

    mutable std::mutex mtx;
    mutable std::map<double, double> c_theta;
    mutable std::map<double, ComplexMatrix> powers;
    mutable std::optional<ComplexMatrix> t_mat;
    mutable std::optional<ComplexMatrix> log_mat;
};

SectorialOperator::SectorialOperator(ComplexMatrix matrix, std::string spec_name)
    : impl_(std::make_shared<Impl>()) {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1)
        throw InvalidInputError("operator matrix must be square and non-empty");
    if (!matrix.allFinite())
        throw InvalidInputError("operator matrix has non-finite entries");

    Eigen::JacobiSVD<ComplexMatrix> svd(matrix);
    const double smax = svd.singularValues().maxCoeff();
    const double smin = svd.singularValues().minCoeff();
    if (smin <= 1e-12 * smax)
        throw SingularOperatorError("operator is singular within kernel tolerance");

    impl_->matrix = std::move(matrix);
    impl_->name = std::move(spec_name);

    Eigen::ComplexEigenSolver<ComplexMatrix> es(impl_->matrix, /*computeEigenvectors=*/false);
    impl_->eigvals = es.eigenvalues();
    impl_->rho_min = impl_->eigvals.cwiseAbs().minCoeff();
    impl_->rho_max = impl_->eigvals.cwiseAbs().maxCoeff();

    impl_->omega = estimate_type_angle(impl_->matrix);
}

const ComplexMatrix& SectorialOperator::matrix() const { return impl_->matrix; }
Eigen::Index SectorialOperator::dim() const { return impl_->matrix.rows(); }
const std::string& SectorialOperator::spec_name() const { return impl_->name; }
double SectorialOperator::omega_est() const { return impl_->omega; }
const ComplexVector& SectorialOperator::eigenvalues() const { return impl_->eigvals; }
double SectorialOperator::spectral_radius_min() const { return impl_->rho_min; }
double SectorialOperator::spectral_radius_max() const { return impl_->rho_max; }
const std::map<double, double>& SectorialOperator::c_theta() const { return impl_->c_theta; }

ComplexMatrix SectorialOperator::resolvent(Complex z) const {
    const double scale = std::max(std::abs(z), impl_->rho_max);
    for (Eigen::Index i = 0; i < impl_->eigvals.size(); ++i)
        if (std::abs(z - impl_->eigvals[i]) <= 1e-12 * scale)
            throw ResolventError("resolvent point within spectral-proximity tolerance");
    ComplexMatrix m = -impl_->matrix;
    m.diagonal().array() += z;
    ComplexMatrix r = m.partialPivLu().solve(ComplexMatrix::Identity(dim(), dim()));
    if (!r.allFinite()) throw ResolventError("resolvent solve produced non-finite values");
    return r;
}

ComplexVector SectorialOperator::apply_resolvent(Complex z, const ComplexVector& x) const {
    const double scale = std::max(std::abs(z), impl_->rho_max);
    for (Eigen::Index i = 0; i < impl_->eigvals.size(); ++i)
        if (std::abs(z - impl_->eigvals[i]) <= 1e-12 * scale)
            throw ResolventError("resolvent point within spectral-proximity tolerance");
    ComplexMatrix m = -impl_->matrix;
    m.diagonal().array() += z;
    ComplexVector r = m.partialPivLu().solve(x);
    if (!r.allFinite()) throw ResolventError("resolvent solve produced non-finite values");
    return r;
}

RadialGrid SectorialOperator::default_ray_grid(double pad, std::size_t n) const {
    return spectrum_spanning_grid(impl_->eigvals, pad, n);
}

std::optional<ComplexMatrix> SectorialOperator::try_cached_power(double alpha) const {
    std::lock_guard<std::mutex> lock(impl_->mtx);
    auto it = impl_->powers.find(alpha);
    if (it != impl_->powers.end()) return it->second;
    return std::nullopt;
}

void SectorialOperator::store_power(double alpha, const ComplexMatrix& value) const {
    std::lock_guard<std::mutex> lock(impl_->mtx);
    impl_->powers.emplace(alpha, value);
}

const ComplexMatrix& SectorialOperator::sqrt_matrix() const {
    fractional_power(*this, 0.5); // fills the cache on first use
    std::lock_guard<std::mutex> lock(impl_->mtx);
    return impl_->powers.at(0.5);
}

const ComplexMatrix& SectorialOperator::t_matrix() const {
    {
        std::lock_guard<std::mutex> lock(impl_->mtx);
        if (impl_->t_mat) return *impl_->t_mat;
    }
    ComplexMatrix t = dunford_riesz(*this, symbol_registry("sqrt_over_1p"));
    std::lock_guard<std::mutex> lock(impl_->mtx);
    if (!impl_->t_mat) impl_->t_mat = std::move(t);
    return *impl_->t_mat;
}

const ComplexMatrix& SectorialOperator::log_matrix() const {
    {
        std::lock_guard<std::mutex> lock(impl_->mtx);
        if (impl_->log_mat) return *impl_->log_mat;
    }
    ComplexMatrix l = principal_log_matrix(*this);
    std::lock_guard<std::mutex> lock(impl_->mtx);
    if (!impl_->log_mat) impl_->log_mat = std::move(l);
    return *impl_->log_mat;
}

double certify_sectoriality(const SectorialOperator& a, Sector theta, const RadialGrid& ray_grid,
                            const CertifyOptions& opts) {
    if (!(theta.theta > a.omega_est()))
        throw PreconditionError("certify_sectoriality: theta must exceed omega_est");
    auto [c, saturated] = certify_scan(a.matrix(), theta.theta, ray_grid, opts);
    if (!saturated)
        throw SingularOperatorError("sup |z| ||(z-A)^{-1}|| does not saturate at this angle");
    std::lock_guard<std::mutex> lock(a.impl_->mtx);
    a.impl_->c_theta[theta.theta] = c;
    return c;
}

double estimate_type_angle(const ComplexMatrix& a, std::size_t angle_grid,
                           const CertifyOptions& opts) {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(a, /*computeEigenvectors=*/false);
    const ComplexVector eigvals = es.eigenvalues();
    double spectral_angle = 0.0;
    for (Eigen::Index i = 0; i < eigvals.size(); ++i)
        spectral_angle = std::max(spectral_angle, std::abs(principal_arg(eigvals[i])));

    const RadialGrid grid = spectrum_spanning_grid(eigvals, 14.0, 96);
    auto passes = [&](std::size_t j) {
        const double theta = kPi * static_cast<double>(j) / static_cast<double>(angle_grid + 1);
        auto [c, saturated] = certify_scan(a, theta, grid, opts);
        return saturated && c <= opts.cap;
    };

    if (!passes(angle_grid))
        throw SingularOperatorError("no angle below pi certifies: operator not sectorial");

    // The pass predicate is monotone in theta for the built-in corpus,
    // so a plain bisection finds the smallest passing grid angle.
    std::size_t lo = 1, hi = angle_grid;
    if (passes(lo)) {
        hi = lo;
    } else {
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            (passes(mid) ? hi : lo) = mid;
        }
    }
    const double theta_grid = kPi * static_cast<double>(hi) / static_cast<double>(angle_grid + 1);
    const double omega = std::max(theta_grid, spectral_angle);
    if (!(omega < kPi))
        throw SingularOperatorError("estimated type angle reaches pi: operator not sectorial");
    return omega;
}

double graded_norm(const SectorialOperator& a, int n, const ComplexVector& x) {
    if (x.size() != a.dim()) throw InvalidInputError("graded_norm: dimension mismatch");
    if (n == 0) return x.norm();

    const ComplexMatrix& t = a.t_matrix();
    if (n < 0) {
        ComplexVector y = x;
        for (int k = 0; k < -n; ++k) y = t * y;
        return y.norm();
    }

    Eigen::JacobiSVD<ComplexMatrix> svd(t);
    const double cond = svd.singularValues().maxCoeff() / svd.singularValues().minCoeff();
    if (std::pow(cond, n) > 1e15) {
        std::ostringstream msg;
        msg << "graded_norm: T_A^{-" << n << "} solve is ill-conditioned (cond(T_A) ~ " << cond
            << ")";
        throw PreconditionError(msg.str());
    }
    auto lu = t.partialPivLu();
    ComplexVector y = x;
    for (int k = 0; k < n; ++k) y = lu.solve(y);
    if (!y.allFinite()) throw PreconditionError("graded_norm: T_A power solve failed");
    return y.norm();
}

ComplexVector approximate_identity(const SectorialOperator& a, const ComplexVector& x, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInputError("approximate_identity: eps in (0,1)");
    const ComplexMatrix& m = a.matrix();
    const ComplexMatrix id = ComplexMatrix::Identity(a.dim(), a.dim());
    ComplexVector u = (m + eps * id).partialPivLu().solve(x);
    ComplexVector v = (id + eps * m).partialPivLu().solve(u);
    return (1.0 - eps * eps) * (m * v);
}

ComplexVector approximate_identity_partial_fraction(const SectorialOperator& a,
                                                    const ComplexVector& x, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInputError("approximate_identity: eps in (0,1)");
    const ComplexMatrix& m = a.matrix();
    const ComplexMatrix id = ComplexMatrix::Identity(a.dim(), a.dim());
    ComplexVector u = (m + (1.0 / eps) * id).partialPivLu().solve(x);
    ComplexVector v = (m + eps * id).partialPivLu().solve(x);
    return u / eps - eps * v;
}

Family family_from_name(const std::string& name) {
    if (name == "positive_diagonal") return Family::positive_diagonal;
    if (name == "complex_diagonal") return Family::complex_diagonal;
    if (name == "jordan_shifted") return Family::jordan_shifted;
    if (name == "conjugated_accretive") return Family::conjugated_accretive;
    if (name == "random_accretive") return Family::random_accretive;
    throw InvalidInputError("unknown operator family: " + name);
}

std::string family_name(Family f) {
    switch (f) {
        case Family::positive_diagonal: return "positive_diagonal";
        case Family::complex_diagonal: return "complex_diagonal";
        case Family::jordan_shifted: return "jordan_shifted";
        case Family::conjugated_accretive: return "conjugated_accretive";
        case Family::random_accretive: return "random_accretive";
    }
    return "unknown";
}

SectorialOperator make_family(Family family, const FamilyParams& params) {
    std::ostringstream label;
    label << family_name(family);
    switch (family) {
        case Family::positive_diagonal: {
            if (params.diagonal.empty())
                throw InvalidInputError("positive_diagonal: diagonal entries required");
            ComplexMatrix m = ComplexMatrix::Zero(params.diagonal.size(), params.diagonal.size());
            for (std::size_t i = 0; i < params.diagonal.size(); ++i) {
                if (!(params.diagonal[i] > 0.0))
                    throw InvalidInputError("positive_diagonal: entries must be > 0");
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = params.diagonal[i];
            }
            return SectorialOperator(std::move(m), label.str());
        }
        case Family::complex_diagonal: {
            if (params.entries.empty())
                throw InvalidInputError("complex_diagonal: entries required");
            ComplexMatrix m = ComplexMatrix::Zero(params.entries.size(), params.entries.size());
            for (std::size_t i = 0; i < params.entries.size(); ++i) {
                const Complex v = params.entries[i];
                if (std::abs(v) == 0.0 || std::abs(principal_arg(v)) >= kPi)
                    throw InvalidInputError("complex_diagonal: entries must avoid (-inf, 0]");
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = v;
            }
            return SectorialOperator(std::move(m), label.str());
        }
        case Family::jordan_shifted: {
            if (params.dim < 1) throw InvalidInputError("jordan_shifted: dim >= 1 required");
            if (std::abs(params.lambda) == 0.0)
                throw InvalidInputError("jordan_shifted: lambda must be non-zero");
            ComplexMatrix m = params.lambda * ComplexMatrix::Identity(params.dim, params.dim);
            for (Eigen::Index i = 0; i + 1 < params.dim; ++i) m(i, i + 1) = params.epsilon;
            label << "(" << params.dim << "," << params.lambda.real() << "," << params.epsilon
                  << ")";
            return SectorialOperator(std::move(m), label.str());
        }
        case Family::conjugated_accretive: {
            const Eigen::Index n = params.entries.empty()
                                       ? params.dim
                                       : static_cast<Eigen::Index>(params.entries.size());
            if (n < 1) throw InvalidInputError("conjugated_accretive: dim >= 1 required");
            ComplexMatrix d = ComplexMatrix::Zero(n, n);
            if (!params.entries.empty()) {
                for (Eigen::Index i = 0; i < n; ++i) d(i, i) = params.entries[i];
            } else {
                Rng rng(params.seed * 2u + 1u);
                for (Eigen::Index i = 0; i < n; ++i)
                    d(i, i) = std::polar(rng.uniform(0.6, 3.0), rng.uniform(-1.1, 1.1));
            }
            // Fixed ill-conditioned similarity: unit upper bidiagonal with
            // superdiagonal 3, so cond(S) grows geometrically with dim.
            ComplexMatrix s = ComplexMatrix::Identity(n, n);
            for (Eigen::Index i = 0; i + 1 < n; ++i) s(i, i + 1) = 3.0;
            ComplexMatrix m = s * d * s.partialPivLu().solve(ComplexMatrix::Identity(n, n));
            label << "(dim=" << n << ",seed=" << params.seed << ")";
            return SectorialOperator(std::move(m), label.str());
        }
        case Family::random_accretive: {
            if (params.dim < 1) throw InvalidInputError("random_accretive: dim >= 1 required");
            const Eigen::Index n = params.dim;
            Rng rng(params.seed * 2u + 7u);
            ComplexMatrix d = ComplexMatrix::Zero(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                d(i, i) = std::polar(rng.uniform(0.5, 4.0), rng.uniform(-0.9, 0.9));
            ComplexMatrix r(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j) r(i, j) = rng.disk();
            r /= std::max(r.norm(), 1e-12);
            ComplexMatrix s = ComplexMatrix::Identity(n, n) + 0.25 * r;
            ComplexMatrix m = s * d * s.partialPivLu().solve(ComplexMatrix::Identity(n, n));
            label << "(dim=" << n << ",seed=" << params.seed << ")";
            return SectorialOperator(std::move(m), label.str());
        }
    }
    throw InvalidInputError("unknown operator family");
}

SectorialOperator make_family(const std::string& spec, std::uint64_t seed) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    std::vector<double> vals;
    if (colon != std::string::npos) {
        std::istringstream ss(spec.substr(colon + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                vals.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw InvalidInputError("bad family parameter: " + tok);
            }
        }
    }
    FamilyParams p;
    p.seed = seed;
    switch (family_from_name(name)) {
        case Family::positive_diagonal:
            p.diagonal = vals;
            return make_family(Family::positive_diagonal, p);
        case Family::complex_diagonal: {
            if (vals.size() % 2 != 0)
                throw InvalidInputError("complex_diagonal: expected re,im pairs");
            for (std::size_t i = 0; i < vals.size(); i += 2)
                p.entries.emplace_back(vals[i], vals[i + 1]);
            return make_family(Family::complex_diagonal, p);
        }
        case Family::jordan_shifted: {
            if (vals.size() != 3)
                throw InvalidInputError("jordan_shifted: expected dim,lambda,epsilon");
            p.dim = static_cast<Eigen::Index>(vals[0]);
            p.lambda = Complex(vals[1], 0.0);
            p.epsilon = vals[2];
            return make_family(Family::jordan_shifted, p);
        }
        case Family::conjugated_accretive:
        case Family::random_accretive: {
            if (vals.size() != 1) throw InvalidInputError(name + ": expected dim");
            p.dim = static_cast<Eigen::Index>(vals[0]);
            return make_family(family_from_name(name), p);
        }
    }
    throw InvalidInputError("unknown operator family: " + name);
}

std::vector<ComplexVector> sample_vectors(Eigen::Index dim, std::size_t n_random,
                                          std::uint64_t seed) {
    std::vector<ComplexVector> out;
    for (Eigen::Index i = 0; i < dim; ++i) {
        ComplexVector e = ComplexVector::Zero(dim);
        e[i] = 1.0;
        out.push_back(e);
    }
    Rng rng(seed * 31u + 5u);
    for (std::size_t k = 0; k < n_random; ++k) {
        ComplexVector v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.disk();
        const double n = v.norm();
        out.push_back(n > 0.0 ? ComplexVector(v / n) : out.front());
    }
    return out;
}

} // namespace sectoria
