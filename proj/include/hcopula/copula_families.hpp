#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "hcopula/numerics.hpp"
#include "hcopula/pair_copulas.hpp"
#include "hcopula/parallel.hpp"
#include "hcopula/rng.hpp"

// Consistent families (C_k) of copulas, one per dimension k, with
// C_{k+1}(u_1,...,u_k,1) = C_k(u_1,...,u_k). Two constructions:
//
//  * ChainCopulaFamily: the density of C_k is the product
//    phi_1(u_1,u_2) ... phi_{k-1}(u_{k-1},u_k) of pairwise copula densities,
//    a Markov chain on [0,1] driven by the h-function inverses.
//  * GaussianCovarianceFamily: C_k is the copula of the k-dimensional normal
//    law with covariance block <Q e_m, e_n>, the copula family of a (possibly
//    merely cylindrical) Gaussian measure.

namespace hcopula {

// ---------------------------------------------------------------------------
// Correlation rules

enum class SquareSummability { yes, no, unknown };

/// Generates the correlation sequence (rho_k) of a Gaussian chain. All
/// produced values are guaranteed to lie in [-0.999, 0.999]; the constructors
/// reject parameters whose sequence would leave that range.
class CorrelationRule {
  public:
    enum class Kind { explicit_list, power, geometric };

    /// Finite list, implicitly extended by rho_k = 0 beyond its end, so every
    /// finite prescription is a bona fide infinite family.
    static CorrelationRule explicit_list(std::vector<double> values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!(std::fabs(values[i]) <= 0.999)) {
                throw std::domain_error("correlation[" + std::to_string(i + 1) + "]=" +
                                        std::to_string(values[i]) +
                                        " outside [-0.999, 0.999]");
            }
        }
        CorrelationRule r;
        r.kind_ = Kind::explicit_list;
        r.values_ = std::move(values);
        return r;
    }

    /// rho_k = a * k^{-p}; requires p >= 0 and |a| <= 0.999.
    static CorrelationRule power(double a, double p) {
        if (!(p >= 0.0)) {
            throw std::domain_error("power rule: exponent p=" + std::to_string(p) +
                                    " must be nonnegative");
        }
        if (!(std::fabs(a) <= 0.999)) {
            throw std::domain_error("power rule: amplitude a=" + std::to_string(a) +
                                    " outside [-0.999, 0.999]");
        }
        CorrelationRule r;
        r.kind_ = Kind::power;
        r.a_ = a;
        r.p_ = p;
        return r;
    }

    /// rho_k = a * q^k with q in (0,1); requires |a| * q <= 0.999.
    static CorrelationRule geometric(double a, double q) {
        if (!(q > 0.0 && q < 1.0)) {
            throw std::domain_error("geometric rule: ratio q=" + std::to_string(q) +
                                    " must lie in (0,1)");
        }
        if (!(std::fabs(a) * q <= 0.999)) {
            throw std::domain_error("geometric rule: |a*q|=" + std::to_string(std::fabs(a) * q) +
                                    " outside [-0.999, 0.999]");
        }
        CorrelationRule r;
        r.kind_ = Kind::geometric;
        r.a_ = a;
        r.q_ = q;
        return r;
    }

    double rho(std::size_t k) const {
        switch (kind_) {
            case Kind::explicit_list:
                return k >= 1 && k <= values_.size() ? values_[k - 1] : 0.0;
            case Kind::power:
                return a_ * std::pow(static_cast<double>(k), -p_);
            case Kind::geometric:
                return a_ * std::pow(q_, static_cast<double>(k));
        }
        return 0.0;
    }

    Kind kind() const { return kind_; }
    double amplitude() const { return a_; }
    double exponent() const { return p_; }
    double ratio() const { return q_; }
    const std::vector<double>& values() const { return values_; }

    /// True when rho_k = 0 for all k beyond some finite index.
    bool eventually_zero() const {
        switch (kind_) {
            case Kind::explicit_list: return true;
            case Kind::power:
            case Kind::geometric: return a_ == 0.0;
        }
        return false;
    }

  private:
    CorrelationRule() = default;
    Kind kind_ = Kind::explicit_list;
    double a_ = 0.0, p_ = 0.0, q_ = 0.5;
    std::vector<double> values_;
};

/// Analytic decision of sum rho_k^2 < infinity. Explicit lists are extended
/// by zeros, hence always summable; power rules by the p-series test.
inline SquareSummability is_square_summable(const CorrelationRule& rule) {
    switch (rule.kind()) {
        case CorrelationRule::Kind::explicit_list:
            return SquareSummability::yes;
        case CorrelationRule::Kind::power:
            if (rule.amplitude() == 0.0) return SquareSummability::yes;
            return rule.exponent() > 0.5 ? SquareSummability::yes : SquareSummability::no;
        case CorrelationRule::Kind::geometric:
            return SquareSummability::yes;
    }
    return SquareSummability::unknown;
}

// ---------------------------------------------------------------------------
// Chain families

/// Consistent family built from pairwise copula densities: an optional
/// explicit prefix of PairwiseCopula objects for the leading links, plus a
/// Gaussian correlation rule for every link beyond the prefix (rho_j = 0
/// gives the independence link exactly).
class ChainCopulaFamily {
  public:
    static ChainCopulaFamily independence() {
        return ChainCopulaFamily({}, CorrelationRule::explicit_list({}));
    }

    static ChainCopulaFamily gaussian(CorrelationRule rule) {
        return ChainCopulaFamily({}, std::move(rule));
    }

    ChainCopulaFamily(std::vector<std::shared_ptr<const PairwiseCopula>> prefix,
                      CorrelationRule tail)
        : prefix_(std::move(prefix)), tail_(std::move(tail)) {
        for (const auto& p : prefix_) {
            if (!p) throw std::invalid_argument("ChainCopulaFamily: null pair in prefix");
        }
    }

    std::size_t prefix_size() const { return prefix_.size(); }
    const CorrelationRule& tail() const { return tail_; }

    /// Density of the j-th link (couples coordinates j and j+1), j >= 1.
    double pair_density(std::size_t j, double u, double v) const {
        if (j >= 1 && j <= prefix_.size()) return prefix_[j - 1]->density(u, v);
        const double rho = tail_.rho(j);
        if (rho == 0.0) {
            detail::require_open_unit(u, "u");
            detail::require_open_unit(v, "v");
            return 1.0;
        }
        return gaussian_pair_density(rho, u, v);
    }

    double pair_conditional_cdf(std::size_t j, double v, double u) const {
        if (j >= 1 && j <= prefix_.size()) return prefix_[j - 1]->conditional_cdf(v, u);
        const double rho = tail_.rho(j);
        if (rho == 0.0) {
            detail::require_open_unit(u, "u");
            detail::require_open_unit(v, "v");
            return v;
        }
        return gaussian_pair_conditional_cdf(rho, v, u);
    }

    double pair_conditional_quantile(std::size_t j, double p, double u) const {
        if (j >= 1 && j <= prefix_.size()) return prefix_[j - 1]->conditional_quantile(p, u);
        const double rho = tail_.rho(j);
        if (rho == 0.0) {
            detail::require_open_unit(u, "u");
            detail::require_open_unit(p, "p");
            return p;
        }
        return gaussian_pair_conditional_quantile(rho, p, u);
    }

    /// Correlation of link j when that link is a Gaussian (or independence)
    /// pair, std::nullopt otherwise.
    std::optional<double> gaussian_rho(std::size_t j) const {
        if (j >= 1 && j <= prefix_.size()) return prefix_[j - 1]->gaussian_correlation();
        return tail_.rho(j);
    }

    /// Materializes link j as a PairwiseCopula object (shares prefix links).
    std::shared_ptr<const PairwiseCopula> pair_object(std::size_t j) const {
        if (j >= 1 && j <= prefix_.size()) return prefix_[j - 1];
        const double rho = tail_.rho(j);
        if (rho == 0.0) return std::make_shared<IndependencePair>();
        return std::make_shared<GaussianPair>(rho);
    }

    /// Whether all links beyond some finite index are the independence pair.
    bool has_independent_tail() const { return tail_.eventually_zero(); }

  private:
    std::vector<std::shared_ptr<const PairwiseCopula>> prefix_;
    CorrelationRule tail_;
};

/// Chain copula density c_k(u) = prod_{j<k} phi_j(u_j, u_{j+1}), k >= 2.
/// Arguments must lie in the open unit cube.
inline double chain_density(const ChainCopulaFamily& family, std::size_t k,
                            std::span<const double> u) {
    if (k < 2) throw std::invalid_argument("chain_density: requires k >= 2");
    if (u.size() != k) {
        throw std::invalid_argument("chain_density: expected " + std::to_string(k) +
                                    " coordinates, got " + std::to_string(u.size()));
    }
    double prod = 1.0;
    for (std::size_t j = 1; j < k; ++j) {
        prod *= family.pair_density(j, u[j - 1], u[j]);
    }
    return prod;
}

namespace detail {

inline void require_unit_box(std::span<const double> u) {
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (!(u[j] >= 0.0 && u[j] <= 1.0)) {
            throw std::domain_error("cdf argument u[" + std::to_string(j + 1) + "]=" +
                                    std::to_string(u[j]) + " outside [0,1]");
        }
    }
}

// One axis of the marching quadrature: nodes on [-L, b] in normal scores,
// their unit-interval images, and normal-weighted weights.
struct CdfAxis {
    std::vector<double> u;
    std::vector<double> gw;
};

inline bool make_cdf_axis(double upper_u, std::size_t order, CdfAxis& axis) {
    const double L = gauss_window;
    double b = upper_u == 1.0 ? L : std_normal_quantile(upper_u);
    if (b <= -L) return false;  // upper limit below the window: mass < 1e-15
    b = std::min(b, L);
    const QuadratureRule rule = gauss_legendre(order, -L, b);
    axis.u.resize(order);
    axis.gw.resize(order);
    for (std::size_t i = 0; i < order; ++i) {
        axis.u[i] = std_normal_cdf(rule.nodes[i]);
        axis.gw[i] = rule.weights[i] * std_normal_pdf(rule.nodes[i]);
    }
    return true;
}

}  // namespace detail

inline constexpr std::size_t chain_cdf_max_quadrature_dim = 5;

struct QuadratureMethod {
    std::size_t order = 64;
};

struct MonteCarloMethod {
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
};

namespace detail {

// Marching evaluation of the box integral of the product density over
// [0,u_1] x ... x [0,u_k] in Gaussian coordinates. The product factorizes
// over consecutive coordinates, so the k-dimensional tensor sum collapses to
// k-1 matrix-vector passes at O(k * order^2) cost with a result identical to
// the full tensor rule.
inline double chain_box_integral(const ChainCopulaFamily& family, std::span<const double> u,
                                 std::size_t order) {
    const std::size_t k = u.size();
    std::vector<CdfAxis> axes(k);
    for (std::size_t j = 0; j < k; ++j) {
        if (!make_cdf_axis(u[j], order, axes[j])) return 0.0;
    }
    std::vector<double> carry = axes[0].gw;
    std::vector<double> next(order);
    for (std::size_t j = 1; j < k; ++j) {
        const auto& prev_axis = axes[j - 1];
        const auto& axis = axes[j];
        for (std::size_t m = 0; m < axis.u.size(); ++m) {
            double acc = 0.0;
            for (std::size_t i = 0; i < prev_axis.u.size(); ++i) {
                acc += carry[i] * family.pair_density(j, prev_axis.u[i], axis.u[m]);
            }
            next[m] = acc * axis.gw[m];
        }
        carry.swap(next);
    }
    double total = 0.0;
    for (double c : carry) total += c;
    return total;
}

}  // namespace detail

/// C_k(u) by quadrature in Gaussian coordinates; capped at k = 5. Grounded
/// and normalized exactly: a zero coordinate gives 0, the all-ones corner
/// gives 1 without touching the quadrature.
inline double chain_cdf(const ChainCopulaFamily& family, std::span<const double> u,
                        QuadratureMethod method) {
    detail::require_unit_box(u);
    const std::size_t k = u.size();
    if (k == 0) throw std::invalid_argument("chain_cdf: empty argument");
    if (k == 1) return u[0];
    for (double uj : u) {
        if (uj == 0.0) return 0.0;
    }
    if (std::all_of(u.begin(), u.end(), [](double x) { return x == 1.0; })) return 1.0;
    if (k > chain_cdf_max_quadrature_dim) {
        throw std::invalid_argument("chain_cdf: quadrature supports at most k = " +
                                    std::to_string(chain_cdf_max_quadrature_dim) +
                                    " dimensions, got k = " + std::to_string(k));
    }
    if (method.order < 2) throw std::invalid_argument("chain_cdf: order must be >= 2");
    const double mass = detail::chain_box_integral(family, u, method.order);
    return std::min(std::max(mass, 0.0), 1.0);
}

/// Quadrature value of the full-cube integral of c_k; equals 1 up to
/// quadrature error when the links are genuine copula densities.
inline double chain_density_mass(const ChainCopulaFamily& family, std::size_t k,
                                 std::size_t order = 64) {
    if (k < 2 || k > chain_cdf_max_quadrature_dim) {
        throw std::invalid_argument("chain_density_mass: k must lie in [2, 5]");
    }
    const std::vector<double> ones(k, 1.0);
    return detail::chain_box_integral(family, ones, order);
}

namespace detail {

// Markov walk through the chain: V_1 uniform, V_{j+1} = hinv_j(P | V_j).
// Writes k values into out.
inline void walk_uniform_chain(const ChainCopulaFamily& family, std::size_t k,
                               StreamRng& rng, double* out) {
    double u = rng.uniform_open();
    out[0] = u;
    for (std::size_t j = 1; j < k; ++j) {
        u = family.pair_conditional_quantile(j, rng.uniform_open(), u);
        out[j] = u;
    }
}

}  // namespace detail

/// C_k(u) by Monte Carlo: the empirical mass of the lower-orthant box under
/// the chain law, with standard error. Deterministic given (seed, samples)
/// and independent of thread count.
inline MonteCarloEstimate chain_cdf(const ChainCopulaFamily& family,
                                    std::span<const double> u, MonteCarloMethod method) {
    detail::require_unit_box(u);
    const std::size_t k = u.size();
    if (k == 0) throw std::invalid_argument("chain_cdf: empty argument");
    if (method.samples < 2) throw std::invalid_argument("chain_cdf: need at least 2 samples");
    if (k == 1) return {u[0], 0.0, method.samples};
    for (double uj : u) {
        if (uj == 0.0) return {0.0, 0.0, method.samples};
    }
    if (std::all_of(u.begin(), u.end(), [](double x) { return x == 1.0; })) {
        return {1.0, 0.0, method.samples};
    }

    std::vector<unsigned char> hit(method.samples);
    parallel_for(method.samples, [&](std::size_t i) {
        StreamRng rng(method.seed, i);
        std::vector<double> v(k);
        detail::walk_uniform_chain(family, k, rng, v.data());
        bool inside = true;
        for (std::size_t j = 0; j < k; ++j) {
            if (!(v[j] <= u[j])) {
                inside = false;
                break;
            }
        }
        hit[i] = inside ? 1 : 0;
    });
    RunningStats stats;
    for (unsigned char h : hit) stats.add(static_cast<double>(h));
    return stats.estimate();
}

// ---------------------------------------------------------------------------
// Family checks

struct ConsistencyReport {
    std::size_t k = 0;
    std::size_t probe_points = 0;
    double tolerance = 0.0;
    double max_deviation = 0.0;
    bool pass = false;
};

/// Probes C_{k+1}(u_1,...,u_k,1) = C_k(u_1,...,u_k) at Halton points of the
/// open cube, both sides evaluated by quadrature. Requires k <= 4 so that the
/// (k+1)-dimensional side stays within the quadrature cap.
inline ConsistencyReport check_consistency(const ChainCopulaFamily& family, std::size_t k,
                                           double tolerance, std::size_t probe_points,
                                           std::size_t order = 64) {
    if (k < 1 || k > chain_cdf_max_quadrature_dim - 1) {
        throw std::invalid_argument("check_consistency: k must lie in [1, 4]");
    }
    static constexpr std::uint64_t primes[] = {2, 3, 5, 7, 11};
    ConsistencyReport report{k, probe_points, tolerance, 0.0, false};
    std::vector<double> point(k + 1);
    for (std::size_t i = 0; i < probe_points; ++i) {
        for (std::size_t j = 0; j < k; ++j) point[j] = halton(i + 1, primes[j]);
        point[k] = 1.0;
        const double lifted = chain_cdf(family, std::span(point.data(), k + 1),
                                        QuadratureMethod{order});
        const double base = chain_cdf(family, std::span(point.data(), k),
                                      QuadratureMethod{order});
        report.max_deviation = std::max(report.max_deviation, std::fabs(lifted - base));
    }
    report.pass = report.max_deviation <= tolerance;
    return report;
}

struct MarginReport {
    std::size_t k = 0;
    std::size_t j = 0;
    double tolerance = 0.0;
    double max_deviation = 0.0;
    bool pass = false;
};

/// Probes the uniform-margin identity C_k(1,...,1,u_j,1,...,1) = u_j over an
/// interior grid of u_j values.
inline MarginReport check_uniform_margins(const ChainCopulaFamily& family, std::size_t k,
                                          std::size_t j, double tolerance,
                                          std::size_t grid_points = 32,
                                          std::size_t order = 64) {
    if (k < 1 || k > chain_cdf_max_quadrature_dim) {
        throw std::invalid_argument("check_uniform_margins: k must lie in [1, 5]");
    }
    if (j < 1 || j > k) {
        throw std::invalid_argument("check_uniform_margins: j must lie in [1, k]");
    }
    MarginReport report{k, j, tolerance, 0.0, false};
    std::vector<double> point(k, 1.0);
    for (std::size_t i = 1; i <= grid_points; ++i) {
        const double uj = static_cast<double>(i) / static_cast<double>(grid_points + 1);
        point[j - 1] = uj;
        const double value = chain_cdf(family, point, QuadratureMethod{order});
        report.max_deviation = std::max(report.max_deviation, std::fabs(value - uj));
    }
    report.pass = report.max_deviation <= tolerance;
    return report;
}

// ---------------------------------------------------------------------------
// Gaussian covariance families

namespace detail {

// Plain k x k Cholesky, lower triangular, row-major. Returns false when a
// pivot fails to be positive.
inline bool cholesky(std::vector<double>& a, std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
        double d = a[j * k + j];
        for (std::size_t t = 0; t < j; ++t) d -= a[j * k + t] * a[j * k + t];
        if (!(d > 0.0)) return false;
        const double root = std::sqrt(d);
        a[j * k + j] = root;
        for (std::size_t i = j + 1; i < k; ++i) {
            double s = a[i * k + j];
            for (std::size_t t = 0; t < j; ++t) s -= a[i * k + t] * a[j * k + t];
            a[i * k + j] = s / root;
        }
        for (std::size_t i = 0; i < j; ++i) a[i * k + j] = 0.0;
    }
    return true;
}

}  // namespace detail

/// Copula family of a centred Gaussian cylindrical measure with covariance
/// operator Q, specified through the bilinear form (m,n) -> <Q e_m, e_n>
/// (1-based indices). Leading blocks must be symmetric with positive
/// diagonal; blocks are standardized to correlation form before use, which
/// absorbs the marginal variances.
class GaussianCovarianceFamily {
  public:
    using CovarianceFn = std::function<double(std::size_t, std::size_t)>;

    explicit GaussianCovarianceFamily(CovarianceFn q, bool diagonal_hint = false)
        : q_(std::move(q)), diagonal_(diagonal_hint) {
        if (!q_) throw std::invalid_argument("GaussianCovarianceFamily: null covariance");
    }

    /// Canonical Gaussian cylindrical measure, Q = Id.
    static GaussianCovarianceFamily identity() {
        return GaussianCovarianceFamily(
            [](std::size_t m, std::size_t n) { return m == n ? 1.0 : 0.0; }, true);
    }

    /// <Q e_m, e_n> = rho^{|m-n|}.
    static GaussianCovarianceFamily ar1(double rho) {
        if (!(std::fabs(rho) < 1.0)) {
            throw std::domain_error("ar1: rho=" + std::to_string(rho) +
                                    " must lie in (-1,1)");
        }
        return GaussianCovarianceFamily(
            [rho](std::size_t m, std::size_t n) {
                const double d = m > n ? static_cast<double>(m - n)
                                       : static_cast<double>(n - m);
                return std::pow(rho, d);
            },
            rho == 0.0);
    }

    /// Diagonal operator with variances v(k) > 0.
    static GaussianCovarianceFamily diagonal(std::function<double(std::size_t)> v) {
        return GaussianCovarianceFamily(
            [v = std::move(v)](std::size_t m, std::size_t n) {
                return m == n ? v(m) : 0.0;
            },
            true);
    }

    /// Explicit leading block; entries beyond the block follow the identity.
    static GaussianCovarianceFamily from_matrix(std::vector<std::vector<double>> block) {
        const std::size_t b = block.size();
        for (const auto& row : block) {
            if (row.size() != b) {
                throw std::invalid_argument("from_matrix: covariance block must be square");
            }
        }
        for (std::size_t i = 0; i < b; ++i) {
            for (std::size_t j = i + 1; j < b; ++j) {
                if (std::fabs(block[i][j] - block[j][i]) >
                    1e-10 * (1.0 + std::fabs(block[i][j]))) {
                    throw std::invalid_argument("from_matrix: covariance block not symmetric");
                }
            }
        }
        return GaussianCovarianceFamily(
            [block = std::move(block), b](std::size_t m, std::size_t n) {
                if (m <= b && n <= b) return block[m - 1][n - 1];
                return m == n ? 1.0 : 0.0;
            },
            false);
    }

    double covariance(std::size_t m, std::size_t n) const { return q_(m, n); }
    bool diagonal_hint() const { return diagonal_; }

    /// Standardized k x k leading block, row-major. Throws when a marginal
    /// variance is not strictly positive or the block is asymmetric.
    std::vector<double> correlation_block(std::size_t k) const {
        std::vector<double> sd(k);
        for (std::size_t i = 0; i < k; ++i) {
            const double v = q_(i + 1, i + 1);
            if (!(v > 0.0)) {
                throw std::domain_error("covariance: marginal variance <Q e_" +
                                        std::to_string(i + 1) + ", e_" +
                                        std::to_string(i + 1) + ">=" + std::to_string(v) +
                                        " must be positive");
            }
            sd[i] = std::sqrt(v);
        }
        std::vector<double> r(k * k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double qij = q_(i + 1, j + 1);
                const double qji = q_(j + 1, i + 1);
                if (std::fabs(qij - qji) > 1e-10 * (1.0 + std::fabs(qij))) {
                    throw std::domain_error("covariance: block not symmetric at (" +
                                            std::to_string(i + 1) + ", " +
                                            std::to_string(j + 1) + ")");
                }
                const double c = qij / (sd[i] * sd[j]);
                r[i * k + j] = c;
                r[j * k + i] = c;
            }
        }
        return r;
    }

    /// Cholesky factor of the standardized block, with one retry at diagonal
    /// jitter 1e-12 for blocks that are positive semidefinite up to rounding.
    std::vector<double> cholesky_block(std::size_t k) const {
        std::vector<double> r = correlation_block(k);
        std::vector<double> work = r;
        if (detail::cholesky(work, k)) return work;
        work = r;
        for (std::size_t i = 0; i < k; ++i) work[i * k + i] += 1e-12;
        if (detail::cholesky(work, k)) return work;
        throw std::runtime_error("covariance: leading " + std::to_string(k) + "x" +
                                 std::to_string(k) +
                                 " block not positive definite (jitter 1e-12 exceeded)");
    }

  private:
    CovarianceFn q_;
    bool diagonal_ = false;
};

/// C_k(u) for a Gaussian covariance family: the multivariate-normal orthant
/// probability at the standardized quantiles, estimated by Monte Carlo.
inline MonteCarloEstimate gaussian_covariance_cdf(const GaussianCovarianceFamily& family,
                                                  std::span<const double> u,
                                                  std::size_t samples, std::uint64_t seed) {
    detail::require_unit_box(u);
    const std::size_t k = u.size();
    if (k == 0) throw std::invalid_argument("gaussian_covariance_cdf: empty argument");
    if (samples < 2) {
        throw std::invalid_argument("gaussian_covariance_cdf: need at least 2 samples");
    }
    for (double uj : u) {
        if (uj == 0.0) return {0.0, 0.0, samples};
    }
    if (k == 1) return {u[0], 0.0, samples};  // 1-D copula is the identity
    if (std::all_of(u.begin(), u.end(), [](double x) { return x == 1.0; })) {
        return {1.0, 0.0, samples};
    }

    std::vector<double> z(k);
    for (std::size_t j = 0; j < k; ++j) {
        z[j] = u[j] == 1.0 ? std::numeric_limits<double>::infinity()
                           : std_normal_quantile(u[j]);
    }
    const std::vector<double> chol = family.cholesky_block(k);

    std::vector<unsigned char> hit(samples);
    parallel_for(samples, [&](std::size_t i) {
        StreamRng rng(seed, i);
        std::vector<double> xi(k);
        for (std::size_t j = 0; j < k; ++j) xi[j] = std_normal_quantile(rng.uniform_open());
        bool inside = true;
        for (std::size_t row = 0; row < k && inside; ++row) {
            double x = 0.0;
            for (std::size_t col = 0; col <= row; ++col) x += chol[row * k + col] * xi[col];
            inside = x <= z[row];
        }
        hit[i] = inside ? 1 : 0;
    });
    RunningStats stats;
    for (unsigned char h : hit) stats.add(static_cast<double>(h));
    return stats.estimate();
}

}  // namespace hcopula
