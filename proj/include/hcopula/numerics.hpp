#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Special functions, Gauss-Legendre quadrature and Monte Carlo summaries.
// Everything here is pure and allocation-light; the heavier probabilistic
// machinery sits on top of these primitives.

namespace hcopula {

inline constexpr double inv_sqrt2 = 0.70710678118654752440;
inline constexpr double inv_sqrt2pi = 0.39894228040143267794;

/// Standard normal density.
inline double std_normal_pdf(double x) {
    return inv_sqrt2pi * std::exp(-0.5 * x * x);
}

/// Standard normal cumulative distribution function. Total on the extended
/// reals: -inf -> 0, +inf -> 1. Absolute error is that of erfc (< 1e-15).
inline double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x * inv_sqrt2);
}

/// Inverse of the standard normal cdf on (0,1).
///
/// Wichura's algorithm AS 241 (PPND16), Applied Statistics 37(3), 1988.
/// Relative accuracy is about 1e-15 over the full double range; throws
/// std::domain_error outside the open interval.
inline double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("std_normal_quantile: p=" + std::to_string(p) +
                                " outside (0,1)");
    }
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        const double num =
            q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                      6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                    1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                  1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return num / den;
    }
    r = q < 0.0 ? p : 1.0 - p;  // exact: p in [0.5,1] makes 1-p exact
    r = std::sqrt(-std::log(r));
    double z;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        z = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        z = num / den;
    }
    return q < 0.0 ? -z : z;
}

/// Riemann zeta for real s > 1 via Euler-Maclaurin (about 1e-13 for s >= 1.05).
inline double riemann_zeta(double s) {
    if (!(s > 1.0)) throw std::domain_error("riemann_zeta: requires s > 1");
    constexpr int cutoff = 50;
    double sum = 0.0;
    for (int k = 1; k < cutoff; ++k) sum += std::pow(static_cast<double>(k), -s);
    const double n = static_cast<double>(cutoff);
    const double ns = std::pow(n, -s);
    sum += n * ns / (s - 1.0);          // tail integral
    sum += 0.5 * ns;                    // trapezoidal correction
    sum += s * ns / (12.0 * n);         // B2 term
    sum -= s * (s + 1.0) * (s + 2.0) * ns / (720.0 * n * n * n);  // B4 term
    return sum;
}

// ---------------------------------------------------------------------------
// Quadrature

/// Nodes and weights of a quadrature rule on [a,b]; weights are positive and
/// sum to b-a, nodes are strictly increasing interior points.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double a = 0.0;
    double b = 1.0;

    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule with n points on [a,b], exact for polynomials of
/// degree <= 2n-1. Nodes by Newton iteration on the Legendre recurrence.
inline QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
    if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
    if (!(a < b)) throw std::invalid_argument("gauss_legendre: requires a < b");

    QuadratureRule rule;
    rule.a = a;
    rule.b = b;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        // Chebyshev-based initial guess for the i-th root of P_n.
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) {
                // one final recurrence pass to refresh dp at the converged node
                p0 = 1.0; p1 = x;
                for (std::size_t k = 2; k <= n; ++k) {
                    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = pk;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;            // x decreasing -> nodes increasing
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = half * w;
        rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

/// 1-D quadrature of f over the rule's interval. Throws if f produces a
/// non-finite value at a node.
template <typename F>
double integrate_1d(F&& f, const QuadratureRule& rule) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double v = f(rule.nodes[i]);
        if (!std::isfinite(v)) {
            throw std::runtime_error("integrate_1d: non-finite integrand at node " +
                                     std::to_string(rule.nodes[i]));
        }
        acc += rule.weights[i] * v;
    }
    return acc;
}

/// Tensor-product quadrature of f(u,v) over rule_u x rule_v.
template <typename F>
double integrate_2d(F&& f, const QuadratureRule& rule_u, const QuadratureRule& rule_v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rule_u.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < rule_v.size(); ++j) {
            const double v = f(rule_u.nodes[i], rule_v.nodes[j]);
            if (!std::isfinite(v)) {
                throw std::runtime_error("integrate_2d: non-finite integrand at (" +
                                         std::to_string(rule_u.nodes[i]) + ", " +
                                         std::to_string(rule_v.nodes[j]) + ")");
            }
            row += rule_v.weights[j] * v;
        }
        acc += rule_u.weights[i] * row;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Monte Carlo summaries

/// Sample mean with its standard error (sample sd / sqrt(n), Bessel-corrected).
struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t sample_count = 0;

    /// Half-width of the conventional 4-sigma acceptance band.
    double band(double sigmas = 4.0) const { return sigmas * standard_error; }
    bool within(double target, double sigmas = 4.0) const {
        return std::fabs(mean - target) <= band(sigmas);
    }
};

/// Welford accumulator; numerically stable one-pass mean and variance.
class RunningStats {
  public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double sample_variance() const {
        return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
    }
    MonteCarloEstimate estimate() const {
        if (n_ < 2) throw std::invalid_argument("RunningStats: need at least 2 samples");
        const double se = std::sqrt(sample_variance() / static_cast<double>(n_));
        return {mean_, se, n_};
    }

  private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Mean and standard error of the first n values of a generator `gen()`.
template <typename Gen>
MonteCarloEstimate monte_carlo_mean(Gen&& gen, std::size_t n) {
    if (n < 2) throw std::invalid_argument("monte_carlo_mean: need n >= 2 samples");
    RunningStats stats;
    for (std::size_t i = 0; i < n; ++i) stats.add(gen());
    return stats.estimate();
}

/// Mean and standard error of a materialized sequence.
inline MonteCarloEstimate monte_carlo_mean(std::span<const double> values) {
    if (values.size() < 2) {
        throw std::invalid_argument("monte_carlo_mean: need n >= 2 samples");
    }
    RunningStats stats;
    for (double v : values) stats.add(v);
    return stats.estimate();
}

/// Element of the Halton low-discrepancy sequence (index >= 1) in base `base`.
inline double halton(std::uint64_t index, std::uint64_t base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

}  // namespace hcopula
