#pragma once

#include <memory>
#include <optional>
#include <string>

#include "hcopula/numerics.hpp"

// Two-dimensional copula building blocks. A pairwise copula exposes its
// density, the conditional cdf v -> C(v|u) (the h-function of the vine
// literature) and the conditional quantile that inverts it; the inverse
// h-function is what drives exact sequential sampling of copula chains.

namespace hcopula {

namespace detail {

inline void require_open_unit(double value, const char* name) {
    if (!(value > 0.0 && value < 1.0)) {
        throw std::domain_error(std::string(name) + "=" + std::to_string(value) +
                                " must lie in the open interval (0,1)");
    }
}

inline void require_correlation(double rho) {
    if (!(std::fabs(rho) <= 0.999)) {
        throw std::domain_error("correlation " + std::to_string(rho) +
                                " outside [-0.999, 0.999]");
    }
}

// Half-width of the standard-normal integration window. The normal mass
// outside [-L, L] is below 1.3e-15, so fixed-order Gauss-Legendre on the
// window integrates copula expressions essentially to machine precision.
inline constexpr double gauss_window = 8.0;

// Gauss-Legendre rule on [-L, L] with the unit-square images u = G(x) and the
// normal-weighted quadrature weights w * g(x) precomputed. Integrating
// f(u) du over [0,1] equals summing gw[i] * f(u[i]).
struct GaussianCoordinateRule {
    std::vector<double> x;   // nodes in (-L, L)
    std::vector<double> u;   // G(x), strictly inside (0,1)
    std::vector<double> gw;  // weight * normal pdf

    explicit GaussianCoordinateRule(std::size_t order) {
        const QuadratureRule rule = gauss_legendre(order, -gauss_window, gauss_window);
        x = rule.nodes;
        u.resize(order);
        gw.resize(order);
        for (std::size_t i = 0; i < order; ++i) {
            u[i] = std_normal_cdf(x[i]);
            gw[i] = rule.weights[i] * std_normal_pdf(x[i]);
        }
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Gaussian pair formulas

/// Density of the bivariate Gaussian copula with correlation rho at (u,v).
/// With x = G^{-1}(u), y = G^{-1}(v):
///   phi(u,v) = (1-rho^2)^{-1/2} exp(-(rho^2 x^2 - 2 rho x y + rho^2 y^2)
///                                    / (2 (1-rho^2))).
inline double gaussian_pair_density(double rho, double u, double v) {
    detail::require_correlation(rho);
    detail::require_open_unit(u, "u");
    detail::require_open_unit(v, "v");
    if (rho == 0.0) return 1.0;
    const double x = std_normal_quantile(u);
    const double y = std_normal_quantile(v);
    const double r2 = rho * rho;
    const double q = r2 * x * x - 2.0 * rho * x * y + r2 * y * y;
    return std::exp(-q / (2.0 * (1.0 - r2))) / std::sqrt(1.0 - r2);
}

/// Conditional cdf P(V <= v | U = u) of the Gaussian pair:
///   h(v|u) = G((G^{-1}(v) - rho G^{-1}(u)) / sqrt(1-rho^2)).
inline double gaussian_pair_conditional_cdf(double rho, double v, double u) {
    detail::require_correlation(rho);
    detail::require_open_unit(u, "u");
    detail::require_open_unit(v, "v");
    if (rho == 0.0) return v;
    const double x = std_normal_quantile(u);
    const double y = std_normal_quantile(v);
    return std_normal_cdf((y - rho * x) / std::sqrt(1.0 - rho * rho));
}

/// Inverse h-function: the v with h(v|u) = p, in closed form
///   v = G(rho G^{-1}(u) + sqrt(1-rho^2) G^{-1}(p)).
inline double gaussian_pair_conditional_quantile(double rho, double p, double u) {
    detail::require_correlation(rho);
    detail::require_open_unit(u, "u");
    detail::require_open_unit(p, "p");
    if (rho == 0.0) return p;
    const double x = std_normal_quantile(u);
    const double z = std_normal_quantile(p);
    return std_normal_cdf(rho * x + std::sqrt(1.0 - rho * rho) * z);
}

// ---------------------------------------------------------------------------
// Interface

/// Abstract 2-D copula with a continuous density. Implementations must be
/// immutable after construction; all evaluations are pure. Arguments are
/// restricted to the open square: the quantile transforms behind most
/// densities diverge on the boundary, and the chain sampler never produces
/// exact 0 or 1.
class PairwiseCopula {
  public:
    virtual ~PairwiseCopula() = default;

    virtual double density(double u, double v) const = 0;
    /// P(V <= v | U = u)
    virtual double conditional_cdf(double v, double u) const = 0;
    /// v such that conditional_cdf(v, u) = p
    virtual double conditional_quantile(double p, double u) const = 0;
    virtual std::string name() const = 0;

    /// Correlation parameter when the pair is a Gaussian copula; enables
    /// closed-form shortcuts in diagnostics. Defaults to "not Gaussian".
    virtual std::optional<double> gaussian_correlation() const { return std::nullopt; }
};

/// The independence copula: density 1, h-function the identity in v.
class IndependencePair final : public PairwiseCopula {
  public:
    double density(double u, double v) const override {
        detail::require_open_unit(u, "u");
        detail::require_open_unit(v, "v");
        return 1.0;
    }
    double conditional_cdf(double v, double u) const override {
        detail::require_open_unit(u, "u");
        detail::require_open_unit(v, "v");
        return v;
    }
    double conditional_quantile(double p, double u) const override {
        detail::require_open_unit(u, "u");
        detail::require_open_unit(p, "p");
        return p;
    }
    std::string name() const override { return "independence"; }
    std::optional<double> gaussian_correlation() const override { return 0.0; }
};

/// Gaussian pair copula with correlation in [-0.999, 0.999]; the parameter
/// range is clamped hard because the density degenerates towards |rho| = 1.
class GaussianPair final : public PairwiseCopula {
  public:
    explicit GaussianPair(double rho) : rho_(rho) { detail::require_correlation(rho); }

    double correlation() const { return rho_; }

    double density(double u, double v) const override {
        return gaussian_pair_density(rho_, u, v);
    }
    double conditional_cdf(double v, double u) const override {
        return gaussian_pair_conditional_cdf(rho_, v, u);
    }
    double conditional_quantile(double p, double u) const override {
        return gaussian_pair_conditional_quantile(rho_, p, u);
    }
    std::string name() const override {
        return "gaussian(rho=" + std::to_string(rho_) + ")";
    }
    std::optional<double> gaussian_correlation() const override { return rho_; }

  private:
    double rho_;
};

// ---------------------------------------------------------------------------
// Validation

/// Numerical health report for a pairwise copula. Row/column integrals probe
/// the defining identity int_0^1 phi(u,v) dv = 1 for each u; negativity and
/// margin deviations flag objects that are not copula densities at all. The
/// symmetry residual is informational (exchangeability is not an axiom).
struct PairValidationReport {
    double max_row_integral_deviation = 0.0;  // sup_u |int phi(u,v) dv - 1|
    double max_col_integral_deviation = 0.0;  // sup_v |int phi(u,v) du - 1|
    double max_negativity = 0.0;              // max(0, -min phi)
    double max_symmetry_residual = 0.0;       // sup |phi(u,v) - phi(v,u)|

    bool passes(double tolerance) const {
        return max_row_integral_deviation <= tolerance &&
               max_col_integral_deviation <= tolerance &&
               max_negativity <= tolerance;
    }
};

/// Probes the copula-density identities on a grid_size x grid_size grid,
/// integrating in Gaussian coordinates so that boundary layers of densities
/// like the Gaussian pair's are resolved by a fixed-order rule.
inline PairValidationReport validate_pair(const PairwiseCopula& pair,
                                          std::size_t grid_size) {
    if (grid_size < 8) {
        throw std::invalid_argument("validate_pair: grid_size must be at least 8");
    }
    const detail::GaussianCoordinateRule rule(grid_size);
    PairValidationReport report;

    const std::size_t probes = grid_size;
    std::vector<double> probe_u(probes);
    for (std::size_t i = 0; i < probes; ++i) {
        probe_u[i] = static_cast<double>(i + 1) / static_cast<double>(probes + 1);
    }

    for (double u : probe_u) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < rule.u.size(); ++j) {
            row += rule.gw[j] * pair.density(u, rule.u[j]);
            col += rule.gw[j] * pair.density(rule.u[j], u);
        }
        report.max_row_integral_deviation =
            std::max(report.max_row_integral_deviation, std::fabs(row - 1.0));
        report.max_col_integral_deviation =
            std::max(report.max_col_integral_deviation, std::fabs(col - 1.0));
    }

    for (double u : probe_u) {
        for (double v : probe_u) {
            const double d = pair.density(u, v);
            if (!std::isfinite(d)) {
                throw std::runtime_error("validate_pair: non-finite density at (" +
                                         std::to_string(u) + ", " + std::to_string(v) + ")");
            }
            report.max_negativity = std::max(report.max_negativity, -d);
            report.max_symmetry_residual =
                std::max(report.max_symmetry_residual, std::fabs(d - pair.density(v, u)));
        }
    }
    report.max_negativity = std::max(report.max_negativity, 0.0);
    return report;
}

}  // namespace hcopula
