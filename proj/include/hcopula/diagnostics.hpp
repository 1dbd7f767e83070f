#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hcopula/copula_families.hpp"
#include "hcopula/product_measures.hpp"
#include "hcopula/pushforward.hpp"

// Diagnostics for pushforward measures and their densities: l2-concentration
// and second-moment preservation, the density martingale M_k = c_k(g_k(h))
// under mu, uniform-integrability probes, and the Hellinger affinity series
// whose summable gaps are Kakutani's criterion for uniform integrability.

namespace hcopula {

// ---------------------------------------------------------------------------
// Hellinger affinity

/// Affinity int_{[0,1]^2} sqrt(phi(u,v)) du dv, computed in Gaussian
/// coordinates. Lies in (0,1]; equals 1 exactly when phi == 1. One minus the
/// affinity is the squared Hellinger distance between the pair copula and
/// independence.
inline double hellinger_affinity(const PairwiseCopula& pair, std::size_t order = 64) {
    const detail::GaussianCoordinateRule rule(order);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.u.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < rule.u.size(); ++j) {
            const double d = pair.density(rule.u[i], rule.u[j]);
            if (!(d >= 0.0) || !std::isfinite(d)) {
                throw std::runtime_error("hellinger_affinity: invalid density value at (" +
                                         std::to_string(rule.u[i]) + ", " +
                                         std::to_string(rule.u[j]) + ")");
            }
            row += rule.gw[j] * std::sqrt(d);
        }
        acc += rule.gw[i] * row;
    }
    return acc;
}

/// Closed-form affinity of the Gaussian pair copula with correlation rho:
/// the Hellinger affinity between the bivariate normal with correlation rho
/// and the independent one,
///   A(rho) = det(S)^{1/4} / det((S + I)/2)^{1/2}
///          = (1 - rho^2)^{1/4} / sqrt(1 - rho^2/4).
inline double gaussian_pair_affinity(double rho) {
    detail::require_correlation(rho);
    if (rho == 0.0) return 1.0;
    const double r2 = rho * rho;
    return std::pow(1.0 - r2, 0.25) / std::sqrt(1.0 - 0.25 * r2);
}

struct HellingerSeries {
    std::vector<double> terms;         // 1 - affinity of link j
    std::vector<double> partial_sums;  // nondecreasing (terms are >= 0)
    SeriesVerdictKind verdict = SeriesVerdictKind::inconclusive;
    std::string evidence;
};

/// Kakutani series of the chain family: terms 1 - int sqrt(phi_j); the
/// product densities c_k are uniformly integrable exactly when the series
/// converges. Gaussian links use the closed form; other prefix links fall
/// back to quadrature. The verdict is analytic whenever the tail is a
/// correlation rule: the squared Hellinger gap of a Gaussian link is
/// comparable to rho^2 on the admissible range, so the series converges
/// exactly when sum rho_k^2 does.
inline HellingerSeries hellinger_series(const ChainCopulaFamily& family, std::size_t K,
                                        std::size_t quad_order = 64) {
    if (K < 1) throw std::invalid_argument("hellinger_series: K must be >= 1");
    HellingerSeries out;
    out.terms.resize(K);
    out.partial_sums.resize(K);
    double running = 0.0;
    for (std::size_t j = 1; j <= K; ++j) {
        double affinity;
        if (const auto rho = family.gaussian_rho(j)) {
            affinity = gaussian_pair_affinity(*rho);
        } else {
            affinity = hellinger_affinity(*family.pair_object(j), quad_order);
        }
        out.terms[j - 1] = std::max(0.0, 1.0 - affinity);
        running += out.terms[j - 1];
        out.partial_sums[j - 1] = running;
    }

    const SquareSummability tail_verdict = is_square_summable(family.tail());
    switch (tail_verdict) {
        case SquareSummability::yes:
            out.verdict = SeriesVerdictKind::converges;
            out.evidence =
                "sum rho_k^2 < infinity for the tail rule; Hellinger gaps of Gaussian "
                "links are comparable to rho_k^2";
            break;
        case SquareSummability::no:
            out.verdict = SeriesVerdictKind::diverges;
            out.evidence =
                "sum rho_k^2 = infinity for the tail rule; Hellinger gaps of Gaussian "
                "links are comparable to rho_k^2";
            break;
        case SquareSummability::unknown:
            out.verdict = SeriesVerdictKind::inconclusive;
            out.evidence = "no analytic rule for the tail correlations";
            break;
    }
    if (family.prefix_size() > 0) {
        out.evidence += "; the " + std::to_string(family.prefix_size()) +
                        " explicit leading links are finitely many and do not affect "
                        "convergence";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Uniform integrability probe

struct UiProbeRow {
    std::size_t k = 0;
    double r = 0.0;
    MonteCarloEstimate estimate;
};

/// Estimates int_{c_k >= r} c_k du for each (k, r) pair, using the identity
/// that this integral is the C_k-probability of the event {c_k(U) >= r} with
/// U drawn from the copula itself. Rows for one k share a sample batch, so
/// the estimates are exactly nonincreasing in r.
inline std::vector<UiProbeRow> uniform_integrability_probe(
    const ChainCopulaFamily& family, std::span<const double> r_values,
    std::span<const std::size_t> k_values, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("uniform_integrability_probe: need n >= 2");
    for (double r : r_values) {
        if (!(r > 0.0)) {
            throw std::invalid_argument("uniform_integrability_probe: thresholds must be > 0");
        }
    }
    for (std::size_t k : k_values) {
        if (k < 2) {
            throw std::invalid_argument("uniform_integrability_probe: requires k >= 2");
        }
    }

    std::vector<UiProbeRow> rows;
    rows.reserve(r_values.size() * k_values.size());
    for (std::size_t k : k_values) {
        std::vector<double> density_values(n);
        parallel_for(n, [&](std::size_t i) {
            StreamRng rng(seed, i);
            std::vector<double> u(k);
            detail::walk_uniform_chain(family, k, rng, u.data());
            density_values[i] = chain_density(family, k, u);
        });
        for (double r : r_values) {
            RunningStats stats;
            for (double d : density_values) stats.add(d >= r ? 1.0 : 0.0);
            rows.push_back({k, r, stats.estimate()});
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Density martingale

struct LogHistogram {
    double lo = 1e-12;
    double hi = 1e4;
    std::vector<std::size_t> counts;  // log-spaced buckets between lo and hi
    std::size_t underflow = 0;
    std::size_t overflow = 0;

    /// Bucket edges are log-uniform; edge(i) is the left edge of bucket i.
    double edge(std::size_t i) const {
        const double t = static_cast<double>(i) / static_cast<double>(counts.size());
        return lo * std::pow(hi / lo, t);
    }
};

struct MartingaleLevel {
    std::size_t k = 1;
    MonteCarloEstimate mean;  // sample mean of M_k; expectation is 1
    bool within_band = true;  // |mean - 1| <= 4 SE (always true when SE = 0)
};

/// Result of a martingale run. M path values are row-major per sample when
/// retained (columns k = 1..K); factors hold X_2..X_K (columns j-2).
struct MartingaleRun {
    std::vector<MartingaleLevel> levels;
    LogHistogram terminal;  // histogram of M_K
    std::optional<Batch> paths;
    std::optional<Batch> factors;
};

/// Simulates the density martingale M_k(h) = c_k(g_k(h)) under mu: each path
/// draws h ~ mu, transforms to uniforms through the marginal cdfs and
/// multiplies the link densities, M_k = M_{k-1} * X_k with
/// X_k = phi_{k-1}(u_{k-1}, u_k). The sample mean at every level estimates
/// E_mu[M_k] = 1.
inline MartingaleRun martingale_run(const ProductMeasureSpec& spec,
                                    const ChainCopulaFamily& family, std::size_t K,
                                    std::size_t n, std::uint64_t seed,
                                    bool keep_paths = false,
                                    std::size_t histogram_buckets = 32) {
    if (K < 2) throw std::invalid_argument("martingale_run: K must be >= 2");
    if (n < 2) throw std::invalid_argument("martingale_run: need n >= 2");

    Batch paths(n, K);
    Batch factors(n, K - 1);
    parallel_for(n, [&](std::size_t i) {
        StreamRng rng(seed, i);
        double* M = paths.data.data() + i * K;
        double* X = factors.data.data() + i * (K - 1);
        double prev_u = 0.0;
        double current = 1.0;
        for (std::size_t k = 1; k <= K; ++k) {
            const double x = spec.law(k).quantile(rng.uniform_open());  // h ~ mu
            const double u = spec.law(k).cdf(x);                        // g_k(h)
            if (k >= 2) {
                const double factor = family.pair_density(k - 1, prev_u, u);
                X[k - 2] = factor;
                current = current * factor;
            }
            M[k - 1] = current;
            prev_u = u;
        }
    });

    MartingaleRun out;
    out.levels.resize(K);
    for (std::size_t k = 1; k <= K; ++k) {
        RunningStats stats;
        for (std::size_t i = 0; i < n; ++i) stats.add(paths.at(i, k - 1));
        MartingaleLevel level;
        level.k = k;
        level.mean = stats.estimate();
        level.within_band =
            std::fabs(level.mean.mean - 1.0) <= 4.0 * level.mean.standard_error ||
            level.mean.standard_error == 0.0;
        out.levels[k - 1] = level;
    }

    out.terminal.counts.assign(histogram_buckets, 0);
    const double log_lo = std::log(out.terminal.lo);
    const double log_span = std::log(out.terminal.hi) - log_lo;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = paths.at(i, K - 1);
        if (m < out.terminal.lo) {
            ++out.terminal.underflow;
        } else if (m >= out.terminal.hi) {
            ++out.terminal.overflow;
        } else {
            const double t = (std::log(m) - log_lo) / log_span;
            std::size_t bucket = static_cast<std::size_t>(t * histogram_buckets);
            if (bucket >= histogram_buckets) bucket = histogram_buckets - 1;
            ++out.terminal.counts[bucket];
        }
    }

    if (keep_paths) {
        out.paths = std::move(paths);
        out.factors = std::move(factors);
    }
    return out;
}

// ---------------------------------------------------------------------------
// l2-concentration

enum class ConcentrationVerdict { concentrated, not_concentrated, inconclusive };

inline const char* to_string(ConcentrationVerdict v) {
    switch (v) {
        case ConcentrationVerdict::concentrated: return "concentrated";
        case ConcentrationVerdict::not_concentrated: return "not_concentrated";
        case ConcentrationVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

/// Dependence structure of the copula family's tail links, as far as the
/// caller can certify it. Divergence arguments are only sound under an
/// eventually independent tail.
enum class FamilyTail { independent, dependent };

struct ConcentrationReport {
    ConcentrationVerdict verdict = ConcentrationVerdict::inconclusive;
    SecondMomentSeries series;
    std::string evidence;
};

/// Decides whether the pushforward of mu concentrates on l2 (i.e. is a
/// genuine Hilbert-space measure). Convergence of sum_k int x^2 mu_k(dx) is
/// sufficient regardless of the copula, since the pushforward preserves
/// marginals. The negative verdict needs more: it is issued only for an
/// eventually independent tail with tail second moments bounded away from
/// zero, where Borel-Cantelli forces sum x_k^2 = infinity almost surely.
inline ConcentrationReport l2_concentration_check(const ProductMeasureSpec& spec,
                                                  std::size_t K,
                                                  FamilyTail tail = FamilyTail::dependent) {
    ConcentrationReport report;
    report.series = second_moment_series(spec, K);
    if (report.series.verdict == SeriesVerdictKind::converges) {
        report.verdict = ConcentrationVerdict::concentrated;
        report.evidence = "second-moment series converges";
        if (report.series.limit) {
            report.evidence += " to " + std::to_string(*report.series.limit) +
                               "; the pushforward has finite expected squared norm";
        }
        return report;
    }
    if (report.series.verdict == SeriesVerdictKind::diverges &&
        tail == FamilyTail::independent && spec.tail_term_infimum() > 0.0) {
        report.verdict = ConcentrationVerdict::not_concentrated;
        report.evidence =
            "independent tail with coordinate second moments bounded below by " +
            std::to_string(spec.tail_term_infimum()) +
            "; Borel-Cantelli gives sum x_k^2 = infinity almost surely";
        return report;
    }
    report.verdict = ConcentrationVerdict::inconclusive;
    report.evidence =
        report.series.verdict == SeriesVerdictKind::diverges
            ? "second-moment series diverges, but divergence of the expectation alone "
              "does not decide almost-sure behaviour for dependent tails"
            : "series verdict inconclusive";
    return report;
}

// ---------------------------------------------------------------------------
// Second-moment preservation

struct MomentPreservationReport {
    std::size_t truncation = 0;
    MonteCarloEstimate estimate;      // Monte Carlo E_nu[sum_{k<=K} x_k^2]
    double analytic_partial_sum = 0;  // sum_{k<=K} int x^2 mu_k(dx)
    std::optional<double> tail_bound;  // S_infinity - S_K when the limit is known
    bool within_band = false;          // |estimate - partial sum| <= 4 SE
};

/// Checks that the pushforward preserves the truncated squared norm: the
/// Monte Carlo estimate of E_nu[sum_{k<=K} x_k^2] must match the analytic
/// partial sum of marginal second moments, because every nu-coordinate keeps
/// its mu-marginal. Refuses specs whose second-moment series diverges.
inline MomentPreservationReport second_moment_preservation(const ProductMeasureSpec& spec,
                                                           const ChainCopulaFamily& family,
                                                           std::size_t K, std::size_t n,
                                                           std::uint64_t seed) {
    if (K < 1) throw std::invalid_argument("second_moment_preservation: K must be >= 1");
    if (n < 2) throw std::invalid_argument("second_moment_preservation: need n >= 2");
    if (!spec.series_converges()) {
        throw std::domain_error(
            "second_moment_preservation: the second-moment series of the spec diverges; "
            "the pushforward does not define a square-integrable measure");
    }

    std::vector<double> sums(n);
    parallel_for(n, [&](std::size_t i) {
        StreamRng rng(seed, i);
        std::vector<double> u(K);
        detail::walk_uniform_chain(family, K, rng, u.data());
        double acc = 0.0;
        for (std::size_t k = 1; k <= K; ++k) {
            const double x = spec.law(k).quantile(u[k - 1]);
            acc += x * x;
        }
        sums[i] = acc;
    });

    MomentPreservationReport report;
    report.truncation = K;
    report.estimate = monte_carlo_mean(std::span<const double>(sums));
    double partial = 0.0;
    for (std::size_t k = 1; k <= K; ++k) partial += spec.second_moment_term(k);
    report.analytic_partial_sum = partial;
    if (const auto limit = spec.series_limit()) {
        report.tail_bound = std::max(0.0, *limit - partial);
    }
    report.within_band = std::fabs(report.estimate.mean - partial) <=
                         4.0 * report.estimate.standard_error;
    return report;
}

}  // namespace hcopula
