#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hcopula/batch.hpp"
#include "hcopula/numerics.hpp"
#include "hcopula/parallel.hpp"
#include "hcopula/rng.hpp"

// Coordinate representation of a product measure mu on a separable Hilbert
// space: one continuous marginal law per coordinate, independent across
// coordinates. The probability integral transform sends mu-samples to
// uniforms on the unit cube; the second-moment series sum_k int x^2 mu_k(dx)
// decides whether mu carries finite squared norm.

namespace hcopula {

/// A one-dimensional law with continuous cdf, analytic quantile and second
/// moment. Value type: cheap to construct and copy, safe to share.
class MarginalLaw {
  public:
    enum class Kind { normal, uniform01, exponential, logistic };

    static MarginalLaw normal(double mean, double variance) {
        if (!(variance > 0.0)) {
            throw std::domain_error("normal law: variance=" + std::to_string(variance) +
                                    " must be positive");
        }
        MarginalLaw law;
        law.kind_ = Kind::normal;
        law.a_ = mean;
        law.b_ = std::sqrt(variance);
        return law;
    }
    static MarginalLaw standard_normal() { return normal(0.0, 1.0); }

    static MarginalLaw uniform01() {
        MarginalLaw law;
        law.kind_ = Kind::uniform01;
        return law;
    }

    static MarginalLaw exponential(double rate) {
        if (!(rate > 0.0)) {
            throw std::domain_error("exponential law: rate=" + std::to_string(rate) +
                                    " must be positive");
        }
        MarginalLaw law;
        law.kind_ = Kind::exponential;
        law.a_ = rate;
        return law;
    }

    static MarginalLaw logistic(double location, double scale) {
        if (!(scale > 0.0)) {
            throw std::domain_error("logistic law: scale=" + std::to_string(scale) +
                                    " must be positive");
        }
        MarginalLaw law;
        law.kind_ = Kind::logistic;
        law.a_ = location;
        law.b_ = scale;
        return law;
    }

    Kind kind() const { return kind_; }
    bool continuous() const { return true; }

    double cdf(double x) const {
        switch (kind_) {
            case Kind::normal: return std_normal_cdf((x - a_) / b_);
            case Kind::uniform01: return std::min(std::max(x, 0.0), 1.0);
            case Kind::exponential: return x <= 0.0 ? 0.0 : -std::expm1(-a_ * x);
            case Kind::logistic: return 1.0 / (1.0 + std::exp(-(x - a_) / b_));
        }
        return 0.0;
    }

    /// Inverse cdf on the open interval (0,1).
    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0)) {
            throw std::domain_error("quantile: p=" + std::to_string(p) +
                                    " outside (0,1)");
        }
        switch (kind_) {
            case Kind::normal: return a_ + b_ * std_normal_quantile(p);
            case Kind::uniform01: return p;
            case Kind::exponential: return -std::log1p(-p) / a_;
            case Kind::logistic: return a_ + b_ * std::log(p / (1.0 - p));
        }
        return 0.0;
    }

    double second_moment() const {
        switch (kind_) {
            case Kind::normal: return a_ * a_ + b_ * b_;
            case Kind::uniform01: return 1.0 / 3.0;
            case Kind::exponential: return 2.0 / (a_ * a_);
            case Kind::logistic: return a_ * a_ + b_ * b_ * M_PI * M_PI / 3.0;
        }
        return 0.0;
    }

    std::string describe() const {
        switch (kind_) {
            case Kind::normal:
                return "normal(mean=" + std::to_string(a_) +
                       ", variance=" + std::to_string(b_ * b_) + ")";
            case Kind::uniform01: return "uniform[0,1]";
            case Kind::exponential: return "exponential(rate=" + std::to_string(a_) + ")";
            case Kind::logistic:
                return "logistic(location=" + std::to_string(a_) +
                       ", scale=" + std::to_string(b_) + ")";
        }
        return "";
    }

  private:
    MarginalLaw() = default;
    Kind kind_ = Kind::uniform01;
    double a_ = 0.0;  // mean / rate / location
    double b_ = 1.0;  // standard deviation / scale
};

/// Positive sequence v_k describing how a tail of variances decays.
class VarianceRule {
  public:
    enum class Kind { constant, power, geometric };

    static VarianceRule constant(double c) {
        require_positive(c, "constant");
        VarianceRule r;
        r.kind_ = Kind::constant;
        r.a_ = c;
        return r;
    }
    /// v_k = a * k^{-p}, p >= 0.
    static VarianceRule power(double a, double p) {
        require_positive(a, "power amplitude");
        if (!(p >= 0.0)) {
            throw std::domain_error("variance power rule: exponent p=" +
                                    std::to_string(p) + " must be nonnegative");
        }
        VarianceRule r;
        r.kind_ = Kind::power;
        r.a_ = a;
        r.p_ = p;
        return r;
    }
    /// v_k = a * q^k, q in (0,1).
    static VarianceRule geometric(double a, double q) {
        require_positive(a, "geometric amplitude");
        if (!(q > 0.0 && q < 1.0)) {
            throw std::domain_error("variance geometric rule: ratio q=" +
                                    std::to_string(q) + " must lie in (0,1)");
        }
        VarianceRule r;
        r.kind_ = Kind::geometric;
        r.a_ = a;
        r.q_ = q;
        return r;
    }

    Kind kind() const { return kind_; }
    double amplitude() const { return a_; }
    double exponent() const { return p_; }
    double ratio() const { return q_; }

    double value(std::size_t k) const {
        switch (kind_) {
            case Kind::constant: return a_;
            case Kind::power: return a_ * std::pow(static_cast<double>(k), -p_);
            case Kind::geometric: return a_ * std::pow(q_, static_cast<double>(k));
        }
        return 0.0;
    }

    bool series_converges() const {
        switch (kind_) {
            case Kind::constant: return false;
            case Kind::power: return p_ > 1.0;
            case Kind::geometric: return true;
        }
        return false;
    }

    /// sum_{k=1}^infty v_k when convergent.
    std::optional<double> series_limit() const {
        switch (kind_) {
            case Kind::constant: return std::nullopt;
            case Kind::power:
                if (p_ > 1.0) return a_ * riemann_zeta(p_);
                return std::nullopt;
            case Kind::geometric: return a_ * q_ / (1.0 - q_);
        }
        return std::nullopt;
    }

  private:
    static void require_positive(double v, const char* what) {
        if (!(v > 0.0)) {
            throw std::domain_error(std::string("variance rule: ") + what + "=" +
                                    std::to_string(v) + " must be positive");
        }
    }
    VarianceRule() = default;
    Kind kind_ = Kind::constant;
    double a_ = 1.0, p_ = 0.0, q_ = 0.5;
};

/// Product measure in coordinates: an explicit prefix of marginal laws plus a
/// structured tail that supplies law(k) for every k beyond the prefix. The
/// tail is either one law repeated (iid) or centred-to-shifted normals with a
/// variance rule, which keeps membership of the second-moment series in the
/// analytically decidable regime.
class ProductMeasureSpec {
  public:
    /// Same law at every coordinate.
    static ProductMeasureSpec iid(MarginalLaw law) {
        ProductMeasureSpec spec;
        spec.tail_kind_ = TailKind::iid;
        spec.tail_law_ = law;
        return spec;
    }

    /// normal(mean, v_k) with v_k from the rule.
    static ProductMeasureSpec normal_tail(double mean, VarianceRule rule) {
        ProductMeasureSpec spec;
        spec.tail_kind_ = TailKind::normal_rule;
        spec.tail_mean_ = mean;
        spec.tail_variances_ = rule;
        return spec;
    }

    /// Prepends explicit laws for the leading coordinates; the tail still
    /// evaluates its rule at the absolute index k.
    ProductMeasureSpec with_prefix(std::vector<MarginalLaw> prefix) const {
        ProductMeasureSpec spec = *this;
        spec.prefix_ = std::move(prefix);
        return spec;
    }

    MarginalLaw law(std::size_t k) const {
        if (k == 0) throw std::invalid_argument("ProductMeasureSpec: indices are 1-based");
        if (k <= prefix_.size()) return prefix_[k - 1];
        if (tail_kind_ == TailKind::iid) return *tail_law_;
        return MarginalLaw::normal(tail_mean_, tail_variances_->value(k));
    }

    std::size_t prefix_size() const { return prefix_.size(); }

    double second_moment_term(std::size_t k) const { return law(k).second_moment(); }

    bool tail_is_iid() const { return tail_kind_ == TailKind::iid; }
    const std::optional<MarginalLaw>& iid_law() const { return tail_law_; }
    const std::optional<VarianceRule>& tail_variance_rule() const { return tail_variances_; }
    double tail_mean() const { return tail_mean_; }

    /// Analytic classification of sum_k int x^2 mu_k(dx).
    bool series_converges() const {
        if (tail_kind_ == TailKind::iid) return false;  // constant positive terms
        if (tail_mean_ != 0.0) return false;
        return tail_variances_->series_converges();
    }

    /// Full series value when convergent (prefix terms plus tail rule sum
    /// beyond the prefix).
    std::optional<double> series_limit() const {
        if (!series_converges()) return std::nullopt;
        double limit = 0.0;
        for (std::size_t k = 1; k <= prefix_.size(); ++k) limit += second_moment_term(k);
        const auto whole = tail_variances_->series_limit();
        if (!whole) return std::nullopt;
        double tail = *whole;
        for (std::size_t k = 1; k <= prefix_.size(); ++k) tail -= tail_variances_->value(k);
        return limit + tail;
    }

    /// Infimum of the tail second moments; positive values feed the
    /// divergence argument for independent-tail pushforwards.
    double tail_term_infimum() const {
        if (tail_kind_ == TailKind::iid) return tail_law_->second_moment();
        const double m2 = tail_mean_ * tail_mean_;
        switch (tail_variances_->kind()) {
            case VarianceRule::Kind::constant:
                return m2 + tail_variances_->amplitude();
            case VarianceRule::Kind::power:
                return tail_variances_->exponent() == 0.0
                           ? m2 + tail_variances_->amplitude()
                           : m2;
            case VarianceRule::Kind::geometric:
                return m2;
        }
        return 0.0;
    }

  private:
    enum class TailKind { iid, normal_rule };
    ProductMeasureSpec() = default;

    std::vector<MarginalLaw> prefix_;
    TailKind tail_kind_ = TailKind::iid;
    std::optional<MarginalLaw> tail_law_ = MarginalLaw::uniform01();
    double tail_mean_ = 0.0;
    std::optional<VarianceRule> tail_variances_;
};

// ---------------------------------------------------------------------------
// Operations

/// Componentwise probability integral transform g_k: x_j -> F_j(x_j). Under
/// mu-sampling the image is uniform on the unit cube.
inline std::vector<double> probability_integral_transform(const ProductMeasureSpec& spec,
                                                          std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = spec.law(j + 1).cdf(x[j]);
    return out;
}

enum class SeriesVerdictKind { converges, diverges, inconclusive };

inline const char* to_string(SeriesVerdictKind v) {
    switch (v) {
        case SeriesVerdictKind::converges: return "converges";
        case SeriesVerdictKind::diverges: return "diverges";
        case SeriesVerdictKind::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

struct SecondMomentSeries {
    std::vector<double> terms;         // int x^2 mu_k(dx), k = 1..K
    std::vector<double> partial_sums;  // S_1..S_K, nondecreasing
    SeriesVerdictKind verdict = SeriesVerdictKind::inconclusive;
    std::optional<double> limit;       // set when the verdict is "converges"
    std::string evidence;
};

/// Partial sums S_K = sum_{k<=K} int x^2 mu_k(dx) with the analytic verdict
/// for the spec's tail rule.
inline SecondMomentSeries second_moment_series(const ProductMeasureSpec& spec,
                                               std::size_t K) {
    if (K < 1) throw std::invalid_argument("second_moment_series: K must be >= 1");
    SecondMomentSeries out;
    out.terms.resize(K);
    out.partial_sums.resize(K);
    double running = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
        out.terms[k - 1] = spec.second_moment_term(k);
        running += out.terms[k - 1];
        out.partial_sums[k - 1] = running;
    }
    if (spec.series_converges()) {
        out.verdict = SeriesVerdictKind::converges;
        out.limit = spec.series_limit();
        out.evidence = "tail rule is summable";
        if (out.limit) out.evidence += "; limit " + std::to_string(*out.limit);
    } else if (spec.tail_is_iid() || spec.tail_mean() != 0.0 ||
               !spec.tail_variance_rule()->series_converges()) {
        out.verdict = SeriesVerdictKind::diverges;
        out.evidence = spec.tail_is_iid() ? "constant positive terms"
                                          : "tail rule is not summable";
    } else {
        out.verdict = SeriesVerdictKind::inconclusive;
        out.evidence = "no analytic rule for the tail";
    }
    return out;
}

/// n independent mu-samples of the first k coordinates. Coordinate j of
/// sample i consumes the j-th uniform of the stream keyed by (seed, i), so
/// batches are reproducible and thread-count independent.
inline Batch sample_mu(const ProductMeasureSpec& spec, std::size_t k, std::size_t n,
                       std::uint64_t seed) {
    Batch batch(n, k);
    parallel_for(n, [&](std::size_t i) {
        StreamRng rng(seed, i);
        double* row = batch.data.data() + i * k;
        for (std::size_t j = 1; j <= k; ++j) {
            row[j - 1] = spec.law(j).quantile(rng.uniform_open());
        }
    });
    return batch;
}

}  // namespace hcopula
