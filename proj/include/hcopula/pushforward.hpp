#pragma once

#include <algorithm>
#include <numeric>

#include "hcopula/batch.hpp"
#include "hcopula/copula_families.hpp"
#include "hcopula/product_measures.hpp"

// Sampling realization of the pushforward measure nu on R^infinity determined
// by a chain copula family and a product measure: the unique law whose
// finite-dimensional rectangle probabilities are C_k applied to the marginal
// probabilities. The measure is never materialized; it exists as lazy
// coordinate streams plus the finite-dimensional quantities computed from
// them (Kolmogorov-extension semantics).

namespace hcopula {

/// Markov chain of chain-copula uniforms: V_1 uniform on (0,1) and
/// V_{j+1} = hinv_j(P_{j+1} | V_j). The j-th output depends only on
/// (seed, stream index) and the first j draws, so extending a stream never
/// changes values already produced.
class UniformChainStream {
  public:
    UniformChainStream(ChainCopulaFamily family, std::uint64_t seed, std::uint64_t stream)
        : family_(std::move(family)), rng_(seed, stream) {}

    /// Uniform coordinate V_{position+1}.
    double next() {
        if (position_ == 0) {
            state_ = rng_.uniform_open();
        } else {
            state_ = family_.pair_conditional_quantile(position_, rng_.uniform_open(), state_);
        }
        ++position_;
        return state_;
    }

    std::size_t position() const { return position_; }
    double current_uniform() const { return state_; }
    const ChainCopulaFamily& family() const { return family_; }

  private:
    ChainCopulaFamily family_;
    StreamRng rng_;
    std::size_t position_ = 0;
    double state_ = 0.0;
};

/// Lazy nu-coordinate stream: the chain uniforms pushed through the marginal
/// quantiles, x_j = F_j^{-1}(V_j).
class CoordinateStream {
  public:
    CoordinateStream(ChainCopulaFamily family, ProductMeasureSpec spec,
                     std::uint64_t seed, std::uint64_t stream)
        : chain_(std::move(family), seed, stream), spec_(std::move(spec)) {}

    double next() {
        const double u = chain_.next();
        return spec_.law(chain_.position()).quantile(u);
    }

    std::size_t position() const { return chain_.position(); }
    double current_uniform() const { return chain_.current_uniform(); }

  private:
    UniformChainStream chain_;
    ProductMeasureSpec spec_;
};

/// n sample paths of the first k chain uniforms, one row per path.
inline Batch sample_uniform_chain(const ChainCopulaFamily& family, std::size_t k,
                                  std::uint64_t seed, std::size_t n) {
    if (k < 1) throw std::invalid_argument("sample_uniform_chain: k must be >= 1");
    Batch batch(n, k);
    parallel_for(n, [&](std::size_t i) {
        StreamRng rng(seed, i);
        detail::walk_uniform_chain(family, k, rng, batch.data.data() + i * k);
    });
    return batch;
}

/// n sample paths of the first k nu-coordinates.
inline Batch sample_nu(const ChainCopulaFamily& family, const ProductMeasureSpec& spec,
                       std::size_t k, std::size_t n, std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("sample_nu: k must be >= 1");
    Batch batch(n, k);
    parallel_for(n, [&](std::size_t i) {
        StreamRng rng(seed, i);
        double* row = batch.data.data() + i * k;
        detail::walk_uniform_chain(family, k, rng, row);
        for (std::size_t j = 0; j < k; ++j) row[j] = spec.law(j + 1).quantile(row[j]);
    });
    return batch;
}

// ---------------------------------------------------------------------------
// Rectangle probabilities

/// Lower-orthant query: the box (-inf, x_1] x ... x (-inf, x_k].
struct RectangleQuery {
    std::vector<double> upper;

    explicit RectangleQuery(std::vector<double> corners) : upper(std::move(corners)) {
        if (upper.empty()) throw std::invalid_argument("RectangleQuery: needs k >= 1");
    }
};

/// Empirical probability of the rectangle under the batch, with standard
/// error. The query may touch fewer coordinates than the batch carries.
inline MonteCarloEstimate rectangle_probability(const Batch& batch,
                                                const RectangleQuery& query) {
    if (batch.rows == 0) throw std::invalid_argument("rectangle_probability: empty batch");
    if (query.upper.size() > batch.cols) {
        throw std::invalid_argument("rectangle_probability: query dimension " +
                                    std::to_string(query.upper.size()) +
                                    " exceeds batch width " + std::to_string(batch.cols));
    }
    RunningStats stats;
    for (std::size_t i = 0; i < batch.rows; ++i) {
        const double* row = batch.data.data() + i * batch.cols;
        bool inside = true;
        for (std::size_t j = 0; j < query.upper.size(); ++j) {
            if (!(row[j] <= query.upper[j])) {
                inside = false;
                break;
            }
        }
        stats.add(inside ? 1.0 : 0.0);
    }
    return stats.estimate();
}

/// Samples the ordered-subset marginal nu_{t_1,...,t_k} for strictly
/// increasing 1-based indices: each path is advanced to t_k and projected
/// onto the requested coordinates.
inline Batch ordered_subset_marginal(const ChainCopulaFamily& family,
                                     const ProductMeasureSpec& spec,
                                     std::span<const std::size_t> indices, std::size_t n,
                                     std::uint64_t seed) {
    if (indices.empty()) throw std::invalid_argument("ordered_subset_marginal: no indices");
    for (std::size_t t = 0; t < indices.size(); ++t) {
        if (indices[t] < 1 || (t > 0 && indices[t] <= indices[t - 1])) {
            throw std::invalid_argument(
                "ordered_subset_marginal: indices must be strictly increasing and >= 1");
        }
    }
    const std::size_t k_max = indices.back();
    Batch batch(n, indices.size());
    parallel_for(n, [&](std::size_t i) {
        CoordinateStream stream(family, spec, seed, i);
        double* row = batch.data.data() + i * indices.size();
        std::size_t next_slot = 0;
        for (std::size_t j = 1; j <= k_max; ++j) {
            const double x = stream.next();
            if (next_slot < indices.size() && indices[next_slot] == j) {
                row[next_slot++] = x;
            }
        }
    });
    return batch;
}

// ---------------------------------------------------------------------------
// Empirical copulas

/// Empirical copula on the lattice {0, 1/m, ..., 1}^k, extracted from ranks.
/// Grounded on the zero faces, equal to 1 at the all-ones corner and
/// componentwise nondecreasing by construction.
struct EmpiricalCopulaGrid {
    std::size_t resolution = 0;    // m
    std::size_t dim = 0;           // k
    std::size_t sample_count = 0;  // n
    std::vector<double> values;    // (m+1)^k, lexicographic in (i_1,...,i_k)

    double at(std::span<const std::size_t> index) const {
        if (index.size() != dim) {
            throw std::invalid_argument("EmpiricalCopulaGrid::at: wrong index arity");
        }
        std::size_t flat = 0;
        for (std::size_t d = 0; d < dim; ++d) {
            if (index[d] > resolution) {
                throw std::out_of_range("EmpiricalCopulaGrid::at: index exceeds resolution");
            }
            flat = flat * (resolution + 1) + index[d];
        }
        return values[flat];
    }
    double at2(std::size_t i, std::size_t j) const {
        const std::size_t idx[2] = {i, j};
        return at(std::span(idx, 2));
    }
};

inline constexpr std::size_t empirical_grid_cell_budget = std::size_t{1} << 24;

/// Rank-transforms the batch with plotting positions rank/(n+1) (which keeps
/// pseudo-observations inside the open cube) and accumulates the empirical
/// copula by cell counts plus a k-dimensional prefix sum.
inline EmpiricalCopulaGrid empirical_copula(const Batch& batch, std::size_t m) {
    const std::size_t n = batch.rows;
    const std::size_t k = batch.cols;
    if (k < 1 || k > 3) {
        throw std::invalid_argument("empirical_copula: supported for 1 <= k <= 3, got k = " +
                                    std::to_string(k));
    }
    if (m < 1) throw std::invalid_argument("empirical_copula: resolution must be >= 1");
    if (n < m) {
        throw std::invalid_argument("empirical_copula: need at least m samples (n=" +
                                    std::to_string(n) + ", m=" + std::to_string(m) + ")");
    }
    double cells = 1.0;
    for (std::size_t d = 0; d < k; ++d) cells *= static_cast<double>(m + 1);
    if (cells > static_cast<double>(empirical_grid_cell_budget)) {
        throw std::invalid_argument("empirical_copula: grid of (m+1)^k = " +
                                    std::to_string(static_cast<std::size_t>(cells)) +
                                    " cells exceeds the budget");
    }

    // Ordinal ranks per column (ties broken by sample order; inputs from
    // continuous laws make ties a null event).
    std::vector<std::size_t> cell(n * k);
    std::vector<std::size_t> order(n);
    for (std::size_t j = 0; j < k; ++j) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return batch.at(a, j) < batch.at(b, j);
        });
        for (std::size_t pos = 0; pos < n; ++pos) {
            const double pseudo = static_cast<double>(pos + 1) / static_cast<double>(n + 1);
            cell[order[pos] * k + j] =
                static_cast<std::size_t>(std::ceil(pseudo * static_cast<double>(m)));
        }
    }

    const std::size_t side = m + 1;
    std::size_t total = 1;
    for (std::size_t d = 0; d < k; ++d) total *= side;
    std::vector<double> grid(total, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t flat = 0;
        for (std::size_t d = 0; d < k; ++d) flat = flat * side + cell[i * k + d];
        grid[flat] += 1.0;
    }

    // Prefix sums along each axis turn cell counts into cumulative counts.
    for (std::size_t axis = 0; axis < k; ++axis) {
        std::size_t stride = 1;
        for (std::size_t d = axis + 1; d < k; ++d) stride *= side;
        const std::size_t block = stride * side;
        for (std::size_t base = 0; base < total; base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                for (std::size_t i = 1; i < side; ++i) {
                    grid[base + off + i * stride] += grid[base + off + (i - 1) * stride];
                }
            }
        }
    }
    for (double& g : grid) g /= static_cast<double>(n);

    EmpiricalCopulaGrid out;
    out.resolution = m;
    out.dim = k;
    out.sample_count = n;
    out.values = std::move(grid);
    return out;
}

}  // namespace hcopula
