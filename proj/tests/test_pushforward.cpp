#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "hcopula/pushforward.hpp"

using namespace hcopula;
using Catch::Matchers::WithinAbs;

namespace {

double ks_statistic_uniform(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        d = std::max(d, std::max((i + 1) / n - values[i], values[i] - i / n));
    }
    return d;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double num = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return num / std::sqrt(va * vb);
}

}  // namespace

TEST_CASE("independence chain uniforms are decorrelated across coordinates") {
    const auto family = ChainCopulaFamily::independence();
    const std::size_t n = 50000;
    const auto batch = sample_uniform_chain(family, 4, 31u, n);
    const double bound = 4.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a + 1; b < 4; ++b) {
            CHECK(std::fabs(pearson_correlation(batch.column(a), batch.column(b))) <= bound);
        }
    }
}

TEST_CASE("chain uniforms are marginally uniform coordinate by coordinate") {
    const auto family = ChainCopulaFamily::gaussian(CorrelationRule::power(0.5, 1.0));
    const std::size_t n = 100000, k = 20;
    const auto batch = sample_uniform_chain(family, k, 202408u, n);
    const double critical = 1.36 / std::sqrt(static_cast<double>(n));
    for (std::size_t j : {std::size_t{0}, std::size_t{1}, std::size_t{7}, std::size_t{19}}) {
        CHECK(ks_statistic_uniform(batch.column(j)) <= critical);
    }
    for (double v : batch.data) {
        REQUIRE(v > 0.0);
        REQUIRE(v < 1.0);
    }
}

TEST_CASE("chain sampling replays identically for a fixed seed") {
    const auto family = ChainCopulaFamily::gaussian(CorrelationRule::geometric(0.8, 0.5));
    const auto a = sample_uniform_chain(family, 6, 5u, 300);
    const auto b = sample_uniform_chain(family, 6, 5u, 300);
    CHECK(a.data == b.data);
}

TEST_CASE("extending a stream preserves its prefix exactly") {
    const auto family = ChainCopulaFamily::gaussian(CorrelationRule::power(0.5, 1.0));
    const auto spec = ProductMeasureSpec::iid(MarginalLaw::standard_normal());
    const auto five = sample_nu(family, spec, 5, 400, 77u);
    const auto ten = sample_nu(family, spec, 10, 400, 77u);
    for (std::size_t i = 0; i < 400; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            REQUIRE(five.at(i, j) == ten.at(i, j));
        }
    }
}

TEST_CASE("coordinate stream is the lazy view of the batch sampler") {
    const auto family = ChainCopulaFamily::gaussian(CorrelationRule::explicit_list({0.5}));
    const auto spec = ProductMeasureSpec::iid(MarginalLaw::standard_normal());
    const auto batch = sample_nu(family, spec, 4, 10, 13u);
    for (std::size_t i = 0; i < 10; ++i) {
        CoordinateStream stream(family, spec, 13u, i);
        for (std::size_t j = 0; j < 4; ++j) {
            REQUIRE(stream.next() == batch.at(i, j));
        }
        CHECK(stream.position() == 4);
    }
}

TEST_CASE("nu-samples preserve the marginal laws") {
    const auto family = ChainCopulaFamily::gaussian(CorrelationRule::power(0.5, 1.0));
    const auto spec = ProductMeasureSpec::normal_tail(0.0, VarianceRule::power(1.0, 2.0));
    const std::size_t n = 100000;
    const auto batch = sample_nu(family, spec, 6, n, 17u);

    // coordinate variances sigma_j^2 = j^-2
    for (std::size_t j : {std::size_t{1}, std::size_t{3}, std::size_t{6}}) {
        RunningStats stats;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = batch.at(i, j - 1);
            stats.add(x * x);
        }
        CHECK(stats.estimate().within(1.0 / static_cast<double>(j * j)));
    }

    // KS of F_j(x_j) against uniform
    const double critical = 1.36 / std::sqrt(static_cast<double>(n));
    for (std::size_t j : {std::size_t{1}, std::size_t{4}}) {
        std::vector<double> u(n);
        for (std::size_t i = 0; i < n; ++i) u[i] = spec.law(j).cdf(batch.at(i, j - 1));
        CHECK(ks_statistic_uniform(std::move(u)) <= critical);
    }
}

TEST_CASE("independence-chain nu-coordinates are uncorrelated") {
    const auto family = ChainCopulaFamily::independence();
    const auto spec = ProductMeasureSpec::iid(MarginalLaw::standard_normal());
    const std::size_t n = 50000;
    const auto batch = sample_nu(family, spec, 3, n, 23u);
    const double bound = 4.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(pearson_correlation(batch.column(0), batch.column(1))) <= bound);
    CHECK(std::fabs(pearson_correlation(batch.column(1), batch.column(2))) <= bound);
}

TEST_CASE("rectangle probability at the first-coordinate median") {
    const auto family = ChainCopulaFamily::gaussian(CorrelationRule::power(0.5, 1.0));
    const auto spec = ProductMeasureSpec::iid(MarginalLaw::standard_normal());
    const auto batch = sample_nu(family, spec, 3, 100000, 3u);
    const auto est = rectangle_probability(batch, RectangleQuery({0.0}));
    CHECK(est.within(0.5));
}

TEST_CASE("rectangle probability factorizes for the independence chain") {
    const auto family = ChainCopulaFamily::independence();
    const auto spec = ProductMeasureSpec::iid(MarginalLaw::standard_normal());
    const auto batch = sample_nu(family, spec, 2, 100000, 41u);
    const double z1 = std_normal_quantile(0.4), z2 = std_normal_quantile(0.75);
    const auto est = rectangle_probability(batch, RectangleQuery({z1, z2}));
    CHECK(est.within(0.4 * 0.75));
}

TEST_CASE("rectangle probability matches the chain cdf oracle") {
    // P(x_1 <= 0, x_2 <= 0) = C_2(1/2, 1/2) = 1/3 for rho_1 = 1/2
    const auto family = ChainCopulaFamily::gaussian(CorrelationRule::explicit_list({0.5}));
    const auto spec = ProductMeasureSpec::iid(MarginalLaw::standard_normal());
    const auto batch = sample_nu(family, spec, 2, 100000, 57u);
    const auto est = rectangle_probability(batch, RectangleQuery({0.0, 0.0}));
    CHECK(est.within(1.0 / 3.0));
    const std::vector<double> u{0.5, 0.5};
    CHECK(est.within(chain_cdf(family, u, QuadratureMethod{})));
}

TEST_CASE("rectangle probability rejects bad input") {
    CHECK_THROWS_AS(RectangleQuery({}), std::invalid_argument);
    Batch empty(0, 2);
    CHECK_THROWS_AS(rectangle_probability(empty, RectangleQuery({0.0})),
                    std::invalid_argument);
    Batch small(3, 1);
    CHECK_THROWS_AS(rectangle_probability(small, RectangleQuery({0.0, 0.0})),
                    std::invalid_argument);
}

TEST_CASE("ordered subset marginal with the full index range equals sample_nu") {
    const auto family = ChainCopulaFamily::gaussian(CorrelationRule::power(0.5, 1.0));
    const auto spec = ProductMeasureSpec::iid(MarginalLaw::standard_normal());
    const std::vector<std::size_t> indices{1, 2, 3, 4};
    const auto projected = ordered_subset_marginal(family, spec, indices, 200, 7u);
    const auto direct = sample_nu(family, spec, 4, 200, 7u);
    CHECK(projected.data == direct.data);
}

TEST_CASE("ordered subset marginal of the independence chain is a product law") {
    const auto family = ChainCopulaFamily::independence();
    const auto spec = ProductMeasureSpec::iid(MarginalLaw::standard_normal());
    const std::vector<std::size_t> indices{2, 5};
    const std::size_t n = 50000;
    const auto batch = ordered_subset_marginal(family, spec, indices, n, 19u);
    REQUIRE(batch.cols == 2);
    CHECK(std::fabs(pearson_correlation(batch.column(0), batch.column(1))) <=
          4.0 / std::sqrt(static_cast<double>(n)));
    RunningStats stats;
    for (std::size_t i = 0; i < n; ++i) stats.add(batch.at(i, 0) * batch.at(i, 0));
    CHECK(stats.estimate().within(1.0));
}

TEST_CASE("chain correlations compose along skipped coordinates") {
    // normal scores of coordinates (1,3) have correlation rho_1 * rho_2
    const auto family = ChainCopulaFamily::gaussian(
        CorrelationRule::explicit_list({0.5, 0.3}));
    const auto spec = ProductMeasureSpec::iid(MarginalLaw::standard_normal());
    const std::vector<std::size_t> indices{1, 3};
    const std::size_t n = 100000;
    const auto batch = ordered_subset_marginal(family, spec, indices, n, 73u);
    const double corr = pearson_correlation(batch.column(0), batch.column(1));
    CHECK_THAT(corr, WithinAbs(0.15, 4.0 / std::sqrt(static_cast<double>(n))));
}

TEST_CASE("ordered subset marginal rejects non-increasing indices") {
    const auto family = ChainCopulaFamily::independence();
    const auto spec = ProductMeasureSpec::iid(MarginalLaw::uniform01());
    const std::vector<std::size_t> dup{2, 2};
    CHECK_THROWS_AS(ordered_subset_marginal(family, spec, dup, 10, 1u),
                    std::invalid_argument);
    const std::vector<std::size_t> desc{3, 1};
    CHECK_THROWS_AS(ordered_subset_marginal(family, spec, desc, 10, 1u),
                    std::invalid_argument);
    const std::vector<std::size_t> zero{0, 2};
    CHECK_THROWS_AS(ordered_subset_marginal(family, spec, zero, 10, 1u),
                    std::invalid_argument);
}

TEST_CASE("empirical copula of comonotone data approximates the upper bound") {
    const std::size_t n = 1000, m = 10;
    Batch batch(n, 2);
    StreamRng rng(2u, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform_open();
        batch.at(i, 0) = std::exp(x);      // any increasing transforms
        batch.at(i, 1) = 3.0 * x - 1.0;    // share the ranks
    }
    const auto grid = empirical_copula(batch, m);
    CHECK(grid.resolution == m);
    CHECK(grid.sample_count == n);
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j <= m; ++j) {
            const double expected = std::min(i, j) / static_cast<double>(m);
            CHECK_THAT(grid.at2(i, j), WithinAbs(expected, 2e-3));
        }
    }
}

TEST_CASE("empirical copula of independent data approximates the product") {
    const auto family = ChainCopulaFamily::independence();
    const std::size_t n = 100000, m = 10;
    const auto batch = sample_uniform_chain(family, 2, 6u, n);
    const auto grid = empirical_copula(batch, m);
    const double band = 1.36 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j <= m; ++j) {
            const double expected = (i * j) / static_cast<double>(m * m);
            CHECK_THAT(grid.at2(i, j), WithinAbs(expected, band));
        }
    }
}

TEST_CASE("empirical copula recovers the chain cdf at the median point") {
    const auto family = ChainCopulaFamily::gaussian(CorrelationRule::explicit_list({0.5}));
    const std::size_t n = 100000;
    const auto batch = sample_uniform_chain(family, 2, 99u, n);
    const auto grid = empirical_copula(batch, 10);
    CHECK_THAT(grid.at2(5, 5), WithinAbs(1.0 / 3.0, 4.0 / std::sqrt(static_cast<double>(n))));
}

TEST_CASE("empirical copula grids satisfy the copula axioms") {
    const auto family = ChainCopulaFamily::gaussian(CorrelationRule::explicit_list({-0.6}));
    const std::size_t n = 20000, m = 8;
    const auto batch = sample_uniform_chain(family, 2, 14u, n);
    const auto grid = empirical_copula(batch, m);

    for (std::size_t i = 0; i <= m; ++i) {
        CHECK(grid.at2(i, 0) == 0.0);  // grounded
        CHECK(grid.at2(0, i) == 0.0);
    }
    CHECK(grid.at2(m, m) == 1.0);  // normalized

    const double band = 1.36 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 1; i <= m; ++i) {  // margins within the DKW band
        CHECK_THAT(grid.at2(i, m), WithinAbs(i / static_cast<double>(m), band));
        CHECK_THAT(grid.at2(m, i), WithinAbs(i / static_cast<double>(m), band));
    }

    for (std::size_t i = 0; i < m; ++i) {  // 2-increasing rectangle masses
        for (std::size_t j = 0; j < m; ++j) {
            const double mass = grid.at2(i + 1, j + 1) - grid.at2(i + 1, j) -
                                grid.at2(i, j + 1) + grid.at2(i, j);
            CHECK(mass >= -1e-15);
        }
    }
}

TEST_CASE("empirical copula input validation") {
    Batch tiny(5, 2);
    CHECK_THROWS_AS(empirical_copula(tiny, 10), std::invalid_argument);  // n < m
    Batch wide(10, 4);
    CHECK_THROWS_AS(empirical_copula(wide, 2), std::invalid_argument);  // k > 3
    Batch big(600, 3);
    CHECK_THROWS_AS(empirical_copula(big, 512), std::invalid_argument);  // cell budget
}
