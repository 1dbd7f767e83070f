#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "hcopula/numerics.hpp"
#include "hcopula/rng.hpp"

using namespace hcopula;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("standard normal cdf at reference points") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK_THAT(std_normal_cdf(1.959964), WithinAbs(0.975, 1e-6));
    CHECK(std_normal_cdf(-std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(std_normal_cdf(std::numeric_limits<double>::infinity()) == 1.0);
    // high-precision values (erf series): Phi(1) and Phi(-3)
    CHECK_THAT(std_normal_cdf(1.0), WithinAbs(0.841344746068542949, 1e-13));
    CHECK_THAT(std_normal_cdf(-3.0), WithinAbs(1.349898031630094527e-3, 1e-15));
}

TEST_CASE("standard normal cdf is nondecreasing on a grid") {
    double prev = 0.0;
    for (int i = -800; i <= 800; ++i) {
        const double v = std_normal_cdf(0.01 * i);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("standard normal quantile at reference points") {
    CHECK(std_normal_quantile(0.5) == 0.0);
    CHECK_THAT(std_normal_quantile(0.975), WithinAbs(1.959964, 1e-6));
    CHECK_THAT(std_normal_quantile(0.975), WithinAbs(1.959963984540054, 1e-9));
    CHECK_THAT(std_normal_quantile(0.99), WithinAbs(2.3263478740408408, 1e-9));
    CHECK_THAT(std_normal_cdf(std_normal_quantile(0.123)), WithinAbs(0.123, 1e-9));
}

TEST_CASE("standard normal quantile rejects the closed boundary") {
    CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(-0.2), std::domain_error);
    CHECK_THROWS_AS(std_normal_quantile(1.2), std::domain_error);
}

TEST_CASE("cdf-quantile roundtrip over a dense grid including deep tails") {
    for (int i = 1; i < 1000; ++i) {
        const double p = i / 1000.0;
        CHECK_THAT(std_normal_cdf(std_normal_quantile(p)), WithinAbs(p, 1e-9));
    }
    for (double p : {1e-15, 1e-12, 1e-9, 1e-6, 1.0 - 1e-6, 1.0 - 1e-9, 1.0 - 1e-12}) {
        const double z = std_normal_quantile(p);
        CHECK_THAT(std_normal_cdf(z), WithinRel(p, 1e-9));
    }
}

TEST_CASE("gauss-legendre small rules match closed forms") {
    const auto r1 = gauss_legendre(1, 0.0, 1.0);
    REQUIRE(r1.size() == 1);
    CHECK_THAT(r1.nodes[0], WithinAbs(0.5, 1e-15));
    CHECK_THAT(r1.weights[0], WithinAbs(1.0, 1e-15));

    const auto r2 = gauss_legendre(2, 0.0, 1.0);
    REQUIRE(r2.size() == 2);
    CHECK_THAT(r2.nodes[0], WithinAbs(0.21132486540518708, 1e-14));
    CHECK_THAT(r2.nodes[1], WithinAbs(0.7886751345948129, 1e-14));
    CHECK_THAT(r2.weights[0], WithinAbs(0.5, 1e-14));
    CHECK_THAT(r2.weights[1], WithinAbs(0.5, 1e-14));
}

TEST_CASE("gauss-legendre weights sum to the interval length") {
    for (std::size_t n : {1u, 2u, 5u, 16u, 64u, 129u}) {
        const auto rule = gauss_legendre(n, -2.5, 7.25);
        double sum = 0.0;
        for (double w : rule.weights) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK_THAT(sum, WithinAbs(9.75, 1e-12));
        for (std::size_t i = 0; i < rule.size(); ++i) {
            CHECK(rule.nodes[i] > -2.5);
            CHECK(rule.nodes[i] < 7.25);
            if (i) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
        }
    }
}

TEST_CASE("gauss-legendre is exact for polynomials up to degree 2n-1") {
    for (std::size_t n = 1; n <= 10; ++n) {
        const auto rule = gauss_legendre(n, 0.0, 2.0);
        for (std::size_t m = 0; m < 2 * n; ++m) {
            double quad = 0.0;
            for (std::size_t i = 0; i < rule.size(); ++i) {
                quad += rule.weights[i] * std::pow(rule.nodes[i], static_cast<double>(m));
            }
            const double exact = std::pow(2.0, static_cast<double>(m + 1)) / (m + 1);
            CHECK_THAT(quad, WithinRel(exact, 1e-12));
        }
    }
}

TEST_CASE("gauss-legendre rejects bad arguments") {
    CHECK_THROWS_AS(gauss_legendre(0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_legendre(4, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_legendre(4, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("integrate_2d on separable polynomials") {
    const auto rule = gauss_legendre(16, 0.0, 1.0);
    CHECK_THAT(integrate_2d([](double, double) { return 1.0; }, rule, rule),
               WithinAbs(1.0, 1e-13));
    CHECK_THAT(integrate_2d([](double u, double v) { return 4.0 * u * v; }, rule, rule),
               WithinAbs(1.0, 1e-13));
}

TEST_CASE("integrate_2d normalizes a Gaussian copula density in Gaussian coordinates") {
    // density written out directly as an independent oracle
    const double rho = 0.3;
    auto density_xy = [rho](double x, double y) {
        const double q = rho * rho * x * x - 2.0 * rho * x * y + rho * rho * y * y;
        const double phi = std::exp(-q / (2.0 * (1.0 - rho * rho))) /
                           std::sqrt(1.0 - rho * rho);
        return phi * std_normal_pdf(x) * std_normal_pdf(y);
    };
    const auto rule = gauss_legendre(64, -8.0, 8.0);
    CHECK_THAT(integrate_2d(density_xy, rule, rule), WithinAbs(1.0, 1e-8));
}

TEST_CASE("integrate_2d propagates non-finite integrand values") {
    const auto rule = gauss_legendre(8, 0.0, 1.0);
    auto bad = [](double u, double) { return 1.0 / (u - u); };
    CHECK_THROWS_AS(integrate_2d(bad, rule, rule), std::runtime_error);
}

TEST_CASE("integrate_2d is bilinear and monotone") {
    const auto rule = gauss_legendre(12, 0.0, 1.0);
    auto f = [](double u, double v) { return u * u + v; };
    auto g = [](double u, double v) { return std::sin(u) * (1.0 + v); };
    const double fa = integrate_2d(f, rule, rule);
    const double ga = integrate_2d(g, rule, rule);
    auto combo = [&](double u, double v) { return 2.5 * f(u, v) - 0.75 * g(u, v); };
    CHECK_THAT(integrate_2d(combo, rule, rule), WithinAbs(2.5 * fa - 0.75 * ga, 1e-12));
    CHECK(ga >= 0.0);  // g is nonnegative on the square
}

TEST_CASE("monte_carlo_mean of a constant stream") {
    const auto est = monte_carlo_mean([] { return 1.0; }, 100);
    CHECK(est.mean == 1.0);
    CHECK(est.standard_error == 0.0);
    CHECK(est.sample_count == 100);
}

TEST_CASE("monte_carlo_mean of the alternating 0,2 stream") {
    int i = 0;
    const auto est = monte_carlo_mean([&] { return (i++ % 2) ? 2.0 : 0.0; }, 1000);
    CHECK_THAT(est.mean, WithinAbs(1.0, 1e-15));
    // sample variance 1000/999, so the standard error is 1/sqrt(999)
    CHECK_THAT(est.standard_error, WithinAbs(0.03163859985841663, 1e-12));
}

TEST_CASE("monte_carlo_mean rejects fewer than two samples") {
    CHECK_THROWS_AS(monte_carlo_mean([] { return 0.0; }, 1), std::invalid_argument);
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(monte_carlo_mean(std::span<const double>(one)), std::invalid_argument);
}

TEST_CASE("monte_carlo_mean of seeded uniforms recovers 1/2") {
    StreamRng rng(20240817u, 0);
    const auto est = monte_carlo_mean([&] { return rng.uniform_open(); }, 100000);
    CHECK(est.within(0.5));
    CHECK_THAT(est.standard_error, WithinAbs(std::sqrt(1.0 / 12.0 / 100000.0), 2e-4));
}

TEST_CASE("stream rng is deterministic per (seed, stream) and open-interval") {
    StreamRng a(7u, 3u), b(7u, 3u), c(7u, 4u);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.uniform_open();
        all_equal = all_equal && (x == b.uniform_open());
        any_diff = any_diff || (x != c.uniform_open());
        CHECK(x > 0.0);
        CHECK(x < 1.0);
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("riemann zeta reference values") {
    CHECK_THAT(riemann_zeta(2.0), WithinAbs(1.6449340668482264, 1e-12));
    CHECK_THAT(riemann_zeta(4.0), WithinAbs(1.082323233711138, 1e-12));
    CHECK_THROWS_AS(riemann_zeta(1.0), std::domain_error);
}

TEST_CASE("halton points live in the open unit interval") {
    for (std::uint64_t i = 1; i <= 200; ++i) {
        for (std::uint64_t base : {2u, 3u, 5u}) {
            const double h = halton(i, base);
            CHECK(h > 0.0);
            CHECK(h < 1.0);
        }
    }
}
