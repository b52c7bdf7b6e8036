#include <doctest.h>

#include <cmath>
#include <limits>

#include "msond/analysis.hpp"
#include "msond/error.hpp"
#include "oracles.hpp"

using namespace msond;

TEST_CASE("shape parameters")
{
    CHECK(shape_params(2, 1).stage1 == 2);
    CHECK(shape_params(2, 1).stage2 == 4);
    CHECK(shape_params(3, 1).stage2 == 7);
    CHECK(shape_params(2, 2).stage2 == 9);
    CHECK(shape_params(2, 2).stage1 == 5);
}

TEST_CASE("cdf_metric")
{
    CHECK(cdf_metric(0.0, 3) == 0.0);
    CHECK(cdf_metric(std::numeric_limits<double>::infinity(), 3) == 1.0);
    CHECK(cdf_metric(1e4, 3) == doctest::Approx(1.0));
    CHECK(cdf_metric(1.0, 2) == doctest::Approx(1.0 - 2.0 / std::exp(1.0)).epsilon(1e-12));
    CHECK(cdf_metric(2.0, 2) == doctest::Approx(1.0 - 3.0 * std::exp(-2.0)).epsilon(1e-12));

    SUBCASE("matches the Erlang closed form on both sides of the series split")
    {
        for (std::size_t a = 1; a <= 14; ++a) {
            for (double l = 0.05; l < 40.0; l *= 1.3) {
                CHECK(std::abs(cdf_metric(l, a) - oracle::erlang_cdf(l, a)) < 1e-12);
            }
        }
    }
    SUBCASE("monotone and bounded")
    {
        double previous = 0.0;
        for (double l = 0.0; l < 30.0; l += 0.01) {
            const double f = cdf_metric(l, 7);
            CHECK(f >= previous);
            CHECK(f <= 1.0);
            previous = f;
        }
    }
    SUBCASE("chi-square convention halves the argument")
    {
        CHECK(cdf_metric_chi2(3.0, 4) == doctest::Approx(cdf_metric(1.5, 4)));
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(cdf_metric(-1.0, 2), InvalidArgument);
        CHECK_THROWS_AS(cdf_metric(1.0, 0), InvalidArgument);
        CHECK_THROWS_AS(cdf_metric(std::nan(""), 2), InvalidArgument);
    }
}

TEST_CASE("cdf_lower_bound")
{
    SUBCASE("a = 2, l = 2")
    {
        const CdfLowerBound b = cdf_lower_bound(2.0, 2);
        CHECK(b.bound == doctest::Approx(std::exp(-1.0) / 8.0 * 4.0));
        CHECK(b.bound == doctest::Approx(0.184).epsilon(0.002));
        CHECK(b.bound <= cdf_metric(2.0, 2));
        CHECK(b.variant_constant == doctest::Approx(4.0 / std::exp(1.0)));
        CHECK(b.variant_bound > cdf_metric(2.0, 2));
    }
    SUBCASE("holds on the grid")
    {
        for (std::size_t a = 2; a <= 12; ++a) {
            for (int i = 1; i <= 200; ++i) {
                const double l = 0.01 * i;
                CHECK(cdf_lower_bound(l, a).bound <= cdf_metric(l, a));
            }
            CHECK(cdf_lower_bound(1e-6, a).bound < 1e-12);
        }
    }
    SUBCASE("domain")
    {
        CHECK_THROWS_AS(cdf_lower_bound(0.0, 2), InvalidArgument);
        CHECK_THROWS_AS(cdf_lower_bound(2.5, 2), InvalidArgument);
    }
}

TEST_CASE("inverse_cdf")
{
    for (std::size_t a : {1, 2, 4, 9}) {
        CHECK(inverse_cdf(cdf_metric(1.0, a), a) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(inverse_cdf(0.1, a) < inverse_cdf(0.9, a));
    }
    CHECK(inverse_cdf(0.5, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    CHECK(inverse_cdf(1e-9, 4) > 0.0);
    CHECK_THROWS_AS(inverse_cdf(0.0, 2), InvalidArgument);
    CHECK_THROWS_AS(inverse_cdf(1.0, 2), InvalidArgument);
}

TEST_CASE("prob_exactly_sk")
{
    CHECK(prob_exactly_sk(50, 2, 1, 1e3) == 0.0);
    const double f = cdf_metric(0.7, 4);
    CHECK(prob_exactly_sk(2, 2, 1, 0.7) == doctest::Approx(f * f));
    CHECK_THROWS_AS(prob_exactly_sk(1, 2, 1, 0.7), InvalidArgument);

    SUBCASE("maximized at the SK/N quantile")
    {
        const double eps_hat = inverse_cdf(2.0 / 50.0, 4);
        const double peak = prob_exactly_sk(50, 2, 1, eps_hat);
        for (double r = 0.5; r <= 2.0; r += 0.01) {
            CHECK(prob_exactly_sk(50, 2, 1, eps_hat * r) <= peak * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("inverse_til_bound")
{
    for (auto [k, s, a] : {std::tuple{2, 1, 4}, std::tuple{3, 1, 7}, std::tuple{2, 2, 9}}) {
        const double ratio = inverse_til_bound(400, k, s) / inverse_til_bound(200, k, s);
        CHECK(ratio == doctest::Approx(std::pow(2.0, 1.0 / a)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(inverse_til_bound(1, 2, 1), InvalidArgument);
}

TEST_CASE("required_relays")
{
    CHECK(required_relays(5.0, 2, 1, Mode::alternate).count == 625);
    CHECK(required_relays(5.0, 2, 1, Mode::non_alternate).count == 25);
    CHECK(required_relays(1.0, 3, 2, Mode::alternate).count == 1);
    for (double snr : {1.5, 2.0, 3.7}) {
        CHECK(required_relays(snr, 2, 2, Mode::non_alternate).count <= required_relays(snr, 2, 2, Mode::alternate).count);
    }
    CHECK(required_relays(1e6, 3, 3, Mode::alternate).saturated);
    CHECK_THROWS_AS(required_relays(0.0, 2, 1, Mode::alternate), InvalidArgument);
}

TEST_CASE("TIL order statistic")
{
    MetricTable til(6, 2, 1);
    for (std::size_t n = 0; n < 6; ++n) {
        til(n, 0, 0) = 0.1 * n;
        til(n, 1, 0) = 1.0 + 0.1 * n;
    }
    RelaySet pi2(2, 1);
    pi2.assign(0, 0, 3);
    pi2.assign(1, 0, 5);
    CHECK(til_order_statistic(pi2, til) == doctest::Approx(1.5));
    CHECK(mean_selected_til(pi2, til) == doctest::Approx((0.3 + 1.5) / 2.0));

    RelaySet single(1, 1);
    single.assign(0, 0, 2);
    MetricTable one(6, 1, 1);
    one(2, 0, 0) = 0.42;
    CHECK(til_order_statistic(single, one) == 0.42);
}

TEST_CASE("fit_decay")
{
    std::vector<std::pair<double, double>> points;
    for (double n : {25.0, 50.0, 100.0, 200.0, 400.0, 800.0}) {
        points.emplace_back(n, 3.0 * std::pow(n, -0.25));
    }
    const DecayFit fit = fit_decay(points);
    CHECK(std::abs(fit.slope + 0.25) < 1e-9);
    CHECK(fit.r2 == doctest::Approx(1.0));

    points.resize(3);
    CHECK_THROWS_AS(fit_decay(points), InvalidArgument);
    const std::vector<std::pair<double, double>> repeated{{10, 1}, {10, 2}, {20, 1}, {30, 1}};
    CHECK_THROWS_AS(fit_decay(repeated), InvalidArgument);
}

TEST_CASE("estimate_dof")
{
    std::vector<std::pair<double, double>> curve;
    for (int db = 0; db <= 40; db += 5) {
        const double snr = db_to_linear(db);
        curve.emplace_back(snr, 2.0 * std::log2(snr));
    }
    CHECK(estimate_dof(curve) == doctest::Approx(2.0).epsilon(1e-6));
    curve.resize(4);  // 0..15 dB
    CHECK_THROWS_AS(estimate_dof(curve), InvalidArgument);
}

TEST_CASE("ks_distance")
{
    const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
    CHECK(ks_distance({0.5}, uniform) == doctest::Approx(0.5));
    CHECK(ks_distance({0.125, 0.375, 0.625, 0.875}, uniform) == doctest::Approx(0.125));
    CHECK_THROWS_AS(ks_distance({}, uniform), InvalidArgument);
}
