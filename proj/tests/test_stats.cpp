#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"
#include "vitalsig/errors.hpp"
#include "vitalsig/stats.hpp"

using namespace vitalsig;
using testutil::error_code_of;

TEST_CASE("t CDF is symmetric and anchored at 0.5") {
    for (double df : {1.0, 5.0, 15.0, 30.0, 100.0}) {
        CHECK(stats::student_t_cdf(0.0, df) == doctest::Approx(0.5).epsilon(1e-15));
        for (double t : {0.2, 0.8, 1.5, 2.3, 4.0, 7.5}) {
            const double hi = stats::student_t_cdf(t, df);
            const double lo = stats::student_t_cdf(-t, df);
            CHECK(hi + lo == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("t CDF matches the quadrature oracle to 1e-6") {
    for (double df : {5.0, 15.0, 30.0, 100.0}) {
        for (double t = -4.0; t <= 4.0; t += 0.37) {
            const double got = stats::student_t_cdf(t, df);
            const double want = oracles::t_cdf_reference(t, df);
            CHECK(std::abs(got - want) <= 1e-6);
        }
    }
}

TEST_CASE("pearson identities") {
    const std::vector<double> x = {1.0, 2.5, 3.0, 4.2, 5.9, 6.1};
    std::vector<double> y = x;
    auto res = stats::pearson(x, y);
    CHECK(res.statistic == doctest::Approx(1.0));
    CHECK(res.p_value == doctest::Approx(0.0).epsilon(1e-12));

    for (double& v : y) v = -v;
    res = stats::pearson(x, y);
    CHECK(res.statistic == doctest::Approx(-1.0));

    CHECK(res.df == doctest::Approx(4.0));
    CHECK(res.n == 6);
}

TEST_CASE("pearson p-value for r=0.5, n=20 against the oracle") {
    // Any sample with r = 0.5 has the same p; value frozen from the
    // quadrature oracle: t = 0.5*sqrt(18/0.75) = 2.449490, df = 18.
    const double t = 0.5 * std::sqrt(18.0 / 0.75);
    const double p_oracle = 2.0 * (1.0 - oracles::t_cdf_reference(t, 18.0));
    CHECK(p_oracle == doctest::Approx(0.024770).epsilon(1e-4));

    // build a length-20 sample with exactly r = 0.5
    std::vector<double> x(20), y(20);
    for (std::size_t i = 0; i < 20; ++i) {
        const double u = std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / 20.0);
        const double v = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 20.0);
        x[i] = u;
        y[i] = 0.5 * u + std::sqrt(0.75) * v;  // corr(u, v) = 0 by orthogonality
    }
    const auto res = stats::pearson(x, y);
    CHECK(res.statistic == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.p_value == doctest::Approx(p_oracle).epsilon(1e-6));
}

TEST_CASE("pearson invariant under positive affine transforms") {
    const std::vector<double> x = {0.3, 1.7, 2.2, 4.8, 5.0, 9.1, 11.0};
    const std::vector<double> y = {2.0, 1.1, 3.9, 4.2, 6.6, 5.8, 9.9};
    const double base = stats::pearson(x, y).statistic;
    std::vector<double> xs(x.size()), ys(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        xs[i] = 3.5 * x[i] + 11.0;
        ys[i] = 0.25 * y[i] - 4.0;
    }
    CHECK(std::abs(stats::pearson(xs, ys).statistic - base) <= 1e-9);
}

TEST_CASE("pearson error paths") {
    const std::vector<double> constant = {2.0, 2.0, 2.0, 2.0};
    const std::vector<double> varying = {1.0, 2.0, 3.0, 4.0};
    CHECK(error_code_of([&] { stats::pearson(constant, varying); }) == ErrorCode::ConstantInput);
    const std::vector<double> shorter = {1.0, 2.0, 3.0};
    CHECK(error_code_of([&] { stats::pearson(shorter, varying); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("paired t-test identities and frozen value") {
    const std::vector<double> a = {1.0, 2.0, 3.0, 4.0, 2.5};
    CHECK(error_code_of([&] { stats::paired_ttest(a, a); }) == ErrorCode::ZeroVariance);

    std::vector<double> b = a;
    for (double& v : b) v += 1.0;  // constant shift: zero variance of differences
    CHECK(error_code_of([&] { stats::paired_ttest(b, a); }) == ErrorCode::ZeroVariance);

    // d with mean 1, sd 1, n = 16 -> t = 4; p frozen from the oracle
    std::vector<double> d(16, 1.0);
    // set half to 1 + s, half to 1 - s with s chosen for sd exactly 1
    const double s = std::sqrt(15.0 / 16.0);
    for (std::size_t i = 0; i < 8; ++i) {
        d[i] = 1.0 + s;
        d[i + 8] = 1.0 - s;
    }
    const std::vector<double> zeros(16, 0.0);
    const auto res = stats::paired_ttest(d, zeros);
    CHECK(res.statistic == doctest::Approx(4.0).epsilon(1e-12));
    const double p_oracle = 2.0 * (1.0 - oracles::t_cdf_reference(4.0, 15.0));
    CHECK(res.p_value == doctest::Approx(p_oracle).epsilon(1e-6));
    CHECK(p_oracle == doctest::Approx(0.001159).epsilon(1e-3));
    CHECK(res.df == doctest::Approx(15.0));
}

TEST_CASE("mae") {
    const std::vector<double> a = {60.0, 70.0, 80.0};
    const std::vector<double> b = {70.0, 70.0, 70.0};
    CHECK(stats::mae(a, a) == doctest::Approx(0.0));
    CHECK(stats::mae(a, b) == doctest::Approx(20.0 / 3.0).epsilon(1e-12));
    CHECK(stats::mae(a, b) == doctest::Approx(stats::mae(b, a)));
    const std::vector<double> shorter = {1.0};
    CHECK(error_code_of([&] { stats::mae(a, shorter); }) == ErrorCode::LengthMismatch);
}
