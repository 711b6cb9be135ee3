#pragma once

#include <span>

namespace vitalsig::stats {

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double df = 0.0;
    int n = 0;
};

/// Pearson correlation with a two-sided p-value from the Student-t
/// distribution with n-2 degrees of freedom.
TestResult pearson(std::span<const double> x, std::span<const double> y);

/// Two-sided paired t-test on a - b, n-1 degrees of freedom.
TestResult paired_ttest(std::span<const double> a, std::span<const double> b);

/// Welch two-sample t-test (unpaired fallback).
TestResult unpaired_ttest(std::span<const double> a, std::span<const double> b);

double mae(std::span<const double> a, std::span<const double> b);

/// Student-t CDF via the regularized incomplete beta function.
/// Satisfies cdf(0) = 0.5 and cdf(-t) = 1 - cdf(t) exactly.
double student_t_cdf(double t, double df);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

}  // namespace vitalsig::stats
