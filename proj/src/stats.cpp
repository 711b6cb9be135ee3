#include "vitalsig/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "vitalsig/errors.hpp"

namespace vitalsig::stats {

namespace {

void require_equal_lengths(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
}

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double two_sided_p_from_t(double t, double df) {
    const double tail = 1.0 - student_t_cdf(std::abs(t), df);
    return std::min(1.0, 2.0 * tail);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (df <= 0.0) throw Error(ErrorCode::InvalidArgument, "t CDF requires df > 0");
    if (t == 0.0) return 0.5;
    const double x = df / (df + t * t);
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

TestResult pearson(std::span<const double> x, std::span<const double> y) {
    require_equal_lengths(x, y);
    const std::size_t n = x.size();
    if (n < 3) throw Error(ErrorCode::TooFewSamples, "pearson needs n >= 3");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::ConstantInput, "pearson input has zero variance");

    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    const double df = static_cast<double>(n - 2);
    TestResult res;
    res.statistic = r;
    res.df = df;
    res.n = static_cast<int>(n);
    const double denom = 1.0 - r * r;
    if (denom <= 1e-15) {
        res.p_value = 0.0;
    } else {
        const double t = r * std::sqrt(df / denom);
        res.p_value = two_sided_p_from_t(t, df);
    }
    return res;
}

TestResult paired_ttest(std::span<const double> a, std::span<const double> b) {
    require_equal_lengths(a, b);
    const std::size_t n = a.size();
    if (n < 2) throw Error(ErrorCode::TooFewSamples, "paired t-test needs n >= 2");
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] - b[i];
    const double mean_d = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i] - mean_d;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) throw Error(ErrorCode::ZeroVariance, "paired differences are constant");

    TestResult res;
    res.df = static_cast<double>(n - 1);
    res.n = static_cast<int>(n);
    res.statistic = mean_d / (sd / std::sqrt(static_cast<double>(n)));
    res.p_value = two_sided_p_from_t(res.statistic, res.df);
    return res;
}

TestResult unpaired_ttest(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw Error(ErrorCode::TooFewSamples, "welch t-test needs n >= 2 per group");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    double va = 0.0, vb = 0.0;
    for (double v : a) va += (v - ma) * (v - ma);
    for (double v : b) vb += (v - mb) * (v - mb);
    va /= na - 1.0;
    vb /= nb - 1.0;
    const double se2 = va / na + vb / nb;
    if (se2 == 0.0) throw Error(ErrorCode::ZeroVariance, "both groups constant");

    TestResult res;
    res.statistic = (ma - mb) / std::sqrt(se2);
    res.df = se2 * se2 / (va * va / (na * na * (na - 1.0)) + vb * vb / (nb * nb * (nb - 1.0)));
    res.n = static_cast<int>(a.size() + b.size());
    res.p_value = two_sided_p_from_t(res.statistic, res.df);
    return res;
}

double mae(std::span<const double> a, std::span<const double> b) {
    require_equal_lengths(a, b);
    if (a.empty()) throw Error(ErrorCode::TooFewSamples, "mae of empty sequences");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

}  // namespace vitalsig::stats
