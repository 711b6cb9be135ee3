#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"
#include "vitalsig/ecgref.hpp"
#include "vitalsig/errors.hpp"
#include "vitalsig/rng.hpp"
#include "vitalsig/synth.hpp"

using namespace vitalsig;
using testutil::error_code_of;

TEST_CASE("qrs: 20 regular beats recovered within one sample") {
    const std::vector<double> rr(20, 800.0);
    const synth::EcgSynth gen = synth::synth_ecg(rr, 250.0);
    const std::vector<double> peaks = detect_r_peak_times(gen.trace);
    REQUIRE(peaks.size() == 20);
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        CHECK(std::abs(peaks[i] - gen.r_peak_times[i]) <= 1.0 / 250.0 + 1e-9);
    }
}

TEST_CASE("qrs: alternating RR recovered within 4 ms") {
    std::vector<double> rr;
    for (int i = 0; i < 24; ++i) rr.push_back(i % 2 == 0 ? 750.0 : 850.0);
    const synth::EcgSynth gen = synth::synth_ecg(rr, 250.0);
    const NnSeries nn = detect_r_peaks(gen.trace);
    REQUIRE(nn.intervals_ms.size() == 23);
    for (std::size_t i = 0; i < nn.intervals_ms.size(); ++i) {
        const double expected = i % 2 == 0 ? 850.0 : 750.0;
        CHECK(std::abs(nn.intervals_ms[i] - expected) <= 4.0);
    }
}

TEST_CASE("qrs: flat line and bad sampling") {
    EcgTrace flat;
    flat.fs = 250.0;
    flat.samples.assign(5000, 0.0);
    CHECK(error_code_of([&] { detect_r_peak_times(flat); }) == ErrorCode::NoBeatsDetected);

    EcgTrace slow;
    slow.fs = 100.0;
    slow.samples.assign(2000, 0.0);
    CHECK(error_code_of([&] { detect_r_peak_times(slow); }) == ErrorCode::SamplingTooLow);

    EcgTrace brief;
    brief.fs = 250.0;
    brief.samples.assign(500, 0.0);
    CHECK(error_code_of([&] { detect_r_peak_times(brief); }) == ErrorCode::TooShort);
}

TEST_CASE("qrs: F1 >= 0.99 across random RR in [600, 1200] ms") {
    Rng rng(2024);
    std::vector<double> rr(100);
    for (double& v : rr) v = rng.uniform(600.0, 1200.0);
    const synth::EcgSynth gen = synth::synth_ecg(rr, 250.0);
    const std::vector<double> peaks = detect_r_peak_times(gen.trace);
    const oracles::MatchStats stats = oracles::match_peaks(gen.r_peak_times, peaks, 0.05);
    CHECK(stats.f1() >= 0.99);
    CHECK(stats.max_error_s <= 0.010);
}

namespace {

HrvMetrics metrics_with_hr(double hr) {
    HrvMetrics m;
    m.hr_mean = hr;
    m.sdnn = hr * 0.5;
    m.rmssd = hr * 0.3;
    m.pnn50 = hr * 0.1;
    m.ln_hf = hr * 0.01;
    m.ln_lf = hr * 0.02;
    m.ln_lf_hf = m.ln_lf - m.ln_hf;
    return m;
}

}  // namespace

TEST_CASE("agreement: identical metrics correlate perfectly at every threshold") {
    std::vector<MetricPair> pairs;
    Rng rng(5);
    for (int i = 0; i < 10; ++i) {
        const HrvMetrics m = metrics_with_hr(60.0 + 3.0 * i + rng.uniform());
        pairs.push_back(MetricPair{"s" + std::to_string(i), 0.1 + 0.02 * i, m, m, {}});
    }
    const std::vector<AgreementRow> rows = agreement_sweep(pairs, {0.2, 0.25, 0.3});
    for (const AgreementRow& row : rows) {
        for (double r : row.r) CHECK(r == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(rows[0].n <= rows[1].n);
    CHECK(rows[1].n <= rows[2].n);
}

TEST_CASE("agreement: r falls as the quality threshold loosens") {
    Rng rng(9);
    std::vector<MetricPair> pairs;
    for (int i = 0; i < 80; ++i) {
        const double quality = rng.uniform(0.28, 0.5);
        const double true_hr = rng.uniform(55.0, 95.0);
        MetricPair pair;
        pair.session_id = "s" + std::to_string(i);
        pair.quality = quality;
        pair.ecg = metrics_with_hr(true_hr);
        pair.rppg = metrics_with_hr(true_hr + rng.normal(0.0, 40.0 * quality));
        pairs.push_back(pair);
    }
    const std::vector<AgreementRow> rows = agreement_sweep(pairs, {0.30, 0.48});
    CHECK(rows[0].r[0] > rows[1].r[0]);  // HR correlation is higher at the stricter threshold

    // retained n grows with the threshold
    CHECK(rows[0].n < rows[1].n);
}

TEST_CASE("agreement: threshold below every quality is an error") {
    std::vector<MetricPair> pairs;
    for (int i = 0; i < 5; ++i) {
        const HrvMetrics m = metrics_with_hr(60.0 + i);
        pairs.push_back(MetricPair{"s", 0.4, m, m, {}});
    }
    CHECK(error_code_of([&] { agreement_sweep(pairs, {0.1}); }) == ErrorCode::InsufficientPairs);
}
