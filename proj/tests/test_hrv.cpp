#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "test_util.hpp"
#include "vitalsig/errors.hpp"
#include "vitalsig/hrv.hpp"
#include "vitalsig/rppg.hpp"
#include "vitalsig/synth.hpp"

using namespace vitalsig;
using testutil::error_code_of;

namespace {

NnSeries tachogram(double base_ms, double amp_ms, double freq_hz, double duration_s) {
    NnSeries nn;
    double t = 0.0;
    while (t < duration_s) {
        const double v = base_ms + amp_ms * std::sin(2.0 * std::numbers::pi * freq_hz * t);
        nn.intervals_ms.push_back(v);
        nn.timestamps_s.push_back(t);
        t += v / 1000.0;
    }
    return nn;
}

HrSeries series_of(std::vector<double> bpm) {
    HrSeries hr;
    for (std::size_t i = 0; i < bpm.size(); ++i) {
        hr.values.push_back(bpm[i]);
        hr.times_s.push_back(static_cast<double>(i));
        hr.valid.push_back(true);
    }
    return hr;
}

}  // namespace

TEST_CASE("hr_to_nn unit conversions and range filter") {
    const NnSeries nn = hr_to_nn(series_of({60.0, 75.0, 80.0}));
    CHECK(nn.intervals_ms == std::vector<double>{1000.0, 800.0, 750.0});

    // 300 BPM maps to 200 ms and is dropped
    const NnSeries filtered = hr_to_nn(series_of({60.0, 300.0, 80.0}));
    CHECK(filtered.intervals_ms == std::vector<double>{1000.0, 750.0});
    CHECK(filtered.timestamps_s == std::vector<double>{0.0, 2.0});

    CHECK(error_code_of([&] { hr_to_nn(series_of({300.0})); }) == ErrorCode::EmptySeries);
}

TEST_CASE("time domain closed forms") {
    NnSeries constant;
    constant.intervals_ms = {800.0, 800.0, 800.0};
    constant.timestamps_s = {0.0, 0.8, 1.6};
    const TimeDomainMetrics zero = time_domain(constant);
    CHECK(zero.sdnn_ms == doctest::Approx(0.0));
    CHECK(zero.rmssd_ms == doctest::Approx(0.0));
    CHECK(zero.pnn50_pct == doctest::Approx(0.0));

    NnSeries alternating;
    alternating.intervals_ms = {800.0, 850.0, 800.0, 850.0};
    alternating.timestamps_s = {0.0, 0.8, 1.65, 2.45};
    const TimeDomainMetrics alt = time_domain(alternating);
    CHECK(alt.sdnn_ms == doctest::Approx(28.8675).epsilon(1e-4));
    CHECK(alt.rmssd_ms == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(alt.pnn50_pct == doctest::Approx(0.0));  // |50| is not > 50

    NnSeries wide;
    wide.intervals_ms = {800.0, 860.0, 800.0};
    wide.timestamps_s = {0.0, 0.8, 1.66};
    CHECK(time_domain(wide).pnn50_pct == doctest::Approx(100.0));

    NnSeries two;
    two.intervals_ms = {800.0, 820.0};
    two.timestamps_s = {0.0, 0.8};
    CHECK(error_code_of([&] { time_domain(two); }) == ErrorCode::TooFewIntervals);
}

TEST_CASE("time domain invariances") {
    NnSeries base = tachogram(800.0, 30.0, 0.12, 90.0);
    const TimeDomainMetrics m0 = time_domain(base);

    NnSeries shifted = base;
    for (double& v : shifted.intervals_ms) v += 100.0;
    const TimeDomainMetrics m1 = time_domain(shifted);
    CHECK(m1.sdnn_ms == doctest::Approx(m0.sdnn_ms).epsilon(1e-9));
    CHECK(m1.rmssd_ms == doctest::Approx(m0.rmssd_ms).epsilon(1e-9));
    CHECK(m1.pnn50_pct == doctest::Approx(m0.pnn50_pct));

    NnSeries scaled = base;
    for (double& v : scaled.intervals_ms) v *= 2.0;
    const TimeDomainMetrics m2 = time_domain(scaled);
    CHECK(m2.sdnn_ms == doctest::Approx(2.0 * m0.sdnn_ms).epsilon(1e-9));
    CHECK(m2.rmssd_ms == doctest::Approx(2.0 * m0.rmssd_ms).epsilon(1e-9));
}

TEST_CASE("frequency domain separates LF and HF tachograms") {
    const FreqDomainMetrics lf_side = freq_domain(tachogram(800.0, 50.0, 0.1, 130.0));
    CHECK(lf_side.lf_ms2 / lf_side.hf_ms2 >= 10.0);
    CHECK(!lf_side.degenerate);

    const FreqDomainMetrics hf_side = freq_domain(tachogram(800.0, 50.0, 0.3, 130.0));
    CHECK(hf_side.hf_ms2 / hf_side.lf_ms2 >= 10.0);

    CHECK(lf_side.ln_lf_hf == doctest::Approx(lf_side.ln_lf - lf_side.ln_hf).epsilon(1e-12));
}

TEST_CASE("frequency domain: constant tachogram is degenerate") {
    NnSeries constant;
    double t = 0.0;
    while (t < 90.0) {
        constant.intervals_ms.push_back(800.0);
        constant.timestamps_s.push_back(t);
        t += 0.8;
    }
    const FreqDomainMetrics m = freq_domain(constant);
    CHECK(m.degenerate);
    CHECK(m.ln_lf == doctest::Approx(std::log(1e-12)));
    CHECK(m.ln_hf == doctest::Approx(std::log(1e-12)));

    NnSeries brief = tachogram(800.0, 20.0, 0.1, 30.0);
    CHECK(error_code_of([&] { freq_domain(brief); }) == ErrorCode::TooShort);
}

TEST_CASE("segment metrics on stationary and ramped synthetic HR") {
    synth::SynthSpec spec;
    spec.seed = 21;
    spec.duration_s = 300.0;
    spec.fps = 30.0;
    spec.hr = synth::HrProfile::constant(72.0);
    spec.noise_sigma = 0.0;
    spec.n_patches = 2;
    const synth::RppgSynth gen = synth::synth_rppg(spec);
    const HrSeries hr = clean_hr(estimate_hr(pos_bvp(gen.traces)));
    const HrvMetrics first = segment_metrics(hr, 0.0, 120.0);
    CHECK(std::abs(first.hr_mean - 72.0) <= 0.5);
    CHECK(first.sdnn <= 1.0);

    // plateau -> ramp -> plateau: the segment means differ by the ramp magnitude
    spec.hr.points = {{0.0, 65.0}, {120.0, 65.0}, {180.0, 90.0}, {300.0, 90.0}};
    const synth::RppgSynth ramp = synth::synth_rppg(spec);
    const HrSeries ramp_hr = clean_hr(estimate_hr(pos_bvp(ramp.traces)));
    const HrvMetrics a = segment_metrics(ramp_hr, 0.0, 120.0);
    const HrvMetrics b = segment_metrics(ramp_hr, 180.0, 300.0);
    CHECK(std::abs((b.hr_mean - a.hr_mean) - 25.0) <= 1.0);

    CHECK(a.ln_lf_hf == doctest::Approx(a.ln_lf - a.ln_hf).epsilon(1e-12));
    CHECK(error_code_of([&] { segment_metrics(ramp_hr, 500.0, 620.0); }) ==
          ErrorCode::SegmentOutOfRange);
}

TEST_CASE("hrv outlier limits flag but keep metrics") {
    NnSeries fast = tachogram(260.0, 5.0, 0.1, 90.0);  // ~230 BPM
    HrvMetrics m = metrics_from_nn(fast, HrvLimits{200.0, 300.0});
    CHECK(m.outlier);
    m = metrics_from_nn(fast, HrvLimits{240.0, 300.0});
    CHECK(!m.outlier);
}
