#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "test_util.hpp"
#include "vitalsig/dsp.hpp"
#include "vitalsig/errors.hpp"
#include "vitalsig/rppg.hpp"
#include "vitalsig/rng.hpp"
#include "vitalsig/synth.hpp"

using namespace vitalsig;
using testutil::error_code_of;

namespace {

RgbPatchTraceSet constant_traces(double r, double g, double b, double fps, double seconds) {
    RgbPatchTraceSet set;
    set.fps = fps;
    PatchTrace patch;
    patch.patch_id = 0;
    patch.samples.assign(static_cast<std::size_t>(seconds * fps), {r, g, b});
    set.patches.push_back(patch);
    return set;
}

BvpSignal sine_bvp(double freq_hz, double fps, double seconds, int n_patches = 1) {
    BvpSignal bvp;
    bvp.fps = fps;
    const std::size_t n = static_cast<std::size_t>(seconds * fps);
    for (int p = 0; p < n_patches; ++p) {
        std::vector<double> wave(n);
        for (std::size_t i = 0; i < n; ++i) {
            wave[i] = std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / fps);
        }
        bvp.patch_ids.push_back(p);
        bvp.waveforms.push_back(std::move(wave));
    }
    return bvp;
}

}  // namespace

TEST_CASE("pos: constant input gives identically zero BVP") {
    const BvpSignal bvp = pos_bvp(constant_traces(0.6, 0.5, 0.4, 30.0, 10.0));
    for (double v : bvp.waveforms[0]) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("pos: output is zero-mean and scale-invariant") {
    synth::SynthSpec spec;
    spec.seed = 11;
    spec.duration_s = 30.0;
    spec.noise_sigma = 0.003;
    spec.n_patches = 2;
    const synth::RppgSynth gen = synth::synth_rppg(spec);
    const BvpSignal bvp = pos_bvp(gen.traces);
    for (const auto& wave : bvp.waveforms) {
        CHECK(std::abs(dsp::mean(wave)) <= 1e-6);
    }

    RgbPatchTraceSet scaled = gen.traces;
    for (auto& patch : scaled.patches) {
        for (auto& s : patch.samples) {
            s[0] *= 2.0;
            s[1] *= 2.0;
            s[2] *= 2.0;
        }
    }
    const BvpSignal bvp2 = pos_bvp(scaled);
    for (std::size_t p = 0; p < bvp.waveforms.size(); ++p) {
        for (std::size_t i = 0; i < bvp.waveforms[p].size(); ++i) {
            CHECK(std::abs(bvp.waveforms[p][i] - bvp2.waveforms[p][i]) <= 1e-9);
        }
    }

    // per-channel scaling is also irrelevant
    RgbPatchTraceSet channel_scaled = gen.traces;
    for (auto& patch : channel_scaled.patches) {
        for (auto& s : patch.samples) {
            s[0] *= 1.7;
            s[1] *= 0.9;
            s[2] *= 3.2;
        }
    }
    const BvpSignal bvp3 = pos_bvp(channel_scaled);
    for (std::size_t p = 0; p < bvp.waveforms.size(); ++p) {
        for (std::size_t i = 0; i < bvp.waveforms[p].size(); ++i) {
            CHECK(std::abs(bvp.waveforms[p][i] - bvp3.waveforms[p][i]) <= 1e-9);
        }
    }
}

TEST_CASE("pos: 72 BPM synthetic signal peaks at 1.2 Hz") {
    synth::SynthSpec spec;
    spec.seed = 4;
    spec.duration_s = 60.0;
    spec.fps = 30.0;
    spec.hr = synth::HrProfile::constant(72.0);
    spec.noise_sigma = 0.0;
    spec.n_patches = 1;
    const synth::RppgSynth gen = synth::synth_rppg(spec);
    const BvpSignal bvp = pos_bvp(gen.traces);

    const std::size_t nfft = 8192;
    const auto spectrum = dsp::power_spectrum(bvp.waveforms[0], nfft);
    std::size_t peak = 1;
    for (std::size_t k = 1; k < spectrum.size(); ++k) {
        if (spectrum[k] > spectrum[peak]) peak = k;
    }
    const double peak_hz = static_cast<double>(peak) * 30.0 / static_cast<double>(nfft);
    CHECK(std::abs(peak_hz - 1.2) <= 30.0 / 8192.0 + 1.0 / 60.0);  // one bin of the 60 s transform
}

TEST_CASE("pos: errors") {
    CHECK(error_code_of([&] { pos_bvp(constant_traces(0.0, 0.5, 0.4, 30.0, 10.0)); }) ==
          ErrorCode::ConstantChannel);
    CHECK(error_code_of([&] { pos_bvp(constant_traces(0.6, 0.5, 0.4, 30.0, 1.0)); }) ==
          ErrorCode::TooShort);
    RgbPatchTraceSet set = constant_traces(0.6, 0.5, 0.4, 0.0, 1.0);
    CHECK(error_code_of([&] { pos_bvp(set); }) == ErrorCode::ZeroFps);
}

TEST_CASE("estimate_hr: pure 1.2 Hz tone reads 72 BPM everywhere") {
    const HrSeries hr = estimate_hr(sine_bvp(1.2, 30.0, 60.0));
    CHECK(hr.values.size() == 55);  // floor((60-6)/1) + 1
    for (std::size_t w = 0; w < hr.values.size(); ++w) {
        CHECK(hr.valid[w]);
        CHECK(std::abs(hr.values[w] - 72.0) <= 0.3);
    }
}

TEST_CASE("estimate_hr: white noise flags NoPulse on >= 90% of windows") {
    Rng rng(123);
    BvpSignal bvp;
    bvp.fps = 30.0;
    for (int p = 0; p < 3; ++p) {
        std::vector<double> wave(static_cast<std::size_t>(120.0 * 30.0));
        for (double& v : wave) v = rng.normal();
        bvp.patch_ids.push_back(p);
        bvp.waveforms.push_back(std::move(wave));
    }
    const HrSeries hr = estimate_hr(bvp);
    std::size_t flagged = 0;
    for (std::size_t w = 0; w < hr.values.size(); ++w) {
        if (!hr.valid[w]) ++flagged;
    }
    CHECK(static_cast<double>(flagged) >= 0.9 * static_cast<double>(hr.values.size()));
}

TEST_CASE("estimate_hr: zero modulation flags NoPulse downstream") {
    synth::SynthSpec spec;
    spec.seed = 88;
    spec.duration_s = 30.0;
    spec.fps = 30.0;
    spec.modulation_depth = 0.0;
    spec.noise_sigma = 0.5 / 255.0;
    spec.n_patches = 3;
    const synth::RppgSynth gen = synth::synth_rppg(spec);
    const HrSeries hr = estimate_hr(pos_bvp(gen.traces));
    std::size_t flagged = 0;
    for (std::size_t w = 0; w < hr.valid.size(); ++w) {
        if (!hr.valid[w]) ++flagged;
    }
    CHECK(static_cast<double>(flagged) >= 0.9 * static_cast<double>(hr.valid.size()));
}

TEST_CASE("estimate_hr: median across patches rejects one corrupted patch") {
    BvpSignal bvp = sine_bvp(1.2, 30.0, 30.0, 2);
    const BvpSignal corrupted = sine_bvp(140.0 / 60.0, 30.0, 30.0);
    bvp.patch_ids.push_back(2);
    bvp.waveforms.push_back(corrupted.waveforms[0]);
    const HrSeries hr = estimate_hr(bvp);
    for (std::size_t w = 0; w < hr.values.size(); ++w) {
        CHECK(std::abs(hr.values[w] - 72.0) <= 0.3);
    }
}

TEST_CASE("estimate_hr: shift by less than one hop moves estimates at most one bin") {
    const BvpSignal bvp = sine_bvp(1.3, 30.0, 40.0);
    BvpSignal shifted = bvp;
    const std::size_t shift = 29;  // one sample less than the hop
    std::vector<double>& wave = shifted.waveforms[0];
    std::rotate(wave.begin(), wave.begin() + static_cast<std::ptrdiff_t>(wave.size() - shift), wave.end());
    const HrSeries a = estimate_hr(bvp);
    const HrSeries b = estimate_hr(shifted);
    const double bin_bpm = 60.0 * 30.0 / 8192.0;
    for (std::size_t w = 1; w + 1 < a.values.size(); ++w) {
        CHECK(std::abs(a.values[w] - b.values[w]) <= bin_bpm + 1e-9);
    }
}

TEST_CASE("estimate_hr: TooShort") {
    CHECK(error_code_of([&] { estimate_hr(sine_bvp(1.2, 30.0, 3.0)); }) == ErrorCode::TooShort);
}

TEST_CASE("clean_hr: worked examples") {
    HrSeries hr;
    hr.values = {70.0, 100.0, 72.0};
    hr.times_s = {0.0, 1.0, 2.0};
    hr.valid = {true, true, true};
    const HrSeries cleaned = clean_hr(hr);
    CHECK(cleaned.values == std::vector<double>{70.0, 72.0});
    CHECK(cleaned.times_s == std::vector<double>{0.0, 2.0});

    hr.values = {70.0, 71.0, 72.0};
    hr.times_s = {0.0, 1.0, 2.0};
    const HrSeries untouched = clean_hr(hr);
    CHECK(untouched.values == std::vector<double>{70.0, 71.0, 72.0});

    // tie at median 85: the later point is removed
    hr.values = {70.0, 100.0};
    hr.times_s = {0.0, 1.0};
    hr.valid = {true, true};
    const HrSeries tie = clean_hr(hr);
    CHECK(tie.values == std::vector<double>{70.0});
}

TEST_CASE("clean_hr: idempotent, and output never jumps more than 25 BPM") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        HrSeries hr;
        const std::size_t n = 10 + rng.index(40);
        double level = 60.0 + 40.0 * rng.uniform();
        for (std::size_t i = 0; i < n; ++i) {
            level += rng.normal(0.0, 8.0);
            level = std::min(200.0, std::max(45.0, level));
            double value = level;
            if (rng.uniform() < 0.15) value += rng.uniform(-60.0, 60.0);  // artifacts
            hr.values.push_back(std::min(240.0, std::max(39.0, value)));
            hr.times_s.push_back(static_cast<double>(i));
            hr.valid.push_back(true);
        }
        HrSeries cleaned;
        try {
            cleaned = clean_hr(hr);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::AllRemoved);
            continue;
        }
        for (std::size_t i = 0; i + 1 < cleaned.values.size(); ++i) {
            CHECK(std::abs(cleaned.values[i + 1] - cleaned.values[i]) <= 25.0);
        }
        if (cleaned.values.size() >= 2) {
            const HrSeries twice = clean_hr(cleaned);
            CHECK(twice.values == cleaned.values);
            CHECK(twice.times_s == cleaned.times_s);
        }
    }
}

TEST_CASE("clean_hr: too few usable points") {
    HrSeries hr;
    hr.values = {70.0};
    hr.times_s = {0.0};
    hr.valid = {true};
    CHECK(error_code_of([&] { clean_hr(hr); }) == ErrorCode::AllRemoved);
}

TEST_CASE("quality_index: hand-computed example and edge cases") {
    HrSeries hr;
    hr.per_patch = {{60.0, 70.0, 80.0}};
    hr.values = {70.0};
    hr.valid = {true};
    const QualityScore score = quality_index(hr);
    CHECK(score.mae_over_hr == doctest::Approx((20.0 / 3.0) / 70.0).epsilon(1e-9));

    HrSeries identical;
    identical.per_patch = {{72.0, 72.0, 72.0}, {70.0, 70.0, 70.0}};
    CHECK(quality_index(identical).mae_over_hr == doctest::Approx(0.0));

    HrSeries missing;
    missing.values = {70.0};
    CHECK(error_code_of([&] { quality_index(missing); }) == ErrorCode::MissingPerPatch);
}

TEST_CASE("quality_index strictly increases with synthetic noise") {
    double previous = -1.0;
    // noise levels in 8-bit intensity units; traces are stored normalized
    for (double sigma : {0.0, 0.5, 1.0, 2.0}) {
        synth::SynthSpec spec;
        spec.seed = 77;
        spec.duration_s = 60.0;
        spec.fps = 30.0;
        spec.noise_sigma = sigma / 255.0;
        spec.n_patches = 3;
        const synth::RppgSynth gen = synth::synth_rppg(spec);
        const HrSeries hr = estimate_hr(pos_bvp(gen.traces));
        const double score = quality_index(hr).mae_over_hr;
        CHECK(score > previous);
        previous = score;
    }
}
