#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "test_util.hpp"
#include "vitalsig/errors.hpp"
#include "vitalsig/synth.hpp"

using namespace vitalsig;
using testutil::error_code_of;

TEST_CASE("same seed gives bit-identical traces") {
    synth::SynthSpec spec;
    spec.seed = 99;
    spec.duration_s = 20.0;
    spec.noise_sigma = 0.01;
    const synth::RppgSynth a = synth::synth_rppg(spec);
    const synth::RppgSynth b = synth::synth_rppg(spec);
    REQUIRE(a.traces.patches.size() == b.traces.patches.size());
    for (std::size_t p = 0; p < a.traces.patches.size(); ++p) {
        CHECK(a.traces.patches[p].samples == b.traces.patches[p].samples);
    }
    CHECK(a.truth.values == b.truth.values);
}

TEST_CASE("constant 72 BPM puts the G-channel peak at 1.2 Hz") {
    synth::SynthSpec spec;
    spec.seed = 1;
    spec.duration_s = 60.0;
    spec.fps = 30.0;
    spec.hr = synth::HrProfile::constant(72.0);
    spec.noise_sigma = 0.0;
    spec.n_patches = 2;
    const synth::RppgSynth gen = synth::synth_rppg(spec);
    for (const PatchTrace& patch : gen.traces.patches) {
        std::vector<double> g;
        for (const auto& s : patch.samples) g.push_back(s[1]);
        const double peak = oracles::dominant_frequency_hz(g, spec.fps, 0.5, 4.0);
        CHECK(peak == doctest::Approx(1.2).epsilon(0.01));
    }
}

TEST_CASE("modulation depth 0 gives constant channels plus noise") {
    synth::SynthSpec spec;
    spec.seed = 2;
    spec.duration_s = 20.0;
    spec.modulation_depth = 0.0;
    spec.noise_sigma = 0.0;
    spec.n_patches = 1;
    const synth::RppgSynth gen = synth::synth_rppg(spec);
    const auto& samples = gen.traces.patches[0].samples;
    for (const auto& s : samples) {
        CHECK(s[0] == samples[0][0]);
        CHECK(s[1] == samples[0][1]);
        CHECK(s[2] == samples[0][2]);
    }
}

TEST_CASE("ramp 60->90 ground truth endpoints") {
    synth::SynthSpec spec;
    spec.seed = 3;
    spec.duration_s = 120.0;
    spec.hr = synth::HrProfile::ramp(60.0, 90.0, 120.0);
    const synth::RppgSynth gen = synth::synth_rppg(spec);
    CHECK(gen.truth.values.front() == doctest::Approx(60.0));
    CHECK(gen.truth.values.back() == doctest::Approx(90.0));
}

TEST_CASE("invalid specs rejected") {
    synth::SynthSpec spec;
    spec.hr = synth::HrProfile::constant(20.0);  // below 39 BPM
    CHECK(error_code_of([&] { synth::synth_rppg(spec); }) == ErrorCode::InvalidSpec);
    spec.hr = synth::HrProfile::constant(72.0);
    spec.noise_sigma = -1.0;
    CHECK(error_code_of([&] { synth::synth_rppg(spec); }) == ErrorCode::InvalidSpec);
}

TEST_CASE("synth_ecg: rr=[800]x10 gives 10 peaks 0.8 s apart") {
    const std::vector<double> rr(10, 800.0);
    const synth::EcgSynth gen = synth::synth_ecg(rr, 250.0);
    REQUIRE(gen.r_peak_times.size() == 10);
    for (std::size_t i = 0; i + 1 < gen.r_peak_times.size(); ++i) {
        CHECK(gen.r_peak_times[i + 1] - gen.r_peak_times[i] == doctest::Approx(0.8).epsilon(1e-12));
    }
}

TEST_CASE("synth_ecg: alternating RR alternate exactly") {
    std::vector<double> rr;
    for (int i = 0; i < 12; ++i) rr.push_back(i % 2 == 0 ? 750.0 : 850.0);
    const synth::EcgSynth gen = synth::synth_ecg(rr, 250.0);
    for (std::size_t i = 0; i + 1 < gen.r_peak_times.size(); ++i) {
        const double diff = (gen.r_peak_times[i + 1] - gen.r_peak_times[i]) * 1000.0;
        CHECK(diff == doctest::Approx(i % 2 == 0 ? 850.0 : 750.0).epsilon(1e-9));
    }
    CHECK(error_code_of([&] { synth::synth_ecg(std::vector<double>{100.0}, 250.0); }) ==
          ErrorCode::InvalidRr);
}

TEST_CASE("synth_thermal: step deltas and TooShort") {
    synth::ThermalSynthSpec spec;
    spec.fps = 10.0;
    spec.duration_s = 240.0;
    spec.baselines_c = {{58, 34.0}, {30, 33.5}};
    spec.step_delta_c = {{58, 0.0}, {30, 0.5}};
    const ThermalTraceSet set = synth::synth_thermal(spec);
    CHECK(set.rois.size() == 2);
    CHECK(set.duration_s() == doctest::Approx(240.0));

    spec.duration_s = 100.0;
    CHECK(error_code_of([&] { synth::synth_thermal(spec); }) == ErrorCode::TooShort);
}

TEST_CASE("synth_dataset shapes and separation sanity") {
    const synth::SynthDataset ds = synth::synth_dataset(50, 10, 6.0, 7, {2, 5});
    CHECK(ds.data.vectors.size() == 100);
    CHECK(ds.data.feature_names.size() == 10);
    CHECK(ds.informative == std::vector<int>{2, 5});

    // informative columns separate, noise columns do not
    double m2_0 = 0.0, m2_1 = 0.0, m7_0 = 0.0, m7_1 = 0.0;
    for (const auto& v : ds.data.vectors) {
        if (v.label == 0) {
            m2_0 += v.features[2];
            m7_0 += v.features[7];
        } else {
            m2_1 += v.features[2];
            m7_1 += v.features[7];
        }
    }
    CHECK((m2_1 - m2_0) / 50.0 > 4.0);
    CHECK(std::abs(m7_1 - m7_0) / 50.0 < 1.0);

    CHECK(error_code_of([&] { synth::synth_dataset(10, 1, 1.0, 0); }) == ErrorCode::InvalidSpec);
}
