#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "vitalsig/ml.hpp"
#include "vitalsig/rppg.hpp"
#include "vitalsig/traces.hpp"

namespace vitalsig::synth {

/// Heart-rate profile in BPM over [0, duration]: piecewise-linear control
/// points plus an optional sinusoidal modulation.
struct HrProfile {
    std::vector<std::pair<double, double>> points;  // (time_s, bpm), sorted
    double mod_amp_bpm = 0.0;
    double mod_freq_hz = 0.0;

    static HrProfile constant(double bpm);
    static HrProfile ramp(double bpm_start, double bpm_end, double duration_s);
    static HrProfile step(double bpm_first, double bpm_second, double switch_s);

    double bpm_at(double t) const;
};

struct SynthSpec {
    std::uint64_t seed = 0;
    double duration_s = 60.0;
    double fps = 30.0;
    HrProfile hr = HrProfile::constant(72.0);
    double modulation_depth = 0.02;  // fractional pulse amplitude on G
    double noise_sigma = 0.0;        // additive white noise, intensity units
    int n_patches = 3;
};

struct RppgSynth {
    RgbPatchTraceSet traces;
    HrSeries truth;  // instantaneous BPM at the hop grid (1 s)
};

/// Pulse rides on G with R and B at 0.5x and 0.3x amplitude around random
/// per-patch baselines; phase integrates the profile so ramps sweep cleanly.
RppgSynth synth_rppg(const SynthSpec& spec);

struct EcgSynth {
    EcgTrace trace;
    std::vector<double> r_peak_times;
};

/// Gaussian R spikes (20 ms wide) at cumulative RR instants on a flat line.
EcgSynth synth_ecg(std::span<const double> rr_ms, double fs);

struct ThermalSynthSpec {
    std::map<int, double> baselines_c;
    std::map<int, double> step_delta_c;  // applied from duration/2 on
    double fps = 10.0;
    double duration_s = 300.0;
    double drift_c_per_s = 0.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

ThermalTraceSet synth_thermal(const ThermalSynthSpec& spec);

struct SynthDataset {
    ml::Dataset data;
    std::vector<int> informative;  // feature indices carrying signal
    double separation = 0.0;
};

/// Two Gaussian classes separated by `separation` sigma on the informative
/// features; everything else is pure noise.
SynthDataset synth_dataset(int n_per_class, int n_features, double separation, std::uint64_t seed,
                           const std::vector<int>& informative = {0, 1});

/// Writes a complete synthetic session corpus (RGB + thermal + ECG traces,
/// manifest, ground-truth sidecar per session) and returns manifest paths.
std::vector<std::filesystem::path> synth_corpus(const std::filesystem::path& out_dir,
                                                int n_sessions, std::uint64_t seed);

}  // namespace vitalsig::synth
