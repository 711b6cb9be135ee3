#include "vitalsig/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>

#include <json.hpp>

#include "vitalsig/dataio.hpp"
#include "vitalsig/errors.hpp"
#include "vitalsig/rng.hpp"

namespace vitalsig::synth {

namespace {

constexpr double kBpmLo = 39.0;
constexpr double kBpmHi = 240.0;
constexpr double kRrLoMs = 250.0;
constexpr double kRrHiMs = 2000.0;
constexpr double kEcgSpikeSigmaS = 0.010;  // 20 ms wide spike

// pulse amplitude ratios for G : R : B
constexpr double kAmpG = 1.0;
constexpr double kAmpR = 0.5;
constexpr double kAmpB = 0.3;

}  // namespace

HrProfile HrProfile::constant(double bpm) {
    HrProfile p;
    p.points = {{0.0, bpm}};
    return p;
}

HrProfile HrProfile::ramp(double bpm_start, double bpm_end, double duration_s) {
    HrProfile p;
    p.points = {{0.0, bpm_start}, {duration_s, bpm_end}};
    return p;
}

HrProfile HrProfile::step(double bpm_first, double bpm_second, double switch_s) {
    HrProfile p;
    p.points = {{0.0, bpm_first}, {switch_s, bpm_first}, {switch_s, bpm_second}};
    return p;
}

double HrProfile::bpm_at(double t) const {
    double base;
    if (points.size() == 1 || t <= points.front().first) {
        base = points.front().second;
    } else if (t >= points.back().first) {
        base = points.back().second;
    } else {
        base = points.back().second;
        for (std::size_t i = 0; i + 1 < points.size(); ++i) {
            if (t >= points[i].first && t <= points[i + 1].first) {
                const double span = points[i + 1].first - points[i].first;
                const double frac = span > 0.0 ? (t - points[i].first) / span : 1.0;
                base = points[i].second + frac * (points[i + 1].second - points[i].second);
                break;
            }
        }
    }
    if (mod_amp_bpm != 0.0) {
        base += mod_amp_bpm * std::sin(2.0 * std::numbers::pi * mod_freq_hz * t);
    }
    return base;
}

RppgSynth synth_rppg(const SynthSpec& spec) {
    if (spec.duration_s <= 0.0 || spec.fps <= 0.0 || spec.n_patches < 1 || spec.noise_sigma < 0.0 ||
        spec.modulation_depth < 0.0 || spec.modulation_depth >= 1.0 || spec.hr.points.empty()) {
        throw Error(ErrorCode::InvalidSpec, "bad synthesis parameters");
    }
    const std::size_t n = static_cast<std::size_t>(std::lround(spec.duration_s * spec.fps));
    const double dt = 1.0 / spec.fps;
    for (std::size_t i = 0; i < n; ++i) {
        const double bpm = spec.hr.bpm_at(static_cast<double>(i) * dt);
        if (bpm < kBpmLo || bpm > kBpmHi) {
            throw Error(ErrorCode::InvalidSpec, "hr profile leaves the 39-240 BPM range");
        }
    }

    // pulse phase integrates the instantaneous frequency
    std::vector<double> phase(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double f0 = spec.hr.bpm_at(static_cast<double>(i - 1) * dt) / 60.0;
        const double f1 = spec.hr.bpm_at(static_cast<double>(i) * dt) / 60.0;
        phase[i] = phase[i - 1] + std::numbers::pi * (f0 + f1) * dt;  // 2*pi * trapezoid
    }

    Rng rng(spec.seed);
    RppgSynth out;
    out.traces.fps = spec.fps;
    for (int p = 0; p < spec.n_patches; ++p) {
        PatchTrace patch;
        patch.patch_id = p;
        patch.samples.resize(n);
        const double base_r = rng.uniform(0.55, 0.75);
        const double base_g = rng.uniform(0.45, 0.65);
        const double base_b = rng.uniform(0.35, 0.55);
        for (std::size_t i = 0; i < n; ++i) {
            const double pulse = std::cos(phase[i]);
            patch.samples[i][0] =
                base_r * (1.0 + kAmpR * spec.modulation_depth * pulse) + rng.normal(0.0, spec.noise_sigma);
            patch.samples[i][1] =
                base_g * (1.0 + kAmpG * spec.modulation_depth * pulse) + rng.normal(0.0, spec.noise_sigma);
            patch.samples[i][2] =
                base_b * (1.0 + kAmpB * spec.modulation_depth * pulse) + rng.normal(0.0, spec.noise_sigma);
        }
        out.traces.patches.push_back(std::move(patch));
    }

    out.truth.window_s = 6.0;
    out.truth.hop_s = 1.0;
    for (double t = 0.0; t <= spec.duration_s + 1e-9; t += out.truth.hop_s) {
        out.truth.values.push_back(spec.hr.bpm_at(t));
        out.truth.times_s.push_back(t);
        out.truth.valid.push_back(true);
    }
    return out;
}

EcgSynth synth_ecg(std::span<const double> rr_ms, double fs) {
    if (rr_ms.empty() || fs <= 0.0) throw Error(ErrorCode::InvalidRr, "empty RR sequence");
    for (double rr : rr_ms) {
        if (rr < kRrLoMs || rr > kRrHiMs) {
            throw Error(ErrorCode::InvalidRr, "RR " + std::to_string(rr) + " ms outside 250-2000");
        }
    }

    EcgSynth out;
    double t = 0.0;
    for (double rr : rr_ms) {
        t += rr / 1000.0;
        out.r_peak_times.push_back(t);
    }
    const double duration = out.r_peak_times.back() + 0.5;
    const std::size_t n = static_cast<std::size_t>(std::lround(duration * fs));
    out.trace.fs = fs;
    out.trace.samples.assign(n, 0.0);

    const double reach = 5.0 * kEcgSpikeSigmaS;
    for (double peak : out.r_peak_times) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>((peak - reach) * fs));
        const std::ptrdiff_t hi =
            std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1,
                                     static_cast<std::ptrdiff_t>((peak + reach) * fs) + 1);
        for (std::ptrdiff_t i = lo; i <= hi; ++i) {
            const double dt = static_cast<double>(i) / fs - peak;
            out.trace.samples[static_cast<std::size_t>(i)] +=
                std::exp(-dt * dt / (2.0 * kEcgSpikeSigmaS * kEcgSpikeSigmaS));
        }
    }
    return out;
}

ThermalTraceSet synth_thermal(const ThermalSynthSpec& spec) {
    if (spec.duration_s < 240.0) {
        throw Error(ErrorCode::TooShort, "thermal synthesis needs >= 240 s for both segments");
    }
    if (spec.fps <= 0.0 || spec.baselines_c.empty()) {
        throw Error(ErrorCode::InvalidSpec, "bad thermal synthesis parameters");
    }
    const std::size_t n = static_cast<std::size_t>(std::lround(spec.duration_s * spec.fps));
    const double switch_t = spec.duration_s / 2.0;

    Rng rng(spec.seed);
    ThermalTraceSet set;
    set.fps = spec.fps;
    for (const auto& [roi, baseline] : spec.baselines_c) {
        const auto it = spec.step_delta_c.find(roi);
        const double delta = it != spec.step_delta_c.end() ? it->second : 0.0;
        RoiTrace trace;
        trace.roi_id = roi;
        trace.samples_c.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) / spec.fps;
            double v = baseline + (t >= switch_t ? delta : 0.0) + spec.drift_c_per_s * t;
            if (spec.noise_sigma > 0.0) v += rng.normal(0.0, spec.noise_sigma);
            trace.samples_c[i] = v;
        }
        set.rois.push_back(std::move(trace));
    }
    return set;
}

SynthDataset synth_dataset(int n_per_class, int n_features, double separation, std::uint64_t seed,
                           const std::vector<int>& informative) {
    if (n_per_class < 1 || n_features < 2) {
        throw Error(ErrorCode::InvalidSpec, "dataset needs n_per_class >= 1 and n_features >= 2");
    }
    for (int idx : informative) {
        if (idx < 0 || idx >= n_features) {
            throw Error(ErrorCode::InvalidSpec, "informative index out of range");
        }
    }

    Rng rng(seed);
    SynthDataset out;
    out.informative = informative;
    out.separation = separation;
    out.data.mode = "synthetic";
    for (int j = 0; j < n_features; ++j) out.data.feature_names.push_back("f" + std::to_string(j));

    std::vector<bool> is_informative(static_cast<std::size_t>(n_features), false);
    for (int idx : informative) is_informative[static_cast<std::size_t>(idx)] = true;

    int row = 0;
    for (int i = 0; i < n_per_class; ++i) {
        for (int label : {0, 1}) {
            ml::FeatureVector vec;
            char buf[16];
            std::snprintf(buf, sizeof(buf), "syn%05d", row++);
            vec.session_id = buf;
            vec.segment_index = 0;
            vec.label = label;
            const double shift = (label == 1 ? 0.5 : -0.5) * separation;
            vec.features.resize(static_cast<std::size_t>(n_features));
            for (int j = 0; j < n_features; ++j) {
                const double center = is_informative[static_cast<std::size_t>(j)] ? shift : 0.0;
                vec.features[static_cast<std::size_t>(j)] = center + rng.normal();
            }
            out.data.vectors.push_back(std::move(vec));
        }
    }
    return out;
}

std::vector<std::filesystem::path> synth_corpus(const std::filesystem::path& out_dir,
                                                int n_sessions, std::uint64_t seed) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> manifests;

    for (int s = 0; s < n_sessions; ++s) {
        char name[16];
        std::snprintf(name, sizeof(name), "s%02d", s + 1);
        const std::filesystem::path dir = out_dir / name;
        std::filesystem::create_directories(dir);
        const std::uint64_t session_seed = derive_seed(seed, "corpus-session", static_cast<std::uint64_t>(s));
        Rng rng(session_seed);

        // r-PPG: resting rate for 150 s, then a stimulated step up
        const double base_bpm = 62.0 + 2.5 * s;
        const double step_bpm = base_bpm + 8.0 + 1.5 * s;
        SynthSpec spec;
        spec.seed = derive_seed(session_seed, "rgb");
        spec.duration_s = 300.0;
        spec.fps = 30.0;
        spec.hr = HrProfile::step(base_bpm, step_bpm, 150.0);
        spec.hr.mod_amp_bpm = 2.0 + 0.3 * s;
        spec.hr.mod_freq_hz = 0.1;
        spec.modulation_depth = 0.025;
        spec.noise_sigma = 0.001 + 0.001 * s;  // distinct quality per session
        spec.n_patches = 4;
        const RppgSynth rppg = synth_rppg(spec);
        save_rgb_traces(rppg.traces, dir / "rgb.csv");

        // thermal: noiseless step so segment deltas recover the injection
        ThermalSynthSpec thermal;
        thermal.fps = 8.0;
        thermal.duration_s = 300.0;
        thermal.seed = derive_seed(session_seed, "thermal");
        for (int roi : kCanonicalThermalRois) {
            thermal.baselines_c[roi] = 33.0 + 0.04 * (roi % 11) + rng.uniform(-0.2, 0.2);
            // nose and nostrils cool, lips and cheeks warm
            double delta;
            if (roi >= 28 && roi <= 34) {
                delta = -0.3 - rng.uniform(0.0, 0.2);
            } else if (roi >= 48 && roi <= 57) {
                delta = 0.3 + rng.uniform(0.0, 0.2);
            } else {
                delta = rng.uniform(-0.1, 0.1);
            }
            thermal.step_delta_c[roi] = delta;
        }
        const ThermalTraceSet thermal_set = synth_thermal(thermal);
        save_thermal_traces(thermal_set, dir / "thermal.csv");

        // ECG aligned with the same HR profile plus beat-level jitter
        std::vector<double> rr_ms;
        double t = 0.0;
        while (t < 299.0) {
            const double bpm = spec.hr.bpm_at(t);
            double rr = 60000.0 / bpm + rng.normal(0.0, 6.0);
            rr = std::clamp(rr, kRrLoMs, kRrHiMs);
            rr_ms.push_back(rr);
            t += rr / 1000.0;
        }
        const EcgSynth ecg = synth_ecg(rr_ms, 250.0);
        save_ecg(ecg.trace, dir / "ecg.csv");

        SessionManifest manifest;
        manifest.session_id = name;
        manifest.condition_label = s % 2 == 0 ? ConditionLabel::baseline : ConditionLabel::stimulated;
        manifest.rgb_path = "rgb.csv";
        manifest.thermal_path = "thermal.csv";
        manifest.ecg_path = "ecg.csv";
        save_manifest(manifest, dir / "manifest.json");

        nlohmann::ordered_json truth;
        truth["session_id"] = name;
        truth["hr_base_bpm"] = base_bpm;
        truth["hr_step_bpm"] = step_bpm;
        truth["noise_sigma"] = spec.noise_sigma;
        nlohmann::ordered_json deltas;
        for (const auto& [roi, delta] : thermal.step_delta_c) deltas[std::to_string(roi)] = delta;
        truth["thermal_step_delta_c"] = deltas;
        truth["n_beats"] = ecg.r_peak_times.size();
        std::ofstream truth_out(dir / "truth.json");
        truth_out << truth.dump(2) << "\n";

        manifests.push_back(dir / "manifest.json");
    }
    return manifests;
}

}  // namespace vitalsig::synth
