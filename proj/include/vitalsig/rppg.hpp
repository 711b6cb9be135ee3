#pragma once

#include <vector>

#include "vitalsig/traces.hpp"

namespace vitalsig {

/// Zero-mean blood-volume-pulse waveform per patch.
struct BvpSignal {
    double fps = 0.0;
    std::vector<int> patch_ids;
    std::vector<std::vector<double>> waveforms;  // [patch][sample]

    std::size_t n_samples() const { return waveforms.empty() ? 0 : waveforms.front().size(); }
    double duration_s() const { return fps > 0 ? static_cast<double>(n_samples()) / fps : 0.0; }
};

/// Windowed heart-rate estimates. `values` holds the cross-patch median in
/// BPM with NaN where the window carries no usable pulse; `per_patch` keeps
/// the raw per-patch estimate for every window.
struct HrSeries {
    double window_s = 6.0;
    double hop_s = 1.0;
    std::vector<double> values;
    std::vector<double> times_s;
    std::vector<bool> valid;
    std::vector<std::vector<double>> per_patch;        // [window][patch]
    std::vector<std::vector<bool>> per_patch_pulse;    // [window][patch]

    std::size_t n_valid() const;
};

struct QualityScore {
    double mae_over_hr = 0.0;
};

/// Plane-orthogonal-to-skin projection over sliding 1.6 s windows:
/// temporally normalized channels are projected onto (G-B) and (G+B-2R),
/// tuned by the window std ratio, and overlap-added into a zero-mean pulse.
BvpSignal pos_bvp(const RgbPatchTraceSet& traces);

/// Per window and patch: Hann taper, zero-pad to >= 8192 bins, pick the
/// peak of the power spectrum in 0.65-4.0 Hz. A patch window counts as
/// pulseless when peak power < min_peak_ratio x mean in-band power; a
/// window's aggregate is the median over pulsed patches and is flagged
/// invalid when most patches are pulseless.
HrSeries estimate_hr(const BvpSignal& bvp, double window_s = 6.0, double hop_s = 1.0,
                     double min_peak_ratio = 6.0);

/// Removes jump artifacts: wherever neighbors differ by more than jump_bpm,
/// the member farther from the series median goes (ties drop the later one);
/// repeats until a full pass deletes nothing.
HrSeries clean_hr(const HrSeries& hr, double jump_bpm = 25.0);

/// MAE/HR: mean absolute deviation of per-patch estimates from the
/// cross-patch median, divided by the mean heart rate.
QualityScore quality_index(const HrSeries& hr);

}  // namespace vitalsig
