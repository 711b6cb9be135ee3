#pragma once

#include <array>
#include <vector>

#include "vitalsig/rppg.hpp"

namespace vitalsig {

/// Normal-to-normal beat intervals in milliseconds with their onset times.
struct NnSeries {
    std::vector<double> intervals_ms;
    std::vector<double> timestamps_s;
};

struct TimeDomainMetrics {
    double sdnn_ms = 0.0;
    double rmssd_ms = 0.0;
    double pnn50_pct = 0.0;
};

struct FreqDomainMetrics {
    double lf_ms2 = 0.0;
    double hf_ms2 = 0.0;
    double ln_lf = 0.0;
    double ln_hf = 0.0;
    double ln_lf_hf = 0.0;
    bool degenerate = false;
};

/// The seven per-segment features, plus spectral powers and flags.
struct HrvMetrics {
    double hr_mean = 0.0;
    double sdnn = 0.0;
    double rmssd = 0.0;
    double pnn50 = 0.0;
    double ln_lf = 0.0;
    double ln_hf = 0.0;
    double ln_lf_hf = 0.0;
    double lf_power = 0.0;
    double hf_power = 0.0;
    bool degenerate = false;
    bool outlier = false;

    /// Canonical feature order: hr, sdnn, rmssd, pnn50, ln_hf, ln_lf, ln_lf_hf.
    std::array<double, 7> ordered() const {
        return {hr_mean, sdnn, rmssd, pnn50, ln_hf, ln_lf, ln_lf_hf};
    }
};

inline constexpr std::array<const char*, 7> kHrvFeatureNames = {
    "hr", "sdnn", "rmssd", "pnn50", "ln_hf", "ln_lf", "ln_lf_hf"};

/// Outlier gate applied after metric computation; segments exceeding either
/// limit are flagged, not dropped.
struct HrvLimits {
    double max_hr_bpm = 240.0;
    double max_sdnn_ms = 300.0;
};

/// NN_i = 60000 / BPM_i at each HR timestamp; intervals outside 250-2000 ms
/// are dropped.
NnSeries hr_to_nn(const HrSeries& hr);

TimeDomainMetrics time_domain(const NnSeries& nn);

/// Tachogram resampled at 4 Hz, mean removed, Welch periodogram (256-sample
/// segments, 50% overlap, Hann), trapezoid band powers over LF 0.04-0.15 Hz
/// and HF 0.15-0.4 Hz, natural logs floored at 1e-12 ms^2.
FreqDomainMetrics freq_domain(const NnSeries& nn);

HrvMetrics metrics_from_nn(const NnSeries& nn, const HrvLimits& limits = {});

/// Metrics for HR values whose timestamps fall in [t_start, t_end).
HrvMetrics segment_metrics(const HrSeries& hr, double t_start, double t_end,
                           const HrvLimits& limits = {});

}  // namespace vitalsig
