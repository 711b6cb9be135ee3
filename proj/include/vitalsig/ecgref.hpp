#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vitalsig/hrv.hpp"
#include "vitalsig/traces.hpp"

namespace vitalsig {

/// Metric columns of the agreement table, in reporting order.
inline constexpr std::array<const char*, 6> kAgreementMetrics = {
    "hr", "rmssd", "pnn50", "sdnn", "ln_hf", "ln_lf"};

struct AgreementRow {
    double threshold = 0.0;
    std::array<double, 6> r{};
    std::array<double, 6> p{};
    int n = 0;
};

/// One (r-PPG, ECG) metric pair plus the session's r-PPG quality index.
struct MetricPair {
    std::string session_id;
    double quality = 0.0;
    HrvMetrics rppg;
    HrvMetrics ecg;
    std::optional<std::string> segment;
};

/// QRS detection: 8-20 Hz zero-phase band-pass, squaring, dual moving
/// averages (97 ms QRS window vs 611 ms beat window, offset 0.08 x mean
/// squared signal); blocks of at least 80 ms become beats, peaks closer
/// than 300 ms keep the larger one.
std::vector<double> detect_r_peak_times(const EcgTrace& ecg);

/// NN intervals between detected R peaks; timestamps are interval onsets.
NnSeries detect_r_peaks(const EcgTrace& ecg);

/// For each quality threshold: keep pairs with quality <= threshold, then
/// Pearson r and p per metric. Fails if any threshold retains < 3 pairs.
std::vector<AgreementRow> agreement_sweep(const std::vector<MetricPair>& pairs,
                                          const std::vector<double>& thresholds);

/// Values of one metric column from an HrvMetrics in kAgreementMetrics order.
std::array<double, 6> agreement_metric_values(const HrvMetrics& m);

}  // namespace vitalsig
