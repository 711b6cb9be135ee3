#include "vitalsig/ecgref.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vitalsig/dsp.hpp"
#include "vitalsig/errors.hpp"
#include "vitalsig/stats.hpp"

namespace vitalsig {

namespace {

constexpr double kBandLoHz = 8.0;
constexpr double kBandHiHz = 20.0;
constexpr double kQrsWindowS = 0.097;
constexpr double kBeatWindowS = 0.611;
constexpr double kOffsetFactor = 0.08;
constexpr double kMinBlockS = 0.080;
constexpr double kRefractoryS = 0.300;

}  // namespace

std::vector<double> detect_r_peak_times(const EcgTrace& ecg) {
    if (ecg.fs < 125.0) throw Error(ErrorCode::SamplingTooLow, "QRS detection needs fs >= 125 Hz");
    if (ecg.duration_s() < 10.0) throw Error(ErrorCode::TooShort, "QRS detection needs >= 10 s of ECG");

    const std::array<dsp::Biquad, 2> sections = {dsp::butter_highpass(kBandLoHz, ecg.fs),
                                                 dsp::butter_lowpass(kBandHiHz, ecg.fs)};
    const std::vector<double> filtered = dsp::filtfilt(sections, ecg.samples);

    std::vector<double> squared(filtered.size());
    double mean_sq = 0.0;
    for (std::size_t i = 0; i < filtered.size(); ++i) {
        squared[i] = filtered[i] * filtered[i];
        mean_sq += squared[i];
    }
    mean_sq /= static_cast<double>(squared.size());

    const auto odd_window = [&](double seconds) {
        auto w = static_cast<std::size_t>(std::lround(seconds * ecg.fs));
        return w | 1;
    };
    const std::vector<double> ma_qrs = dsp::moving_average(squared, odd_window(kQrsWindowS));
    const std::vector<double> ma_beat = dsp::moving_average(squared, odd_window(kBeatWindowS));
    const double offset = kOffsetFactor * mean_sq;

    const std::size_t min_block = static_cast<std::size_t>(std::lround(kMinBlockS * ecg.fs));
    const std::size_t refractory = static_cast<std::size_t>(std::lround(kRefractoryS * ecg.fs));

    std::vector<std::size_t> peaks;
    std::size_t block_start = 0;
    bool in_block = false;
    for (std::size_t i = 0; i <= squared.size(); ++i) {
        const bool active = i < squared.size() && ma_qrs[i] > ma_beat[i] + offset;
        if (active && !in_block) {
            in_block = true;
            block_start = i;
        } else if (!active && in_block) {
            in_block = false;
            if (i - block_start >= min_block) {
                std::size_t best = block_start;
                for (std::size_t j = block_start + 1; j < i; ++j) {
                    if (filtered[j] > filtered[best]) best = j;
                }
                if (!peaks.empty() && best - peaks.back() < refractory) {
                    if (filtered[best] > filtered[peaks.back()]) peaks.back() = best;
                } else {
                    peaks.push_back(best);
                }
            }
        }
    }
    if (peaks.empty()) throw Error(ErrorCode::NoBeatsDetected, "no QRS blocks above threshold");

    std::vector<double> times(peaks.size());
    for (std::size_t i = 0; i < peaks.size(); ++i) times[i] = static_cast<double>(peaks[i]) / ecg.fs;
    return times;
}

NnSeries detect_r_peaks(const EcgTrace& ecg) {
    const std::vector<double> peaks = detect_r_peak_times(ecg);
    if (peaks.size() < 2) throw Error(ErrorCode::NoBeatsDetected, "fewer than 2 beats detected");
    NnSeries nn;
    for (std::size_t i = 0; i + 1 < peaks.size(); ++i) {
        const double interval = (peaks[i + 1] - peaks[i]) * 1000.0;
        if (interval < 250.0 || interval > 2000.0) continue;
        nn.intervals_ms.push_back(interval);
        nn.timestamps_s.push_back(peaks[i]);
    }
    if (nn.intervals_ms.empty()) throw Error(ErrorCode::NoBeatsDetected, "no NN intervals in range");
    return nn;
}

std::array<double, 6> agreement_metric_values(const HrvMetrics& m) {
    return {m.hr_mean, m.rmssd, m.pnn50, m.sdnn, m.ln_hf, m.ln_lf};
}

std::vector<AgreementRow> agreement_sweep(const std::vector<MetricPair>& pairs,
                                          const std::vector<double>& thresholds) {
    std::vector<AgreementRow> rows;
    rows.reserve(thresholds.size());
    for (double threshold : thresholds) {
        std::vector<const MetricPair*> kept;
        for (const MetricPair& pair : pairs) {
            if (pair.quality <= threshold) kept.push_back(&pair);
        }
        if (kept.size() < 3) {
            throw Error(ErrorCode::InsufficientPairs,
                        "threshold " + std::to_string(threshold) + " retains " +
                            std::to_string(kept.size()) + " pairs");
        }
        AgreementRow row;
        row.threshold = threshold;
        row.n = static_cast<int>(kept.size());
        for (std::size_t metric = 0; metric < kAgreementMetrics.size(); ++metric) {
            std::vector<double> x, y;
            x.reserve(kept.size());
            y.reserve(kept.size());
            for (const MetricPair* pair : kept) {
                x.push_back(agreement_metric_values(pair->rppg)[metric]);
                y.push_back(agreement_metric_values(pair->ecg)[metric]);
            }
            try {
                const stats::TestResult res = stats::pearson(x, y);
                row.r[metric] = res.statistic;
                row.p[metric] = res.p_value;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::ConstantInput) throw;
                // a constant metric column has no defined correlation
                row.r[metric] = std::numeric_limits<double>::quiet_NaN();
                row.p[metric] = std::numeric_limits<double>::quiet_NaN();
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace vitalsig
