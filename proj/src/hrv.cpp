#include "vitalsig/hrv.hpp"

#include <algorithm>
#include <cmath>

#include "vitalsig/dsp.hpp"
#include "vitalsig/errors.hpp"

namespace vitalsig {

namespace {

constexpr double kNnLo = 250.0;
constexpr double kNnHi = 2000.0;
constexpr double kResampleHz = 4.0;
constexpr double kLfLo = 0.04, kLfHi = 0.15;
constexpr double kHfLo = 0.15, kHfHi = 0.4;
constexpr double kPowerFloor = 1e-12;  // ms^2, keeps the logs finite

}  // namespace

NnSeries hr_to_nn(const HrSeries& hr) {
    NnSeries nn;
    for (std::size_t i = 0; i < hr.values.size(); ++i) {
        if (i < hr.valid.size() && !hr.valid[i]) continue;
        const double bpm = hr.values[i];
        if (std::isnan(bpm) || bpm <= 0.0) continue;
        const double interval = 60000.0 / bpm;
        if (interval < kNnLo || interval > kNnHi) continue;
        nn.intervals_ms.push_back(interval);
        nn.timestamps_s.push_back(i < hr.times_s.size() ? hr.times_s[i]
                                                        : static_cast<double>(i) * hr.hop_s);
    }
    if (nn.intervals_ms.empty()) throw Error(ErrorCode::EmptySeries, "no NN intervals in range");
    return nn;
}

TimeDomainMetrics time_domain(const NnSeries& nn) {
    const std::size_t n = nn.intervals_ms.size();
    if (n < 3) throw Error(ErrorCode::TooFewIntervals, "time-domain metrics need >= 3 intervals");

    TimeDomainMetrics m;
    m.sdnn_ms = dsp::sample_std(nn.intervals_ms);

    double ss = 0.0;
    std::size_t over_50 = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double d = nn.intervals_ms[i + 1] - nn.intervals_ms[i];
        ss += d * d;
        if (std::abs(d) > 50.0) ++over_50;  // strictly greater
    }
    m.rmssd_ms = std::sqrt(ss / static_cast<double>(n - 1));
    m.pnn50_pct = 100.0 * static_cast<double>(over_50) / static_cast<double>(n - 1);
    return m;
}

FreqDomainMetrics freq_domain(const NnSeries& nn) {
    if (nn.intervals_ms.size() < 4) throw Error(ErrorCode::TooFewIntervals, "tachogram too sparse");
    const double span = nn.timestamps_s.back() - nn.timestamps_s.front();
    if (span < 60.0) throw Error(ErrorCode::TooShort, "frequency metrics need >= 60 s of data");

    std::vector<double> grid =
        dsp::interp_uniform(nn.timestamps_s, nn.intervals_ms, 1.0 / kResampleHz);
    const double m = dsp::mean(grid);
    for (double& v : grid) v -= m;

    const dsp::Psd psd = dsp::welch_psd(grid, kResampleHz, 256);
    const double lf_raw = dsp::band_power(psd, kLfLo, kLfHi);
    const double hf_raw = dsp::band_power(psd, kHfLo, kHfHi);

    FreqDomainMetrics f;
    f.lf_ms2 = std::max(lf_raw, kPowerFloor);
    f.hf_ms2 = std::max(hf_raw, kPowerFloor);
    f.degenerate = lf_raw <= kPowerFloor && hf_raw <= kPowerFloor;
    f.ln_lf = std::log(f.lf_ms2);
    f.ln_hf = std::log(f.hf_ms2);
    f.ln_lf_hf = f.ln_lf - f.ln_hf;
    return f;
}

HrvMetrics metrics_from_nn(const NnSeries& nn, const HrvLimits& limits) {
    const TimeDomainMetrics td = time_domain(nn);
    const FreqDomainMetrics fd = freq_domain(nn);

    HrvMetrics out;
    out.hr_mean = 60000.0 / dsp::mean(nn.intervals_ms);
    out.sdnn = td.sdnn_ms;
    out.rmssd = td.rmssd_ms;
    out.pnn50 = td.pnn50_pct;
    out.ln_lf = fd.ln_lf;
    out.ln_hf = fd.ln_hf;
    out.ln_lf_hf = fd.ln_lf_hf;
    out.lf_power = fd.lf_ms2;
    out.hf_power = fd.hf_ms2;
    out.degenerate = fd.degenerate;
    out.outlier = out.hr_mean > limits.max_hr_bpm || out.sdnn > limits.max_sdnn_ms;
    return out;
}

HrvMetrics segment_metrics(const HrSeries& hr, double t_start, double t_end, const HrvLimits& limits) {
    HrSeries segment;
    segment.window_s = hr.window_s;
    segment.hop_s = hr.hop_s;
    for (std::size_t i = 0; i < hr.values.size(); ++i) {
        if (i < hr.valid.size() && !hr.valid[i]) continue;
        const double t = i < hr.times_s.size() ? hr.times_s[i] : static_cast<double>(i) * hr.hop_s;
        if (t < t_start || t >= t_end) continue;
        segment.values.push_back(hr.values[i]);
        segment.times_s.push_back(t);
        segment.valid.push_back(true);
    }
    if (segment.values.empty()) {
        throw Error(ErrorCode::SegmentOutOfRange, "no HR values inside the requested segment");
    }

    const NnSeries nn = hr_to_nn(segment);
    HrvMetrics out = metrics_from_nn(nn, limits);
    out.hr_mean = dsp::mean(segment.values);  // mean HR over the segment, per the HR series itself
    out.outlier = out.hr_mean > limits.max_hr_bpm || out.sdnn > limits.max_sdnn_ms;
    return out;
}

}  // namespace vitalsig
