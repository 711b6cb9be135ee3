#include "vitalsig/rppg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vitalsig/dsp.hpp"
#include "vitalsig/errors.hpp"

namespace vitalsig {

namespace {

constexpr double kPosWindowSeconds = 1.6;
constexpr double kBandLoHz = 0.65;  // 39 BPM
constexpr double kBandHiHz = 4.0;   // 240 BPM
constexpr std::size_t kMinFftBins = 8192;

const double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::size_t HrSeries::n_valid() const {
    std::size_t n = 0;
    for (bool v : valid)
        if (v) ++n;
    return n;
}

BvpSignal pos_bvp(const RgbPatchTraceSet& traces) {
    if (traces.fps <= 0.0) throw Error(ErrorCode::ZeroFps, "fps must be positive");
    if (traces.fps < 15.0) throw Error(ErrorCode::TooShort, "fps below 15 Hz is unusable for r-PPG");
    const std::size_t n = traces.n_samples();
    const std::size_t win = static_cast<std::size_t>(std::lround(kPosWindowSeconds * traces.fps));
    if (n < win || win < 2) {
        throw Error(ErrorCode::TooShort, "need at least " + std::to_string(kPosWindowSeconds) + " s of data");
    }

    BvpSignal bvp;
    bvp.fps = traces.fps;
    std::vector<double> norm_r(win), norm_g(win), norm_b(win), pulse(win);
    for (const PatchTrace& patch : traces.patches) {
        std::vector<double> out(n, 0.0);
        for (std::size_t start = 0; start + win <= n; ++start) {
            double mr = 0.0, mg = 0.0, mb = 0.0;
            for (std::size_t i = 0; i < win; ++i) {
                mr += patch.samples[start + i][0];
                mg += patch.samples[start + i][1];
                mb += patch.samples[start + i][2];
            }
            mr /= static_cast<double>(win);
            mg /= static_cast<double>(win);
            mb /= static_cast<double>(win);
            if (mr == 0.0 || mg == 0.0 || mb == 0.0) {
                throw Error(ErrorCode::ConstantChannel,
                            "zero channel mean in window of patch " + std::to_string(patch.patch_id));
            }
            for (std::size_t i = 0; i < win; ++i) {
                norm_r[i] = patch.samples[start + i][0] / mr;
                norm_g[i] = patch.samples[start + i][1] / mg;
                norm_b[i] = patch.samples[start + i][2] / mb;
            }
            // chrominance projections
            double m1 = 0.0, m2 = 0.0;
            for (std::size_t i = 0; i < win; ++i) {
                m1 += norm_g[i] - norm_b[i];
                m2 += norm_g[i] + norm_b[i] - 2.0 * norm_r[i];
            }
            m1 /= static_cast<double>(win);
            m2 /= static_cast<double>(win);
            double v1 = 0.0, v2 = 0.0;
            for (std::size_t i = 0; i < win; ++i) {
                const double s1 = norm_g[i] - norm_b[i];
                const double s2 = norm_g[i] + norm_b[i] - 2.0 * norm_r[i];
                v1 += (s1 - m1) * (s1 - m1);
                v2 += (s2 - m2) * (s2 - m2);
            }
            const double sigma1 = std::sqrt(v1 / static_cast<double>(win));
            const double sigma2 = std::sqrt(v2 / static_cast<double>(win));
            const double tuning = sigma2 > 0.0 ? sigma1 / sigma2 : 0.0;

            double pulse_mean = 0.0;
            for (std::size_t i = 0; i < win; ++i) {
                const double s1 = norm_g[i] - norm_b[i];
                const double s2 = norm_g[i] + norm_b[i] - 2.0 * norm_r[i];
                pulse[i] = s1 + tuning * s2;
                pulse_mean += pulse[i];
            }
            pulse_mean /= static_cast<double>(win);
            for (std::size_t i = 0; i < win; ++i) out[start + i] += pulse[i] - pulse_mean;
        }
        bvp.patch_ids.push_back(patch.patch_id);
        bvp.waveforms.push_back(std::move(out));
    }
    return bvp;
}

HrSeries estimate_hr(const BvpSignal& bvp, double window_s, double hop_s, double min_peak_ratio) {
    if (bvp.fps <= 0.0) throw Error(ErrorCode::ZeroFps, "fps must be positive");
    if (bvp.waveforms.empty()) throw Error(ErrorCode::EmptyTrace, "no patch waveforms");
    const std::size_t n = bvp.n_samples();
    const std::size_t win = static_cast<std::size_t>(std::lround(window_s * bvp.fps));
    const std::size_t hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(hop_s * bvp.fps)));
    if (win < 4 || n < win) throw Error(ErrorCode::TooShort, "signal shorter than the HR window");

    const std::size_t nfft = dsp::next_pow2(std::max(kMinFftBins, win));
    const std::vector<double> taper = dsp::hann_window(win);
    const double hz_per_bin = bvp.fps / static_cast<double>(nfft);
    const std::size_t k_lo = static_cast<std::size_t>(std::ceil(kBandLoHz / hz_per_bin));
    const std::size_t k_hi = static_cast<std::size_t>(std::floor(kBandHiHz / hz_per_bin));

    const std::size_t n_windows = (n - win) / hop + 1;
    const std::size_t n_patches = bvp.waveforms.size();

    HrSeries hr;
    hr.window_s = window_s;
    hr.hop_s = hop_s;
    hr.values.resize(n_windows);
    hr.times_s.resize(n_windows);
    hr.valid.resize(n_windows);
    hr.per_patch.assign(n_windows, std::vector<double>(n_patches, 0.0));
    hr.per_patch_pulse.assign(n_windows, std::vector<bool>(n_patches, false));

    std::vector<double> seg(win);
    for (std::size_t w = 0; w < n_windows; ++w) {
        const std::size_t start = w * hop;
        hr.times_s[w] = (static_cast<double>(start) / bvp.fps) + window_s / 2.0;
        std::vector<double> pulsed;
        for (std::size_t p = 0; p < n_patches; ++p) {
            double seg_mean = 0.0;
            for (std::size_t i = 0; i < win; ++i) seg_mean += bvp.waveforms[p][start + i];
            seg_mean /= static_cast<double>(win);
            for (std::size_t i = 0; i < win; ++i) {
                seg[i] = (bvp.waveforms[p][start + i] - seg_mean) * taper[i];
            }
            const std::vector<double> spectrum = dsp::power_spectrum(seg, nfft);

            std::size_t k_peak = k_lo;
            double peak = -1.0, band_sum = 0.0;
            for (std::size_t k = k_lo; k <= k_hi; ++k) {
                band_sum += spectrum[k];
                if (spectrum[k] > peak) {
                    peak = spectrum[k];
                    k_peak = k;
                }
            }
            const double band_mean = band_sum / static_cast<double>(k_hi - k_lo + 1);
            const double bpm = 60.0 * static_cast<double>(k_peak) * hz_per_bin;
            hr.per_patch[w][p] = bpm;
            const bool has_pulse = band_mean > 0.0 && peak >= min_peak_ratio * band_mean;
            hr.per_patch_pulse[w][p] = has_pulse;
            if (has_pulse) pulsed.push_back(bpm);
        }
        // a window needs a strict majority of pulsed patches to count
        if (pulsed.size() * 2 > n_patches) {
            hr.values[w] = dsp::median(std::move(pulsed));
            hr.valid[w] = true;
        } else {
            hr.values[w] = kNaN;
            hr.valid[w] = false;
        }
    }
    return hr;
}

HrSeries clean_hr(const HrSeries& hr, double jump_bpm) {
    std::vector<double> values;
    std::vector<double> times;
    for (std::size_t i = 0; i < hr.values.size(); ++i) {
        if (i < hr.valid.size() && !hr.valid[i]) continue;
        if (std::isnan(hr.values[i])) continue;
        values.push_back(hr.values[i]);
        times.push_back(i < hr.times_s.size() ? hr.times_s[i] : static_cast<double>(i) * hr.hop_s);
    }
    if (values.size() < 2) throw Error(ErrorCode::AllRemoved, "fewer than 2 usable HR points to clean");

    bool deleted = true;
    while (deleted) {
        deleted = false;
        const double med = dsp::median(values);
        std::size_t i = 0;
        while (i + 1 < values.size()) {
            if (std::abs(values[i + 1] - values[i]) > jump_bpm) {
                const double d_cur = std::abs(values[i] - med);
                const double d_next = std::abs(values[i + 1] - med);
                // tie deletes the later point
                const std::size_t victim = d_cur > d_next ? i : i + 1;
                values.erase(values.begin() + static_cast<std::ptrdiff_t>(victim));
                times.erase(times.begin() + static_cast<std::ptrdiff_t>(victim));
                deleted = true;
                if (i > 0) --i;
            } else {
                ++i;
            }
        }
    }

    HrSeries out;
    out.window_s = hr.window_s;
    out.hop_s = hr.hop_s;
    out.values = std::move(values);
    out.times_s = std::move(times);
    out.valid.assign(out.values.size(), true);
    return out;
}

QualityScore quality_index(const HrSeries& hr) {
    if (hr.per_patch.empty() || hr.per_patch.front().size() < 2) {
        throw Error(ErrorCode::MissingPerPatch, "quality index needs per-patch estimates from >= 2 patches");
    }
    double mae_sum = 0.0;
    double hr_sum = 0.0;
    for (const std::vector<double>& window : hr.per_patch) {
        const double med = dsp::median(window);
        double dev = 0.0;
        for (double bpm : window) dev += std::abs(bpm - med);
        mae_sum += dev / static_cast<double>(window.size());
        hr_sum += med;
    }
    const double n = static_cast<double>(hr.per_patch.size());
    QualityScore score;
    score.mae_over_hr = (mae_sum / n) / (hr_sum / n);
    return score;
}

}  // namespace vitalsig
