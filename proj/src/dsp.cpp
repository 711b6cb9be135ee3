#include "vitalsig/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vitalsig/errors.hpp"

namespace vitalsig::dsp {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_inplace(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw Error(ErrorCode::InvalidArgument, "fft size must be a power of two");
    }
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n < 2) return w;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1)));
    }
    return w;
}

std::vector<double> power_spectrum(std::span<const double> x, std::size_t nfft) {
    nfft = next_pow2(std::max(nfft, x.size()));
    std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
    for (std::size_t i = 0; i < x.size(); ++i) buf[i] = {x[i], 0.0};
    fft_inplace(buf);
    std::vector<double> p(nfft / 2 + 1);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::norm(buf[k]);
    return p;
}

std::vector<double> moving_average(std::span<const double> x, std::size_t window) {
    if (window % 2 == 0) ++window;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(window / 2);
    // prefix sums keep this O(n)
    std::vector<double> prefix(n + 1, 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
    std::vector<double> out(n);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min(n - 1, i + half);
        out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<double> Biquad::filter(std::span<const double> x) const {
    std::vector<double> y(x.size());
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double out = b0 * x[i] + s1;
        s1 = b1 * x[i] - a1 * out + s2;
        s2 = b2 * x[i] - a2 * out;
        y[i] = out;
    }
    return y;
}

namespace {
constexpr double kButterQ = 0.7071067811865476;  // 1/sqrt(2)
}

Biquad butter_lowpass(double cutoff_hz, double fs) {
    const double w0 = 2.0 * std::numbers::pi * cutoff_hz / fs;
    const double alpha = std::sin(w0) / (2.0 * kButterQ);
    const double c = std::cos(w0);
    const double a0 = 1.0 + alpha;
    return Biquad{(1.0 - c) / 2.0 / a0, (1.0 - c) / a0, (1.0 - c) / 2.0 / a0,
                  -2.0 * c / a0, (1.0 - alpha) / a0};
}

Biquad butter_highpass(double cutoff_hz, double fs) {
    const double w0 = 2.0 * std::numbers::pi * cutoff_hz / fs;
    const double alpha = std::sin(w0) / (2.0 * kButterQ);
    const double c = std::cos(w0);
    const double a0 = 1.0 + alpha;
    return Biquad{(1.0 + c) / 2.0 / a0, -(1.0 + c) / a0, (1.0 + c) / 2.0 / a0,
                  -2.0 * c / a0, (1.0 - alpha) / a0};
}

std::vector<double> filtfilt(std::span<const Biquad> sections, std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 4) return std::vector<double>(x.begin(), x.end());
    const std::size_t pad = std::min<std::size_t>(n - 1, 3 * 10 * sections.size() + 30);

    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

    for (const Biquad& s : sections) {
        ext = s.filter(ext);
        std::reverse(ext.begin(), ext.end());
        ext = s.filter(ext);
        std::reverse(ext.begin(), ext.end());
    }
    return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                               ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

Psd welch_psd(std::span<const double> x, double fs, std::size_t nperseg) {
    if (x.size() < 8) throw Error(ErrorCode::TooShort, "welch needs at least 8 samples");
    nperseg = std::min(nperseg, x.size());
    const std::size_t step = std::max<std::size_t>(1, nperseg / 2);
    const std::size_t nfft = next_pow2(nperseg);
    const std::vector<double> w = hann_window(nperseg);
    double win_power = 0.0;
    for (double v : w) win_power += v * v;

    Psd psd;
    psd.freq_hz.resize(nfft / 2 + 1);
    psd.power.assign(nfft / 2 + 1, 0.0);
    for (std::size_t k = 0; k < psd.freq_hz.size(); ++k) {
        psd.freq_hz[k] = static_cast<double>(k) * fs / static_cast<double>(nfft);
    }

    std::size_t n_segments = 0;
    std::vector<double> seg(nperseg);
    for (std::size_t off = 0; off + nperseg <= x.size(); off += step) {
        for (std::size_t i = 0; i < nperseg; ++i) seg[i] = x[off + i] * w[i];
        const std::vector<double> p = power_spectrum(seg, nfft);
        for (std::size_t k = 0; k < p.size(); ++k) psd.power[k] += p[k];
        ++n_segments;
    }
    const double scale = 1.0 / (fs * win_power * static_cast<double>(n_segments));
    for (std::size_t k = 0; k < psd.power.size(); ++k) {
        psd.power[k] *= scale;
        if (k != 0 && k != psd.power.size() - 1) psd.power[k] *= 2.0;  // one-sided
    }
    return psd;
}

double band_power(const Psd& psd, double lo_hz, double hi_hz) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < psd.freq_hz.size(); ++k) {
        const double f0 = psd.freq_hz[k], f1 = psd.freq_hz[k + 1];
        if (f0 < lo_hz || f1 > hi_hz) continue;
        total += 0.5 * (psd.power[k] + psd.power[k + 1]) * (f1 - f0);
    }
    return total;
}

std::vector<double> interp_uniform(std::span<const double> xs, std::span<const double> ys, double dx) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "interp needs >= 2 matching samples");
    }
    std::vector<double> out;
    std::size_t seg = 0;
    for (double x = xs.front(); x <= xs.back() + 1e-12; x += dx) {
        while (seg + 2 < xs.size() && xs[seg + 1] < x) ++seg;
        const double x0 = xs[seg], x1 = xs[seg + 1];
        const double t = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
        out.push_back(ys[seg] + t * (ys[seg + 1] - ys[seg]));
    }
    return out;
}

double mean(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double median(std::vector<double> x) {
    if (x.empty()) throw Error(ErrorCode::InvalidArgument, "median of empty sequence");
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    return n % 2 == 1 ? x[n / 2] : 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

double sample_std(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

}  // namespace vitalsig::dsp
