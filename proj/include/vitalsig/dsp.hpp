#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace vitalsig::dsp {

std::size_t next_pow2(std::size_t n);

/// In-place iterative radix-2 FFT; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data);

std::vector<double> hann_window(std::size_t n);

/// One-sided |FFT|^2 of x zero-padded to nfft (no window applied here).
/// Returns nfft/2 + 1 bins; bin k sits at frequency k * fs / nfft.
std::vector<double> power_spectrum(std::span<const double> x, std::size_t nfft);

/// Centered moving average with an odd window; edges use the available samples.
std::vector<double> moving_average(std::span<const double> x, std::size_t window);

/// One biquad section, direct form II transposed.
struct Biquad {
    double b0, b1, b2, a1, a2;
    std::vector<double> filter(std::span<const double> x) const;
};

/// RBJ-cookbook Butterworth (Q = 1/sqrt(2)) low/high-pass sections.
Biquad butter_lowpass(double cutoff_hz, double fs);
Biquad butter_highpass(double cutoff_hz, double fs);

/// Forward-backward filtering through a section cascade (zero phase).
/// Uses odd-reflection padding to suppress edge transients.
std::vector<double> filtfilt(std::span<const Biquad> sections, std::span<const double> x);

struct Psd {
    std::vector<double> freq_hz;
    std::vector<double> power;  // one-sided density, units^2 per Hz
};

/// Welch periodogram: Hann window, 50% overlap, density scaling.
/// nperseg is clamped to the signal length; segments are zero-padded to a
/// power of two for the FFT.
Psd welch_psd(std::span<const double> x, double fs, std::size_t nperseg = 256);

/// Trapezoid integral of the PSD over bins with lo <= f <= hi.
double band_power(const Psd& psd, double lo_hz, double hi_hz);

/// Linear interpolation of (xs, ys) samples onto a uniform grid with step dx,
/// starting at xs.front() and not exceeding xs.back().
std::vector<double> interp_uniform(std::span<const double> xs, std::span<const double> ys, double dx);

double mean(std::span<const double> x);
double median(std::vector<double> x);  // by value: sorts its copy
double sample_std(std::span<const double> x);

}  // namespace vitalsig::dsp
