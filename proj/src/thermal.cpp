#include "vitalsig/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vitalsig/errors.hpp"

namespace vitalsig {

namespace {

constexpr double kSegmentSeconds = 120.0;

double mean_range(const std::vector<double>& samples, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += samples[i];
    return s / static_cast<double>(hi - lo);
}

struct CleanedRois {
    std::map<int, std::vector<double>> samples;
    std::vector<int> invalid;
};

CleanedRois clean_rois(const ThermalTraceSet& traces) {
    CleanedRois cleaned;
    for (const RoiTrace& roi : traces.rois) {
        std::vector<double> samples = roi.samples_c;
        if (interpolate_gaps(samples, traces.fps)) {
            cleaned.samples.emplace(roi.roi_id, std::move(samples));
        } else {
            cleaned.invalid.push_back(roi.roi_id);
        }
    }
    return cleaned;
}

}  // namespace

bool interpolate_gaps(std::vector<double>& samples, double fps, double max_gap_s) {
    const std::size_t max_gap = static_cast<std::size_t>(std::lround(max_gap_s * fps));
    const std::size_t n = samples.size();
    std::size_t i = 0;
    while (i < n) {
        if (!std::isnan(samples[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < n && std::isnan(samples[j])) ++j;
        const std::size_t gap = j - i;
        if (gap > max_gap) return false;
        if (i == 0 && j == n) return false;  // ROI has no data at all
        if (i == 0) {
            for (std::size_t k = i; k < j; ++k) samples[k] = samples[j];
        } else if (j == n) {
            for (std::size_t k = i; k < j; ++k) samples[k] = samples[i - 1];
        } else {
            const double left = samples[i - 1];
            const double right = samples[j];
            const double span = static_cast<double>(gap + 1);
            for (std::size_t k = i; k < j; ++k) {
                samples[k] = left + (right - left) * static_cast<double>(k - i + 1) / span;
            }
        }
        i = j;
    }
    return true;
}

std::map<int, double> segment_delta(const ThermalTraceSet& traces) {
    const std::size_t n = traces.n_samples();
    const std::size_t seg = static_cast<std::size_t>(std::lround(kSegmentSeconds * traces.fps));
    if (traces.fps <= 0.0 || n < 2 * seg) {
        throw Error(ErrorCode::TooShort, "segment deltas need >= 240 s of thermal data");
    }
    const CleanedRois cleaned = clean_rois(traces);
    std::map<int, double> deltas;
    for (const auto& [roi, samples] : cleaned.samples) {
        deltas[roi] = mean_range(samples, n - seg, n) - mean_range(samples, 0, seg);
    }
    return deltas;
}

std::vector<std::vector<double>> relative_matrix(const std::map<int, double>& deltas) {
    if (deltas.size() < 2) throw Error(ErrorCode::InvalidArgument, "relative matrix needs >= 2 ROIs");
    std::vector<double> values;
    values.reserve(deltas.size());
    for (const auto& [roi, delta] : deltas) values.push_back(delta);
    const std::size_t n = values.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m[i][j] = values[j] - values[i];
    }
    return m;
}

ThermalFeatures thermal_features(const ThermalTraceSet& traces, int forehead_roi) {
    const std::size_t n = traces.n_samples();
    const std::size_t seg = static_cast<std::size_t>(std::lround(kSegmentSeconds * traces.fps));
    if (traces.fps <= 0.0 || n < 2 * seg) {
        throw Error(ErrorCode::TooShort, "thermal features need >= 240 s of data");
    }
    const CleanedRois cleaned = clean_rois(traces);

    ThermalFeatures features;
    features.forehead_roi = forehead_roi;
    features.invalid_rois = cleaned.invalid;
    for (const auto& [roi, samples] : cleaned.samples) {
        features.roi_ids.push_back(roi);
        features.delta_c[roi] = mean_range(samples, n - seg, n) - mean_range(samples, 0, seg);
    }
    const auto forehead = features.delta_c.find(forehead_roi);
    if (forehead == features.delta_c.end()) {
        throw Error(ErrorCode::MissingForehead,
                    "forehead ROI " + std::to_string(forehead_roi) + " absent or unusable");
    }
    for (const auto& [roi, delta] : features.delta_c) {
        features.rel_forehead_c[roi] = delta - forehead->second;
    }
    return features;
}

std::map<int, double> segment_means(const ThermalTraceSet& traces, double t_start, double t_end) {
    if (traces.fps <= 0.0) throw Error(ErrorCode::NonPositiveFps, "fps must be positive");
    const std::size_t n = traces.n_samples();
    std::size_t lo = static_cast<std::size_t>(std::ceil(t_start * traces.fps - 1e-9));
    std::size_t hi = static_cast<std::size_t>(std::ceil(t_end * traces.fps - 1e-9));
    lo = std::min(lo, n);
    hi = std::min(hi, n);
    if (lo >= hi) throw Error(ErrorCode::SegmentOutOfRange, "no thermal samples in segment");

    const CleanedRois cleaned = clean_rois(traces);
    std::map<int, double> means;
    for (const auto& [roi, samples] : cleaned.samples) {
        means[roi] = mean_range(samples, lo, hi);
    }
    return means;
}

}  // namespace vitalsig
