#pragma once

#include <map>
#include <vector>

#include "vitalsig/traces.hpp"

namespace vitalsig {

struct ThermalFeatures {
    std::vector<int> roi_ids;               // ROIs with usable data, ascending
    std::map<int, double> delta_c;          // last-120-s mean minus first-120-s mean
    std::map<int, double> rel_forehead_c;   // delta relative to the forehead ROI
    int forehead_roi = 58;
    std::vector<int> invalid_rois;          // dropped for gaps beyond 2 s
};

/// Per ROI: mean over the last 120 s minus mean over the first 120 s.
/// Dropped frames are linearly interpolated up to 2 s gaps; ROIs with
/// longer gaps are omitted from the result.
std::map<int, double> segment_delta(const ThermalTraceSet& traces);

/// M[i][j] = delta_j - delta_i over ROIs in ascending id order.
std::vector<std::vector<double>> relative_matrix(const std::map<int, double>& deltas);

ThermalFeatures thermal_features(const ThermalTraceSet& traces, int forehead_roi = 58);

/// Mean temperature per ROI over samples with t in [t_start, t_end).
std::map<int, double> segment_means(const ThermalTraceSet& traces, double t_start, double t_end);

/// Gap repair used by the feature extractors: linear interpolation over
/// interior gaps and edge fill, both up to max_gap_s. Returns false when a
/// longer gap makes the ROI unusable.
bool interpolate_gaps(std::vector<double>& samples, double fps, double max_gap_s = 2.0);

}  // namespace vitalsig
