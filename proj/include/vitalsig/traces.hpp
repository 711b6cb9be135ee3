#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace vitalsig {

/// Mean RGB per video frame for one facial patch, normalized to [0, 1].
struct PatchTrace {
    int patch_id = 0;
    std::vector<std::array<double, 3>> samples;  // r, g, b
};

struct RgbPatchTraceSet {
    double fps = 0.0;
    std::vector<PatchTrace> patches;  // sorted by patch_id

    std::size_t n_samples() const { return patches.empty() ? 0 : patches.front().samples.size(); }
    double duration_s() const { return fps > 0 ? static_cast<double>(n_samples()) / fps : 0.0; }
};

/// Temperature trace per thermal ROI; NaN marks a dropped frame.
struct RoiTrace {
    int roi_id = 0;
    std::vector<double> samples_c;
};

struct ThermalTraceSet {
    double fps = 0.0;
    std::vector<RoiTrace> rois;  // sorted by roi_id

    std::size_t n_samples() const { return rois.empty() ? 0 : rois.front().samples_c.size(); }
    double duration_s() const { return fps > 0 ? static_cast<double>(n_samples()) / fps : 0.0; }
};

struct EcgTrace {
    double fs = 0.0;
    std::vector<double> samples;

    double duration_s() const { return fs > 0 ? static_cast<double>(samples.size()) / fs : 0.0; }
};

enum class ConditionLabel { baseline, stimulated };

const char* condition_label_name(ConditionLabel label);
ConditionLabel parse_condition_label(const std::string& text);

struct SessionManifest {
    std::string session_id;
    ConditionLabel condition_label = ConditionLabel::baseline;
    std::string rgb_path;
    std::string thermal_path;
    std::optional<std::string> ecg_path;
};

/// The 22 thermal ROIs in canonical order (eyebrows, forehead,
/// nose, nostrils, lips, cheeks, chin, throat).
inline constexpr std::array<int, 22> kCanonicalThermalRois = {
    18, 21, 22, 25, 58, 28, 29, 30, 32, 34, 48, 49, 50, 51, 52, 53, 54, 55, 56, 57, 59, 60};

/// Orders ROI ids by their canonical position; unknown ids follow in
/// ascending order.
std::vector<int> canonical_roi_order(std::vector<int> roi_ids);

}  // namespace vitalsig
