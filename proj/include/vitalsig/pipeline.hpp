#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vitalsig/serde.hpp"

namespace vitalsig::pipeline {

struct PipelineConfig {
    double window_s = 6.0;
    double hop_s = 1.0;
    double jump_bpm = 25.0;
    double quality_threshold = 0.42;  // MAE/HR gate
    double segment_s = 120.0;
    int forehead_roi = 58;
    int cv_folds = 5;
    std::uint64_t seed = 0;

    // extended knobs, defaults documented in the README
    double min_peak_ratio = 6.0;
    double max_hr_bpm = 240.0;
    double max_sdnn_ms = 300.0;
    int shap_permutations = 300;
    int shap_max_instances = 16;
    int shap_background = 50;
    bool paired_ttests = true;
    double agree_lo = 0.30;
    double agree_hi = 0.48;
    double agree_step = 0.02;

    void validate() const;
};

PipelineConfig load_config(const std::filesystem::path& path);

struct PipelineResult {
    int exit_code = 0;  // 0 ok, 2 partial (some sessions failed), 3 no usable sessions
    serde::Json report;
};

/// Full run: per-session r-PPG -> HR -> quality gate -> segment HRV, thermal
/// features, optional ECG agreement; mode x model training grid with late
/// fusion; per-feature paired t-tests; HRV-delta x thermal-delta correlation
/// matrix; Shapley rankings. Everything lands in out_dir as JSON/CSV and the
/// whole run is a pure function of (inputs, config), so reruns are
/// byte-identical.
PipelineResult run_pipeline(const std::vector<std::filesystem::path>& manifest_paths,
                            const PipelineConfig& config, const std::filesystem::path& out_dir);

}  // namespace vitalsig::pipeline
