#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "vitalsig/attribution.hpp"
#include "vitalsig/ecgref.hpp"
#include "vitalsig/hrv.hpp"
#include "vitalsig/ml.hpp"
#include "vitalsig/rppg.hpp"

namespace vitalsig::serde {

using Json = nlohmann::ordered_json;

// HR series JSON: {window_s, hop_s, duration_s, values (null = invalid),
// times_s, per_patch, quality?}
Json hr_series_to_json(const HrSeries& hr, double duration_s, double quality);
HrSeries hr_series_from_json(const Json& doc);
double hr_series_duration(const Json& doc);

/// Metric keys in reporting order: hr, sdnn, rmssd, pnn50, ln_hf, ln_lf,
/// ln_lf_hf — exactly those seven unless include_flags adds the
/// degenerate/outlier markers (used inside run reports).
Json hrv_metrics_to_json(const HrvMetrics& metrics, bool include_flags = false);
HrvMetrics hrv_metrics_from_json(const Json& doc);

Json dataset_to_json(const ml::Dataset& data);
ml::Dataset dataset_from_json(const Json& doc);

Json model_to_json(const ml::TrainedModel& model);
ml::TrainedModel model_from_json(const Json& doc);

Json eval_report_to_json(const ml::EvalReport& report, const std::string& mode,
                         const std::string& model);

Json load_json(const std::filesystem::path& path);
void write_json(const Json& doc, const std::filesystem::path& path);

/// CSV rows for the agreement table: threshold, r per metric, p per metric, n.
std::string agreement_csv(const std::vector<AgreementRow>& rows);

}  // namespace vitalsig::serde
