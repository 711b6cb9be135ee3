#include "vitalsig/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "vitalsig/attribution.hpp"
#include "vitalsig/dataio.hpp"
#include "vitalsig/dsp.hpp"
#include "vitalsig/ecgref.hpp"
#include "vitalsig/errors.hpp"
#include "vitalsig/hrv.hpp"
#include "vitalsig/log.hpp"
#include "vitalsig/ml.hpp"
#include "vitalsig/rng.hpp"
#include "vitalsig/rppg.hpp"
#include "vitalsig/stats.hpp"
#include "vitalsig/thermal.hpp"

namespace vitalsig::pipeline {

using serde::Json;

void PipelineConfig::validate() const {
    const bool positive = window_s > 0 && hop_s > 0 && jump_bpm > 0 && segment_s > 0 &&
                          forehead_roi > 0 && cv_folds > 0 && min_peak_ratio > 0;
    if (!positive) throw Error(ErrorCode::InvalidArgument, "config values must be positive");
    // threshold 0 is allowed: it excludes every session by construction
    if (quality_threshold < 0.0 || quality_threshold > 1.0) {
        throw Error(ErrorCode::InvalidArgument, "quality_threshold must lie in [0, 1]");
    }
}

PipelineConfig load_config(const std::filesystem::path& path) {
    const Json doc = serde::load_json(path);
    PipelineConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("window_s", cfg.window_s);
    get("hop_s", cfg.hop_s);
    get("jump_bpm", cfg.jump_bpm);
    get("quality_threshold", cfg.quality_threshold);
    get("segment_s", cfg.segment_s);
    get("forehead_roi", cfg.forehead_roi);
    get("cv_folds", cfg.cv_folds);
    get("seed", cfg.seed);
    get("min_peak_ratio", cfg.min_peak_ratio);
    get("max_hr_bpm", cfg.max_hr_bpm);
    get("max_sdnn_ms", cfg.max_sdnn_ms);
    get("shap_permutations", cfg.shap_permutations);
    get("shap_max_instances", cfg.shap_max_instances);
    get("shap_background", cfg.shap_background);
    get("paired_ttests", cfg.paired_ttests);
    get("agree_lo", cfg.agree_lo);
    get("agree_hi", cfg.agree_hi);
    get("agree_step", cfg.agree_step);
    cfg.validate();
    return cfg;
}

namespace {

struct SessionState {
    SessionManifest manifest;
    std::string status = "ok";  // ok | excluded | failed
    double quality = 0.0;
    std::optional<HrvMetrics> hrv_first, hrv_last;
    std::optional<ThermalFeatures> thermal;
    std::map<int, double> thermal_first_means, thermal_last_means;
    std::optional<HrvMetrics> ecg_first, ecg_last;
    std::string error;
};

Json config_to_json(const PipelineConfig& c) {
    Json doc;
    doc["window_s"] = c.window_s;
    doc["hop_s"] = c.hop_s;
    doc["jump_bpm"] = c.jump_bpm;
    doc["quality_threshold"] = c.quality_threshold;
    doc["segment_s"] = c.segment_s;
    doc["forehead_roi"] = c.forehead_roi;
    doc["cv_folds"] = c.cv_folds;
    doc["seed"] = c.seed;
    doc["min_peak_ratio"] = c.min_peak_ratio;
    doc["max_hr_bpm"] = c.max_hr_bpm;
    doc["max_sdnn_ms"] = c.max_sdnn_ms;
    doc["shap_permutations"] = c.shap_permutations;
    doc["shap_max_instances"] = c.shap_max_instances;
    doc["shap_background"] = c.shap_background;
    doc["paired_ttests"] = c.paired_ttests;
    doc["agree_lo"] = c.agree_lo;
    doc["agree_hi"] = c.agree_hi;
    doc["agree_step"] = c.agree_step;
    return doc;
}

void write_text(const std::string& text, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
}

std::string csv_cell(double v) { return std::isnan(v) ? "nan" : format_double(v); }

void process_session(SessionState& state, const PipelineConfig& cfg) {
    const RgbPatchTraceSet rgb = load_rgb_traces(state.manifest.rgb_path);
    const double duration = rgb.duration_s();

    const BvpSignal bvp = pos_bvp(rgb);
    const HrSeries hr = estimate_hr(bvp, cfg.window_s, cfg.hop_s, cfg.min_peak_ratio);
    state.quality = quality_index(hr).mae_over_hr;

    const ThermalTraceSet thermal_set = load_thermal_traces(state.manifest.thermal_path);
    state.thermal = thermal_features(thermal_set, cfg.forehead_roi);
    state.thermal_first_means = segment_means(thermal_set, 0.0, cfg.segment_s);
    state.thermal_last_means =
        segment_means(thermal_set, thermal_set.duration_s() - cfg.segment_s, thermal_set.duration_s());

    if (state.quality > cfg.quality_threshold) {
        state.status = "excluded";
        return;
    }

    const HrSeries cleaned = clean_hr(hr, cfg.jump_bpm);
    const HrvLimits limits{cfg.max_hr_bpm, cfg.max_sdnn_ms};
    state.hrv_first = segment_metrics(cleaned, 0.0, cfg.segment_s, limits);
    state.hrv_last = segment_metrics(cleaned, duration - cfg.segment_s, duration + 1e-9, limits);
    if (state.hrv_first->outlier || state.hrv_last->outlier) {
        state.status = "excluded";
        return;
    }

    if (state.manifest.ecg_path) {
        const EcgTrace ecg = load_ecg(*state.manifest.ecg_path);
        const NnSeries nn = detect_r_peaks(ecg);
        auto segment_nn = [&](double t0, double t1) {
            NnSeries out;
            for (std::size_t i = 0; i < nn.intervals_ms.size(); ++i) {
                if (nn.timestamps_s[i] >= t0 && nn.timestamps_s[i] < t1) {
                    out.intervals_ms.push_back(nn.intervals_ms[i]);
                    out.timestamps_s.push_back(nn.timestamps_s[i]);
                }
            }
            return out;
        };
        state.ecg_first = metrics_from_nn(segment_nn(0.0, cfg.segment_s), limits);
        state.ecg_last =
            metrics_from_nn(segment_nn(ecg.duration_s() - cfg.segment_s, ecg.duration_s()), limits);
    }
}

Json metrics_json_or_null(const std::optional<HrvMetrics>& metrics) {
    return metrics ? serde::hrv_metrics_to_json(*metrics, true) : Json(nullptr);
}

struct TrainedEntry {
    std::string mode;
    std::string model_name;
    ml::GridResult result;
    ml::Dataset dataset;
};

}  // namespace

PipelineResult run_pipeline(const std::vector<std::filesystem::path>& manifest_paths,
                            const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);

    std::vector<SessionState> sessions;
    Json load_errors = Json::array();
    for (const std::filesystem::path& path : manifest_paths) {
        try {
            SessionState state;
            state.manifest = load_manifest(path);
            sessions.push_back(std::move(state));
        } catch (const Error& e) {
            load_errors.push_back({{"manifest", path.filename().string()}, {"error", e.what()}});
        }
    }
    std::sort(sessions.begin(), sessions.end(), [](const SessionState& a, const SessionState& b) {
        return a.manifest.session_id < b.manifest.session_id;
    });

    for (SessionState& state : sessions) {
        try {
            process_session(state, cfg);
            logg::info("session %s: quality %.4f status %s", state.manifest.session_id.c_str(),
                       state.quality, state.status.c_str());
        } catch (const Error& e) {
            state.status = "failed";
            state.error = e.what();
            logg::error("session %s failed: %s", state.manifest.session_id.c_str(), e.what());
        }
    }

    Json report;
    report["config"] = config_to_json(cfg);
    report["load_errors"] = load_errors;

    // ---- per-session section ----
    Json session_block = Json::array();
    std::vector<const SessionState*> usable;
    Json excluded = Json::array();
    std::size_t failures = 0;
    for (const SessionState& state : sessions) {
        Json entry;
        entry["session_id"] = state.manifest.session_id;
        entry["condition_label"] = condition_label_name(state.manifest.condition_label);
        entry["status"] = state.status;
        entry["quality_mae_over_hr"] = state.quality;
        entry["hrv_first120"] = metrics_json_or_null(state.hrv_first);
        entry["hrv_last120"] = metrics_json_or_null(state.hrv_last);
        if (state.thermal) {
            Json deltas, rel;
            for (const auto& [roi, v] : state.thermal->delta_c) deltas[std::to_string(roi)] = v;
            for (const auto& [roi, v] : state.thermal->rel_forehead_c) rel[std::to_string(roi)] = v;
            entry["thermal_delta"] = deltas;
            entry["thermal_rel_forehead"] = rel;
            entry["thermal_invalid_rois"] = state.thermal->invalid_rois;
        } else {
            entry["thermal_delta"] = nullptr;
        }
        entry["ecg_first120"] = metrics_json_or_null(state.ecg_first);
        entry["ecg_last120"] = metrics_json_or_null(state.ecg_last);
        if (!state.error.empty()) entry["error"] = state.error;
        session_block.push_back(entry);

        if (state.status == "ok") {
            usable.push_back(&state);
        } else if (state.status == "excluded") {
            excluded.push_back(state.manifest.session_id);
        } else {
            ++failures;
        }
    }
    report["sessions"] = session_block;
    report["excluded_sessions"] = excluded;

    Json step_errors = Json::array();

    // ---- datasets and models ----
    std::vector<ml::SessionFeatures> features;
    for (const SessionState* state : usable) {
        ml::SessionFeatures sf;
        sf.session_id = state->manifest.session_id;
        ml::SessionFeatures::Segment first, last;
        first.label = 0;
        first.rppg = state->hrv_first;
        first.thermal = state->thermal_first_means;
        last.label = 1;
        last.rppg = state->hrv_last;
        last.thermal = state->thermal_last_means;
        sf.segments = {first, last};
        features.push_back(std::move(sf));
    }

    Json accuracy_table = Json::array();
    std::vector<TrainedEntry> trained;
    std::ostringstream accuracy_csv;
    accuracy_csv << "mode,model,avg_accuracy,avg_f1\n";
    if (features.size() >= 2) {
        try {
            const int k = std::min<int>(cfg.cv_folds, static_cast<int>(features.size()));
            std::map<std::string, ml::Dataset> datasets;
            datasets["rppg"] = ml::assemble(features, ml::Mode::rppg);
            datasets["thermal"] = ml::assemble(features, ml::Mode::thermal);
            datasets["early_fusion"] = ml::assemble(features, ml::Mode::early_fusion);

            std::map<std::string, ml::GridResult> best_per_mode;
            for (const char* mode : {"rppg", "thermal", "early_fusion"}) {
                const ml::Dataset& data = datasets.at(mode);
                for (const char* model_name : {"rf", "svm"}) {
                    const bool is_rf = std::string(model_name) == "rf";
                    const ml::Grid grid = is_rf ? ml::Grid::default_rf(cfg.seed)
                                                : ml::Grid::default_svm(data.width());
                    ml::GridResult result = ml::grid_search_cv(
                        data, is_rf ? ml::ModelKind::rf : ml::ModelKind::svm, grid, k, cfg.seed);
                    accuracy_table.push_back(
                        serde::eval_report_to_json(result.report, mode, model_name));
                    accuracy_csv << mode << ',' << model_name << ','
                                 << format_double(result.report.avg_accuracy) << ','
                                 << format_double(result.report.avg_f1) << "\n";
                    const auto it = best_per_mode.find(mode);
                    if (it == best_per_mode.end() ||
                        result.report.avg_accuracy > it->second.report.avg_accuracy) {
                        best_per_mode[mode] = result;
                    }
                    trained.push_back(TrainedEntry{mode, model_name, std::move(result), data});
                }
            }

            // late fusion over the better unimodal models' out-of-fold outputs
            ml::GridResult fused =
                ml::late_fuse(datasets.at("rppg"), best_per_mode.at("rppg").report,
                              datasets.at("thermal"), best_per_mode.at("thermal").report, k, cfg.seed);
            accuracy_table.push_back(
                serde::eval_report_to_json(fused.report, "late_fusion", "decision_tree"));
            accuracy_csv << "late_fusion,decision_tree," << format_double(fused.report.avg_accuracy)
                         << ',' << format_double(fused.report.avg_f1) << "\n";

            for (const auto& [mode, data] : datasets) {
                serde::write_json(serde::dataset_to_json(data), out_dir / ("dataset_" + mode + ".json"));
            }
            for (const TrainedEntry& entry : trained) {
                serde::write_json(serde::model_to_json(entry.result.model),
                                  out_dir / ("model_" + entry.mode + "_" + entry.model_name + ".json"));
            }
            serde::write_json(serde::model_to_json(fused.model), out_dir / "model_late_fusion.json");
        } catch (const Error& e) {
            step_errors.push_back({{"step", "ml"}, {"error", e.what()}});
            logg::error("ml step failed: %s", e.what());
        }
    } else {
        step_errors.push_back({{"step", "ml"}, {"error", "TooFewSamples: fewer than 2 usable sessions"}});
    }
    report["accuracy_table"] = accuracy_table;
    write_text(accuracy_csv.str(), out_dir / "accuracy_table.csv");

    // ---- paired t-tests: last vs first segment, per feature ----
    Json hrv_tests = Json::array();
    std::ostringstream hrv_tests_csv;
    hrv_tests_csv << "feature,mean_diff,t,p,n\n";
    if (usable.size() >= 2) {
        for (std::size_t f = 0; f < kHrvFeatureNames.size(); ++f) {
            std::vector<double> first, last;
            for (const SessionState* s : usable) {
                first.push_back(s->hrv_first->ordered()[f]);
                last.push_back(s->hrv_last->ordered()[f]);
            }
            Json row;
            row["feature"] = kHrvFeatureNames[f];
            double diff = 0.0;
            for (std::size_t i = 0; i < first.size(); ++i) diff += last[i] - first[i];
            diff /= static_cast<double>(first.size());
            row["mean_diff"] = diff;
            try {
                const stats::TestResult res = cfg.paired_ttests ? stats::paired_ttest(last, first)
                                                                : stats::unpaired_ttest(last, first);
                row["t"] = res.statistic;
                row["p"] = res.p_value;
                hrv_tests_csv << kHrvFeatureNames[f] << ',' << csv_cell(diff) << ','
                              << csv_cell(res.statistic) << ',' << csv_cell(res.p_value) << ','
                              << first.size() << "\n";
            } catch (const Error& e) {
                row["t"] = nullptr;
                row["p"] = nullptr;
                row["error"] = e.what();
                hrv_tests_csv << kHrvFeatureNames[f] << ',' << csv_cell(diff) << ",nan,nan,"
                              << first.size() << "\n";
            }
            hrv_tests.push_back(row);
        }
    }
    report["hrv_ttests"] = hrv_tests;
    write_text(hrv_tests_csv.str(), out_dir / "hrv_ttests.csv");

    // common ROI set across usable sessions, canonical order
    std::vector<int> rois;
    if (!usable.empty()) {
        std::set<int> common;
        for (const auto& [roi, _] : usable.front()->thermal_first_means) common.insert(roi);
        for (const SessionState* s : usable) {
            std::set<int> here;
            for (const auto& [roi, _] : s->thermal_first_means) here.insert(roi);
            std::set<int> kept;
            std::set_intersection(common.begin(), common.end(), here.begin(), here.end(),
                                  std::inserter(kept, kept.begin()));
            common = std::move(kept);
        }
        rois = canonical_roi_order(std::vector<int>(common.begin(), common.end()));
    }

    Json thermal_tests = Json::array();
    std::ostringstream thermal_tests_csv;
    thermal_tests_csv << "roi,mean_delta,t,p,mean_rel,t_rel,p_rel,n\n";
    if (usable.size() >= 2) {
        for (int roi : rois) {
            std::vector<double> first, last, rel;
            for (const SessionState* s : usable) {
                first.push_back(s->thermal_first_means.at(roi));
                last.push_back(s->thermal_last_means.at(roi));
                rel.push_back(s->thermal->rel_forehead_c.at(roi));
            }
            Json row;
            row["roi"] = roi;
            double mean_delta = 0.0, mean_rel = 0.0;
            for (std::size_t i = 0; i < first.size(); ++i) {
                mean_delta += last[i] - first[i];
                mean_rel += rel[i];
            }
            mean_delta /= static_cast<double>(first.size());
            mean_rel /= static_cast<double>(first.size());
            row["mean_delta"] = mean_delta;
            row["mean_rel_forehead"] = mean_rel;
            std::string t_txt = "nan", p_txt = "nan", tr_txt = "nan", pr_txt = "nan";
            try {
                const stats::TestResult res = cfg.paired_ttests ? stats::paired_ttest(last, first)
                                                                : stats::unpaired_ttest(last, first);
                row["t"] = res.statistic;
                row["p"] = res.p_value;
                t_txt = csv_cell(res.statistic);
                p_txt = csv_cell(res.p_value);
            } catch (const Error&) {
                row["t"] = nullptr;
                row["p"] = nullptr;
            }
            try {
                const std::vector<double> zeros(rel.size(), 0.0);
                const stats::TestResult res = stats::paired_ttest(rel, zeros);
                row["t_rel"] = res.statistic;
                row["p_rel"] = res.p_value;
                tr_txt = csv_cell(res.statistic);
                pr_txt = csv_cell(res.p_value);
            } catch (const Error&) {
                row["t_rel"] = nullptr;
                row["p_rel"] = nullptr;
            }
            thermal_tests_csv << roi << ',' << csv_cell(mean_delta) << ',' << t_txt << ',' << p_txt
                              << ',' << csv_cell(mean_rel) << ',' << tr_txt << ',' << pr_txt << ','
                              << first.size() << "\n";
            thermal_tests.push_back(row);
        }
    }
    report["thermal_ttests"] = thermal_tests;
    write_text(thermal_tests_csv.str(), out_dir / "thermal_ttests.csv");

    // ---- HRV delta x thermal delta correlation matrix ----
    Json corr;
    std::ostringstream corr_csv, corr_p_csv;
    corr_csv << "feature";
    corr_p_csv << "feature";
    for (int roi : rois) {
        corr_csv << ",roi_" << roi;
        corr_p_csv << ",roi_" << roi;
    }
    corr_csv << "\n";
    corr_p_csv << "\n";
    Json corr_rows = Json::array();
    if (usable.size() >= 3) {
        for (std::size_t f = 0; f < kHrvFeatureNames.size(); ++f) {
            std::vector<double> hrv_delta;
            for (const SessionState* s : usable) {
                hrv_delta.push_back(s->hrv_last->ordered()[f] - s->hrv_first->ordered()[f]);
            }
            Json row;
            row["feature"] = kHrvFeatureNames[f];
            Json r_cells = Json::array(), p_cells = Json::array();
            corr_csv << kHrvFeatureNames[f];
            corr_p_csv << kHrvFeatureNames[f];
            for (int roi : rois) {
                std::vector<double> thermal_delta;
                for (const SessionState* s : usable) thermal_delta.push_back(s->thermal->delta_c.at(roi));
                try {
                    const stats::TestResult res = stats::pearson(hrv_delta, thermal_delta);
                    r_cells.push_back(res.statistic);
                    p_cells.push_back(res.p_value);
                    corr_csv << ',' << csv_cell(res.statistic);
                    corr_p_csv << ',' << csv_cell(res.p_value);
                } catch (const Error&) {
                    r_cells.push_back(nullptr);
                    p_cells.push_back(nullptr);
                    corr_csv << ",nan";
                    corr_p_csv << ",nan";
                }
            }
            corr_csv << "\n";
            corr_p_csv << "\n";
            row["r"] = r_cells;
            row["p"] = p_cells;
            corr_rows.push_back(row);
        }
    }
    corr["rois"] = rois;
    corr["rows"] = corr_rows;
    report["correlation_matrix"] = corr;
    write_text(corr_csv.str(), out_dir / "correlation_matrix.csv");
    write_text(corr_p_csv.str(), out_dir / "correlation_pvalues.csv");

    // ---- attribution rankings ----
    Json attribution_block = Json::array();
    std::ostringstream attribution_csv;
    attribution_csv << "mode,model,rank,feature,mean_abs_phi,top10\n";
    for (const TrainedEntry& entry : trained) {
        try {
            const ml::Dataset& data = entry.dataset;
            std::vector<std::vector<double>> background;
            Rng bg_rng(derive_seed(cfg.seed, "shap-background"));
            std::vector<std::size_t> idx(data.vectors.size());
            for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
            bg_rng.shuffle(idx);
            const std::size_t n_bg = std::min<std::size_t>(idx.size(), static_cast<std::size_t>(cfg.shap_background));
            for (std::size_t i = 0; i < n_bg; ++i) background.push_back(data.vectors[idx[i]].features);

            const ml::TrainedModel& model = entry.result.model;
            const attribution::ModelFn fn = [&model](std::span<const double> x) {
                return model.predict_prob(x);
            };
            std::vector<attribution::AttributionReport> reports;
            const std::size_t n_inst =
                std::min<std::size_t>(data.vectors.size(), static_cast<std::size_t>(cfg.shap_max_instances));
            for (std::size_t i = 0; i < n_inst; ++i) {
                reports.push_back(attribution::shapley_mc(
                    fn, data.vectors[i].features, background, cfg.shap_permutations,
                    derive_seed(cfg.seed, "shap-instance", i)));
            }
            const attribution::FeatureRanking ranking = attribution::rank_features(reports);

            Json block;
            block["mode"] = entry.mode;
            block["model"] = entry.model_name;
            Json ranked = Json::array();
            for (std::size_t r = 0; r < ranking.order.size(); ++r) {
                const int f = ranking.order[r];
                ranked.push_back({{"feature", data.feature_names[static_cast<std::size_t>(f)]},
                                  {"mean_abs_phi", ranking.mean_abs_phi[static_cast<std::size_t>(f)]},
                                  {"top10", r < 10}});
                attribution_csv << entry.mode << ',' << entry.model_name << ',' << (r + 1) << ','
                                << data.feature_names[static_cast<std::size_t>(f)] << ','
                                << format_double(ranking.mean_abs_phi[static_cast<std::size_t>(f)])
                                << ',' << (r < 10 ? 1 : 0) << "\n";
            }
            block["ranking"] = ranked;
            attribution_block.push_back(block);
        } catch (const Error& e) {
            step_errors.push_back({{"step", "attribution"},
                                   {"mode", entry.mode},
                                   {"model", entry.model_name},
                                   {"error", e.what()}});
        }
    }
    report["attribution"] = attribution_block;
    write_text(attribution_csv.str(), out_dir / "attribution.csv");

    // ---- ECG agreement sweep (uses every parsed session with ECG metrics,
    // the gate does not apply here: the sweep exists to study it) ----
    Json agreement_block = Json::array();
    std::vector<MetricPair> pairs;
    for (const SessionState& state : sessions) {
        if (!state.ecg_first || !state.hrv_first) continue;
        pairs.push_back(MetricPair{state.manifest.session_id, state.quality, *state.hrv_first,
                                   *state.ecg_first, "first120"});
        pairs.push_back(MetricPair{state.manifest.session_id, state.quality, *state.hrv_last,
                                   *state.ecg_last, "last120"});
    }
    if (pairs.size() >= 3) {
        std::vector<double> thresholds;
        for (double t = cfg.agree_lo; t <= cfg.agree_hi + 1e-9; t += cfg.agree_step) {
            std::size_t kept = 0;
            for (const MetricPair& pair : pairs) {
                if (pair.quality <= t) ++kept;
            }
            if (kept >= 3) thresholds.push_back(t);
        }
        if (!thresholds.empty()) {
            try {
                const std::vector<AgreementRow> rows = agreement_sweep(pairs, thresholds);
                write_text(serde::agreement_csv(rows), out_dir / "agreement.csv");
                for (const AgreementRow& row : rows) {
                    Json entry;
                    entry["threshold"] = row.threshold;
                    entry["n"] = row.n;
                    for (std::size_t m = 0; m < kAgreementMetrics.size(); ++m) {
                        entry[std::string("r_") + kAgreementMetrics[m]] = row.r[m];
                        entry[std::string("p_") + kAgreementMetrics[m]] = row.p[m];
                    }
                    agreement_block.push_back(entry);
                }
            } catch (const Error& e) {
                step_errors.push_back({{"step", "agreement"}, {"error", e.what()}});
            }
        }
    }
    report["agreement"] = agreement_block;

    report["step_errors"] = step_errors;

    PipelineResult result;
    if (usable.empty()) {
        result.exit_code = 3;
    } else if (failures > 0 || !load_errors.empty()) {
        result.exit_code = 2;
    } else {
        result.exit_code = 0;
    }
    report["exit_code"] = result.exit_code;
    result.report = report;
    serde::write_json(report, out_dir / "report.json");
    return result;
}

}  // namespace vitalsig::pipeline
