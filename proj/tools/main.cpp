#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vitalsig/attribution.hpp"
#include "vitalsig/dataio.hpp"
#include "vitalsig/ecgref.hpp"
#include "vitalsig/errors.hpp"
#include "vitalsig/hrv.hpp"
#include "vitalsig/log.hpp"
#include "vitalsig/ml.hpp"
#include "vitalsig/pipeline.hpp"
#include "vitalsig/rng.hpp"
#include "vitalsig/rppg.hpp"
#include "vitalsig/serde.hpp"
#include "vitalsig/synth.hpp"
#include "vitalsig/thermal.hpp"

using namespace vitalsig;
using serde::Json;

namespace {

struct SynthArgs {
    std::string kind;
    std::uint64_t seed = 0;
    std::string out_dir;
    double duration_s = 300.0;
    double fps = 30.0;
    double bpm = 72.0;
    double bpm_end = -1.0;  // < 0: constant profile
    double modulation = 0.02;
    double noise = 0.0;
    int patches = 3;
    int beats = 100;
    double rr_min = 600.0;
    double rr_max = 1200.0;
    double ecg_fs = 250.0;
    int n_per_class = 200;
    int features = 29;
    double separation = 6.0;
    int informative = 2;
    int sessions = 4;
};

int cmd_synth(const SynthArgs& args) {
    const std::filesystem::path out(args.out_dir);
    std::filesystem::create_directories(out);
    Json truth;
    truth["kind"] = args.kind;
    truth["seed"] = args.seed;

    if (args.kind == "rppg") {
        synth::SynthSpec spec;
        spec.seed = args.seed;
        spec.duration_s = args.duration_s;
        spec.fps = args.fps;
        spec.hr = args.bpm_end > 0 ? synth::HrProfile::ramp(args.bpm, args.bpm_end, args.duration_s)
                                   : synth::HrProfile::constant(args.bpm);
        spec.modulation_depth = args.modulation;
        spec.noise_sigma = args.noise;
        spec.n_patches = args.patches;
        const synth::RppgSynth gen = synth::synth_rppg(spec);
        save_rgb_traces(gen.traces, out / "rgb.csv");
        truth["fps"] = args.fps;
        truth["hr_truth"] = {{"hop_s", gen.truth.hop_s}, {"values", gen.truth.values}};
    } else if (args.kind == "ecg") {
        Rng rng(args.seed);
        std::vector<double> rr(static_cast<std::size_t>(args.beats));
        for (double& v : rr) v = rng.uniform(args.rr_min, args.rr_max);
        const synth::EcgSynth gen = synth::synth_ecg(rr, args.ecg_fs);
        save_ecg(gen.trace, out / "ecg.csv");
        truth["fs"] = args.ecg_fs;
        truth["rr_ms"] = rr;
        truth["r_peak_times"] = gen.r_peak_times;
    } else if (args.kind == "thermal") {
        Rng rng(args.seed);
        synth::ThermalSynthSpec spec;
        spec.seed = args.seed;
        spec.fps = 10.0;
        spec.duration_s = std::max(args.duration_s, 240.0);
        spec.noise_sigma = args.noise;
        Json deltas;
        for (int roi : kCanonicalThermalRois) {
            spec.baselines_c[roi] = 33.0 + rng.uniform(-0.5, 0.5);
            spec.step_delta_c[roi] = rng.uniform(-0.5, 0.5);
            deltas[std::to_string(roi)] = spec.step_delta_c[roi];
        }
        save_thermal_traces(synth::synth_thermal(spec), out / "thermal.csv");
        truth["step_delta_c"] = deltas;
    } else if (args.kind == "dataset") {
        std::vector<int> informative;
        for (int i = 0; i < args.informative; ++i) informative.push_back(i);
        const synth::SynthDataset ds =
            synth::synth_dataset(args.n_per_class, args.features, args.separation, args.seed, informative);
        serde::write_json(serde::dataset_to_json(ds.data), out / "dataset.json");
        truth["informative"] = ds.informative;
        truth["separation"] = ds.separation;
    } else if (args.kind == "corpus") {
        const auto manifests = synth::synth_corpus(out, args.sessions, args.seed);
        Json list = Json::array();
        for (const auto& m : manifests) list.push_back(m.string());
        truth["manifests"] = list;
    } else {
        std::fprintf(stderr, "unknown synth kind '%s'\n", args.kind.c_str());
        return 1;
    }
    serde::write_json(truth, out / "truth.json");
    std::printf("wrote %s outputs to %s\n", args.kind.c_str(), out.string().c_str());
    return 0;
}

int cmd_rppg(const std::string& in, const std::string& out, double window_s, double hop_s,
             double min_peak_ratio) {
    const RgbPatchTraceSet traces = load_rgb_traces(in);
    const BvpSignal bvp = pos_bvp(traces);
    const HrSeries hr = estimate_hr(bvp, window_s, hop_s, min_peak_ratio);
    const QualityScore quality = quality_index(hr);
    serde::write_json(serde::hr_series_to_json(hr, traces.duration_s(), quality.mae_over_hr), out);
    std::printf("hr series: %zu windows, quality MAE/HR %.4f\n", hr.values.size(),
                quality.mae_over_hr);
    return 0;
}

int cmd_hrv(const std::string& in, const std::string& segment, const std::string& out,
            double jump_bpm) {
    const Json doc = serde::load_json(in);
    const HrSeries raw = serde::hr_series_from_json(doc);
    const double duration = serde::hr_series_duration(doc);
    const HrSeries cleaned = clean_hr(raw, jump_bpm);

    double t0 = 0.0, t1 = 120.0;
    if (segment == "last120") {
        t0 = duration - 120.0;
        t1 = duration + 1e-9;
    } else if (segment != "first120") {
        std::fprintf(stderr, "--segment must be first120 or last120\n");
        return 1;
    }
    const HrvMetrics metrics = segment_metrics(cleaned, t0, t1);
    serde::write_json(serde::hrv_metrics_to_json(metrics), out);
    std::printf("%s: hr %.2f sdnn %.2f rmssd %.2f pnn50 %.2f\n", segment.c_str(), metrics.hr_mean,
                metrics.sdnn, metrics.rmssd, metrics.pnn50);
    return 0;
}

int cmd_thermal(const std::string& in, const std::string& out, int forehead_roi) {
    const ThermalTraceSet traces = load_thermal_traces(in);
    const ThermalFeatures features = thermal_features(traces, forehead_roi);
    Json doc;
    Json delta, rel;
    for (const auto& [roi, v] : features.delta_c) delta[std::to_string(roi)] = v;
    for (const auto& [roi, v] : features.rel_forehead_c) rel[std::to_string(roi)] = v;
    doc["delta"] = delta;
    doc["rel_forehead"] = rel;
    doc["forehead_roi"] = features.forehead_roi;
    doc["invalid_rois"] = features.invalid_rois;
    serde::write_json(doc, out);
    std::printf("thermal features for %zu ROIs\n", features.delta_c.size());
    return 0;
}

int cmd_agree(const std::string& pairs_path, const std::string& thresholds_arg,
              const std::string& out, bool delta_mode, const std::vector<std::string>& exclude) {
    const Json doc = serde::load_json(pairs_path);
    std::vector<MetricPair> pairs;
    for (const Json& row : doc.at("pairs")) {
        MetricPair pair;
        pair.session_id = row.at("session_id").get<std::string>();
        if (std::find(exclude.begin(), exclude.end(), pair.session_id) != exclude.end()) continue;
        pair.quality = row.at("quality").get<double>();
        pair.rppg = serde::hrv_metrics_from_json(row.at("rppg"));
        pair.ecg = serde::hrv_metrics_from_json(row.at("ecg"));
        if (row.contains("segment")) pair.segment = row.at("segment").get<std::string>();
        pairs.push_back(std::move(pair));
    }

    if (delta_mode) {
        // correlate per-session last-minus-first differences instead of raw values
        std::map<std::string, std::map<std::string, MetricPair>> by_session;
        for (const MetricPair& pair : pairs) {
            if (!pair.segment) {
                std::fprintf(stderr, "--delta needs a segment field on every pair\n");
                return 1;
            }
            by_session[pair.session_id][*pair.segment] = pair;
        }
        std::vector<MetricPair> deltas;
        auto subtract = [](const HrvMetrics& a, const HrvMetrics& b) {
            HrvMetrics d;
            d.hr_mean = a.hr_mean - b.hr_mean;
            d.sdnn = a.sdnn - b.sdnn;
            d.rmssd = a.rmssd - b.rmssd;
            d.pnn50 = a.pnn50 - b.pnn50;
            d.ln_hf = a.ln_hf - b.ln_hf;
            d.ln_lf = a.ln_lf - b.ln_lf;
            d.ln_lf_hf = a.ln_lf_hf - b.ln_lf_hf;
            return d;
        };
        for (const auto& [id, segments] : by_session) {
            if (!segments.count("first120") || !segments.count("last120")) continue;
            MetricPair pair;
            pair.session_id = id;
            pair.quality = segments.at("first120").quality;
            pair.rppg = subtract(segments.at("last120").rppg, segments.at("first120").rppg);
            pair.ecg = subtract(segments.at("last120").ecg, segments.at("first120").ecg);
            deltas.push_back(std::move(pair));
        }
        pairs = std::move(deltas);
    }

    // thresholds: "lo:hi:step"
    double lo = 0.30, hi = 0.48, step = 0.02;
    if (std::sscanf(thresholds_arg.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0) {
        std::fprintf(stderr, "--thresholds must look like 0.30:0.48:0.02\n");
        return 1;
    }
    std::vector<double> thresholds;
    for (double t = lo; t <= hi + 1e-9; t += step) thresholds.push_back(t);

    const std::vector<AgreementRow> rows = agreement_sweep(pairs, thresholds);
    std::ofstream file(out);
    file << serde::agreement_csv(rows);
    std::printf("agreement table with %zu thresholds, n from %d to %d\n", rows.size(),
                rows.front().n, rows.back().n);
    return 0;
}

int cmd_train(const std::string& dataset_path, const std::string& mode, const std::string& model_name,
              std::uint64_t seed, int folds, const std::string& out_model,
              const std::string& out_report) {
    const ml::Dataset data = serde::dataset_from_json(serde::load_json(dataset_path));
    ml::GridResult result;
    std::string model_label = model_name;
    if (mode == "late") {
        // train both unimodal models on column blocks named in feature_names
        std::fprintf(stderr, "late fusion is produced by 'vitalsig run'; train rf/svm per modality\n");
        return 1;
    }
    if (model_name == "rf") {
        result = ml::grid_search_cv(data, ml::ModelKind::rf, ml::Grid::default_rf(seed),
                                    folds, seed);
    } else if (model_name == "svm") {
        result = ml::grid_search_cv(data, ml::ModelKind::svm, ml::Grid::default_svm(data.width()),
                                    folds, seed);
    } else {
        std::fprintf(stderr, "--model must be rf or svm\n");
        return 1;
    }
    serde::write_json(serde::model_to_json(result.model), out_model);
    serde::write_json(serde::eval_report_to_json(result.report, mode, model_label), out_report);
    std::printf("%s/%s: avg accuracy %.3f, avg f1 %.3f\n", mode.c_str(), model_label.c_str(),
                result.report.avg_accuracy, result.report.avg_f1);
    return 0;
}

int cmd_explain(const std::string& model_path, const std::string& dataset_path, int permutations,
                std::uint64_t seed, const std::string& out) {
    const ml::TrainedModel model = serde::model_from_json(serde::load_json(model_path));
    const ml::Dataset data = serde::dataset_from_json(serde::load_json(dataset_path));
    const attribution::ModelFn fn = [&](std::span<const double> x) { return model.predict_prob(x); };

    Rng rng(derive_seed(seed, "explain-background"));
    std::vector<std::size_t> idx(data.vectors.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    std::vector<std::vector<double>> background;
    for (std::size_t i = 0; i < std::min<std::size_t>(idx.size(), 50); ++i) {
        background.push_back(data.vectors[idx[i]].features);
    }

    std::vector<attribution::AttributionReport> reports;
    const std::size_t n_inst = std::min<std::size_t>(data.vectors.size(), 50);
    for (std::size_t i = 0; i < n_inst; ++i) {
        reports.push_back(attribution::shapley_mc(fn, data.vectors[i].features, background,
                                                  permutations, derive_seed(seed, "explain", i)));
    }
    const attribution::FeatureRanking ranking = attribution::rank_features(reports);

    Json doc;
    doc["estimator"] = "mc";
    doc["n_permutations"] = permutations;
    doc["n_instances"] = n_inst;
    Json list = Json::array();
    for (std::size_t r = 0; r < ranking.order.size(); ++r) {
        const int f = ranking.order[r];
        list.push_back({{"feature", data.feature_names[static_cast<std::size_t>(f)]},
                        {"mean_abs_phi", ranking.mean_abs_phi[static_cast<std::size_t>(f)]},
                        {"top10", r < 10}});
    }
    doc["ranking"] = list;
    serde::write_json(doc, out);
    std::printf("ranked %zu features over %zu instances\n", ranking.order.size(), n_inst);
    return 0;
}

int cmd_run(const std::vector<std::string>& manifest_args, const std::string& config_path,
            std::uint64_t seed, bool seed_set, const std::string& out_dir) {
    pipeline::PipelineConfig cfg;
    if (!config_path.empty()) cfg = pipeline::load_config(config_path);
    if (seed_set) cfg.seed = seed;
    std::vector<std::filesystem::path> manifests(manifest_args.begin(), manifest_args.end());
    const pipeline::PipelineResult result = pipeline::run_pipeline(manifests, cfg, out_dir);
    std::printf("pipeline finished with exit code %d (%zu sessions)\n", result.exit_code,
                result.report.at("sessions").size());
    return result.exit_code;
}

int cmd_report(const std::string& in_dir) {
    const Json report = serde::load_json(std::filesystem::path(in_dir) / "report.json");
    std::printf("sessions:\n");
    for (const Json& session : report.at("sessions")) {
        std::printf("  %-8s %-9s quality %.4f\n", session.at("session_id").get<std::string>().c_str(),
                    session.at("status").get<std::string>().c_str(),
                    session.at("quality_mae_over_hr").get<double>());
    }
    std::printf("accuracy table:\n");
    for (const Json& row : report.at("accuracy_table")) {
        std::printf("  %-12s %-13s accuracy %.3f f1 %.3f\n",
                    row.at("mode").get<std::string>().c_str(),
                    row.at("model").get<std::string>().c_str(), row.at("avg_accuracy").get<double>(),
                    row.at("avg_f1").get<double>());
    }
    const Json& step_errors = report.at("step_errors");
    if (!step_errors.empty()) {
        std::printf("step errors:\n");
        for (const Json& err : step_errors) {
            std::printf("  %s: %s\n", err.at("step").get<std::string>().c_str(),
                        err.at("error").get<std::string>().c_str());
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vitalsig: r-PPG + thermal mental-state feature pipeline"};
    app.require_subcommand(1);

    // synth
    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "generate synthetic traces with ground truth");
    synth->add_option("--kind", synth_args.kind, "rppg|ecg|thermal|dataset|corpus")->required();
    synth->add_option("--seed", synth_args.seed, "rng seed");
    synth->add_option("--out", synth_args.out_dir, "output directory")->required();
    synth->add_option("--duration", synth_args.duration_s, "seconds");
    synth->add_option("--fps", synth_args.fps, "frames per second");
    synth->add_option("--bpm", synth_args.bpm, "heart rate (constant or ramp start)");
    synth->add_option("--bpm-end", synth_args.bpm_end, "ramp end BPM");
    synth->add_option("--modulation", synth_args.modulation, "pulse modulation depth");
    synth->add_option("--noise", synth_args.noise, "noise sigma");
    synth->add_option("--patches", synth_args.patches, "number of RGB patches");
    synth->add_option("--beats", synth_args.beats, "ECG beat count");
    synth->add_option("--rr-min", synth_args.rr_min, "min RR (ms)");
    synth->add_option("--rr-max", synth_args.rr_max, "max RR (ms)");
    synth->add_option("--ecg-fs", synth_args.ecg_fs, "ECG sampling rate");
    synth->add_option("--n-per-class", synth_args.n_per_class, "dataset rows per class");
    synth->add_option("--features", synth_args.features, "dataset feature count");
    synth->add_option("--separation", synth_args.separation, "class separation in sigma");
    synth->add_option("--informative", synth_args.informative, "informative feature count");
    synth->add_option("--sessions", synth_args.sessions, "corpus session count");

    // rppg
    std::string rppg_in, rppg_out;
    double rppg_window = 6.0, rppg_hop = 1.0, rppg_ratio = 6.0;
    CLI::App* rppg = app.add_subcommand("rppg", "RGB traces -> windowed HR series");
    rppg->add_option("--in", rppg_in, "rgb csv")->required();
    rppg->add_option("--out", rppg_out, "hr json")->required();
    rppg->add_option("--window", rppg_window, "window seconds");
    rppg->add_option("--hop", rppg_hop, "hop seconds");
    rppg->add_option("--min-peak-ratio", rppg_ratio, "pulse peak / band mean gate");

    // hrv
    std::string hrv_in, hrv_segment = "first120", hrv_out;
    double hrv_jump = 25.0;
    CLI::App* hrv = app.add_subcommand("hrv", "HR series -> 120 s HRV metrics");
    hrv->add_option("--in", hrv_in, "hr json")->required();
    hrv->add_option("--segment", hrv_segment, "first120|last120");
    hrv->add_option("--out", hrv_out, "metrics json")->required();
    hrv->add_option("--jump-bpm", hrv_jump, "cleaning threshold");

    // thermal
    std::string thermal_in, thermal_out;
    int forehead = 58;
    CLI::App* thermal = app.add_subcommand("thermal", "thermal traces -> segment features");
    thermal->add_option("--in", thermal_in, "thermal csv")->required();
    thermal->add_option("--out", thermal_out, "features json")->required();
    thermal->add_option("--forehead-roi", forehead, "reference ROI id");

    // agree
    std::string agree_pairs, agree_thresholds = "0.30:0.48:0.02", agree_out;
    bool agree_delta = false;
    std::vector<std::string> agree_exclude;
    CLI::App* agree = app.add_subcommand("agree", "r-PPG vs ECG agreement sweep");
    agree->add_option("--pairs", agree_pairs, "pairs json")->required();
    agree->add_option("--thresholds", agree_thresholds, "lo:hi:step");
    agree->add_option("--out", agree_out, "csv path")->required();
    agree->add_flag("--delta", agree_delta, "correlate per-session segment deltas");
    agree->add_option("--exclude", agree_exclude, "session ids to drop")->take_all();

    // train
    std::string train_dataset, train_mode = "early", train_model = "rf";
    std::string train_out_model, train_out_report;
    std::uint64_t train_seed = 0;
    int train_folds = 5;
    CLI::App* train = app.add_subcommand("train", "grid-searched model on a dataset");
    train->add_option("--dataset", train_dataset, "dataset json")->required();
    train->add_option("--mode", train_mode, "rppg|thermal|early|late");
    train->add_option("--model", train_model, "rf|svm");
    train->add_option("--seed", train_seed, "rng seed");
    train->add_option("--folds", train_folds, "cv folds");
    train->add_option("--out", train_out_model, "model json")->required();
    train->add_option("--report", train_out_report, "report json")->required();

    // explain
    std::string explain_model, explain_dataset, explain_out;
    int explain_perms = 2000;
    std::uint64_t explain_seed = 0;
    CLI::App* explain = app.add_subcommand("explain", "Shapley feature ranking for a model");
    explain->add_option("--model", explain_model, "model json")->required();
    explain->add_option("--dataset", explain_dataset, "dataset json")->required();
    explain->add_option("--permutations", explain_perms, "monte-carlo permutations");
    explain->add_option("--seed", explain_seed, "rng seed");
    explain->add_option("--out", explain_out, "shap json")->required();

    // run
    std::vector<std::string> run_manifests;
    std::string run_config, run_out;
    std::uint64_t run_seed = 0;
    bool run_seed_set = false;
    CLI::App* run = app.add_subcommand("run", "full pipeline over session manifests");
    run->add_option("manifests", run_manifests, "manifest json paths")->required();
    run->add_option("--config", run_config, "config json");
    run->add_option("--seed", run_seed, "rng seed (overrides config)")
        ->each([&](const std::string&) { run_seed_set = true; });
    run->add_option("--out", run_out, "output directory")->required();

    // report
    std::string report_in;
    CLI::App* report = app.add_subcommand("report", "summarize a run directory");
    report->add_option("--in", report_in, "run output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(synth_args);
        if (rppg->parsed()) return cmd_rppg(rppg_in, rppg_out, rppg_window, rppg_hop, rppg_ratio);
        if (hrv->parsed()) return cmd_hrv(hrv_in, hrv_segment, hrv_out, hrv_jump);
        if (thermal->parsed()) return cmd_thermal(thermal_in, thermal_out, forehead);
        if (agree->parsed())
            return cmd_agree(agree_pairs, agree_thresholds, agree_out, agree_delta, agree_exclude);
        if (train->parsed())
            return cmd_train(train_dataset, train_mode, train_model, train_seed, train_folds,
                             train_out_model, train_out_report);
        if (explain->parsed())
            return cmd_explain(explain_model, explain_dataset, explain_perms, explain_seed,
                               explain_out);
        if (run->parsed()) return cmd_run(run_manifests, run_config, run_seed, run_seed_set, run_out);
        if (report->parsed()) return cmd_report(report_in);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
    return 0;
}
