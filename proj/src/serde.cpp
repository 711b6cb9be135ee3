#include "vitalsig/serde.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vitalsig/dataio.hpp"
#include "vitalsig/errors.hpp"

namespace vitalsig::serde {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

Json tree_to_json(const ml::DecisionTree& tree) {
    Json nodes = Json::array();
    for (const ml::TreeNode& node : tree.nodes) {
        nodes.push_back({{"feature", node.feature},
                         {"threshold", node.threshold},
                         {"left", node.left},
                         {"right", node.right},
                         {"prob", node.prob}});
    }
    return nodes;
}

ml::DecisionTree tree_from_json(const Json& nodes) {
    ml::DecisionTree tree;
    for (const Json& node : nodes) {
        tree.nodes.push_back(ml::TreeNode{node.at("feature").get<int>(),
                                          node.at("threshold").get<double>(),
                                          node.at("left").get<int>(), node.at("right").get<int>(),
                                          node.at("prob").get<double>()});
    }
    return tree;
}

}  // namespace

Json hr_series_to_json(const HrSeries& hr, double duration_s, double quality) {
    Json doc;
    doc["window_s"] = hr.window_s;
    doc["hop_s"] = hr.hop_s;
    doc["duration_s"] = duration_s;
    Json values = Json::array();
    for (std::size_t i = 0; i < hr.values.size(); ++i) {
        const bool ok = (i >= hr.valid.size() || hr.valid[i]) && !std::isnan(hr.values[i]);
        values.push_back(ok ? Json(hr.values[i]) : Json(nullptr));
    }
    doc["values"] = values;
    doc["times_s"] = hr.times_s;
    Json per_patch = Json::array();
    for (const auto& window : hr.per_patch) per_patch.push_back(window);
    doc["per_patch"] = per_patch;
    doc["quality"] = quality;
    return doc;
}

HrSeries hr_series_from_json(const Json& doc) {
    HrSeries hr;
    hr.window_s = doc.at("window_s").get<double>();
    hr.hop_s = doc.at("hop_s").get<double>();
    for (const Json& v : doc.at("values")) {
        if (v.is_null()) {
            hr.values.push_back(kNaN);
            hr.valid.push_back(false);
        } else {
            hr.values.push_back(v.get<double>());
            hr.valid.push_back(true);
        }
    }
    if (doc.contains("times_s")) {
        for (const Json& t : doc.at("times_s")) hr.times_s.push_back(t.get<double>());
    }
    if (doc.contains("per_patch")) {
        for (const Json& window : doc.at("per_patch")) {
            hr.per_patch.push_back(window.get<std::vector<double>>());
        }
    }
    return hr;
}

double hr_series_duration(const Json& doc) { return doc.at("duration_s").get<double>(); }

Json hrv_metrics_to_json(const HrvMetrics& metrics, bool include_flags) {
    Json doc;
    doc["hr"] = metrics.hr_mean;
    doc["sdnn"] = metrics.sdnn;
    doc["rmssd"] = metrics.rmssd;
    doc["pnn50"] = metrics.pnn50;
    doc["ln_hf"] = metrics.ln_hf;
    doc["ln_lf"] = metrics.ln_lf;
    doc["ln_lf_hf"] = metrics.ln_lf_hf;
    if (include_flags) {
        doc["degenerate"] = metrics.degenerate;
        doc["outlier"] = metrics.outlier;
    }
    return doc;
}

HrvMetrics hrv_metrics_from_json(const Json& doc) {
    HrvMetrics m;
    m.hr_mean = doc.at("hr").get<double>();
    m.sdnn = doc.at("sdnn").get<double>();
    m.rmssd = doc.at("rmssd").get<double>();
    m.pnn50 = doc.at("pnn50").get<double>();
    m.ln_hf = doc.at("ln_hf").get<double>();
    m.ln_lf = doc.at("ln_lf").get<double>();
    m.ln_lf_hf = doc.at("ln_lf_hf").get<double>();
    if (doc.contains("degenerate")) m.degenerate = doc.at("degenerate").get<bool>();
    if (doc.contains("outlier")) m.outlier = doc.at("outlier").get<bool>();
    return m;
}

Json dataset_to_json(const ml::Dataset& data) {
    Json doc;
    doc["mode"] = data.mode;
    doc["feature_names"] = data.feature_names;
    Json rows = Json::array();
    for (const ml::FeatureVector& v : data.vectors) {
        rows.push_back({{"session_id", v.session_id},
                        {"segment_index", v.segment_index},
                        {"label", v.label},
                        {"features", v.features}});
    }
    doc["vectors"] = rows;
    return doc;
}

ml::Dataset dataset_from_json(const Json& doc) {
    ml::Dataset data;
    data.mode = doc.at("mode").get<std::string>();
    data.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    for (const Json& row : doc.at("vectors")) {
        ml::FeatureVector v;
        v.session_id = row.at("session_id").get<std::string>();
        v.segment_index = row.at("segment_index").get<int>();
        v.label = row.at("label").get<int>();
        v.features = row.at("features").get<std::vector<double>>();
        data.vectors.push_back(std::move(v));
    }
    return data;
}

Json model_to_json(const ml::TrainedModel& model) {
    Json doc;
    doc["kind"] = model.kind;
    doc["feature_names"] = model.feature_names;
    if (model.kind == "rf") {
        const auto& rf = std::get<ml::RfModel>(model.impl);
        doc["params"] = {{"n_trees", rf.params.n_trees},
                         {"max_depth", rf.params.max_depth},
                         {"min_leaf", rf.params.min_leaf},
                         {"seed", rf.params.seed}};
        Json trees = Json::array();
        for (const ml::DecisionTree& tree : rf.trees) trees.push_back(tree_to_json(tree));
        doc["trees"] = trees;
    } else if (model.kind == "svm") {
        const auto& svm = std::get<ml::SvmModel>(model.impl);
        doc["params"] = {{"c", svm.params.c}, {"gamma", svm.params.gamma}};
        doc["mean"] = svm.mean;
        doc["sd"] = svm.sd;
        doc["support_vectors"] = svm.support_vectors;
        doc["alpha_y"] = svm.alpha_y;
        doc["bias"] = svm.bias;
        doc["platt_a"] = svm.platt_a;
        doc["platt_b"] = svm.platt_b;
    } else if (model.kind == "fusion_tree") {
        const auto& fusion = std::get<ml::FusionTreeModel>(model.impl);
        doc["tree"] = tree_to_json(fusion.tree);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown model kind " + model.kind);
    }
    return doc;
}

ml::TrainedModel model_from_json(const Json& doc) {
    ml::TrainedModel model;
    model.kind = doc.at("kind").get<std::string>();
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    if (model.kind == "rf") {
        ml::RfModel rf;
        rf.params.n_trees = doc.at("params").at("n_trees").get<int>();
        rf.params.max_depth = doc.at("params").at("max_depth").get<int>();
        rf.params.min_leaf = doc.at("params").at("min_leaf").get<int>();
        rf.params.seed = doc.at("params").at("seed").get<std::uint64_t>();
        for (const Json& tree : doc.at("trees")) rf.trees.push_back(tree_from_json(tree));
        model.impl = std::move(rf);
    } else if (model.kind == "svm") {
        ml::SvmModel svm;
        svm.params.c = doc.at("params").at("c").get<double>();
        svm.params.gamma = doc.at("params").at("gamma").get<double>();
        svm.mean = doc.at("mean").get<std::vector<double>>();
        svm.sd = doc.at("sd").get<std::vector<double>>();
        svm.support_vectors = doc.at("support_vectors").get<std::vector<std::vector<double>>>();
        svm.alpha_y = doc.at("alpha_y").get<std::vector<double>>();
        svm.bias = doc.at("bias").get<double>();
        svm.platt_a = doc.at("platt_a").get<double>();
        svm.platt_b = doc.at("platt_b").get<double>();
        model.impl = std::move(svm);
    } else if (model.kind == "fusion_tree") {
        ml::FusionTreeModel fusion;
        fusion.tree = tree_from_json(doc.at("tree"));
        model.impl = std::move(fusion);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown model kind " + model.kind);
    }
    return model;
}

Json eval_report_to_json(const ml::EvalReport& report, const std::string& mode,
                         const std::string& model) {
    Json doc;
    doc["mode"] = mode;
    doc["model"] = model;
    doc["avg_accuracy"] = report.avg_accuracy;
    doc["avg_f1"] = report.avg_f1;
    Json folds = Json::array();
    for (const ml::FoldScore& fold : report.folds) {
        folds.push_back({{"accuracy", fold.accuracy}, {"f1", fold.f1}});
    }
    doc["folds"] = folds;
    doc["chosen_params"] = report.chosen_params;
    return doc;
}

Json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedManifest, path.string() + ": " + e.what());
    }
}

void write_json(const Json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

std::string agreement_csv(const std::vector<AgreementRow>& rows) {
    std::ostringstream out;
    out << "threshold";
    for (const char* metric : kAgreementMetrics) out << ",r_" << metric;
    for (const char* metric : kAgreementMetrics) out << ",p_" << metric;
    out << ",n\n";
    for (const AgreementRow& row : rows) {
        out << format_double(row.threshold);
        for (double r : row.r) out << ',' << format_double(r);
        for (double p : row.p) out << ',' << format_double(p);
        out << ',' << row.n << "\n";
    }
    return out.str();
}

}  // namespace vitalsig::serde
