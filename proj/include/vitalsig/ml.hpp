#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "vitalsig/hrv.hpp"
#include "vitalsig/thermal.hpp"

namespace vitalsig::ml {

struct FeatureVector {
    std::string session_id;
    int segment_index = 0;  // 0 = first 120 s, 1 = last 120 s
    int label = 0;          // 0 = baseline, 1 = stimulated
    std::vector<double> features;
};

struct Dataset {
    std::string mode;  // rppg | thermal | early_fusion | late_fusion | synthetic
    std::vector<std::string> feature_names;
    std::vector<FeatureVector> vectors;

    std::size_t width() const { return feature_names.size(); }
};

/// Per-session inputs for dataset assembly: metric blocks per 120-s segment.
struct SessionFeatures {
    std::string session_id;
    struct Segment {
        int label = 0;
        std::optional<HrvMetrics> rppg;
        std::optional<std::map<int, double>> thermal;  // roi -> mean temperature
    };
    std::vector<Segment> segments;
};

enum class Mode { rppg, thermal, early_fusion };
const char* mode_name(Mode mode);

/// One feature vector per (session, segment); early fusion concatenates the
/// 7 r-PPG features with the per-ROI block in canonical ROI order.
Dataset assemble(const std::vector<SessionFeatures>& sessions, Mode mode);

double gini_impurity(std::span<const int> labels);

// ---- models ---------------------------------------------------------------

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double prob = 0.0;  // class-1 proportion at the leaf
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    double predict_prob(std::span<const double> x) const;
};

struct RfParams {
    int n_trees = 100;
    int max_depth = -1;  // -1 = unlimited
    int min_leaf = 1;
    std::uint64_t seed = 0;
};

struct RfModel {
    RfParams params;
    std::vector<DecisionTree> trees;
    double predict_prob(std::span<const double> x) const;
};

struct SvmParams {
    double c = 1.0;
    double gamma = 0.1;
};

struct SvmModel {
    SvmParams params;
    std::vector<double> mean;  // standardization, per feature
    std::vector<double> sd;
    std::vector<std::vector<double>> support_vectors;  // standardized
    std::vector<double> alpha_y;
    double bias = 0.0;
    double platt_a = 0.0;
    double platt_b = 0.0;

    double decision(std::span<const double> x) const;
    double predict_prob(std::span<const double> x) const;
};

struct FusionTreeModel {
    DecisionTree tree;
    double predict_prob(std::span<const double> x) const { return tree.predict_prob(x); }
};

struct TrainedModel {
    std::string kind;  // rf | svm | fusion_tree
    std::vector<std::string> feature_names;
    std::variant<RfModel, SvmModel, FusionTreeModel> impl;

    double predict_prob(std::span<const double> x) const;
    int predict(std::span<const double> x) const { return predict_prob(x) >= 0.5 ? 1 : 0; }
};

// ---- training -------------------------------------------------------------

/// Bootstrap-sampled Gini trees over sqrt(d) random features per node.
TrainedModel train_rf(const Dataset& data, const RfParams& params);

/// Soft-margin RBF SVM trained by sequential pairwise optimization to KKT
/// tolerance 1e-3, features standardized, probabilities Platt-calibrated.
TrainedModel train_svm(const Dataset& data, const SvmParams& params);

/// Single Gini decision tree on all features (used for late fusion).
TrainedModel train_fusion_tree(const Dataset& data, int max_depth = 3);

struct FoldScore {
    double accuracy = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    double avg_accuracy = 0.0;
    double avg_f1 = 0.0;
    std::vector<FoldScore> folds;
    std::map<std::string, double> chosen_params;
    std::vector<double> oof_prob;  // out-of-fold probability per dataset row
    std::vector<int> fold_of;      // fold id per dataset row
};

struct GridResult {
    TrainedModel model;
    EvalReport report;
};

struct Grid {
    std::vector<RfParams> rf;
    std::vector<SvmParams> svm;

    static Grid default_rf(std::uint64_t seed);
    static Grid default_svm(std::size_t n_features);
    static Grid single(const RfParams& params);
    static Grid single(const SvmParams& params);
};

enum class ModelKind { rf, svm };

/// Session-grouped stratified fold assignment; no session straddles folds.
std::vector<int> assign_folds(const Dataset& data, int k, std::uint64_t seed);

/// Stratified k-fold grid search: best grid point by mean fold accuracy
/// (ties keep the first), refit on all data, report fold accuracy/F1 and
/// out-of-fold probabilities at the best point.
GridResult grid_search_cv(const Dataset& data, ModelKind kind, const Grid& grid, int k = 5,
                          std::uint64_t seed = 0);

/// Gini decision tree (depth <= 3) over out-of-fold probabilities from the
/// two unimodal models, evaluated with the same grouped CV protocol.
GridResult late_fuse(const Dataset& rppg_data, const EvalReport& rppg_eval,
                     const Dataset& thermal_data, const EvalReport& thermal_eval, int k = 5,
                     std::uint64_t seed = 0);

}  // namespace vitalsig::ml
