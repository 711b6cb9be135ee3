#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace vitalsig::attribution {

/// Model under explanation: any map from a feature vector to a scalar
/// (here: predicted probability of the positive class).
using ModelFn = std::function<double(std::span<const double>)>;

struct AttributionReport {
    std::vector<double> phi;
    double base_value = 0.0;      // expected model output over the background
    double model_output = 0.0;    // f(instance)
    std::string estimator;        // "exact" | "mc"
    int n_permutations = 0;
};

/// Exact Shapley values by subset enumeration (d <= 15): the value of a
/// coalition is the mean model output over background rows with coalition
/// features replaced by the instance's.
AttributionReport shapley_exact(const ModelFn& model, std::span<const double> instance,
                                const std::vector<std::vector<double>>& background);

/// Monte-Carlo permutation estimator of the same quantity; each permutation
/// walks one background row toward the instance, accumulating marginal
/// contributions.
AttributionReport shapley_mc(const ModelFn& model, std::span<const double> instance,
                             const std::vector<std::vector<double>>& background,
                             int n_permutations, std::uint64_t seed);

struct FeatureRanking {
    std::vector<int> order;              // feature indices, descending importance
    std::vector<double> mean_abs_phi;    // aligned with feature index
};

/// Rank features by mean |phi| across reports; ties break on feature index.
FeatureRanking rank_features(std::span<const AttributionReport> reports);

}  // namespace vitalsig::attribution
