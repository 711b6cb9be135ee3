#include "vitalsig/attribution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "vitalsig/errors.hpp"
#include "vitalsig/rng.hpp"

namespace vitalsig::attribution {

namespace {

constexpr int kMaxExactFeatures = 15;

void validate_inputs(std::span<const double> instance,
                     const std::vector<std::vector<double>>& background) {
    if (background.empty()) throw Error(ErrorCode::EmptyBackground, "background dataset is empty");
    for (const auto& row : background) {
        if (row.size() != instance.size()) {
            throw Error(ErrorCode::LengthMismatch, "background width differs from instance");
        }
    }
}

}  // namespace

AttributionReport shapley_exact(const ModelFn& model, std::span<const double> instance,
                                const std::vector<std::vector<double>>& background) {
    validate_inputs(instance, background);
    const std::size_t d = instance.size();
    if (d > kMaxExactFeatures) {
        throw Error(ErrorCode::TooManyFeatures, "exact enumeration is limited to 15 features");
    }

    const std::size_t n_masks = std::size_t{1} << d;
    std::vector<double> value(n_masks, 0.0);
    std::vector<double> hybrid(d);
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        double sum = 0.0;
        for (const std::vector<double>& row : background) {
            for (std::size_t j = 0; j < d; ++j) {
                hybrid[j] = (mask >> j) & 1 ? instance[j] : row[j];
            }
            sum += model(hybrid);
        }
        value[mask] = sum / static_cast<double>(background.size());
    }

    // weight(|S|) = |S|! (d - |S| - 1)! / d!
    std::vector<double> weight(d);
    std::vector<double> factorial(d + 1, 1.0);
    for (std::size_t i = 1; i <= d; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);
    for (std::size_t s = 0; s < d; ++s) {
        weight[s] = factorial[s] * factorial[d - s - 1] / factorial[d];
    }

    AttributionReport report;
    report.estimator = "exact";
    report.phi.assign(d, 0.0);
    report.base_value = value[0];
    report.model_output = value[n_masks - 1];
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t bit = std::size_t{1} << i;
        double phi = 0.0;
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const std::size_t s = static_cast<std::size_t>(std::popcount(mask));
            phi += weight[s] * (value[mask | bit] - value[mask]);
        }
        report.phi[i] = phi;
    }
    return report;
}

AttributionReport shapley_mc(const ModelFn& model, std::span<const double> instance,
                             const std::vector<std::vector<double>>& background,
                             int n_permutations, std::uint64_t seed) {
    validate_inputs(instance, background);
    if (n_permutations < 100) {
        throw Error(ErrorCode::InvalidArgument, "monte-carlo estimation needs >= 100 permutations");
    }
    const std::size_t d = instance.size();

    AttributionReport report;
    report.estimator = "mc";
    report.n_permutations = n_permutations;
    report.phi.assign(d, 0.0);

    double base = 0.0;
    for (const std::vector<double>& row : background) base += model(row);
    report.base_value = base / static_cast<double>(background.size());
    report.model_output = model(instance);

    Rng rng(derive_seed(seed, "shapley-mc"));
    std::vector<std::size_t> order(d);
    std::vector<double> current(d);
    for (int p = 0; p < n_permutations; ++p) {
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        const std::vector<double>& row = background[static_cast<std::size_t>(p) % background.size()];
        std::copy(row.begin(), row.end(), current.begin());
        double previous = model(current);
        for (std::size_t j : order) {
            current[j] = instance[j];
            const double next = model(current);
            report.phi[j] += next - previous;
            previous = next;
        }
    }
    for (double& phi : report.phi) phi /= static_cast<double>(n_permutations);
    return report;
}

FeatureRanking rank_features(std::span<const AttributionReport> reports) {
    if (reports.empty()) throw Error(ErrorCode::InvalidArgument, "no attribution reports to rank");
    const std::size_t d = reports.front().phi.size();

    FeatureRanking ranking;
    ranking.mean_abs_phi.assign(d, 0.0);
    for (const AttributionReport& report : reports) {
        if (report.phi.size() != d) throw Error(ErrorCode::LengthMismatch, "reports have mixed widths");
        for (std::size_t i = 0; i < d; ++i) ranking.mean_abs_phi[i] += std::abs(report.phi[i]);
    }
    for (double& v : ranking.mean_abs_phi) v /= static_cast<double>(reports.size());

    ranking.order.resize(d);
    std::iota(ranking.order.begin(), ranking.order.end(), 0);
    std::sort(ranking.order.begin(), ranking.order.end(), [&](int a, int b) {
        const double va = ranking.mean_abs_phi[static_cast<std::size_t>(a)];
        const double vb = ranking.mean_abs_phi[static_cast<std::size_t>(b)];
        return va != vb ? va > vb : a < b;
    });
    return ranking;
}

}  // namespace vitalsig::attribution
