#include "vitalsig/ml.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "vitalsig/dataio.hpp"
#include "vitalsig/errors.hpp"
#include "vitalsig/rng.hpp"

namespace vitalsig::ml {

namespace {

constexpr double kKktTolerance = 1e-3;
constexpr std::size_t kMaxPairUpdates = 100000;

void require_both_classes(const Dataset& data) {
    bool has0 = false, has1 = false;
    for (const FeatureVector& v : data.vectors) {
        (v.label == 1 ? has1 : has0) = true;
    }
    if (!has0 || !has1) throw Error(ErrorCode::SingleClass, "training data needs both classes");
}

}  // namespace

const char* mode_name(Mode mode) {
    switch (mode) {
        case Mode::rppg: return "rppg";
        case Mode::thermal: return "thermal";
        case Mode::early_fusion: return "early_fusion";
    }
    return "?";
}

Dataset assemble(const std::vector<SessionFeatures>& sessions, Mode mode) {
    const bool want_rppg = mode == Mode::rppg || mode == Mode::early_fusion;
    const bool want_thermal = mode == Mode::thermal || mode == Mode::early_fusion;

    // thermal feature order: union of ROI ids across sessions, canonical order
    std::set<int> roi_set;
    for (const SessionFeatures& s : sessions) {
        for (const auto& seg : s.segments) {
            if (seg.thermal) {
                for (const auto& [roi, _] : *seg.thermal) roi_set.insert(roi);
            }
        }
    }
    const std::vector<int> roi_order =
        canonical_roi_order(std::vector<int>(roi_set.begin(), roi_set.end()));

    Dataset data;
    data.mode = mode_name(mode);
    if (want_rppg) {
        for (const char* name : kHrvFeatureNames) data.feature_names.emplace_back(name);
    }
    if (want_thermal) {
        for (int roi : roi_order) data.feature_names.push_back("roi_" + std::to_string(roi));
    }

    for (const SessionFeatures& session : sessions) {
        int seg_index = 0;
        for (const auto& seg : session.segments) {
            FeatureVector vec;
            vec.session_id = session.session_id;
            vec.segment_index = seg_index++;
            vec.label = seg.label;
            if (want_rppg) {
                if (!seg.rppg) {
                    throw Error(ErrorCode::MissingModality,
                                "session " + session.session_id + " lacks r-PPG features");
                }
                for (double v : seg.rppg->ordered()) vec.features.push_back(v);
            }
            if (want_thermal) {
                if (!seg.thermal) {
                    throw Error(ErrorCode::MissingModality,
                                "session " + session.session_id + " lacks thermal features");
                }
                for (int roi : roi_order) {
                    const auto it = seg.thermal->find(roi);
                    if (it == seg.thermal->end()) {
                        throw Error(ErrorCode::MissingModality,
                                    "session " + session.session_id + " lacks ROI " + std::to_string(roi));
                    }
                    vec.features.push_back(it->second);
                }
            }
            data.vectors.push_back(std::move(vec));
        }
    }
    if (data.vectors.empty()) throw Error(ErrorCode::TooFewSamples, "no sessions to assemble");
    require_both_classes(data);
    return data;
}

double gini_impurity(std::span<const int> labels) {
    if (labels.empty()) throw Error(ErrorCode::InvalidArgument, "gini of empty label set");
    std::size_t ones = 0;
    for (int label : labels)
        if (label == 1) ++ones;
    const double p1 = static_cast<double>(ones) / static_cast<double>(labels.size());
    const double p0 = 1.0 - p1;
    return 1.0 - p0 * p0 - p1 * p1;
}

// ---- decision tree ---------------------------------------------------------

double DecisionTree::predict_prob(std::span<const double> x) const {
    int idx = 0;
    while (nodes[static_cast<std::size_t>(idx)].feature >= 0) {
        const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
        idx = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(idx)].prob;
}

namespace {

struct TreeBuilder {
    const std::vector<FeatureVector>& rows;
    int max_depth;       // -1 = unlimited
    int min_leaf;
    std::size_t mtry;    // features examined per node; 0 = all, in order
    Rng* rng;            // nullptr when mtry == 0
    DecisionTree tree;

    int build(std::vector<std::size_t> idx, int depth) {
        std::size_t ones = 0;
        for (std::size_t i : idx)
            if (rows[i].label == 1) ++ones;
        const double prob = static_cast<double>(ones) / static_cast<double>(idx.size());

        const bool pure = ones == 0 || ones == idx.size();
        const bool depth_stop = max_depth >= 0 && depth >= max_depth;
        const bool size_stop = idx.size() < 2 * static_cast<std::size_t>(min_leaf) || idx.size() < 2;
        if (pure || depth_stop || size_stop) return make_leaf(prob);

        const std::size_t d = rows.front().features.size();
        std::vector<std::size_t> feats(d);
        std::iota(feats.begin(), feats.end(), 0);
        std::size_t n_try = d;
        if (mtry > 0 && mtry < d) {
            // partial Fisher-Yates: the first mtry entries become the sample
            for (std::size_t i = 0; i < mtry; ++i) {
                std::swap(feats[i], feats[i + rng->index(d - i)]);
            }
            n_try = mtry;
        }

        const double parent = 1.0 - (prob * prob + (1.0 - prob) * (1.0 - prob));
        double best_gain = 1e-12;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;

        std::vector<std::pair<double, int>> ordered(idx.size());
        for (std::size_t f = 0; f < n_try; ++f) {
            const std::size_t feature = feats[f];
            for (std::size_t i = 0; i < idx.size(); ++i) {
                ordered[i] = {rows[idx[i]].features[feature], rows[idx[i]].label};
            }
            std::sort(ordered.begin(), ordered.end());

            std::size_t left_n = 0, left_ones = 0;
            const std::size_t total = idx.size();
            for (std::size_t i = 0; i + 1 < total; ++i) {
                ++left_n;
                if (ordered[i].second == 1) ++left_ones;
                if (ordered[i].first == ordered[i + 1].first) continue;
                const std::size_t right_n = total - left_n;
                if (left_n < static_cast<std::size_t>(min_leaf) ||
                    right_n < static_cast<std::size_t>(min_leaf)) {
                    continue;
                }
                const double pl = static_cast<double>(left_ones) / static_cast<double>(left_n);
                const std::size_t right_ones = ones - left_ones;
                const double pr = static_cast<double>(right_ones) / static_cast<double>(right_n);
                const double gini_l = 1.0 - pl * pl - (1.0 - pl) * (1.0 - pl);
                const double gini_r = 1.0 - pr * pr - (1.0 - pr) * (1.0 - pr);
                const double wl = static_cast<double>(left_n) / static_cast<double>(total);
                const double gain = parent - (wl * gini_l + (1.0 - wl) * gini_r);
                if (gain > best_gain) {  // strict: ties keep the first candidate
                    best_gain = gain;
                    best_feature = feature;
                    best_threshold = 0.5 * (ordered[i].first + ordered[i + 1].first);
                    found = true;
                }
            }
        }
        if (!found) return make_leaf(prob);

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx) {
            (rows[i].features[best_feature] <= best_threshold ? left_idx : right_idx).push_back(i);
        }
        const int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{static_cast<int>(best_feature), best_threshold, -1, -1, prob});
        const int left = build(std::move(left_idx), depth + 1);
        const int right = build(std::move(right_idx), depth + 1);
        tree.nodes[static_cast<std::size_t>(node_id)].left = left;
        tree.nodes[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }

    int make_leaf(double prob) {
        tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, prob});
        return static_cast<int>(tree.nodes.size()) - 1;
    }
};

DecisionTree build_tree(const std::vector<FeatureVector>& rows, const std::vector<std::size_t>& idx,
                        int max_depth, int min_leaf, std::size_t mtry, Rng* rng) {
    TreeBuilder builder{rows, max_depth, min_leaf, mtry, rng, {}};
    builder.build(idx, 0);
    // nodes are appended parent-first, so node 0 is the root
    return std::move(builder.tree);
}

}  // namespace

double RfModel::predict_prob(std::span<const double> x) const {
    double sum = 0.0;
    for (const DecisionTree& tree : trees) sum += tree.predict_prob(x);
    return sum / static_cast<double>(trees.size());
}

TrainedModel train_rf(const Dataset& data, const RfParams& params) {
    require_both_classes(data);
    if (data.vectors.size() < 2) throw Error(ErrorCode::TooFewSamples, "random forest needs >= 2 rows");

    const std::size_t n = data.vectors.size();
    const std::size_t d = data.width();
    const std::size_t mtry = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));

    RfModel model;
    model.params = params;
    model.trees.reserve(static_cast<std::size_t>(params.n_trees));
    for (int t = 0; t < params.n_trees; ++t) {
        Rng rng(derive_seed(params.seed, "rf-tree", static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> bootstrap(n);
        for (std::size_t i = 0; i < n; ++i) bootstrap[i] = rng.index(n);
        std::sort(bootstrap.begin(), bootstrap.end());
        model.trees.push_back(
            build_tree(data.vectors, bootstrap, params.max_depth, params.min_leaf, mtry, &rng));
    }

    TrainedModel trained;
    trained.kind = "rf";
    trained.feature_names = data.feature_names;
    trained.impl = std::move(model);
    return trained;
}

TrainedModel train_fusion_tree(const Dataset& data, int max_depth) {
    require_both_classes(data);
    std::vector<std::size_t> idx(data.vectors.size());
    std::iota(idx.begin(), idx.end(), 0);
    FusionTreeModel model;
    model.tree = build_tree(data.vectors, idx, max_depth, 1, 0, nullptr);

    TrainedModel trained;
    trained.kind = "fusion_tree";
    trained.feature_names = data.feature_names;
    trained.impl = std::move(model);
    return trained;
}

// ---- SVM -------------------------------------------------------------------

namespace {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    double dist2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        dist2 += d * d;
    }
    return std::exp(-gamma * dist2);
}

/// Platt's sigmoid fit (Lin, Lweng & Keerthi 2007 variant) on decision
/// values with regularized targets.
std::pair<double, double> fit_platt(const std::vector<double>& decision, const std::vector<int>& labels) {
    const std::size_t n = decision.size();
    double prior1 = 0.0;
    for (int y : labels)
        if (y == 1) prior1 += 1.0;
    const double prior0 = static_cast<double>(n) - prior1;
    const double hi_t = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo_t = 1.0 / (prior0 + 2.0);

    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) target[i] = labels[i] == 1 ? hi_t : lo_t;

    double a = 0.0;
    double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
    auto objective = [&](double pa, double pb) {
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = pa * decision[i] + pb;
            // stable log(1 + exp(...)) pieces
            if (f >= 0) {
                obj += target[i] * f + std::log1p(std::exp(-f));
            } else {
                obj += (target[i] - 1.0) * f + std::log1p(std::exp(f));
            }
        }
        return obj;
    };

    double best = objective(a, b);
    for (int iter = 0; iter < 100; ++iter) {
        double g1 = 0.0, g2 = 0.0, h11 = 1e-12, h22 = 1e-12, h21 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = a * decision[i] + b;
            const double p = f >= 0 ? std::exp(-f) / (1.0 + std::exp(-f)) : 1.0 / (1.0 + std::exp(f));
            const double d1 = target[i] - p;
            const double d2 = p * (1.0 - p);
            g1 += decision[i] * d1;
            g2 += d1;
            h11 += decision[i] * decision[i] * d2;
            h22 += d2;
            h21 += decision[i] * d2;
        }
        if (std::abs(g1) < 1e-10 && std::abs(g2) < 1e-10) break;
        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        double step = 1.0;
        while (step >= 1e-10) {
            const double cand = objective(a + step * da, b + step * db);
            if (cand < best + 1e-12) {
                a += step * da;
                b += step * db;
                best = cand;
                break;
            }
            step /= 2.0;
        }
        if (step < 1e-10) break;
    }
    return {a, b};
}

}  // namespace

double SvmModel::decision(std::span<const double> x) const {
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = (x[i] - mean[i]) / sd[i];
    double f = bias;
    for (std::size_t k = 0; k < support_vectors.size(); ++k) {
        f += alpha_y[k] * rbf_kernel(support_vectors[k], z, params.gamma);
    }
    return f;
}

double SvmModel::predict_prob(std::span<const double> x) const {
    const double f = platt_a * decision(x) + platt_b;
    return f >= 0 ? std::exp(-f) / (1.0 + std::exp(-f)) : 1.0 / (1.0 + std::exp(f));
}

TrainedModel train_svm(const Dataset& data, const SvmParams& params) {
    require_both_classes(data);
    const std::size_t n = data.vectors.size();
    const std::size_t d = data.width();
    if (n < 2) throw Error(ErrorCode::TooFewSamples, "svm needs >= 2 rows");

    SvmModel model;
    model.params = params;
    model.mean.assign(d, 0.0);
    model.sd.assign(d, 0.0);
    for (const FeatureVector& v : data.vectors) {
        for (std::size_t j = 0; j < d; ++j) model.mean[j] += v.features[j];
    }
    for (std::size_t j = 0; j < d; ++j) model.mean[j] /= static_cast<double>(n);
    for (const FeatureVector& v : data.vectors) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = v.features[j] - model.mean[j];
            model.sd[j] += dev * dev;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        model.sd[j] = std::sqrt(model.sd[j] / static_cast<double>(n));
        if (model.sd[j] == 0.0) model.sd[j] = 1.0;  // constant feature carries no signal
    }

    std::vector<std::vector<double>> x(n, std::vector<double>(d));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            x[i][j] = (data.vectors[i].features[j] - model.mean[j]) / model.sd[j];
        }
        y[i] = data.vectors[i].label == 1 ? 1.0 : -1.0;
    }

    // kernel cache: n is small enough for the full matrix
    std::vector<std::vector<double>> kernel(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            kernel[i][j] = kernel[j][i] = rbf_kernel(x[i], x[j], params.gamma);
        }
    }

    const double c = params.c;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> f(n, 0.0);  // decision value (without comparing against y)
    double bias = 0.0;
    std::size_t pair_updates = 0;

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double e_i = f[i] + bias - y[i];
            const double r = e_i * y[i];
            const bool violates = (r < -kKktTolerance && alpha[i] < c) || (r > kKktTolerance && alpha[i] > 0.0);
            if (!violates) continue;

            // second index: largest |E_i - E_j|, lowest index on ties
            std::size_t j = n;
            double best_gap = -1.0;
            for (std::size_t cand = 0; cand < n; ++cand) {
                if (cand == i) continue;
                const double gap = std::abs(e_i - (f[cand] + bias - y[cand]));
                if (gap > best_gap) {
                    best_gap = gap;
                    j = cand;
                }
            }
            if (j == n) continue;
            const double e_j = f[j] + bias - y[j];

            double lo, hi;
            if (y[i] != y[j]) {
                lo = std::max(0.0, alpha[j] - alpha[i]);
                hi = std::min(c, c + alpha[j] - alpha[i]);
            } else {
                lo = std::max(0.0, alpha[i] + alpha[j] - c);
                hi = std::min(c, alpha[i] + alpha[j]);
            }
            if (lo >= hi) continue;
            const double eta = 2.0 * kernel[i][j] - kernel[i][i] - kernel[j][j];
            if (eta >= 0.0) continue;

            double alpha_j = alpha[j] - y[j] * (e_i - e_j) / eta;
            alpha_j = std::clamp(alpha_j, lo, hi);
            if (std::abs(alpha_j - alpha[j]) < 1e-8) continue;
            const double alpha_i = alpha[i] + y[i] * y[j] * (alpha[j] - alpha_j);

            const double delta_i = (alpha_i - alpha[i]) * y[i];
            const double delta_j = (alpha_j - alpha[j]) * y[j];

            const double b1 = bias - (f[i] + bias - y[i]) - delta_i * kernel[i][i] - delta_j * kernel[i][j];
            const double b2 = bias - (f[j] + bias - y[j]) - delta_i * kernel[i][j] - delta_j * kernel[j][j];
            if (alpha_i > 0.0 && alpha_i < c) {
                bias = b1;
            } else if (alpha_j > 0.0 && alpha_j < c) {
                bias = b2;
            } else {
                bias = 0.5 * (b1 + b2);
            }

            alpha[i] = alpha_i;
            alpha[j] = alpha_j;
            for (std::size_t k = 0; k < n; ++k) {
                f[k] += delta_i * kernel[i][k] + delta_j * kernel[j][k];
            }
            changed = true;
            if (++pair_updates >= kMaxPairUpdates) {
                throw Error(ErrorCode::NoConvergence, "SMO hit the pair-update cap");
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] > 1e-12) {
            model.support_vectors.push_back(x[i]);
            model.alpha_y.push_back(alpha[i] * y[i]);
        }
    }
    model.bias = bias;

    std::vector<double> decision_values(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        decision_values[i] = f[i] + bias;
        labels[i] = data.vectors[i].label;
    }
    const auto [pa, pb] = fit_platt(decision_values, labels);
    // Platt sigmoid maps decision -> P(class 1); orient so larger decision
    // means larger probability
    model.platt_a = pa;
    model.platt_b = pb;

    TrainedModel trained;
    trained.kind = "svm";
    trained.feature_names = data.feature_names;
    trained.impl = std::move(model);
    return trained;
}

double TrainedModel::predict_prob(std::span<const double> x) const {
    return std::visit([&](const auto& m) { return m.predict_prob(x); }, impl);
}

// ---- cross-validation -------------------------------------------------------

std::vector<int> assign_folds(const Dataset& data, int k, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::TooFewSamples, "need k >= 2 folds");
    std::size_t n0 = 0, n1 = 0;
    for (const FeatureVector& v : data.vectors) (v.label == 1 ? n1 : n0) += 1;
    if (std::min(n0, n1) < static_cast<std::size_t>(k)) {
        throw Error(ErrorCode::TooFewSamples, "k exceeds the minority class count");
    }

    // group rows by session so a participant's segments stay together
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < data.vectors.size(); ++i) {
        groups[data.vectors[i].session_id].push_back(i);
    }
    std::vector<std::pair<std::string, std::vector<std::size_t>>> mixed, pure0, pure1;
    for (auto& [id, rows] : groups) {
        bool has0 = false, has1 = false;
        for (std::size_t i : rows) (data.vectors[i].label == 1 ? has1 : has0) = true;
        auto entry = std::make_pair(id, rows);
        if (has0 && has1) {
            mixed.push_back(std::move(entry));
        } else if (has1) {
            pure1.push_back(std::move(entry));
        } else {
            pure0.push_back(std::move(entry));
        }
    }

    Rng rng(derive_seed(seed, "folds"));
    std::vector<int> fold_of(data.vectors.size(), -1);
    for (auto* bucket : {&mixed, &pure1, &pure0}) {
        rng.shuffle(*bucket);
        int next = 0;
        for (const auto& [id, rows] : *bucket) {
            for (std::size_t i : rows) fold_of[i] = next;
            next = (next + 1) % k;
        }
    }
    return fold_of;
}

namespace {

Dataset subset(const Dataset& data, const std::vector<int>& fold_of, int fold, bool keep_fold) {
    Dataset out;
    out.mode = data.mode;
    out.feature_names = data.feature_names;
    for (std::size_t i = 0; i < data.vectors.size(); ++i) {
        if ((fold_of[i] == fold) == keep_fold) out.vectors.push_back(data.vectors[i]);
    }
    return out;
}

TrainedModel train_kind(const Dataset& data, ModelKind kind, const RfParams& rf, const SvmParams& svm) {
    return kind == ModelKind::rf ? train_rf(data, rf) : train_svm(data, svm);
}

struct CvOutcome {
    double avg_accuracy = 0.0;
    std::vector<FoldScore> folds;
    std::vector<double> oof_prob;
};

CvOutcome run_cv(const Dataset& data, ModelKind kind, const RfParams& rf, const SvmParams& svm,
                 const std::vector<int>& fold_of, int k) {
    CvOutcome outcome;
    outcome.oof_prob.assign(data.vectors.size(), 0.0);
    for (int fold = 0; fold < k; ++fold) {
        const Dataset train = subset(data, fold_of, fold, false);
        const TrainedModel model = train_kind(train, kind, rf, svm);

        std::size_t correct = 0, total = 0, tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < data.vectors.size(); ++i) {
            if (fold_of[i] != fold) continue;
            const double prob = model.predict_prob(data.vectors[i].features);
            outcome.oof_prob[i] = prob;
            const int predicted = prob >= 0.5 ? 1 : 0;
            const int actual = data.vectors[i].label;
            ++total;
            if (predicted == actual) ++correct;
            if (predicted == 1 && actual == 1) ++tp;
            if (predicted == 1 && actual == 0) ++fp;
            if (predicted == 0 && actual == 1) ++fn;
        }
        FoldScore score;
        score.accuracy = total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
        const double denom = static_cast<double>(2 * tp + fp + fn);
        score.f1 = denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
        outcome.folds.push_back(score);
    }
    double acc = 0.0;
    for (const FoldScore& s : outcome.folds) acc += s.accuracy;
    outcome.avg_accuracy = acc / static_cast<double>(outcome.folds.size());
    return outcome;
}

}  // namespace

Grid Grid::default_rf(std::uint64_t seed) {
    Grid grid;
    for (int n_trees : {100, 300}) {
        for (int max_depth : {3, 5, -1}) {
            for (int min_leaf : {1, 3}) {
                grid.rf.push_back(RfParams{n_trees, max_depth, min_leaf, seed});
            }
        }
    }
    return grid;
}

Grid Grid::default_svm(std::size_t n_features) {
    Grid grid;
    const double d = static_cast<double>(n_features);
    for (double c : {0.1, 1.0, 10.0, 100.0}) {
        for (double g : {0.01, 0.1, 1.0}) {
            grid.svm.push_back(SvmParams{c, g / d});
        }
    }
    return grid;
}

Grid Grid::single(const RfParams& params) {
    Grid grid;
    grid.rf.push_back(params);
    return grid;
}

Grid Grid::single(const SvmParams& params) {
    Grid grid;
    grid.svm.push_back(params);
    return grid;
}

GridResult grid_search_cv(const Dataset& data, ModelKind kind, const Grid& grid, int k,
                          std::uint64_t seed) {
    require_both_classes(data);
    const std::size_t n_points = kind == ModelKind::rf ? grid.rf.size() : grid.svm.size();
    if (n_points == 0) throw Error(ErrorCode::InvalidArgument, "empty hyperparameter grid");
    const std::vector<int> fold_of = assign_folds(data, k, seed);

    std::size_t best_point = 0;
    double best_accuracy = -1.0;
    for (std::size_t point = 0; point < n_points; ++point) {
        RfParams rf = kind == ModelKind::rf ? grid.rf[point] : RfParams{};
        rf.seed = derive_seed(seed, "cv-rf");
        const SvmParams svm = kind == ModelKind::svm ? grid.svm[point] : SvmParams{};
        const CvOutcome outcome = run_cv(data, kind, rf, svm, fold_of, k);
        if (outcome.avg_accuracy > best_accuracy) {  // ties keep the first grid point
            best_accuracy = outcome.avg_accuracy;
            best_point = point;
        }
    }

    RfParams best_rf = kind == ModelKind::rf ? grid.rf[best_point] : RfParams{};
    best_rf.seed = derive_seed(seed, "cv-rf");
    const SvmParams best_svm = kind == ModelKind::svm ? grid.svm[best_point] : SvmParams{};
    const CvOutcome best = run_cv(data, kind, best_rf, best_svm, fold_of, k);

    GridResult result;
    result.report.folds = best.folds;
    result.report.avg_accuracy = best.avg_accuracy;
    double f1 = 0.0;
    for (const FoldScore& s : best.folds) f1 += s.f1;
    result.report.avg_f1 = f1 / static_cast<double>(best.folds.size());
    result.report.oof_prob = best.oof_prob;
    result.report.fold_of = fold_of;
    if (kind == ModelKind::rf) {
        result.report.chosen_params = {{"n_trees", static_cast<double>(best_rf.n_trees)},
                                       {"max_depth", static_cast<double>(best_rf.max_depth)},
                                       {"min_leaf", static_cast<double>(best_rf.min_leaf)}};
        RfParams refit = best_rf;
        refit.seed = derive_seed(seed, "refit");
        result.model = train_rf(data, refit);
    } else {
        result.report.chosen_params = {{"c", best_svm.c}, {"gamma", best_svm.gamma}};
        result.model = train_svm(data, best_svm);
    }
    return result;
}

GridResult late_fuse(const Dataset& rppg_data, const EvalReport& rppg_eval,
                     const Dataset& thermal_data, const EvalReport& thermal_eval, int k,
                     std::uint64_t seed) {
    if (rppg_eval.oof_prob.size() != rppg_data.vectors.size() ||
        thermal_eval.oof_prob.size() != thermal_data.vectors.size()) {
        throw Error(ErrorCode::MissingOutOfFold, "unimodal evaluations lack out-of-fold predictions");
    }

    std::map<std::pair<std::string, int>, double> thermal_prob;
    for (std::size_t i = 0; i < thermal_data.vectors.size(); ++i) {
        const FeatureVector& v = thermal_data.vectors[i];
        thermal_prob[{v.session_id, v.segment_index}] = thermal_eval.oof_prob[i];
    }

    Dataset fused;
    fused.mode = "late_fusion";
    fused.feature_names = {"p_rppg", "p_thermal"};
    for (std::size_t i = 0; i < rppg_data.vectors.size(); ++i) {
        const FeatureVector& v = rppg_data.vectors[i];
        const auto it = thermal_prob.find({v.session_id, v.segment_index});
        if (it == thermal_prob.end()) {
            throw Error(ErrorCode::MissingOutOfFold,
                        "no thermal out-of-fold prediction for session " + v.session_id);
        }
        FeatureVector row;
        row.session_id = v.session_id;
        row.segment_index = v.segment_index;
        row.label = v.label;
        row.features = {rppg_eval.oof_prob[i], it->second};
        fused.vectors.push_back(std::move(row));
    }
    require_both_classes(fused);

    const std::vector<int> fold_of = assign_folds(fused, k, seed);
    GridResult result;
    result.report.fold_of = fold_of;
    result.report.oof_prob.assign(fused.vectors.size(), 0.0);
    result.report.chosen_params = {{"max_depth", 3.0}};
    for (int fold = 0; fold < k; ++fold) {
        const Dataset train = subset(fused, fold_of, fold, false);
        const TrainedModel tree = train_fusion_tree(train, 3);
        std::size_t correct = 0, total = 0, tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < fused.vectors.size(); ++i) {
            if (fold_of[i] != fold) continue;
            const double prob = tree.predict_prob(fused.vectors[i].features);
            result.report.oof_prob[i] = prob;
            const int predicted = prob >= 0.5 ? 1 : 0;
            ++total;
            if (predicted == fused.vectors[i].label) ++correct;
            if (predicted == 1 && fused.vectors[i].label == 1) ++tp;
            if (predicted == 1 && fused.vectors[i].label == 0) ++fp;
            if (predicted == 0 && fused.vectors[i].label == 1) ++fn;
        }
        FoldScore score;
        score.accuracy = total > 0 ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
        const double denom = static_cast<double>(2 * tp + fp + fn);
        score.f1 = denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
        result.report.folds.push_back(score);
    }
    double acc = 0.0, f1 = 0.0;
    for (const FoldScore& s : result.report.folds) {
        acc += s.accuracy;
        f1 += s.f1;
    }
    result.report.avg_accuracy = acc / static_cast<double>(result.report.folds.size());
    result.report.avg_f1 = f1 / static_cast<double>(result.report.folds.size());
    result.model = train_fusion_tree(fused, 3);
    return result;
}

}  // namespace vitalsig::ml
