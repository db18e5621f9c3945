#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dedupe/core.hpp"
#include "dedupe/error.hpp"

namespace dedupe {

// Gradient-boosted regression trees for binary classification: binomial
// deviance loss, least-squares residual fitting, one-step Newton leaf values.

struct GbdtConfig {
    int n_estimators = 200;
    double learning_rate = 0.1;
    int max_depth = 4;
    int min_samples_leaf = 1;
    std::uint64_t seed = 0;
};

inline void validate_gbdt_config(const GbdtConfig& c) {
    if (c.n_estimators < 1) throw ConfigError("gbdt: n_estimators must be >= 1");
    if (!(c.learning_rate > 0.0) || c.learning_rate > 1.0) {
        throw ConfigError("gbdt: learning_rate must be in (0, 1]");
    }
    if (c.max_depth < 1) throw ConfigError("gbdt: max_depth must be >= 1");
    if (c.min_samples_leaf < 1) throw ConfigError("gbdt: min_samples_leaf must be >= 1");
}

/// Internal nodes test feature < threshold; feature == -1 marks a leaf.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> x) const {
        int idx = 0;
        while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
            const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
            idx = x[static_cast<std::size_t>(n.feature)] < n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(idx)].value;
    }

    int depth() const { return depth_from(0); }

private:
    int depth_from(int idx) const {
        const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
        if (n.is_leaf()) return 0;
        return 1 + std::max(depth_from(n.left), depth_from(n.right));
    }
};

struct GbdtModel {
    double initial_score = 0.0; // log-odds of the base rate
    std::vector<RegressionTree> trees;
    GbdtConfig config;
    std::string schema_digest;
    std::vector<double> training_deviance; // mean BCE per round, index 0 = base model
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Probabilities are kept strictly inside (0, 1).
inline double clamp_probability(double p) {
    constexpr double lo = 1e-12;
    return std::min(std::max(p, lo), 1.0 - lo);
}

inline double bce_loss(double p, int y) {
    constexpr double eps = 1e-15;
    const double pc = std::min(std::max(p, eps), 1.0 - eps);
    return -(y == 1 ? std::log(pc) : std::log(1.0 - pc));
}

namespace detail {

struct SplitCandidate {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Best variance-reducing split over all features. Thresholds are midpoints
// between consecutive distinct values; ties resolve to the lowest feature
// index, then the lowest threshold (strict > while scanning in order).
inline SplitCandidate best_split(const std::vector<const FeatureVector*>& rows,
                                 const std::vector<double>& residual,
                                 const std::vector<std::size_t>& samples,
                                 int min_samples_leaf) {
    SplitCandidate best;
    const std::size_t n = samples.size();
    if (n < 2 * static_cast<std::size_t>(min_samples_leaf)) return best;

    double total = 0.0;
    for (const std::size_t s : samples) total += residual[s];

    std::vector<std::pair<double, std::size_t>> order(n);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
        for (std::size_t i = 0; i < n; ++i) {
            order[i] = {rows[samples[i]]->values[f], samples[i]};
        }
        std::sort(order.begin(), order.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        double left_sum = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_sum += residual[order[i].second];
            if (order[i].first == order[i + 1].first) continue;
            const std::size_t nl = i + 1;
            const std::size_t nr = n - nl;
            if (nl < static_cast<std::size_t>(min_samples_leaf) ||
                nr < static_cast<std::size_t>(min_samples_leaf)) {
                continue;
            }
            const double right_sum = total - left_sum;
            // Variance reduction up to the constant parent term.
            const double gain = left_sum * left_sum / static_cast<double>(nl) +
                                right_sum * right_sum / static_cast<double>(nr) -
                                total * total / static_cast<double>(n);
            if (gain > best.gain + 1e-12) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = (order[i].first + order[i + 1].first) / 2.0;
                best.gain = gain;
            }
        }
    }
    return best;
}

// One-step Newton leaf value for binomial deviance:
// sum(residual) / sum(p * (1 - p)).
inline double newton_leaf_value(const std::vector<double>& residual,
                                const std::vector<double>& hessian,
                                const std::vector<std::size_t>& samples) {
    double num = 0.0, den = 0.0;
    for (const std::size_t s : samples) {
        num += residual[s];
        den += hessian[s];
    }
    if (den < 1e-150) return 0.0;
    return num / den;
}

inline int build_tree_node(RegressionTree& tree, const std::vector<const FeatureVector*>& rows,
                           const std::vector<double>& residual, const std::vector<double>& hessian,
                           std::vector<std::size_t>& samples, int depth, const GbdtConfig& config) {
    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    SplitCandidate split;
    if (depth < config.max_depth) {
        split = best_split(rows, residual, samples, config.min_samples_leaf);
    }
    if (!split.found) {
        tree.nodes[static_cast<std::size_t>(node_index)].value =
            newton_leaf_value(residual, hessian, samples);
        return node_index;
    }

    std::vector<std::size_t> left, right;
    left.reserve(samples.size());
    right.reserve(samples.size());
    for (const std::size_t s : samples) {
        if (rows[s]->values[static_cast<std::size_t>(split.feature)] < split.threshold) {
            left.push_back(s);
        } else {
            right.push_back(s);
        }
    }
    samples.clear();
    samples.shrink_to_fit();

    const int left_index = build_tree_node(tree, rows, residual, hessian, left, depth + 1, config);
    const int right_index = build_tree_node(tree, rows, residual, hessian, right, depth + 1, config);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left_index;
    node.right = right_index;
    return node_index;
}

} // namespace detail

inline double gbdt_raw_score(const GbdtModel& model, std::span<const double> features) {
    double score = model.initial_score;
    for (const auto& tree : model.trees) {
        score += model.config.learning_rate * tree.predict(features);
    }
    return score;
}

inline double gbdt_predict(const GbdtModel& model, std::span<const double> features) {
    if (features.size() != kFeatureCount) {
        throw ShapeError("gbdt_predict: expected " + std::to_string(kFeatureCount) +
                         " features, got " + std::to_string(features.size()));
    }
    return clamp_probability(sigmoid(gbdt_raw_score(model, features)));
}

inline GbdtModel gbdt_train(const std::vector<FeatureVector>& data, const GbdtConfig& config,
                            const std::string& schema_digest = {}) {
    validate_gbdt_config(config);
    if (data.size() < 2) throw TrainingError("gbdt: need at least 2 training samples");
    std::size_t positives = 0;
    for (const auto& fv : data) positives += static_cast<std::size_t>(fv.label01());
    if (positives == 0 || positives == data.size()) {
        throw TrainingError("gbdt: training data must contain both classes");
    }

    const std::size_t n = data.size();
    std::vector<const FeatureVector*> rows(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i] = &data[i];
        labels[i] = data[i].label01();
    }

    GbdtModel model;
    model.config = config;
    model.schema_digest = schema_digest;
    const double base_rate = static_cast<double>(positives) / static_cast<double>(n);
    model.initial_score = std::log(base_rate / (1.0 - base_rate));

    std::vector<double> score(n, model.initial_score);
    std::vector<double> prob(n), residual(n), hessian(n);

    const auto mean_deviance = [&] {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += bce_loss(sigmoid(score[i]), labels[i]);
        return total / static_cast<double>(n);
    };
    model.training_deviance.push_back(mean_deviance());

    for (int round = 0; round < config.n_estimators; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            prob[i] = sigmoid(score[i]);
            residual[i] = static_cast<double>(labels[i]) - prob[i];
            hessian[i] = prob[i] * (1.0 - prob[i]);
        }

        RegressionTree tree;
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        detail::build_tree_node(tree, rows, residual, hessian, all, 0, config);

        for (std::size_t i = 0; i < n; ++i) {
            score[i] += config.learning_rate * tree.predict(rows[i]->values);
        }
        model.trees.push_back(std::move(tree));
        model.training_deviance.push_back(mean_deviance());
    }
    return model;
}

} // namespace dedupe
