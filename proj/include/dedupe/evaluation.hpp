#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dedupe/core.hpp"
#include "dedupe/error.hpp"
#include "dedupe/gbdt.hpp"
#include "dedupe/neural_net.hpp"
#include "dedupe/rng.hpp"

namespace dedupe {

// ---------------------------------------------------------------------------
// Confusion counts and the scalar metrics built on them.
// ---------------------------------------------------------------------------

struct ScoredLabel {
    double score = 0.0;
    int label = 0; // 0 or 1
};

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;
};

/// Predict positive iff score >= threshold.
inline ConfusionCounts confusion(const std::vector<ScoredLabel>& scores, double threshold) {
    if (scores.empty()) throw EmptyInputError("confusion: no scores");
    ConfusionCounts c;
    for (const auto& s : scores) {
        const bool predicted = s.score >= threshold;
        if (s.label == 1) {
            predicted ? ++c.tp : ++c.fn;
        } else {
            predicted ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

/// A ratio whose denominator may be empty; degenerate cases report 0 with
/// a flag instead of failing, so threshold sweeps never abort.
struct Rate {
    double value = 0.0;
    bool degenerate = false;
};

inline Rate make_rate(std::int64_t num, std::int64_t den) {
    if (den == 0) return {0.0, true};
    return {static_cast<double>(num) / static_cast<double>(den), false};
}

inline Rate sensitivity(const ConfusionCounts& c) { return make_rate(c.tp, c.tp + c.fn); }
inline Rate false_positive_rate(const ConfusionCounts& c) { return make_rate(c.fp, c.fp + c.tn); }
inline Rate precision(const ConfusionCounts& c) { return make_rate(c.tp, c.tp + c.fp); }

/// F-beta: recall weighted beta times more than precision.
inline double f_beta(double precision_value, double recall_value, double beta) {
    if (!(beta > 0.0)) throw ParamError("f_beta: beta must be > 0");
    const double b2 = beta * beta;
    const double den = b2 * precision_value + recall_value;
    if (den == 0.0) return 0.0;
    return (1.0 + b2) * precision_value * recall_value / den;
}

// ---------------------------------------------------------------------------
// ROC and precision-recall curves.
// ---------------------------------------------------------------------------

struct CurvePoint {
    double threshold = 0.0;
    double x = 0.0;
    double y = 0.0;
};

namespace detail {

struct RankedCounts {
    std::int64_t positives = 0;
    std::int64_t negatives = 0;
    // per distinct score, descending: cumulative tp/fp at threshold == score
    std::vector<double> thresholds;
    std::vector<std::int64_t> cum_tp;
    std::vector<std::int64_t> cum_fp;
};

inline RankedCounts rank_scores(const std::vector<ScoredLabel>& scores) {
    RankedCounts rc;
    std::vector<ScoredLabel> sorted(scores);
    std::sort(sorted.begin(), sorted.end(), [](const ScoredLabel& a, const ScoredLabel& b) {
        return a.score > b.score;
    });
    std::int64_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i].label == 1) {
            ++tp;
            ++rc.positives;
        } else {
            ++fp;
            ++rc.negatives;
        }
        // close the tie group at the last element of each distinct score
        if (i + 1 == sorted.size() || sorted[i + 1].score != sorted[i].score) {
            rc.thresholds.push_back(sorted[i].score);
            rc.cum_tp.push_back(tp);
            rc.cum_fp.push_back(fp);
        }
    }
    return rc;
}

} // namespace detail

/// Points (FPR, sensitivity) for each distinct threshold, ties grouped,
/// with the (0,0) endpoint at an unattainably high threshold.
inline std::vector<CurvePoint> roc_curve(const std::vector<ScoredLabel>& scores) {
    if (scores.empty()) throw EmptyInputError("roc_curve: no scores");
    const auto rc = detail::rank_scores(scores);
    if (rc.positives == 0 || rc.negatives == 0) {
        throw DegenerateError("roc_curve: both classes required");
    }
    std::vector<CurvePoint> points;
    points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    for (std::size_t i = 0; i < rc.thresholds.size(); ++i) {
        points.push_back({rc.thresholds[i],
                          static_cast<double>(rc.cum_fp[i]) / static_cast<double>(rc.negatives),
                          static_cast<double>(rc.cum_tp[i]) / static_cast<double>(rc.positives)});
    }
    return points;
}

inline double roc_auc(const std::vector<ScoredLabel>& scores) {
    const auto points = roc_curve(scores);
    double auc = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        auc += (points[i].x - points[i - 1].x) * (points[i].y + points[i - 1].y) / 2.0;
    }
    return auc;
}

/// Points (recall, precision) for each distinct threshold, ties grouped.
inline std::vector<CurvePoint> pr_curve(const std::vector<ScoredLabel>& scores) {
    if (scores.empty()) throw EmptyInputError("pr_curve: no scores");
    const auto rc = detail::rank_scores(scores);
    if (rc.positives == 0) throw DegenerateError("pr_curve: at least one positive required");
    std::vector<CurvePoint> points;
    for (std::size_t i = 0; i < rc.thresholds.size(); ++i) {
        const double predicted = static_cast<double>(rc.cum_tp[i] + rc.cum_fp[i]);
        points.push_back({rc.thresholds[i],
                          static_cast<double>(rc.cum_tp[i]) / static_cast<double>(rc.positives),
                          static_cast<double>(rc.cum_tp[i]) / predicted});
    }
    return points;
}

/// PR-AUC as average precision: sum of precision weighted by recall steps.
inline double pr_auc(const std::vector<ScoredLabel>& scores) {
    const auto points = pr_curve(scores);
    double auc = 0.0;
    double prev_recall = 0.0;
    for (const auto& p : points) {
        auc += (p.x - prev_recall) * p.y;
        prev_recall = p.x;
    }
    return auc;
}

// ---------------------------------------------------------------------------
// Sampling protocols.
// ---------------------------------------------------------------------------

struct UndersampleResult {
    std::vector<FeatureVector> data;
    bool warning = false; // fewer non-duplicates than duplicates
};

/// Keep every duplicate, sample an equal number of non-duplicates without
/// replacement, shuffle the result. Deterministic for a fixed seed.
inline UndersampleResult undersample(const std::vector<FeatureVector>& data, std::uint64_t seed) {
    std::vector<std::size_t> dup_idx, non_idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
        (data[i].label01() == 1 ? dup_idx : non_idx).push_back(i);
    }
    if (dup_idx.empty()) throw ConfigError("undersample: no duplicate pairs in data");

    UndersampleResult result;
    Rng rng(derive_seed(seed, "undersample"));
    if (non_idx.size() < dup_idx.size()) {
        result.warning = true;
        result.data = data;
    } else {
        const auto chosen = rng.sample_indices(non_idx.size(), dup_idx.size());
        result.data.reserve(2 * dup_idx.size());
        for (const std::size_t i : dup_idx) result.data.push_back(data[i]);
        for (const std::size_t i : chosen) result.data.push_back(data[non_idx[i]]);
    }
    rng.shuffle(result.data);
    return result;
}

struct FoldSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

/// Stratified k-fold: per-class round-robin assignment after a seeded
/// shuffle. Per-fold class counts differ by at most one.
inline std::vector<FoldSplit> stratified_kfold(const std::vector<int>& labels, int k,
                                               std::uint64_t seed) {
    if (k < 2) throw ConfigError("stratified_kfold: k must be >= 2");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        (labels[i] == 1 ? pos : neg).push_back(i);
    }
    if (pos.size() < static_cast<std::size_t>(k) || neg.size() < static_cast<std::size_t>(k)) {
        throw ConfigError("stratified_kfold: each class needs at least k items");
    }
    Rng rng(derive_seed(seed, "kfold"));
    rng.shuffle(pos);
    rng.shuffle(neg);

    std::vector<std::vector<std::size_t>> fold_members(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < pos.size(); ++i) fold_members[i % static_cast<std::size_t>(k)].push_back(pos[i]);
    for (std::size_t i = 0; i < neg.size(); ++i) fold_members[i % static_cast<std::size_t>(k)].push_back(neg[i]);

    std::vector<FoldSplit> folds(static_cast<std::size_t>(k));
    for (std::size_t f = 0; f < folds.size(); ++f) {
        auto validation = fold_members[f];
        std::sort(validation.begin(), validation.end());
        folds[f].validation = std::move(validation);
        for (std::size_t g = 0; g < fold_members.size(); ++g) {
            if (g == f) continue;
            folds[f].train.insert(folds[f].train.end(), fold_members[g].begin(), fold_members[g].end());
        }
        std::sort(folds[f].train.begin(), folds[f].train.end());
    }
    return folds;
}

// ---------------------------------------------------------------------------
// Experiment drivers. Models are abstracted as trainers so the protocols
// can be exercised with oracle scorers in tests.
// ---------------------------------------------------------------------------

using Scorer = std::function<double(const FeatureVector&)>;
using Trainer = std::function<Scorer(const std::vector<FeatureVector>&)>;

struct ModelConfig {
    enum class Family { gbdt, nn };
    Family family = Family::gbdt;
    GbdtConfig gbdt{};
    NeuralNetConfig nn{};
};

inline Trainer make_trainer(const ModelConfig& config, std::string schema_digest = {}) {
    if (config.family == ModelConfig::Family::gbdt) {
        return [cfg = config.gbdt, digest = std::move(schema_digest)](
                   const std::vector<FeatureVector>& train) -> Scorer {
            auto model = std::make_shared<GbdtModel>(gbdt_train(train, cfg, digest));
            return [model](const FeatureVector& fv) { return gbdt_predict(*model, fv.values); };
        };
    }
    return [cfg = config.nn, digest = std::move(schema_digest)](
               const std::vector<FeatureVector>& train) -> Scorer {
        auto model = std::make_shared<NeuralNetModel>(nn_train(train, cfg, digest));
        return [model](const FeatureVector& fv) { return nn_forward(*model, fv.values); };
    };
}

struct SubsetResult {
    std::string name;
    std::size_t n_total = 0;
    std::size_t n_positive = 0;
    std::optional<double> roc_auc; // absent when the subset has one class
    std::optional<double> pr_auc;  // absent when the subset has no positives
};

struct FBetaPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

struct FBetaSweep {
    double beta = 1.0;
    std::vector<FBetaPoint> points;
};

struct EvalReport {
    std::string experiment;
    std::uint64_t seed = 0;
    nlohmann::ordered_json config_echo = nlohmann::ordered_json::object();

    // pooled scores (loco / evaluate)
    std::size_t n_scored = 0;
    std::size_t n_positive = 0;
    std::vector<CurvePoint> roc;
    std::vector<CurvePoint> pr;
    std::optional<double> roc_auc;
    std::optional<double> pr_auc;
    std::vector<FBetaSweep> f_sweeps;

    // cross-validation aggregates
    std::vector<std::pair<double, double>> mean_roc; // (fpr, mean tpr)
    std::optional<double> roc_auc_mean;
    std::optional<double> roc_auc_std;

    std::vector<SubsetResult> breakdown;
    bool undersample_warning = false;
};

inline std::vector<double> threshold_grid(int n = 101) {
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
    return grid;
}

inline FBetaSweep f_beta_sweep(const std::vector<ScoredLabel>& scores, double beta,
                               const std::vector<double>& grid) {
    FBetaSweep sweep;
    sweep.beta = beta;
    for (const double t : grid) {
        const ConfusionCounts c = confusion(scores, t);
        const double p = precision(c).value;
        const double r = sensitivity(c).value;
        sweep.points.push_back({t, p, r, f_beta(p, r, beta)});
    }
    return sweep;
}

/// Staircase TPR of a ROC curve at the given FPR (vertical averaging).
inline double roc_tpr_at(const std::vector<CurvePoint>& roc, double fpr) {
    double tpr = 0.0;
    for (const auto& p : roc) {
        if (p.x <= fpr) tpr = std::max(tpr, p.y);
    }
    return tpr;
}

/// Metrics for one pooled score set: curves, AUCs and F-beta sweeps.
inline EvalReport evaluate_scores(const std::vector<ScoredLabel>& scores,
                                  const std::vector<double>& betas = {1.0, 5.0},
                                  const std::vector<double>& grid = threshold_grid()) {
    if (scores.empty()) throw EmptyInputError("evaluate_scores: no scores");
    EvalReport report;
    report.experiment = "evaluate";
    report.n_scored = scores.size();
    for (const auto& s : scores) report.n_positive += static_cast<std::size_t>(s.label == 1);

    const bool has_pos = report.n_positive > 0;
    const bool has_neg = report.n_positive < scores.size();
    if (has_pos && has_neg) {
        report.roc = roc_curve(scores);
        report.roc_auc = roc_auc(scores);
    }
    if (has_pos) {
        report.pr = pr_curve(scores);
        report.pr_auc = pr_auc(scores);
    }
    for (const double beta : betas) {
        report.f_sweeps.push_back(f_beta_sweep(scores, beta, grid));
    }
    return report;
}

namespace detail {

inline std::vector<FeatureVector> gather(const std::vector<FeatureVector>& data,
                                         const std::vector<std::size_t>& idx) {
    std::vector<FeatureVector> out;
    out.reserve(idx.size());
    for (const std::size_t i : idx) out.push_back(data[i]);
    return out;
}

} // namespace detail

/// Stratified k-fold cross-validation: per-fold ROC/AUC, a vertically
/// averaged ROC over a fixed FPR grid, and mean +/- std AUC.
inline EvalReport run_cv_experiment(const std::vector<FeatureVector>& data, const Trainer& trainer,
                                    int k = 5, std::uint64_t seed = 0) {
    std::vector<int> labels(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) labels[i] = data[i].label01();
    const auto folds = stratified_kfold(labels, k, seed);

    EvalReport report;
    report.experiment = "crossval";
    report.seed = seed;
    report.n_scored = data.size();
    for (const int l : labels) report.n_positive += static_cast<std::size_t>(l == 1);

    constexpr int kFprGridSize = 201;
    std::vector<double> fpr_grid(kFprGridSize);
    for (int i = 0; i < kFprGridSize; ++i) {
        fpr_grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (kFprGridSize - 1);
    }
    std::vector<double> tpr_sum(kFprGridSize, 0.0);
    std::vector<double> fold_aucs;

    for (std::size_t f = 0; f < folds.size(); ++f) {
        const Scorer scorer = trainer(detail::gather(data, folds[f].train));
        std::vector<ScoredLabel> scored;
        scored.reserve(folds[f].validation.size());
        for (const std::size_t i : folds[f].validation) {
            scored.push_back({scorer(data[i]), labels[i]});
        }
        const auto curve = roc_curve(scored);
        const double auc = roc_auc(scored);
        fold_aucs.push_back(auc);
        for (int g = 0; g < kFprGridSize; ++g) {
            tpr_sum[static_cast<std::size_t>(g)] +=
                roc_tpr_at(curve, fpr_grid[static_cast<std::size_t>(g)]);
        }
        SubsetResult sr;
        sr.name = "fold-" + std::to_string(f);
        sr.n_total = folds[f].validation.size();
        for (const std::size_t i : folds[f].validation) {
            sr.n_positive += static_cast<std::size_t>(labels[i] == 1);
        }
        sr.roc_auc = auc;
        report.breakdown.push_back(std::move(sr));
    }

    report.mean_roc.reserve(fpr_grid.size());
    for (std::size_t g = 0; g < fpr_grid.size(); ++g) {
        report.mean_roc.emplace_back(fpr_grid[g], tpr_sum[g] / static_cast<double>(folds.size()));
    }
    const double mean =
        std::accumulate(fold_aucs.begin(), fold_aucs.end(), 0.0) / static_cast<double>(fold_aucs.size());
    double var = 0.0;
    for (const double a : fold_aucs) var += (a - mean) * (a - mean);
    report.roc_auc_mean = mean;
    report.roc_auc_std =
        fold_aucs.size() > 1 ? std::sqrt(var / static_cast<double>(fold_aucs.size() - 1)) : 0.0;
    return report;
}

struct ClientGroup {
    std::string client_id;
    std::vector<FeatureVector> data;
};

struct ClientGrouping {
    std::vector<ClientGroup> groups;
    std::size_t skipped_cross_client = 0;
};

/// Group feature vectors by the client of their records. Pairs spanning two
/// clients cannot be attributed and are skipped (counted, not scored).
inline ClientGrouping group_features_by_client(const std::vector<FeatureVector>& features,
                                               const RecordIndex& corpus) {
    std::map<std::string, std::vector<FeatureVector>> by_client;
    ClientGrouping out;
    for (const auto& fv : features) {
        const auto left = corpus.find(fv.pair.left_id);
        const auto right = corpus.find(fv.pair.right_id);
        if (left == corpus.end() || right == corpus.end()) {
            throw LookupError("feature pair references unknown record id");
        }
        if (left->second->client_id != right->second->client_id) {
            ++out.skipped_cross_client;
            continue;
        }
        by_client[left->second->client_id].push_back(fv);
    }
    for (auto& [client, data] : by_client) {
        out.groups.push_back(ClientGroup{client, std::move(data)});
    }
    return out;
}

/// Leave-one-client-out: train on the undersampled union of the other
/// clients, score the held-out client at its natural imbalance, pool all
/// held-out predictions into one evaluation.
inline EvalReport run_loco_experiment(const std::vector<ClientGroup>& groups, const Trainer& trainer,
                                      std::uint64_t seed = 0,
                                      const std::vector<double>& betas = {1.0, 5.0}) {
    if (groups.size() < 2) throw ConfigError("loco: need at least 2 client groups");

    std::vector<ScoredLabel> pooled;
    std::vector<SubsetResult> breakdown;
    bool any_warning = false;

    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::vector<FeatureVector> train_pool;
        for (std::size_t o = 0; o < groups.size(); ++o) {
            if (o == g) continue;
            train_pool.insert(train_pool.end(), groups[o].data.begin(), groups[o].data.end());
        }
        const auto balanced =
            undersample(train_pool, derive_seed(seed, "loco:" + groups[g].client_id));
        any_warning = any_warning || balanced.warning;

        // Validation pairs must never leak into training.
        {
            std::vector<std::pair<std::int64_t, std::int64_t>> train_ids;
            train_ids.reserve(balanced.data.size());
            for (const auto& fv : balanced.data) {
                train_ids.emplace_back(fv.pair.left_id, fv.pair.right_id);
            }
            std::sort(train_ids.begin(), train_ids.end());
            for (const auto& fv : groups[g].data) {
                if (std::binary_search(train_ids.begin(), train_ids.end(),
                                       std::make_pair(fv.pair.left_id, fv.pair.right_id))) {
                    throw std::logic_error("loco: validation pair found in training set");
                }
            }
        }

        const Scorer scorer = trainer(balanced.data);
        std::vector<ScoredLabel> scored;
        scored.reserve(groups[g].data.size());
        for (const auto& fv : groups[g].data) {
            scored.push_back({scorer(fv), fv.label01()});
        }
        pooled.insert(pooled.end(), scored.begin(), scored.end());

        SubsetResult sr;
        sr.name = groups[g].client_id;
        sr.n_total = scored.size();
        for (const auto& s : scored) sr.n_positive += static_cast<std::size_t>(s.label == 1);
        if (sr.n_positive > 0 && sr.n_positive < sr.n_total) sr.roc_auc = roc_auc(scored);
        if (sr.n_positive > 0) sr.pr_auc = pr_auc(scored);
        breakdown.push_back(std::move(sr));
    }

    EvalReport report = evaluate_scores(pooled, betas);
    report.experiment = "loco";
    report.seed = seed;
    report.breakdown = std::move(breakdown);
    report.undersample_warning = any_warning;
    return report;
}

// ---------------------------------------------------------------------------
// Hyperparameter grid scan (5-fold CV score per cell).
// ---------------------------------------------------------------------------

struct GridScanRow {
    nlohmann::ordered_json config;
    double mean_auc = 0.0;
    std::vector<double> fold_aucs;
};

struct GridScanResult {
    ModelConfig best;
    double best_auc = 0.0;
    std::size_t best_index = 0;
    std::vector<GridScanRow> table;
};

struct GbdtGrid {
    std::vector<int> n_estimators = {200};
    std::vector<double> learning_rate = {0.1};
    std::vector<int> max_depth = {4};
};

struct NnGrid {
    std::vector<int> epochs = {200};
    std::vector<int> batch_size = {32};
    std::vector<double> step_size = {0.001};
};

struct GridSpec {
    ModelConfig::Family family = ModelConfig::Family::gbdt;
    GbdtGrid gbdt{};
    NnGrid nn{};
    GbdtConfig base_gbdt{};
    NeuralNetConfig base_nn{};
};

namespace detail {

inline std::vector<double> cv_fold_aucs(const std::vector<FeatureVector>& data,
                                        const Trainer& trainer,
                                        const std::vector<FoldSplit>& folds) {
    std::vector<double> aucs;
    aucs.reserve(folds.size());
    for (const auto& fold : folds) {
        const Scorer scorer = trainer(gather(data, fold.train));
        std::vector<ScoredLabel> scored;
        scored.reserve(fold.validation.size());
        for (const std::size_t i : fold.validation) {
            scored.push_back({scorer(data[i]), data[i].label01()});
        }
        aucs.push_back(roc_auc(scored));
    }
    return aucs;
}

} // namespace detail

/// Exhaustive scan scored by mean CV ROC-AUC on shared folds. Ties favor
/// the smaller model (fewer trees or epochs), then earlier grid order.
inline GridScanResult grid_scan(const std::vector<FeatureVector>& data, const GridSpec& spec,
                                int k = 5, std::uint64_t seed = 0) {
    std::vector<ModelConfig> cells;
    if (spec.family == ModelConfig::Family::gbdt) {
        if (spec.gbdt.n_estimators.empty() || spec.gbdt.learning_rate.empty() ||
            spec.gbdt.max_depth.empty()) {
            throw ConfigError("grid_scan: empty gbdt grid dimension");
        }
        for (const int n : spec.gbdt.n_estimators) {
            for (const double lr : spec.gbdt.learning_rate) {
                for (const int d : spec.gbdt.max_depth) {
                    ModelConfig mc;
                    mc.family = ModelConfig::Family::gbdt;
                    mc.gbdt = spec.base_gbdt;
                    mc.gbdt.n_estimators = n;
                    mc.gbdt.learning_rate = lr;
                    mc.gbdt.max_depth = d;
                    cells.push_back(mc);
                }
            }
        }
    } else {
        if (spec.nn.epochs.empty() || spec.nn.batch_size.empty() || spec.nn.step_size.empty()) {
            throw ConfigError("grid_scan: empty nn grid dimension");
        }
        for (const int e : spec.nn.epochs) {
            for (const int b : spec.nn.batch_size) {
                for (const double s : spec.nn.step_size) {
                    ModelConfig mc;
                    mc.family = ModelConfig::Family::nn;
                    mc.nn = spec.base_nn;
                    mc.nn.epochs = e;
                    mc.nn.batch_size = b;
                    mc.nn.adam.step_size = s;
                    cells.push_back(mc);
                }
            }
        }
    }

    std::vector<int> labels(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) labels[i] = data[i].label01();
    const auto folds = stratified_kfold(labels, k, seed);

    GridScanResult result;
    bool have_best = false;
    const auto model_size = [](const ModelConfig& mc) {
        return mc.family == ModelConfig::Family::gbdt ? mc.gbdt.n_estimators : mc.nn.epochs;
    };

    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        const ModelConfig& mc = cells[idx];
        const auto aucs = detail::cv_fold_aucs(data, make_trainer(mc), folds);
        const double mean =
            std::accumulate(aucs.begin(), aucs.end(), 0.0) / static_cast<double>(aucs.size());

        GridScanRow row;
        if (mc.family == ModelConfig::Family::gbdt) {
            row.config = {{"model", "gbdt"},
                          {"n_estimators", mc.gbdt.n_estimators},
                          {"learning_rate", mc.gbdt.learning_rate},
                          {"max_depth", mc.gbdt.max_depth}};
        } else {
            row.config = {{"model", "nn"},
                          {"epochs", mc.nn.epochs},
                          {"batch_size", mc.nn.batch_size},
                          {"step_size", mc.nn.adam.step_size}};
        }
        row.mean_auc = mean;
        row.fold_aucs = aucs;
        result.table.push_back(std::move(row));

        const bool better =
            !have_best || mean > result.best_auc ||
            (mean == result.best_auc && model_size(mc) < model_size(result.best));
        if (better) {
            have_best = true;
            result.best = mc;
            result.best_auc = mean;
            result.best_index = idx;
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Report serialization.
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json curve_to_json(const std::vector<CurvePoint>& curve) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : curve) {
        // +inf endpoint thresholds serialize as null (JSON has no inf)
        nlohmann::ordered_json t;
        if (std::isfinite(p.threshold)) t = p.threshold;
        arr.push_back({t, p.x, p.y});
    }
    return arr;
}

inline nlohmann::ordered_json report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["experiment"] = report.experiment;
    j["seed"] = report.seed;
    j["config"] = report.config_echo;
    j["n_scored"] = report.n_scored;
    j["n_positive"] = report.n_positive;
    if (report.roc_auc) j["roc_auc"] = *report.roc_auc;
    if (report.pr_auc) j["pr_auc"] = *report.pr_auc;
    if (report.roc_auc_mean) j["roc_auc_mean"] = *report.roc_auc_mean;
    if (report.roc_auc_std) j["roc_auc_std"] = *report.roc_auc_std;
    if (!report.roc.empty()) j["roc"] = curve_to_json(report.roc);
    if (!report.pr.empty()) j["pr"] = curve_to_json(report.pr);
    if (!report.mean_roc.empty()) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& [fpr, tpr] : report.mean_roc) arr.push_back({fpr, tpr});
        j["mean_roc"] = std::move(arr);
    }
    if (!report.f_sweeps.empty()) {
        nlohmann::ordered_json sweeps = nlohmann::ordered_json::array();
        for (const auto& sweep : report.f_sweeps) {
            nlohmann::ordered_json points = nlohmann::ordered_json::array();
            for (const auto& p : sweep.points) {
                points.push_back({p.threshold, p.precision, p.recall, p.f});
            }
            sweeps.push_back({{"beta", sweep.beta}, {"points", std::move(points)}});
        }
        j["f_scores"] = std::move(sweeps);
    }
    if (!report.breakdown.empty()) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& sr : report.breakdown) {
            nlohmann::ordered_json row;
            row["name"] = sr.name;
            row["n"] = sr.n_total;
            row["n_positive"] = sr.n_positive;
            row["roc_auc"] = sr.roc_auc ? nlohmann::ordered_json(*sr.roc_auc)
                                        : nlohmann::ordered_json(nullptr);
            row["pr_auc"] = sr.pr_auc ? nlohmann::ordered_json(*sr.pr_auc)
                                      : nlohmann::ordered_json(nullptr);
            rows.push_back(std::move(row));
        }
        j["breakdown"] = std::move(rows);
    }
    j["undersample_warning"] = report.undersample_warning;
    return j;
}

inline std::string roc_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "threshold,fpr,tpr\n";
    char buf[128];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.threshold, p.x, p.y);
        out += buf;
    }
    return out;
}

inline std::string pr_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "threshold,recall,precision\n";
    char buf[128];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", p.threshold, p.x, p.y);
        out += buf;
    }
    return out;
}

inline std::string fbeta_csv(const FBetaSweep& sweep) {
    std::string out = "threshold,precision,recall,f\n";
    char buf[160];
    for (const auto& p : sweep.points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", p.threshold, p.precision,
                      p.recall, p.f);
        out += buf;
    }
    return out;
}

} // namespace dedupe
