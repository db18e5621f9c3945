#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "dedupe/evaluation.hpp"
#include "dedupe/rng.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace dedupe;

namespace {

FeatureVector make_fv(int label, double signal, std::int64_t id) {
    FeatureVector fv;
    fv.pair.left_id = id;
    fv.pair.right_id = id + 10000000;
    fv.pair.label = label == 1 ? Label::duplicate : Label::non_duplicate;
    for (auto& v : fv.values) v = signal;
    return fv;
}

std::vector<ScoredLabel> random_scores(Rng& rng, std::size_t max_n, bool force_ties) {
    std::vector<ScoredLabel> scores;
    const std::size_t n = 2 + rng.below(max_n - 1);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
        ScoredLabel s;
        // a small score grid forces exact ties
        s.score = force_ties ? static_cast<double>(rng.below(8)) / 7.0 : rng.unit();
        s.label = static_cast<int>(rng.below(2));
        has_pos = has_pos || s.label == 1;
        has_neg = has_neg || s.label == 0;
        scores.push_back(s);
    }
    if (!has_pos) scores.front().label = 1;
    if (!has_neg) scores.back().label = 0;
    return scores;
}

std::vector<oracles::Scored> to_oracle(const std::vector<ScoredLabel>& scores) {
    std::vector<oracles::Scored> out;
    for (const auto& s : scores) out.push_back({s.score, s.label});
    return out;
}

// Scorers for protocol tests.
const Trainer oracle_trainer = [](const std::vector<FeatureVector>&) -> Scorer {
    return [](const FeatureVector& fv) { return fv.label01() == 1 ? 0.9 : 0.1; };
};
const Trainer constant_trainer = [](const std::vector<FeatureVector>&) -> Scorer {
    return [](const FeatureVector&) { return 0.5; };
};

} // namespace

TEST_CASE("confusion counting") {
    const std::vector<ScoredLabel> scores = {{0.9, 1}, {0.2, 0}};
    const auto c = confusion(scores, 0.5);
    CHECK(c.tp == 1);
    CHECK(c.tn == 1);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);

    const auto all_pos = confusion(scores, 0.0); // p >= 0 always
    CHECK(all_pos.tn == 0);
    CHECK(all_pos.fn == 0);
    CHECK(all_pos.tp + all_pos.fp == 2);

    std::vector<ScoredLabel> ten;
    for (int i = 0; i < 8; ++i) ten.push_back({0.8, 1});
    for (int i = 0; i < 2; ++i) ten.push_back({0.8, 0});
    const auto c10 = confusion(ten, 0.5);
    CHECK(c10.tp == 8);
    CHECK(c10.fp == 2);

    CHECK_THROWS_AS(confusion({}, 0.5), EmptyInputError);
}

TEST_CASE("rates with degenerate denominators") {
    ConfusionCounts c;
    c.tp = 8;
    c.fn = 2;
    CHECK(sensitivity(c).value == Approx(0.8));
    CHECK_FALSE(sensitivity(c).degenerate);

    ConfusionCounts no_fp;
    no_fp.tn = 10;
    CHECK(false_positive_rate(no_fp).value == 0.0);
    CHECK_FALSE(false_positive_rate(no_fp).degenerate);

    ConfusionCounts none;
    none.tn = 1;
    const auto p = precision(none);
    CHECK(p.value == 0.0);
    CHECK(p.degenerate);
}

TEST_CASE("f_beta values and properties") {
    CHECK(f_beta(0.5, 1.0, 1.0) == Approx(2.0 / 3.0).margin(1e-4));
    CHECK(f_beta(0.5, 1.0, 5.0) == Approx(26.0 * 0.5 / (25.0 * 0.5 + 1.0)).margin(1e-12));
    CHECK(f_beta(0.0, 0.0, 2.0) == 0.0);
    CHECK_THROWS_AS(f_beta(0.5, 0.5, 0.0), ParamError);
    CHECK_THROWS_AS(f_beta(0.5, 0.5, -1.0), ParamError);

    Rng rng(8);
    for (int i = 0; i < 100; ++i) {
        const double x = rng.unit();
        const double beta = 0.1 + 5.0 * rng.unit();
        CHECK(f_beta(x, x, beta) == Approx(x).margin(1e-12));
    }
    // strictly increasing in recall for fixed precision > 0
    CHECK(f_beta(0.4, 0.6, 2.0) > f_beta(0.4, 0.5, 2.0));
    // beta = 1 is the harmonic mean
    CHECK(f_beta(0.3, 0.7, 1.0) == Approx(2.0 * 0.3 * 0.7 / (0.3 + 0.7)).margin(1e-12));
}

TEST_CASE("roc curve hand cases") {
    const std::vector<ScoredLabel> separated = {{0.9, 1}, {0.8, 1}, {0.4, 0}, {0.3, 0}};
    CHECK(roc_auc(separated) == 1.0);

    const std::vector<ScoredLabel> ties = {{0.5, 1}, {0.5, 0}, {0.5, 1}, {0.5, 0}};
    CHECK(roc_auc(ties) == 0.5);
    const auto curve = roc_curve(ties);
    REQUIRE(curve.size() == 2); // (0,0) endpoint plus the single tie group
    CHECK(curve[1].x == 1.0);
    CHECK(curve[1].y == 1.0);

    const std::vector<ScoredLabel> single_class = {{0.5, 1}, {0.4, 1}};
    CHECK_THROWS_AS(roc_curve(single_class), DegenerateError);

    // monotone in both coordinates as the threshold drops
    Rng rng(15);
    const auto scores = random_scores(rng, 50, true);
    const auto pts = roc_curve(scores);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(pts[i].x >= pts[i - 1].x);
        CHECK(pts[i].y >= pts[i - 1].y);
    }
}

TEST_CASE("label swap mirrors roc auc") {
    Rng rng(16);
    for (int iter = 0; iter < 50; ++iter) {
        auto scores = random_scores(rng, 60, iter % 2 == 0);
        const double auc = roc_auc(scores);
        for (auto& s : scores) s.label = 1 - s.label;
        CHECK(roc_auc(scores) == Approx(1.0 - auc).margin(1e-12));
    }
}

TEST_CASE("roc auc equals tie-adjusted mann-whitney") {
    Rng rng(17);
    for (int iter = 0; iter < 200; ++iter) {
        const auto scores = random_scores(rng, 100, true);
        CHECK(roc_auc(scores) ==
              Approx(oracles::mann_whitney_auc(to_oracle(scores))).margin(1e-9));
    }
}

TEST_CASE("pr curve and average precision") {
    const std::vector<ScoredLabel> separated = {{0.9, 1}, {0.8, 1}, {0.4, 0}, {0.3, 0}};
    CHECK(pr_auc(separated) == 1.0);

    // identical scores: single step at recall 1 with precision = positive rate
    const std::vector<ScoredLabel> flat = {{0.5, 1}, {0.5, 0}, {0.5, 0}, {0.5, 0}};
    CHECK(pr_auc(flat) == Approx(0.25).margin(1e-12));

    const std::vector<ScoredLabel> no_pos = {{0.5, 0}, {0.4, 0}};
    CHECK_THROWS_AS(pr_curve(no_pos), DegenerateError);

    Rng rng(18);
    for (int iter = 0; iter < 200; ++iter) {
        const auto scores = random_scores(rng, 100, iter % 2 == 0);
        CHECK(pr_auc(scores) ==
              Approx(oracles::average_precision(to_oracle(scores))).margin(1e-9));
    }
}

TEST_CASE("undersample to exact balance") {
    std::vector<FeatureVector> data;
    std::int64_t id = 1;
    for (int i = 0; i < 10; ++i) data.push_back(make_fv(1, 0.9, id++));
    for (int i = 0; i < 1000; ++i) data.push_back(make_fv(0, 0.1, id++));

    const auto result = undersample(data, 42);
    CHECK_FALSE(result.warning);
    REQUIRE(result.data.size() == 20);
    std::size_t pos = 0;
    for (const auto& fv : result.data) pos += static_cast<std::size_t>(fv.label01());
    CHECK(pos == 10);

    // deterministic selection
    const auto again = undersample(data, 42);
    std::set<std::int64_t> ids1, ids2;
    for (const auto& fv : result.data) ids1.insert(fv.pair.left_id);
    for (const auto& fv : again.data) ids2.insert(fv.pair.left_id);
    CHECK(ids1 == ids2);
    const auto different = undersample(data, 43);
    std::set<std::int64_t> ids3;
    for (const auto& fv : different.data) ids3.insert(fv.pair.left_id);
    CHECK(ids1 != ids3);

    // balanced input passes through as a multiset
    std::vector<FeatureVector> balanced;
    id = 1;
    for (int i = 0; i < 10; ++i) balanced.push_back(make_fv(i % 2, 0.5, id++));
    const auto same = undersample(balanced, 1);
    CHECK(same.data.size() == balanced.size());
    CHECK_FALSE(same.warning);

    // fewer negatives than positives: keep everything, warn
    std::vector<FeatureVector> skewed;
    id = 1;
    for (int i = 0; i < 8; ++i) skewed.push_back(make_fv(1, 0.5, id++));
    skewed.push_back(make_fv(0, 0.5, id++));
    const auto warned = undersample(skewed, 1);
    CHECK(warned.warning);
    CHECK(warned.data.size() == skewed.size());
}

TEST_CASE("stratified k-fold balance and partition") {
    std::vector<int> labels;
    for (int i = 0; i < 50; ++i) labels.push_back(1);
    for (int i = 0; i < 50; ++i) labels.push_back(0);

    const auto folds = stratified_kfold(labels, 5, 7);
    REQUIRE(folds.size() == 5);
    std::set<std::size_t> seen;
    for (const auto& fold : folds) {
        std::size_t pos = 0, neg = 0;
        for (const std::size_t i : fold.validation) {
            (labels[i] == 1 ? pos : neg)++;
            CHECK(seen.insert(i).second); // validated exactly once
        }
        CHECK(pos == 10);
        CHECK(neg == 10);
        CHECK(fold.train.size() + fold.validation.size() == labels.size());
        // train and validation are disjoint
        std::set<std::size_t> train_set(fold.train.begin(), fold.train.end());
        for (const std::size_t i : fold.validation) CHECK_FALSE(train_set.count(i));
    }
    CHECK(seen.size() == labels.size());
}

TEST_CASE("stratified k-fold uneven remainder") {
    std::vector<int> labels;
    for (int i = 0; i < 52; ++i) labels.push_back(1);
    for (int i = 0; i < 48; ++i) labels.push_back(0);
    const auto folds = stratified_kfold(labels, 5, 3);
    for (const auto& fold : folds) {
        std::size_t pos = 0;
        for (const std::size_t i : fold.validation) pos += static_cast<std::size_t>(labels[i] == 1);
        CHECK((pos == 10 || pos == 11));
    }
    std::vector<int> tiny = {1, 1, 0, 0};
    CHECK_THROWS_AS(stratified_kfold(tiny, 5, 0), ConfigError);
}

TEST_CASE("cross-validation experiment") {
    std::vector<FeatureVector> data;
    std::int64_t id = 1;
    for (int i = 0; i < 50; ++i) data.push_back(make_fv(1, 0.9, id++));
    for (int i = 0; i < 50; ++i) data.push_back(make_fv(0, 0.1, id++));

    SECTION("oracle scorer gives auc 1 on every fold") {
        const auto report = run_cv_experiment(data, oracle_trainer, 5, 11);
        REQUIRE(report.breakdown.size() == 5);
        for (const auto& fold : report.breakdown) {
            REQUIRE(fold.roc_auc.has_value());
            CHECK(*fold.roc_auc == 1.0);
        }
        CHECK(*report.roc_auc_mean == 1.0);
        CHECK(*report.roc_auc_std == 0.0);
        CHECK(report.mean_roc.size() == 201);
        CHECK(report.mean_roc.front().second == Approx(1.0)); // tpr already 1 at fpr 0
        CHECK(report.mean_roc.back().first == 1.0);
    }

    SECTION("constant scorer gives auc 0.5 on every fold") {
        const auto report = run_cv_experiment(data, constant_trainer, 5, 11);
        for (const auto& fold : report.breakdown) {
            CHECK(*fold.roc_auc == 0.5);
        }
        CHECK(*report.roc_auc_mean == 0.5);
    }
}

TEST_CASE("leave-one-client-out experiment") {
    std::vector<ClientGroup> groups;
    std::int64_t id = 1;
    for (int c = 0; c < 5; ++c) {
        ClientGroup g;
        g.client_id = "client-" + std::to_string(c + 1);
        for (int i = 0; i < 4; ++i) g.data.push_back(make_fv(1, 0.9, id++));
        for (int i = 0; i < 40; ++i) g.data.push_back(make_fv(0, 0.1, id++));
        groups.push_back(std::move(g));
    }

    const auto report = run_loco_experiment(groups, oracle_trainer, 19);
    CHECK(report.experiment == "loco");
    REQUIRE(report.breakdown.size() == 5); // each client held out once
    CHECK(report.n_scored == 5 * 44);      // all held-out predictions pooled
    REQUIRE(report.roc_auc.has_value());
    CHECK(*report.roc_auc == 1.0);
    REQUIRE(report.pr_auc.has_value());
    CHECK(*report.pr_auc == 1.0);
    REQUIRE(report.f_sweeps.size() == 2);
    CHECK(report.f_sweeps[0].beta == 1.0);
    CHECK(report.f_sweeps[1].beta == 5.0);
    CHECK(report.f_sweeps[0].points.size() == 101);

    for (const auto& client : report.breakdown) {
        CHECK(client.n_total == 44);
        CHECK(client.n_positive == 4);
        REQUIRE(client.roc_auc.has_value());
        CHECK(*client.roc_auc == 1.0);
    }

    CHECK_THROWS_AS(run_loco_experiment({groups[0]}, oracle_trainer, 1), ConfigError);
}

TEST_CASE("loco keeps client with no positives in the pool") {
    std::vector<ClientGroup> groups;
    std::int64_t id = 1;
    for (int c = 0; c < 2; ++c) {
        ClientGroup g;
        g.client_id = "client-" + std::to_string(c + 1);
        for (int i = 0; i < 3; ++i) g.data.push_back(make_fv(1, 0.9, id++));
        for (int i = 0; i < 30; ++i) g.data.push_back(make_fv(0, 0.1, id++));
        groups.push_back(std::move(g));
    }
    ClientGroup empty_pos;
    empty_pos.client_id = "client-3";
    for (int i = 0; i < 10; ++i) empty_pos.data.push_back(make_fv(0, 0.1, id++));
    groups.push_back(empty_pos);

    const auto report = run_loco_experiment(groups, oracle_trainer, 5);
    CHECK(report.n_scored == 33 + 33 + 10);
    const auto& degenerate = report.breakdown.back();
    CHECK(degenerate.name == "client-3");
    CHECK_FALSE(degenerate.roc_auc.has_value());
    CHECK_FALSE(degenerate.pr_auc.has_value());
}

TEST_CASE("loco rejects a pair that appears in two clients") {
    // the same canonical pair in both groups would leak the validation
    // set into training; the duplicate survives undersampling by design
    FeatureVector shared = make_fv(1, 0.9, 999);
    std::vector<ClientGroup> groups(2);
    for (int c = 0; c < 2; ++c) {
        groups[static_cast<std::size_t>(c)].client_id = "c" + std::to_string(c);
        groups[static_cast<std::size_t>(c)].data.push_back(shared);
        for (int i = 0; i < 10; ++i) {
            groups[static_cast<std::size_t>(c)].data.push_back(
                make_fv(0, 0.1, 1000 * (c + 2) + i));
        }
    }
    CHECK_THROWS_AS(run_loco_experiment(groups, oracle_trainer, 3), std::logic_error);
}

TEST_CASE("grouping features by client") {
    std::vector<InvoiceRecord> corpus;
    for (int i = 1; i <= 4; ++i) {
        InvoiceRecord r;
        r.record_id = i;
        r.client_id = i <= 2 ? "c1" : "c2";
        corpus.push_back(r);
    }
    const auto index = index_records(corpus);

    FeatureVector same;
    same.pair = canonicalize_pair(1, 2);
    FeatureVector cross;
    cross.pair = canonicalize_pair(2, 3);
    const auto grouping = group_features_by_client({same, cross}, index);
    CHECK(grouping.groups.size() == 1);
    CHECK(grouping.groups[0].client_id == "c1");
    CHECK(grouping.skipped_cross_client == 1);

    FeatureVector missing;
    missing.pair = canonicalize_pair(1, 99);
    CHECK_THROWS_AS(group_features_by_client({missing}, index), LookupError);
}

TEST_CASE("grid scan") {
    std::vector<FeatureVector> data;
    Rng rng(23);
    std::int64_t id = 1;
    for (int i = 0; i < 60; ++i) {
        const int label = static_cast<int>(rng.below(2));
        FeatureVector fv = make_fv(label, 0.0, id++);
        fv.values[0] = static_cast<double>(label); // oracle feature
        for (std::size_t f = 1; f < kFeatureCount; ++f) fv.values[f] = rng.unit();
        data.push_back(fv);
    }

    SECTION("singleton grid returns its only config") {
        GridSpec spec;
        spec.gbdt.n_estimators = {13};
        spec.gbdt.learning_rate = {0.2};
        spec.gbdt.max_depth = {2};
        const auto result = grid_scan(data, spec, 5, 3);
        REQUIRE(result.table.size() == 1);
        CHECK(result.best.gbdt.n_estimators == 13);
        CHECK(result.best.gbdt.learning_rate == 0.2);
    }

    SECTION("table covers the whole grid and ties prefer smaller models") {
        GridSpec spec;
        spec.gbdt.n_estimators = {40, 10};
        spec.gbdt.learning_rate = {0.1, 0.3};
        spec.gbdt.max_depth = {2};
        const auto result = grid_scan(data, spec, 5, 3);
        CHECK(result.table.size() == 4);
        // the oracle feature makes every cell perfect; the smaller model wins
        CHECK(result.best_auc == 1.0);
        CHECK(result.best.gbdt.n_estimators == 10);
    }

    SECTION("empty dimension is rejected") {
        GridSpec spec;
        spec.gbdt.n_estimators = {};
        CHECK_THROWS_AS(grid_scan(data, spec, 5, 3), ConfigError);
    }

    SECTION("nn family scans epochs and prefers fewer on ties") {
        GridSpec spec;
        spec.family = ModelConfig::Family::nn;
        spec.nn.epochs = {40, 10};
        spec.nn.batch_size = {16};
        spec.nn.step_size = {0.01};
        const auto result = grid_scan(data, spec, 5, 3);
        CHECK(result.table.size() == 2);
        CHECK(result.best.family == ModelConfig::Family::nn);
        if (result.table[0].mean_auc == result.table[1].mean_auc) {
            CHECK(result.best.nn.epochs == 10);
        }
    }
}

TEST_CASE("report serialization is stable") {
    std::vector<ScoredLabel> scores = {{0.9, 1}, {0.7, 0}, {0.8, 1}, {0.2, 0}};
    auto report = evaluate_scores(scores);
    report.seed = 5;
    const auto j1 = report_to_json(report).dump(2);
    const auto j2 = report_to_json(report).dump(2);
    CHECK(j1 == j2);
    CHECK(j1.find("roc_auc") != std::string::npos);
    CHECK(roc_csv(report.roc).rfind("threshold,fpr,tpr\n", 0) == 0);
    CHECK(pr_csv(report.pr).rfind("threshold,recall,precision\n", 0) == 0);
    CHECK(fbeta_csv(report.f_sweeps[0]).rfind("threshold,precision,recall,f\n", 0) == 0);
}
