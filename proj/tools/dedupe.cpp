// Command-line front end: generate -> clean -> pairs -> featurize -> train ->
// predict/evaluate, plus the crossval / loco / gridscan experiment drivers.
// Every stage writes its artifacts plus a manifest with content digests.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dedupe/blocking.hpp"
#include "dedupe/core.hpp"
#include "dedupe/datagen.hpp"
#include "dedupe/evaluation.hpp"
#include "dedupe/io.hpp"
#include "dedupe/model_io.hpp"
#include "dedupe/pipeline.hpp"

namespace {

using dedupe::json;

json load_config_json(const std::string& path) {
    try {
        return json::parse(dedupe::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw dedupe::ConfigError(path + ": " + e.what());
    }
}

dedupe::ModelConfig::Family parse_family(const std::string& name) {
    if (name == "gbdt") return dedupe::ModelConfig::Family::gbdt;
    if (name == "nn") return dedupe::ModelConfig::Family::nn;
    throw dedupe::ConfigError("unknown model family: " + name + " (expected gbdt or nn)");
}

struct CommonOptions {
    std::string out_dir = ".";
    std::uint64_t seed = 42;
    bool seed_given = false;
    int threads = 1;
};

dedupe::FeatureSchema load_schema_or_default(const std::string& path) {
    if (path.empty()) return dedupe::default_schema();
    return dedupe::schema_from_json(load_config_json(path));
}

dedupe::ModelConfig load_model_config(const std::string& family, const std::string& config_path,
                                      std::uint64_t seed, bool seed_given) {
    dedupe::ModelConfig mc;
    mc.family = parse_family(family);
    const json cfg = config_path.empty() ? json::object() : load_config_json(config_path);
    try {
        if (mc.family == dedupe::ModelConfig::Family::gbdt) {
            mc.gbdt = dedupe::gbdt_config_from_json(cfg);
            if (seed_given || !cfg.contains("seed")) mc.gbdt.seed = seed;
        } else {
            mc.nn = dedupe::nn_config_from_json(cfg);
            if (seed_given || !cfg.contains("seed")) mc.nn.seed = seed;
        }
    } catch (const nlohmann::json::exception& e) {
        throw dedupe::ConfigError("model config: " + std::string(e.what()));
    }
    return mc;
}

json model_config_echo(const dedupe::ModelConfig& mc) {
    if (mc.family == dedupe::ModelConfig::Family::gbdt) {
        json j = dedupe::gbdt_config_to_json(mc.gbdt);
        j["model"] = "gbdt";
        return j;
    }
    json j = dedupe::nn_config_to_json(mc.nn);
    j["model"] = "nn";
    return j;
}

std::string beta_tag(double beta) {
    char buf[32];
    if (beta == static_cast<double>(static_cast<long long>(beta))) {
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(beta));
    } else {
        std::snprintf(buf, sizeof(buf), "%g", beta);
    }
    return std::string(buf);
}

void write_report_artifacts(dedupe::StageWriter& writer, const dedupe::EvalReport& report) {
    writer.add("report.json", dedupe::report_to_json(report).dump(2) + "\n");
    if (!report.roc.empty()) writer.add("roc.csv", dedupe::roc_csv(report.roc));
    if (!report.pr.empty()) writer.add("pr.csv", dedupe::pr_csv(report.pr));
    for (const auto& sweep : report.f_sweeps) {
        writer.add("fbeta_" + beta_tag(sweep.beta) + ".csv", dedupe::fbeta_csv(sweep));
    }
    if (!report.mean_roc.empty()) {
        std::string csv = "fpr,mean_tpr\n";
        char buf[80];
        for (const auto& [fpr, tpr] : report.mean_roc) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", fpr, tpr);
            csv += buf;
        }
        writer.add("mean_roc.csv", csv);
    }
}

// ---------------------------------------------------------------------------
// Stage implementations.
// ---------------------------------------------------------------------------

void cmd_generate(const CommonOptions& common, const std::string& config_path) {
    dedupe::GenConfig config;
    if (!config_path.empty()) config = dedupe::gen_config_from_json(load_config_json(config_path));
    if (common.seed_given) config.seed = common.seed;

    const auto [records, truth] = dedupe::generate_corpus(config);
    const auto report = dedupe::generate_report(records, truth);

    dedupe::StageWriter writer("generate", common.out_dir);
    writer.set_seed(config.seed);
    writer.set_config(dedupe::gen_config_to_json(config));
    if (!config_path.empty()) writer.record_input(config_path);
    writer.add("corpus.csv", dedupe::corpus_to_csv(records));
    writer.add("truth.csv", dedupe::truth_to_csv(truth.pairs));
    writer.add("generate_report.json", dedupe::gen_report_to_json(report).dump(2) + "\n");
    writer.commit();

    std::cout << "generated " << records.size() << " records, " << truth.pairs.size()
              << " duplicate pairs (achieved imbalance 1:" << report.achieved_imbalance << ")\n";
}

void cmd_clean(const CommonOptions& common, const std::string& corpus_path) {
    const auto records = dedupe::corpus_from_csv(dedupe::read_file(corpus_path));
    auto [kept, report] = dedupe::clean_corpus(records);

    dedupe::StageWriter writer("clean", common.out_dir);
    writer.record_input(corpus_path);
    writer.add("cleaned.csv", dedupe::corpus_to_csv(kept));
    json rep = {{"n_input", report.n_input},
                {"n_removed", report.n_removed},
                {"removed_fraction", report.removed_fraction},
                {"warning", report.warning}};
    writer.add("clean_report.json", rep.dump(2) + "\n");
    writer.commit();

    std::cout << "kept " << kept.size() << " of " << report.n_input << " records ("
              << 100.0 * report.removed_fraction << "% removed)"
              << (report.warning ? " [warning: over the 1% removal budget]" : "") << "\n";
}

void cmd_pairs(const CommonOptions& common, const std::string& corpus_path,
               const std::string& blocking_path, const std::string& truth_path,
               bool global_blocking) {
    const auto records = dedupe::corpus_from_csv(dedupe::read_file(corpus_path));
    dedupe::BlockingConfig blocking = dedupe::default_blocking_config();
    if (!blocking_path.empty()) {
        blocking = dedupe::blocking_config_from_json(load_config_json(blocking_path));
    }

    auto pairs = global_blocking
                     ? dedupe::candidate_pairs(dedupe::build_blocks(records, blocking))
                     : dedupe::candidate_pairs_per_client(records, blocking);

    json rep;
    rep["n_records"] = records.size();
    rep["n_pairs"] = pairs.size();
    rep["blocking_scope"] = global_blocking ? "global" : "per_client";
    if (records.size() >= 2) {
        rep["pair_reduction_ratio"] = dedupe::pair_reduction_ratio(
            static_cast<std::int64_t>(records.size()), static_cast<std::int64_t>(pairs.size()));
    }
    if (!truth_path.empty()) {
        const auto truth = dedupe::truth_from_csv(dedupe::read_file(truth_path));
        auto [labeled, label_report] = dedupe::label_pairs(std::move(pairs), truth);
        pairs = std::move(labeled);
        rep["n_duplicates"] = label_report.matched;
        rep["truth_pairs"] = label_report.truth_pairs;
        rep["blocking_recall"] = label_report.blocking_recall;
    }

    dedupe::StageWriter writer("pairs", common.out_dir);
    writer.set_config(dedupe::blocking_config_to_json(blocking));
    writer.record_input(corpus_path);
    if (!blocking_path.empty()) writer.record_input(blocking_path);
    if (!truth_path.empty()) writer.record_input(truth_path);
    writer.add("pairs.csv", dedupe::pairs_to_csv(pairs));
    writer.add("pairs_report.json", rep.dump(2) + "\n");
    writer.commit();

    std::cout << "emitted " << pairs.size() << " candidate pairs\n";
}

void cmd_featurize(const CommonOptions& common, const std::string& corpus_path,
                   const std::string& pairs_path, const std::string& schema_path) {
    const auto records = dedupe::corpus_from_csv(dedupe::read_file(corpus_path));
    const auto pairs = dedupe::pairs_from_csv(dedupe::read_file(pairs_path));
    const auto schema = load_schema_or_default(schema_path);
    const auto index = dedupe::index_records(records);

    const auto features = dedupe::featurize_pairs(pairs, index, schema, common.threads);

    dedupe::StageWriter writer("featurize", common.out_dir);
    writer.set_config({{"schema_digest", dedupe::schema_digest(schema)},
                       {"threads", common.threads}});
    writer.record_input(corpus_path);
    writer.record_input(pairs_path);
    if (!schema_path.empty()) writer.record_input(schema_path);
    writer.add("features.jsonl", dedupe::features_to_jsonl(features));
    writer.add("schema.json", dedupe::schema_to_json(schema).dump(2) + "\n");
    writer.commit();

    std::cout << "featurized " << features.size() << " pairs under schema "
              << dedupe::schema_digest(schema) << "\n";
}

void cmd_sim(const std::string& metric, const std::string& a, const std::string& b, int n,
             const std::string& inner, double prefix_weight, int max_prefix) {
    dedupe::MetricSpec spec;
    spec.metric.kind = dedupe::parse_metric_kind(metric);
    spec.metric.ngram_n = n;
    spec.metric.prefix_weight = prefix_weight;
    spec.metric.max_prefix = max_prefix;
    if (spec.metric.kind == dedupe::MetricKind::monge_elkan) {
        dedupe::AtomicMetric inner_metric;
        inner_metric.kind = dedupe::parse_metric_kind(inner);
        inner_metric.ngram_n = n;
        inner_metric.prefix_weight = prefix_weight;
        inner_metric.max_prefix = max_prefix;
        spec.inner = inner_metric;
    }
    std::printf("%.17g\n", dedupe::evaluate_metric(spec, a, b));
}

void cmd_train(const CommonOptions& common, const std::string& family,
               const std::string& features_path, const std::string& config_path,
               const std::string& schema_path) {
    const auto features = dedupe::features_from_jsonl(dedupe::read_file(features_path));
    const auto schema = load_schema_or_default(schema_path);
    const auto digest = dedupe::schema_digest(schema);
    const auto mc = load_model_config(family, config_path, common.seed, common.seed_given);

    dedupe::TrainedModel model;
    if (mc.family == dedupe::ModelConfig::Family::gbdt) {
        model = dedupe::gbdt_train(features, mc.gbdt, digest);
    } else {
        model = dedupe::nn_train(features, mc.nn, digest);
    }

    dedupe::StageWriter writer("train-" + family, common.out_dir);
    writer.set_seed(mc.family == dedupe::ModelConfig::Family::gbdt ? mc.gbdt.seed : mc.nn.seed);
    writer.set_config(model_config_echo(mc));
    writer.record_input(features_path);
    if (!config_path.empty()) writer.record_input(config_path);
    if (!schema_path.empty()) writer.record_input(schema_path);
    writer.add(family + ".model.json", dedupe::model_to_string(model));
    writer.commit();

    std::cout << "trained " << family << " on " << features.size() << " pairs (schema " << digest
              << ")\n";
}

void cmd_predict(const CommonOptions& common, const std::string& model_path,
                 const std::string& features_path, const std::string& schema_path) {
    const auto model = dedupe::load_model(model_path);
    const auto features = dedupe::features_from_jsonl(dedupe::read_file(features_path));
    if (!schema_path.empty()) {
        dedupe::check_schema(model, load_schema_or_default(schema_path));
    }

    std::vector<dedupe::Prediction> predictions;
    predictions.reserve(features.size());
    for (const auto& fv : features) {
        predictions.push_back(
            {fv.pair.left_id, fv.pair.right_id, dedupe::predict_model(model, fv.values)});
    }

    dedupe::StageWriter writer("predict", common.out_dir);
    writer.record_input(model_path);
    writer.record_input(features_path);
    if (!schema_path.empty()) writer.record_input(schema_path);
    writer.add("predictions.csv", dedupe::predictions_to_csv(predictions));
    writer.commit();

    std::cout << "scored " << predictions.size() << " pairs\n";
}

void cmd_evaluate(const CommonOptions& common, const std::string& predictions_path,
                  const std::string& labels_path, const std::vector<double>& betas) {
    const auto predictions = dedupe::predictions_from_csv(dedupe::read_file(predictions_path));
    const auto labeled = dedupe::pairs_from_csv(dedupe::read_file(labels_path));

    std::map<std::pair<std::int64_t, std::int64_t>, int> label_of;
    for (const auto& p : labeled) {
        if (p.label == dedupe::Label::unlabeled) {
            throw dedupe::Error("labels file contains unlabeled pairs: " +
                                std::to_string(p.left_id) + "," + std::to_string(p.right_id));
        }
        label_of[{p.left_id, p.right_id}] = static_cast<int>(p.label);
    }
    std::vector<dedupe::ScoredLabel> scored;
    scored.reserve(predictions.size());
    for (const auto& pred : predictions) {
        const auto it = label_of.find({pred.left_id, pred.right_id});
        if (it == label_of.end()) {
            throw dedupe::Error("prediction pair missing from labels: " +
                                std::to_string(pred.left_id) + "," + std::to_string(pred.right_id));
        }
        scored.push_back({pred.probability, it->second});
    }

    auto report = dedupe::evaluate_scores(scored, betas);
    report.seed = common.seed;

    dedupe::StageWriter writer("evaluate", common.out_dir);
    writer.record_input(predictions_path);
    writer.record_input(labels_path);
    write_report_artifacts(writer, report);
    writer.commit();

    if (report.roc_auc) std::cout << "roc_auc " << *report.roc_auc << "\n";
    if (report.pr_auc) std::cout << "pr_auc " << *report.pr_auc << "\n";
}

void cmd_crossval(const CommonOptions& common, const std::string& features_path,
                  const std::string& family, const std::string& config_path, int k) {
    const auto features = dedupe::features_from_jsonl(dedupe::read_file(features_path));
    const auto mc = load_model_config(family, config_path, common.seed, common.seed_given);

    const auto balanced = dedupe::undersample(features, dedupe::derive_seed(common.seed, "crossval"));
    auto report = dedupe::run_cv_experiment(balanced.data, dedupe::make_trainer(mc), k, common.seed);
    report.undersample_warning = balanced.warning;
    report.seed = common.seed;
    report.config_echo = model_config_echo(mc);
    report.config_echo["k"] = k;

    dedupe::StageWriter writer("crossval", common.out_dir);
    writer.set_seed(common.seed);
    writer.set_config(report.config_echo);
    writer.record_input(features_path);
    if (!config_path.empty()) writer.record_input(config_path);
    write_report_artifacts(writer, report);
    writer.commit();

    std::cout << "crossval mean roc_auc " << *report.roc_auc_mean << " +/- " << *report.roc_auc_std
              << "\n";
}

void cmd_loco(const CommonOptions& common, const std::string& features_path,
              const std::string& corpus_path, const std::string& family,
              const std::string& config_path, const std::vector<double>& betas) {
    const auto features = dedupe::features_from_jsonl(dedupe::read_file(features_path));
    const auto records = dedupe::corpus_from_csv(dedupe::read_file(corpus_path));
    const auto index = dedupe::index_records(records);
    const auto mc = load_model_config(family, config_path, common.seed, common.seed_given);

    const auto grouping = dedupe::group_features_by_client(features, index);
    auto report =
        dedupe::run_loco_experiment(grouping.groups, dedupe::make_trainer(mc), common.seed, betas);
    report.seed = common.seed;
    report.config_echo = model_config_echo(mc);
    report.config_echo["skipped_cross_client"] = grouping.skipped_cross_client;

    dedupe::StageWriter writer("loco", common.out_dir);
    writer.set_seed(common.seed);
    writer.set_config(report.config_echo);
    writer.record_input(features_path);
    writer.record_input(corpus_path);
    if (!config_path.empty()) writer.record_input(config_path);
    write_report_artifacts(writer, report);
    writer.commit();

    std::cout << "loco pooled roc_auc " << *report.roc_auc << " pr_auc " << *report.pr_auc << "\n";
}

void cmd_gridscan(const CommonOptions& common, const std::string& features_path,
                  const std::string& family, const std::string& grid_path, int k) {
    const auto features = dedupe::features_from_jsonl(dedupe::read_file(features_path));
    const json grid_json = load_config_json(grid_path);

    dedupe::GridSpec spec;
    spec.family = parse_family(family);
    try {
        if (spec.family == dedupe::ModelConfig::Family::gbdt) {
            if (grid_json.contains("n_estimators")) {
                spec.gbdt.n_estimators = grid_json["n_estimators"].get<std::vector<int>>();
            }
            if (grid_json.contains("learning_rate")) {
                spec.gbdt.learning_rate = grid_json["learning_rate"].get<std::vector<double>>();
            }
            if (grid_json.contains("max_depth")) {
                spec.gbdt.max_depth = grid_json["max_depth"].get<std::vector<int>>();
            }
            spec.base_gbdt.seed = common.seed;
        } else {
            if (grid_json.contains("epochs")) {
                spec.nn.epochs = grid_json["epochs"].get<std::vector<int>>();
            }
            if (grid_json.contains("batch_size")) {
                spec.nn.batch_size = grid_json["batch_size"].get<std::vector<int>>();
            }
            if (grid_json.contains("step_size")) {
                spec.nn.step_size = grid_json["step_size"].get<std::vector<double>>();
            }
            spec.base_nn.seed = common.seed;
        }
    } catch (const nlohmann::json::exception& e) {
        throw dedupe::ConfigError("grid config: " + std::string(e.what()));
    }

    const auto balanced = dedupe::undersample(features, dedupe::derive_seed(common.seed, "gridscan"));
    const auto result = dedupe::grid_scan(balanced.data, spec, k, common.seed);

    json out;
    out["model"] = family;
    out["k"] = k;
    out["seed"] = common.seed;
    out["best"] = model_config_echo(result.best);
    out["best_mean_auc"] = result.best_auc;
    json table = json::array();
    for (const auto& row : result.table) {
        table.push_back({{"config", row.config},
                         {"mean_auc", row.mean_auc},
                         {"fold_aucs", row.fold_aucs}});
    }
    out["table"] = std::move(table);

    dedupe::StageWriter writer("gridscan", common.out_dir);
    writer.set_seed(common.seed);
    writer.set_config({{"model", family}, {"k", k}});
    writer.record_input(features_path);
    writer.record_input(grid_path);
    writer.add("gridscan.json", out.dump(2) + "\n");
    writer.commit();

    std::cout << "scanned " << result.table.size() << " configurations; best mean auc "
              << result.best_auc << "\n";
}

int cmd_verify(const std::string& manifest_path) {
    const auto result = dedupe::verify_manifest(manifest_path);
    for (const auto& path : result.ok) std::cout << "ok        " << path << "\n";
    for (const auto& path : result.missing) std::cout << "MISSING   " << path << "\n";
    for (const auto& path : result.mismatched) std::cout << "MISMATCH  " << path << "\n";
    if (!result.missing.empty() || !result.mismatched.empty()) {
        std::cerr << "verification failed\n";
        return 1;
    }
    std::cout << "all digests match\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"invoice pair deduplication toolkit"};
    app.require_subcommand(1);

    CommonOptions common;
    int exit_code = 0;

    const auto add_common = [&common](CLI::App* sub) {
        sub->add_option("--out", common.out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", common.seed, "global seed")
            ->capture_default_str()
            ->each([&common](const std::string&) { common.seed_given = true; });
        sub->add_option("--threads", common.threads, "worker thread cap")->capture_default_str();
    };

    // generate
    std::string gen_config;
    auto* generate = app.add_subcommand("generate", "create a synthetic labeled invoice corpus");
    generate->add_option("--config", gen_config, "generator config JSON");
    add_common(generate);
    generate->callback([&] { cmd_generate(common, gen_config); });

    // clean
    std::string clean_corpus_path;
    auto* clean = app.add_subcommand("clean", "drop records with missing fields");
    clean->add_option("--corpus", clean_corpus_path, "corpus CSV")->required();
    add_common(clean);
    clean->callback([&] { cmd_clean(common, clean_corpus_path); });

    // pairs
    std::string pairs_corpus, pairs_blocking, pairs_truth;
    bool pairs_global = false;
    auto* pairs = app.add_subcommand("pairs", "blocking and candidate pair generation");
    pairs->add_option("--corpus", pairs_corpus, "corpus CSV")->required();
    pairs->add_option("--blocking", pairs_blocking, "blocking config JSON");
    pairs->add_option("--truth", pairs_truth, "ground truth CSV for labeling");
    pairs->add_flag("--global", pairs_global, "block across clients instead of within each client");
    add_common(pairs);
    pairs->callback(
        [&] { cmd_pairs(common, pairs_corpus, pairs_blocking, pairs_truth, pairs_global); });

    // featurize
    std::string feat_corpus, feat_pairs, feat_schema;
    auto* featurize = app.add_subcommand("featurize", "similarity feature vectors for pairs");
    featurize->add_option("--corpus", feat_corpus, "corpus CSV")->required();
    featurize->add_option("--pairs", feat_pairs, "pairs CSV")->required();
    featurize->add_option("--schema", feat_schema, "feature schema JSON");
    add_common(featurize);
    featurize->callback([&] { cmd_featurize(common, feat_corpus, feat_pairs, feat_schema); });

    // sim
    std::string sim_metric, sim_a, sim_b, sim_inner = "levenshtein";
    int sim_n = 2, sim_max_prefix = 4;
    double sim_prefix_weight = 0.1;
    auto* sim = app.add_subcommand("sim", "score one string pair with one metric");
    sim->add_option("--metric", sim_metric, "metric name")->required();
    sim->add_option("--a", sim_a, "first string")->required();
    sim->add_option("--b", sim_b, "second string")->required();
    sim->add_option("--n", sim_n, "n-gram size")->capture_default_str();
    sim->add_option("--inner", sim_inner, "monge_elkan inner metric")->capture_default_str();
    sim->add_option("--prefix-weight", sim_prefix_weight, "jaro_winkler prefix weight")
        ->capture_default_str();
    sim->add_option("--max-prefix", sim_max_prefix, "jaro_winkler prefix cap")
        ->capture_default_str();
    sim->callback([&] {
        cmd_sim(sim_metric, sim_a, sim_b, sim_n, sim_inner, sim_prefix_weight, sim_max_prefix);
    });

    // train
    std::string train_model, train_features, train_config, train_schema;
    auto* train = app.add_subcommand("train", "fit a classifier on feature vectors");
    train->add_option("--model", train_model, "gbdt or nn")->required();
    train->add_option("--features", train_features, "features JSONL")->required();
    train->add_option("--config", train_config, "model config JSON");
    train->add_option("--schema", train_schema, "feature schema JSON");
    add_common(train);
    train->callback(
        [&] { cmd_train(common, train_model, train_features, train_config, train_schema); });

    // predict
    std::string pred_model, pred_features, pred_schema;
    auto* predict = app.add_subcommand("predict", "score pairs with a trained model");
    predict->add_option("--model", pred_model, "model file")->required();
    predict->add_option("--features", pred_features, "features JSONL")->required();
    predict->add_option("--schema", pred_schema, "feature schema JSON for digest check");
    add_common(predict);
    predict->callback([&] { cmd_predict(common, pred_model, pred_features, pred_schema); });

    // evaluate
    std::string eval_predictions, eval_labels;
    std::vector<double> eval_betas = {1.0, 5.0};
    auto* evaluate = app.add_subcommand("evaluate", "score predictions against labeled pairs");
    evaluate->add_option("--predictions", eval_predictions, "predictions CSV")->required();
    evaluate->add_option("--labels", eval_labels, "labeled pairs CSV")->required();
    evaluate->add_option("--betas", eval_betas, "f-beta values")->capture_default_str();
    add_common(evaluate);
    evaluate->callback([&] { cmd_evaluate(common, eval_predictions, eval_labels, eval_betas); });

    // crossval
    std::string cv_features, cv_model, cv_config;
    int cv_k = 5;
    auto* crossval = app.add_subcommand("crossval", "balanced stratified k-fold experiment");
    crossval->add_option("--features", cv_features, "features JSONL")->required();
    crossval->add_option("--model", cv_model, "gbdt or nn")->required();
    crossval->add_option("--config", cv_config, "model config JSON");
    crossval->add_option("--k", cv_k, "fold count")->capture_default_str();
    add_common(crossval);
    crossval->callback([&] { cmd_crossval(common, cv_features, cv_model, cv_config, cv_k); });

    // loco
    std::string loco_features, loco_corpus, loco_model, loco_config;
    std::vector<double> loco_betas = {1.0, 5.0};
    auto* loco = app.add_subcommand("loco", "leave-one-client-out imbalanced experiment");
    loco->add_option("--features", loco_features, "features JSONL")->required();
    loco->add_option("--corpus", loco_corpus, "corpus CSV for client attribution")->required();
    loco->add_option("--model", loco_model, "gbdt or nn")->required();
    loco->add_option("--config", loco_config, "model config JSON");
    loco->add_option("--betas", loco_betas, "f-beta values")->capture_default_str();
    add_common(loco);
    loco->callback(
        [&] { cmd_loco(common, loco_features, loco_corpus, loco_model, loco_config, loco_betas); });

    // gridscan
    std::string grid_features, grid_model, grid_file;
    int grid_k = 5;
    auto* gridscan = app.add_subcommand("gridscan", "hyperparameter grid scan by CV auc");
    gridscan->add_option("--features", grid_features, "features JSONL")->required();
    gridscan->add_option("--model", grid_model, "gbdt or nn")->required();
    gridscan->add_option("--grid", grid_file, "grid JSON")->required();
    gridscan->add_option("--k", grid_k, "fold count")->capture_default_str();
    add_common(gridscan);
    gridscan->callback([&] { cmd_gridscan(common, grid_features, grid_model, grid_file, grid_k); });

    // verify
    std::string verify_manifest_path;
    auto* verify = app.add_subcommand("verify", "re-check digests recorded in a manifest");
    verify->add_option("--manifest", verify_manifest_path, "manifest JSON")->required();
    verify->callback([&] { exit_code = cmd_verify(verify_manifest_path); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const dedupe::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const dedupe::ParamError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
