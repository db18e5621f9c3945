#pragma once

#include <string>
#include <variant>

#include <json.hpp>

#include "dedupe/error.hpp"
#include "dedupe/gbdt.hpp"
#include "dedupe/io.hpp"
#include "dedupe/neural_net.hpp"

namespace dedupe {

using TrainedModel = std::variant<GbdtModel, NeuralNetModel>;

inline constexpr int kModelFormatVersion = 1;

inline json gbdt_config_to_json(const GbdtConfig& c) {
    return {{"n_estimators", c.n_estimators},
            {"learning_rate", c.learning_rate},
            {"max_depth", c.max_depth},
            {"min_samples_leaf", c.min_samples_leaf},
            {"seed", c.seed}};
}

inline GbdtConfig gbdt_config_from_json(const json& j) {
    GbdtConfig c;
    if (j.contains("n_estimators")) c.n_estimators = j["n_estimators"].get<int>();
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("max_depth")) c.max_depth = j["max_depth"].get<int>();
    if (j.contains("min_samples_leaf")) c.min_samples_leaf = j["min_samples_leaf"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    validate_gbdt_config(c);
    return c;
}

inline json nn_config_to_json(const NeuralNetConfig& c) {
    return {{"layer_sizes", c.layer_sizes},
            {"adam",
             {{"step_size", c.adam.step_size},
              {"beta1", c.adam.beta1},
              {"beta2", c.adam.beta2},
              {"epsilon", c.adam.epsilon}}},
            {"batch_size", c.batch_size},
            {"epochs", c.epochs},
            {"seed", c.seed}};
}

inline NeuralNetConfig nn_config_from_json(const json& j) {
    NeuralNetConfig c;
    if (j.contains("layer_sizes")) c.layer_sizes = j["layer_sizes"].get<std::vector<int>>();
    if (j.contains("adam")) {
        const auto& a = j["adam"];
        if (a.contains("step_size")) c.adam.step_size = a["step_size"].get<double>();
        if (a.contains("beta1")) c.adam.beta1 = a["beta1"].get<double>();
        if (a.contains("beta2")) c.adam.beta2 = a["beta2"].get<double>();
        if (a.contains("epsilon")) c.adam.epsilon = a["epsilon"].get<double>();
    }
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<int>();
    if (j.contains("epochs")) c.epochs = j["epochs"].get<int>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    validate_nn_config(c);
    return c;
}

inline json gbdt_to_json(const GbdtModel& model) {
    json j;
    j["format"] = "dedupe-model";
    j["version"] = kModelFormatVersion;
    j["type"] = "gbdt";
    j["schema_digest"] = model.schema_digest;
    j["config"] = gbdt_config_to_json(model.config);
    j["initial_score"] = model.initial_score;
    json trees = json::array();
    for (const auto& tree : model.trees) {
        json nodes = json::array();
        for (const auto& n : tree.nodes) {
            nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
        }
        trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
    j["training_deviance"] = model.training_deviance;
    return j;
}

inline json nn_to_json(const NeuralNetModel& model) {
    json j;
    j["format"] = "dedupe-model";
    j["version"] = kModelFormatVersion;
    j["type"] = "nn";
    j["schema_digest"] = model.schema_digest;
    j["config"] = nn_config_to_json(model.config);
    j["weights"] = model.weights;
    j["biases"] = model.biases;
    return j;
}

inline std::string model_to_string(const TrainedModel& model) {
    const json j = std::holds_alternative<GbdtModel>(model)
                       ? gbdt_to_json(std::get<GbdtModel>(model))
                       : nn_to_json(std::get<NeuralNetModel>(model));
    return j.dump(2) + "\n";
}

inline TrainedModel model_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("model file: ") + e.what());
    }
    try {
        if (j.value("format", "") != "dedupe-model") {
            throw FormatError("model file: missing dedupe-model marker");
        }
        if (j.value("version", 0) != kModelFormatVersion) {
            throw FormatError("model file: unsupported version");
        }
        const std::string type = j.at("type").get<std::string>();
        if (type == "gbdt") {
            GbdtModel model;
            const auto& cfg = j.at("config");
            model.config.n_estimators = cfg.at("n_estimators").get<int>();
            model.config.learning_rate = cfg.at("learning_rate").get<double>();
            model.config.max_depth = cfg.at("max_depth").get<int>();
            model.config.min_samples_leaf = cfg.at("min_samples_leaf").get<int>();
            model.config.seed = cfg.at("seed").get<std::uint64_t>();
            model.schema_digest = j.at("schema_digest").get<std::string>();
            model.initial_score = j.at("initial_score").get<double>();
            for (const auto& tj : j.at("trees")) {
                RegressionTree tree;
                for (const auto& nj : tj) {
                    if (!nj.is_array() || nj.size() != 5) {
                        throw FormatError("model file: malformed tree node");
                    }
                    TreeNode n;
                    n.feature = nj[0].get<int>();
                    n.threshold = nj[1].get<double>();
                    n.left = nj[2].get<int>();
                    n.right = nj[3].get<int>();
                    n.value = nj[4].get<double>();
                    tree.nodes.push_back(n);
                }
                if (tree.nodes.empty()) throw FormatError("model file: empty tree");
                model.trees.push_back(std::move(tree));
            }
            model.training_deviance = j.value("training_deviance", std::vector<double>{});
            return model;
        }
        if (type == "nn") {
            NeuralNetModel model;
            const auto& cfg = j.at("config");
            model.config.layer_sizes = cfg.at("layer_sizes").get<std::vector<int>>();
            model.config.adam.step_size = cfg.at("adam").at("step_size").get<double>();
            model.config.adam.beta1 = cfg.at("adam").at("beta1").get<double>();
            model.config.adam.beta2 = cfg.at("adam").at("beta2").get<double>();
            model.config.adam.epsilon = cfg.at("adam").at("epsilon").get<double>();
            model.config.batch_size = cfg.at("batch_size").get<int>();
            model.config.epochs = cfg.at("epochs").get<int>();
            model.config.seed = cfg.at("seed").get<std::uint64_t>();
            model.schema_digest = j.at("schema_digest").get<std::string>();
            model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
            model.biases = j.at("biases").get<std::vector<std::vector<double>>>();
            validate_nn_config(model.config);
            if (model.weights.size() + 1 != model.config.layer_sizes.size() ||
                model.biases.size() != model.weights.size()) {
                throw FormatError("model file: layer shape mismatch");
            }
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                const auto in = static_cast<std::size_t>(model.config.layer_sizes[l]);
                const auto out = static_cast<std::size_t>(model.config.layer_sizes[l + 1]);
                if (model.weights[l].size() != in * out || model.biases[l].size() != out) {
                    throw FormatError("model file: parameter shape mismatch");
                }
            }
            return model;
        }
        throw FormatError("model file: unknown model type '" + type + "'");
    } catch (const json::exception& e) {
        throw FormatError(std::string("model file: ") + e.what());
    }
}

inline void save_model(const TrainedModel& model, const std::string& path) {
    write_file(path, model_to_string(model));
}

inline TrainedModel load_model(const std::string& path) {
    return model_from_string(read_file(path));
}

inline const std::string& model_schema_digest(const TrainedModel& model) {
    return std::visit([](const auto& m) -> const std::string& { return m.schema_digest; }, model);
}

/// Throws unless the model was trained under the given schema.
inline void check_schema(const TrainedModel& model, const FeatureSchema& schema) {
    const std::string expected = schema_digest(schema);
    const std::string& actual = model_schema_digest(model);
    if (!actual.empty() && actual != expected) {
        throw SchemaMismatchError("model schema digest " + actual +
                                  " does not match feature schema digest " + expected);
    }
}

inline double predict_model(const TrainedModel& model, std::span<const double> features) {
    if (std::holds_alternative<GbdtModel>(model)) {
        return gbdt_predict(std::get<GbdtModel>(model), features);
    }
    return nn_forward(std::get<NeuralNetModel>(model), features);
}

} // namespace dedupe
