#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dedupe/core.hpp"
#include "dedupe/error.hpp"
#include "dedupe/gbdt.hpp" // sigmoid, clamp_probability, bce_loss
#include "dedupe/rng.hpp"

namespace dedupe {

// Feedforward classifier: dense layers, ReLU hidden activations, sigmoid
// output, trained with Adam on mean binary cross-entropy.

struct AdamParams {
    double step_size = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct NeuralNetConfig {
    std::vector<int> layer_sizes = {20, 30, 30, 1};
    AdamParams adam{};
    int batch_size = 32;
    int epochs = 200;
    std::uint64_t seed = 0;
};

inline void validate_nn_config(const NeuralNetConfig& c) {
    if (c.layer_sizes.size() < 2) throw ConfigError("nn: need at least input and output layers");
    for (const int s : c.layer_sizes) {
        if (s < 1) throw ConfigError("nn: layer sizes must be >= 1");
    }
    if (c.layer_sizes.back() != 1) throw ConfigError("nn: output layer must have 1 node");
    if (c.batch_size < 1) throw ConfigError("nn: batch_size must be >= 1");
    if (c.epochs < 0) throw ConfigError("nn: epochs must be >= 0");
    if (!(c.adam.step_size > 0.0)) throw ConfigError("nn: step_size must be > 0");
    if (c.adam.beta1 < 0.0 || c.adam.beta1 >= 1.0 || c.adam.beta2 < 0.0 || c.adam.beta2 >= 1.0) {
        throw ConfigError("nn: adam betas must be in [0, 1)");
    }
}

/// weights[l] is row-major (layer_sizes[l+1] x layer_sizes[l]);
/// biases[l] has layer_sizes[l+1] entries.
struct NeuralNetModel {
    NeuralNetConfig config;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    std::string schema_digest;

    std::size_t layer_count() const { return weights.size(); }
    int input_size() const { return config.layer_sizes.front(); }
};

/// Gradient of the mean batch loss with respect to every parameter,
/// shaped exactly like the model.
struct NnGradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

/// He-scaled random initialization; biases start at zero.
inline NeuralNetModel nn_initialize(const NeuralNetConfig& config,
                                    const std::string& schema_digest = {}) {
    validate_nn_config(config);
    NeuralNetModel model;
    model.config = config;
    model.schema_digest = schema_digest;
    Rng rng(derive_seed(config.seed, "nn-init"));
    for (std::size_t l = 0; l + 1 < config.layer_sizes.size(); ++l) {
        const int fan_in = config.layer_sizes[l];
        const int fan_out = config.layer_sizes[l + 1];
        const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
        std::vector<double> w(static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(fan_out));
        for (double& x : w) x = rng.normal() * scale;
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
    }
    return model;
}

namespace detail {

/// Forward pass keeping pre-activations and activations for backprop.
/// activations[0] is the input; activations.back() is the probability.
struct ForwardTrace {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> act;
};

inline ForwardTrace nn_forward_trace(const NeuralNetModel& model, std::span<const double> x) {
    ForwardTrace trace;
    trace.act.emplace_back(x.begin(), x.end());
    const auto& sizes = model.config.layer_sizes;
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        const int in = sizes[l];
        const int out = sizes[l + 1];
        std::vector<double> z(static_cast<std::size_t>(out));
        const auto& w = model.weights[l];
        const auto& b = model.biases[l];
        const auto& a = trace.act.back();
        for (int o = 0; o < out; ++o) {
            double acc = b[static_cast<std::size_t>(o)];
            const double* wrow = w.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
            for (int i = 0; i < in; ++i) acc += wrow[i] * a[static_cast<std::size_t>(i)];
            z[static_cast<std::size_t>(o)] = acc;
        }
        trace.pre.push_back(z);
        std::vector<double> a_next(z.size());
        const bool is_output = (l + 1 == model.layer_count());
        for (std::size_t o = 0; o < z.size(); ++o) {
            a_next[o] = is_output ? sigmoid(z[o]) : std::max(z[o], 0.0);
        }
        trace.act.push_back(std::move(a_next));
    }
    return trace;
}

} // namespace detail

inline double nn_forward(const NeuralNetModel& model, std::span<const double> x) {
    if (static_cast<int>(x.size()) != model.input_size()) {
        throw ShapeError("nn_forward: expected " + std::to_string(model.input_size()) +
                         " inputs, got " + std::to_string(x.size()));
    }
    for (const double v : x) {
        if (!std::isfinite(v)) throw InputError("nn_forward: non-finite input value");
    }
    const auto trace = detail::nn_forward_trace(model, x);
    return clamp_probability(trace.act.back().front());
}

inline NnGradients backprop_gradients(const NeuralNetModel& model,
                                      const std::vector<FeatureVector>& batch) {
    if (batch.empty()) throw EmptyInputError("backprop_gradients: empty batch");
    if (model.input_size() != static_cast<int>(kFeatureCount)) {
        throw ShapeError("backprop_gradients: model input size must be " +
                         std::to_string(kFeatureCount));
    }

    NnGradients grads;
    grads.weights.reserve(model.layer_count());
    grads.biases.reserve(model.layer_count());
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        grads.weights.emplace_back(model.weights[l].size(), 0.0);
        grads.biases.emplace_back(model.biases[l].size(), 0.0);
    }

    const auto& sizes = model.config.layer_sizes;
    const double inv_batch = 1.0 / static_cast<double>(batch.size());

    for (const auto& fv : batch) {
        const auto trace = detail::nn_forward_trace(model, fv.values);
        const double p = trace.act.back().front();
        const double y = static_cast<double>(fv.label01());

        // dL/dz for sigmoid + BCE collapses to (p - y).
        std::vector<double> delta = {p - y};
        for (std::size_t l = model.layer_count(); l-- > 0;) {
            const int in = sizes[l];
            const int out = sizes[l + 1];
            const auto& a_prev = trace.act[l];
            auto& gw = grads.weights[l];
            auto& gb = grads.biases[l];
            for (int o = 0; o < out; ++o) {
                const double d = delta[static_cast<std::size_t>(o)] * inv_batch;
                gb[static_cast<std::size_t>(o)] += d;
                double* grow = gw.data() + static_cast<std::size_t>(o) * static_cast<std::size_t>(in);
                for (int i = 0; i < in; ++i) grow[i] += d * a_prev[static_cast<std::size_t>(i)];
            }
            if (l == 0) break;
            std::vector<double> delta_prev(static_cast<std::size_t>(in), 0.0);
            const auto& w = model.weights[l];
            const auto& z_prev = trace.pre[l - 1];
            for (int i = 0; i < in; ++i) {
                if (z_prev[static_cast<std::size_t>(i)] <= 0.0) continue; // ReLU gate
                double acc = 0.0;
                for (int o = 0; o < out; ++o) {
                    acc += w[static_cast<std::size_t>(o) * static_cast<std::size_t>(in) +
                             static_cast<std::size_t>(i)] *
                           delta[static_cast<std::size_t>(o)];
                }
                delta_prev[static_cast<std::size_t>(i)] = acc;
            }
            delta = std::move(delta_prev);
        }
    }
    return grads;
}

/// Mean BCE of the model over a dataset.
inline double nn_mean_loss(const NeuralNetModel& model, const std::vector<FeatureVector>& data) {
    double total = 0.0;
    for (const auto& fv : data) {
        total += bce_loss(nn_forward(model, fv.values), fv.label01());
    }
    return total / static_cast<double>(data.size());
}

inline NeuralNetModel nn_train(const std::vector<FeatureVector>& data,
                               const NeuralNetConfig& config,
                               const std::string& schema_digest = {}) {
    validate_nn_config(config);
    if (config.layer_sizes.front() != static_cast<int>(kFeatureCount)) {
        throw ConfigError("nn: input layer must have " + std::to_string(kFeatureCount) + " nodes");
    }
    if (data.empty()) throw TrainingError("nn: empty training data");
    std::size_t positives = 0;
    for (const auto& fv : data) positives += static_cast<std::size_t>(fv.label01());
    if (positives == 0 || positives == data.size()) {
        throw TrainingError("nn: training data must contain both classes");
    }

    NeuralNetModel model = nn_initialize(config, schema_digest);

    // Adam moment state, one slot per parameter vector.
    std::vector<std::vector<double>> mw, vw, mb, vb;
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        mw.emplace_back(model.weights[l].size(), 0.0);
        vw.emplace_back(model.weights[l].size(), 0.0);
        mb.emplace_back(model.biases[l].size(), 0.0);
        vb.emplace_back(model.biases[l].size(), 0.0);
    }

    Rng shuffle_rng(derive_seed(config.seed, "nn-shuffle"));
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const AdamParams& adam = config.adam;
    long long t = 0;
    std::vector<FeatureVector> batch;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            batch.clear();
            for (std::size_t i = start; i < end; ++i) batch.push_back(data[order[i]]);

            const NnGradients grads = backprop_gradients(model, batch);
            ++t;
            const double bc1 = 1.0 - std::pow(adam.beta1, static_cast<double>(t));
            const double bc2 = 1.0 - std::pow(adam.beta2, static_cast<double>(t));

            const auto update = [&](std::vector<double>& param, const std::vector<double>& grad,
                                    std::vector<double>& m, std::vector<double>& v) {
                for (std::size_t i = 0; i < param.size(); ++i) {
                    m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * grad[i];
                    v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * grad[i] * grad[i];
                    const double m_hat = m[i] / bc1;
                    const double v_hat = v[i] / bc2;
                    param[i] -= adam.step_size * m_hat / (std::sqrt(v_hat) + adam.epsilon);
                }
            };
            for (std::size_t l = 0; l < model.layer_count(); ++l) {
                update(model.weights[l], grads.weights[l], mw[l], vw[l]);
                update(model.biases[l], grads.biases[l], mb[l], vb[l]);
            }
        }
    }
    return model;
}

} // namespace dedupe
