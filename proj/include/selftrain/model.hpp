#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "selftrain/corpus.hpp"
#include "selftrain/dataset_io.hpp"
#include "selftrain/error.hpp"
#include "selftrain/features.hpp"
#include "selftrain/hash.hpp"
#include "selftrain/rng.hpp"

namespace selftrain {

// SGD hyperparameters. The defaults suit the hashed-feature linear model;
// peak_lr 1e-5 with batch 32 over three epochs is the documented preset for
// transformer fine-tuning and is far too small to move a linear model.
// Mini-batch SGD on raw count features is stable only below roughly
// 1/||x||^2; with the default featurizer that means peak_lr around 1e-2.
struct TrainConfig {
    int epochs = 3;
    int batch_size = 32;
    double peak_lr = 0.01;
    double warmup_fraction = 0.06; // share of total steps spent warming up
    double decay_power = 1.0;      // 1.0 = linear decay
    std::uint64_t seed = 1;

    void validate() const {
        if (epochs < 1) throw DataError("epochs must be >= 1");
        if (batch_size < 1) throw DataError("batch_size must be >= 1");
        if (!(peak_lr > 0.0) || !std::isfinite(peak_lr)) throw DataError("peak_lr must be positive");
        if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0))
            throw DataError("warmup_fraction must lie in (0,1)");
        if (!(decay_power > 0.0)) throw DataError("decay_power must be positive");
    }

    std::uint64_t fingerprint() const {
        std::uint64_t h = kFnvOffset;
        h = fnv1a64_u64(static_cast<std::uint64_t>(epochs), h);
        h = fnv1a64_u64(static_cast<std::uint64_t>(batch_size), h);
        h = fnv1a64_u64(std::bit_cast<std::uint64_t>(peak_lr), h);
        h = fnv1a64_u64(std::bit_cast<std::uint64_t>(warmup_fraction), h);
        h = fnv1a64_u64(std::bit_cast<std::uint64_t>(decay_power), h);
        h = fnv1a64_u64(seed, h);
        return h;
    }
};

// Learning rate at `step` (1-based during training) out of `total_steps`:
// linear ramp from 0 to peak over W = round(warmup_fraction * total_steps)
// steps, then polynomial decay from peak back to 0.
inline double lr_at(std::int64_t step, std::int64_t total_steps, const TrainConfig& cfg) {
    if (total_steps < 1) throw DataError("total_steps must be >= 1");
    if (step < 0 || step > total_steps) throw DataError("step out of [0, total_steps]");
    const auto warmup = static_cast<std::int64_t>(
        std::llround(cfg.warmup_fraction * static_cast<double>(total_steps)));
    if (step <= warmup && warmup > 0)
        return cfg.peak_lr * static_cast<double>(step) / static_cast<double>(warmup);
    if (total_steps == warmup) return cfg.peak_lr;
    const double progress =
        static_cast<double>(step - warmup) / static_cast<double>(total_steps - warmup);
    return cfg.peak_lr * std::pow(1.0 - progress, cfg.decay_power);
}

// Linear regressor over hashed n-gram counts.
struct RegressionModel {
    FeatureConfig feature_config;
    std::vector<double> weights; // dense, length feature_config.dim
    double bias = 0.0;
    std::uint64_t train_config_fingerprint = 0;
};

inline double predict(const RegressionModel& model, const SparseCounts& features) {
    double acc = model.bias;
    for (const auto& [idx, count] : features) acc += model.weights[idx] * count;
    return acc;
}

inline double predict_text(const RegressionModel& model, std::string_view text) {
    return predict(model, featurize(text, model.feature_config));
}

inline double predict(const RegressionModel& model, const Example& ex) {
    return predict_text(model, ex.text);
}

// Mean squared error over one batch together with its gradient, sparse in
// the touched buckets. This is the single gradient path: the trainer applies
// it and the finite-difference oracle checks it.
struct BatchGradient {
    double loss = 0.0;
    std::vector<std::pair<std::uint32_t, double>> weight_grad; // sorted by index
    double bias_grad = 0.0;
};

inline BatchGradient batch_mse_gradient(const RegressionModel& model,
                                        std::span<const SparseCounts* const> xs,
                                        std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.empty())
        throw DataError("batch_mse_gradient: empty batch or size mismatch");
    const double inv_n = 1.0 / static_cast<double>(xs.size());
    BatchGradient out;
    std::unordered_map<std::uint32_t, double> acc;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double residual = predict(model, *xs[i]) - ys[i];
        out.loss += residual * residual * inv_n;
        out.bias_grad += 2.0 * residual * inv_n;
        for (const auto& [idx, count] : *xs[i]) acc[idx] += 2.0 * residual * count * inv_n;
    }
    out.weight_grad.assign(acc.begin(), acc.end());
    std::sort(out.weight_grad.begin(), out.weight_grad.end());
    return out;
}

namespace detail {

// Plain mini-batch SGD on pre-featurized examples. One RNG stream seeded by
// cfg.seed drives the per-epoch shuffles; everything else is deterministic,
// so identical inputs reproduce the model bit for bit.
inline RegressionModel train_on_features(const std::vector<const SparseCounts*>& xs,
                                         const std::vector<double>& ys, const TrainConfig& tcfg,
                                         const FeatureConfig& fcfg) {
    tcfg.validate();
    fcfg.validate();
    if (xs.empty()) throw DataError("cannot train on an empty dataset");

    RegressionModel model;
    model.feature_config = fcfg;
    model.train_config_fingerprint = tcfg.fingerprint();
    model.weights.assign(fcfg.dim, 0.0);
    model.bias = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());

    const std::size_t n = xs.size();
    const std::size_t batch = static_cast<std::size_t>(tcfg.batch_size);
    const std::int64_t steps_per_epoch = static_cast<std::int64_t>((n + batch - 1) / batch);
    const std::int64_t total_steps = steps_per_epoch * tcfg.epochs;

    Rng rng(tcfg.seed);
    std::vector<std::size_t> order(n);
    std::vector<const SparseCounts*> bx;
    std::vector<double> by;
    std::int64_t step = 0;
    for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(n, start + batch);
            bx.clear();
            by.clear();
            for (std::size_t i = start; i < stop; ++i) {
                bx.push_back(xs[order[i]]);
                by.push_back(ys[order[i]]);
            }
            const double lr = lr_at(++step, total_steps, tcfg);
            BatchGradient grad = batch_mse_gradient(model, bx, by);
            if (!std::isfinite(grad.loss)) throw TrainingError("diverged: non-finite training loss");
            for (const auto& [idx, g] : grad.weight_grad) model.weights[idx] -= lr * g;
            model.bias -= lr * grad.bias_grad;
        }
    }
    return model;
}

} // namespace detail

inline RegressionModel train(const Dataset& train_set, const TrainConfig& tcfg,
                             const FeatureConfig& fcfg) {
    if (train_set.empty()) throw DataError("cannot train on an empty dataset");
    std::vector<SparseCounts> features;
    std::vector<const SparseCounts*> xs;
    std::vector<double> ys;
    features.reserve(train_set.size());
    for (const Example& ex : train_set.examples()) {
        if (!ex.score) throw DataError("training example \"" + ex.id + "\" has no score");
        features.push_back(featurize(ex.text, fcfg));
        ys.push_back(*ex.score);
    }
    for (const SparseCounts& f : features) xs.push_back(&f);
    return detail::train_on_features(xs, ys, tcfg, fcfg);
}

// Stable content hash over configuration, bias and weights.
inline std::uint64_t model_fingerprint(const RegressionModel& model) {
    std::uint64_t h = kFnvOffset;
    h = fnv1a64_u64(model.feature_config.dim, h);
    h = fnv1a64_u64(static_cast<std::uint64_t>(model.feature_config.word_ngram_min), h);
    h = fnv1a64_u64(static_cast<std::uint64_t>(model.feature_config.word_ngram_max), h);
    h = fnv1a64_u64(static_cast<std::uint64_t>(model.feature_config.char_ngram_min), h);
    h = fnv1a64_u64(static_cast<std::uint64_t>(model.feature_config.char_ngram_max), h);
    h = fnv1a64_u64(model.feature_config.hash_seed, h);
    h = fnv1a64_u64(std::bit_cast<std::uint64_t>(model.bias), h);
    h = fnv1a64_u64(model.train_config_fingerprint, h);
    for (std::uint32_t i = 0; i < model.weights.size(); ++i) {
        if (model.weights[i] == 0.0) continue;
        h = fnv1a64_u64(i, h);
        h = fnv1a64_u64(std::bit_cast<std::uint64_t>(model.weights[i]), h);
    }
    return h;
}

inline constexpr int kModelFormatVersion = 1;
inline constexpr std::string_view kModelFormatName = "selftrain-model";

namespace detail {

inline nlohmann::json feature_config_to_json(const FeatureConfig& cfg) {
    return {{"dim", cfg.dim},
            {"word_ngram_min", cfg.word_ngram_min},
            {"word_ngram_max", cfg.word_ngram_max},
            {"char_ngram_min", cfg.char_ngram_min},
            {"char_ngram_max", cfg.char_ngram_max},
            {"hash_seed", cfg.hash_seed}};
}

inline FeatureConfig feature_config_from_json(const nlohmann::json& obj) {
    FeatureConfig cfg;
    cfg.dim = obj.at("dim").get<std::uint32_t>();
    cfg.word_ngram_min = obj.at("word_ngram_min").get<int>();
    cfg.word_ngram_max = obj.at("word_ngram_max").get<int>();
    cfg.char_ngram_min = obj.at("char_ngram_min").get<int>();
    cfg.char_ngram_max = obj.at("char_ngram_max").get<int>();
    cfg.hash_seed = obj.at("hash_seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

} // namespace detail

// Versioned JSON container; weights stored sparse. nlohmann keeps object
// keys sorted, so the byte stream is deterministic for a given model.
inline void save_model(const RegressionModel& model, const std::filesystem::path& path) {
    nlohmann::json obj;
    obj["format"] = std::string(kModelFormatName);
    obj["version"] = kModelFormatVersion;
    obj["feature_config"] = detail::feature_config_to_json(model.feature_config);
    obj["bias"] = model.bias;
    obj["train_config_fingerprint"] = to_hex(model.train_config_fingerprint);
    std::vector<std::uint32_t> indices;
    std::vector<double> values;
    for (std::uint32_t i = 0; i < model.weights.size(); ++i) {
        if (model.weights[i] != 0.0) {
            indices.push_back(i);
            values.push_back(model.weights[i]);
        }
    }
    obj["weight_indices"] = indices;
    obj["weight_values"] = values;
    obj["fingerprint"] = to_hex(model_fingerprint(model));
    auto out = detail::open_output(path);
    out << obj.dump() << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

inline RegressionModel load_model(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    nlohmann::json obj;
    try {
        in >> obj;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt model file " + path.string() + ": " + e.what());
    }
    try {
        if (obj.at("format").get<std::string>() != kModelFormatName)
            throw DataError("not a model file: " + path.string());
        const int version = obj.at("version").get<int>();
        if (version != kModelFormatVersion)
            throw DataError("unsupported model format version " + std::to_string(version) +
                            " in " + path.string());
        RegressionModel model;
        model.feature_config = detail::feature_config_from_json(obj.at("feature_config"));
        model.bias = obj.at("bias").get<double>();
        model.train_config_fingerprint =
            std::stoull(obj.at("train_config_fingerprint").get<std::string>(), nullptr, 16);
        model.weights.assign(model.feature_config.dim, 0.0);
        const auto indices = obj.at("weight_indices").get<std::vector<std::uint32_t>>();
        const auto values = obj.at("weight_values").get<std::vector<double>>();
        if (indices.size() != values.size())
            throw DataError("corrupt model file " + path.string() + ": index/value count mismatch");
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (indices[i] >= model.feature_config.dim)
                throw DataError("corrupt model file " + path.string() + ": weight index out of range");
            model.weights[indices[i]] = values[i];
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt model file " + path.string() + ": " + e.what());
    }
}

} // namespace selftrain
