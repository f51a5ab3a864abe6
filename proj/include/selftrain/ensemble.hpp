#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "selftrain/corpus.hpp"
#include "selftrain/dataset_io.hpp"
#include "selftrain/error.hpp"
#include "selftrain/features.hpp"
#include "selftrain/metrics.hpp"
#include "selftrain/model.hpp"
#include "selftrain/rng.hpp"

namespace selftrain {

constexpr bool operator==(const FeatureConfig& a, const FeatureConfig& b) {
    return a.dim == b.dim && a.word_ngram_min == b.word_ngram_min &&
           a.word_ngram_max == b.word_ngram_max && a.char_ngram_min == b.char_ngram_min &&
           a.char_ngram_max == b.char_ngram_max && a.hash_seed == b.hash_seed;
}

// Deterministic partition of a dataset into k near-equal parts: seeded
// shuffle of the example order, then round-robin part assignment.
struct FoldPlan {
    int k = 0;
    std::uint64_t seed = 0;
    std::unordered_map<std::string, int> assignments; // id -> part in [0, k)
};

inline FoldPlan make_fold_plan(const Dataset& ds, int k, std::uint64_t seed) {
    if (k < 2) throw DataError("fold plan needs k >= 2");
    if (ds.size() < static_cast<std::size_t>(k))
        throw DataError("fold plan: dataset of " + std::to_string(ds.size()) +
                        " examples cannot be split into " + std::to_string(k) + " parts");
    std::vector<std::size_t> order(ds.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    FoldPlan plan{k, seed, {}};
    plan.assignments.reserve(ds.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        plan.assignments.emplace(ds[order[pos]].id, static_cast<int>(pos % static_cast<std::size_t>(k)));
    return plan;
}

// Language-stratified variant, off by default: every language's examples
// are shuffled and dealt round-robin, with the dealing position carried
// across languages so overall part sizes still differ by at most one.
inline FoldPlan make_fold_plan_stratified(const Dataset& ds, int k, std::uint64_t seed) {
    if (k < 2) throw DataError("fold plan needs k >= 2");
    if (ds.size() < static_cast<std::size_t>(k))
        throw DataError("fold plan: dataset of " + std::to_string(ds.size()) +
                        " examples cannot be split into " + std::to_string(k) + " parts");
    std::map<std::string, std::vector<std::size_t>> by_language;
    for (std::size_t i = 0; i < ds.size(); ++i) by_language[ds[i].language].push_back(i);
    Rng rng(seed);
    FoldPlan plan{k, seed, {}};
    plan.assignments.reserve(ds.size());
    std::size_t pos = 0;
    for (auto& [lang, indices] : by_language) {
        rng.shuffle(indices);
        for (std::size_t idx : indices)
            plan.assignments.emplace(ds[idx].id, static_cast<int>(pos++ % static_cast<std::size_t>(k)));
    }
    return plan;
}

// One train/validation split derived from a fold plan: the named part is
// held out, the other k-1 parts train, and extra_train (pseudo-labeled
// data), when present, joins the training side only.
struct SplitSpec {
    int validation_part = 0;
    const Dataset* extra_train = nullptr;
};

struct CandidateReport {
    std::uint64_t seed = 0;
    std::optional<double> validation_r; // nullopt: correlation undefined
};

struct SplitOutcome {
    RegressionModel model;
    std::uint64_t seed = 0;
    double validation_r = 0.0;
    std::vector<CandidateReport> candidates;
};

namespace detail {

struct FeaturizedSet {
    std::vector<SparseCounts> features;
    std::vector<double> targets;
};

inline void featurize_range(const Dataset& ds, const FeatureConfig& fcfg, std::size_t begin,
                            std::size_t end, FeaturizedSet& out) {
    for (std::size_t i = begin; i < end; ++i) {
        const Example& ex = ds[i];
        if (!ex.score) throw DataError("example \"" + ex.id + "\" has no score");
        out.features[i] = featurize(ex.text, fcfg);
        out.targets[i] = *ex.score;
    }
}

inline FeaturizedSet featurize_dataset(const Dataset& ds, const FeatureConfig& fcfg, int jobs) {
    FeaturizedSet out;
    out.features.resize(ds.size());
    out.targets.resize(ds.size());
    const std::size_t n = ds.size();
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(n, 1));
    if (workers <= 1 || n < 256) {
        featurize_range(ds, fcfg, 0, n, out);
        return out;
    }
    std::vector<std::thread> threads;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([&, begin, end] {
            try {
                featurize_range(ds, fcfg, begin, end, out);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

inline std::vector<int> parts_in_dataset_order(const Dataset& ds, const FoldPlan& plan) {
    std::vector<int> parts(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        auto it = plan.assignments.find(ds[i].id);
        if (it == plan.assignments.end())
            throw DataError("fold plan does not cover id \"" + ds[i].id + "\"");
        parts[i] = it->second;
    }
    return parts;
}

// Trains the m seed candidates for one split on shared featurized data and
// picks the one with the highest validation correlation; ties go to the
// lowest seed. Candidates whose validation correlation is undefined are
// recorded but never selectable.
inline SplitOutcome train_split_impl(const FeaturizedSet& original, const std::vector<int>& parts,
                                     int validation_part, const FeaturizedSet* extra,
                                     std::span<const std::uint64_t> seeds, const TrainConfig& tcfg,
                                     const FeatureConfig& fcfg) {
    std::vector<const SparseCounts*> train_x;
    std::vector<double> train_y;
    std::vector<const SparseCounts*> val_x;
    std::vector<double> val_y;
    for (std::size_t i = 0; i < original.features.size(); ++i) {
        if (parts[i] == validation_part) {
            val_x.push_back(&original.features[i]);
            val_y.push_back(original.targets[i]);
        } else {
            train_x.push_back(&original.features[i]);
            train_y.push_back(original.targets[i]);
        }
    }
    if (extra) {
        for (std::size_t i = 0; i < extra->features.size(); ++i) {
            train_x.push_back(&extra->features[i]);
            train_y.push_back(extra->targets[i]);
        }
    }
    if (train_x.empty()) throw TrainingError("split has no training examples");

    SplitOutcome outcome;
    bool have_best = false;
    for (std::uint64_t seed : seeds) {
        TrainConfig cfg = tcfg;
        cfg.seed = seed;
        RegressionModel model = train_on_features(train_x, train_y, cfg, fcfg);
        std::vector<double> preds(val_x.size());
        for (std::size_t i = 0; i < val_x.size(); ++i) preds[i] = predict(model, *val_x[i]);
        const std::optional<double> r = try_pearson(val_y, preds);
        outcome.candidates.push_back({seed, r});
        if (!r) continue;
        if (!have_best || *r > outcome.validation_r ||
            (*r == outcome.validation_r && seed < outcome.seed)) {
            outcome.model = std::move(model);
            outcome.seed = seed;
            outcome.validation_r = *r;
            have_best = true;
        }
    }
    if (!have_best)
        throw TrainingError("no candidate achieved a defined validation correlation in part " +
                            std::to_string(validation_part));
    return outcome;
}

} // namespace detail

inline SplitOutcome train_split(const Dataset& ds, const FoldPlan& plan, const SplitSpec& split,
                                std::span<const std::uint64_t> seeds, const TrainConfig& tcfg,
                                const FeatureConfig& fcfg) {
    if (seeds.empty()) throw DataError("train_split needs at least one seed");
    if (split.validation_part < 0 || split.validation_part >= plan.k)
        throw DataError("validation part out of range");
    const auto original = detail::featurize_dataset(ds, fcfg, 1);
    const auto parts = detail::parts_in_dataset_order(ds, plan);
    std::optional<detail::FeaturizedSet> extra;
    if (split.extra_train && !split.extra_train->empty())
        extra = detail::featurize_dataset(*split.extra_train, fcfg, 1);
    return detail::train_split_impl(original, parts, split.validation_part,
                                    extra ? &*extra : nullptr, seeds, tcfg, fcfg);
}

struct EnsembleMember {
    RegressionModel model;
    int split_index = 0;
    std::uint64_t seed = 0;
    double validation_r = 0.0;
    std::vector<CandidateReport> candidates;
};

// The selected best-per-split models plus everything needed to rebuild or
// audit them: fold seed, candidate seeds, shared configs.
struct EnsembleModel {
    std::vector<EnsembleMember> members;
    int k = 0;
    std::uint64_t fold_seed = 0;
    std::vector<std::uint64_t> candidate_seeds;
    TrainConfig train_config;     // seed field unused; per-candidate seeds apply
    FeatureConfig feature_config;

    std::size_t size() const { return members.size(); }
};

// Runs the full fan-out: trains |seeds| candidates per split for each of
// the plan's k splits, keeping the best per split. Splits train
// concurrently when jobs > 1; assembly is by split index, so the result is
// independent of scheduling.
inline EnsembleModel build_ensemble(const Dataset& ds, const FoldPlan& plan,
                                    std::span<const std::uint64_t> seeds, const TrainConfig& tcfg,
                                    const FeatureConfig& fcfg, const Dataset* extra_train = nullptr,
                                    int jobs = 1) {
    if (seeds.empty()) throw DataError("build_ensemble needs at least one seed");
    for (std::size_t i = 0; i < seeds.size(); ++i)
        for (std::size_t j = i + 1; j < seeds.size(); ++j)
            if (seeds[i] == seeds[j])
                throw DataError("candidate seeds must be distinct");

    const auto original = detail::featurize_dataset(ds, fcfg, jobs);
    const auto parts = detail::parts_in_dataset_order(ds, plan);
    std::optional<detail::FeaturizedSet> extra;
    if (extra_train && !extra_train->empty())
        extra = detail::featurize_dataset(*extra_train, fcfg, jobs);

    std::vector<std::optional<SplitOutcome>> outcomes(static_cast<std::size_t>(plan.k));
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::atomic<int> next_split{0};
    auto worker = [&] {
        for (;;) {
            const int split = next_split.fetch_add(1);
            if (split >= plan.k || failed.load()) return;
            try {
                outcomes[static_cast<std::size_t>(split)] = detail::train_split_impl(
                    original, parts, split, extra ? &*extra : nullptr, seeds, tcfg, fcfg);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };
    const int workers = std::clamp(jobs, 1, plan.k);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    EnsembleModel ens;
    ens.k = plan.k;
    ens.fold_seed = plan.seed;
    ens.candidate_seeds.assign(seeds.begin(), seeds.end());
    ens.train_config = tcfg;
    ens.feature_config = fcfg;
    for (int split = 0; split < plan.k; ++split) {
        SplitOutcome& o = *outcomes[static_cast<std::size_t>(split)];
        ens.members.push_back({std::move(o.model), split, o.seed, o.validation_r,
                               std::move(o.candidates)});
    }
    return ens;
}

struct EnsemblePrediction {
    double mean = 0.0;
    double stddev = 0.0; // population standard deviation over members
};

inline EnsemblePrediction ensemble_predict_counts(const EnsembleModel& ens,
                                                  const SparseCounts& features) {
    if (ens.members.empty()) throw DataError("ensemble has no members");
    const double n = static_cast<double>(ens.members.size());
    double mean = 0.0;
    std::vector<double> preds;
    preds.reserve(ens.members.size());
    for (const EnsembleMember& member : ens.members) {
        preds.push_back(predict(member.model, features));
        mean += preds.back();
    }
    mean /= n;
    double var = 0.0;
    for (double p : preds) var += (p - mean) * (p - mean);
    return {mean, std::sqrt(var / n)};
}

// Member models share one feature config by construction, so the text is
// featurized once.
inline EnsemblePrediction ensemble_predict(const EnsembleModel& ens, const Example& ex) {
    if (ens.members.empty()) throw DataError("ensemble has no members");
    return ensemble_predict_counts(ens, featurize(ex.text, ens.feature_config));
}

inline constexpr int kEnsembleFormatVersion = 1;
inline constexpr std::string_view kEnsembleFormatName = "selftrain-ensemble";
inline constexpr std::string_view kEnsembleManifestFile = "manifest.json";

namespace detail {

inline std::string member_file_name(int split) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "member_%02d.json", split);
    return buf;
}

inline nlohmann::json train_config_to_json(const TrainConfig& cfg) {
    return {{"epochs", cfg.epochs},
            {"batch_size", cfg.batch_size},
            {"peak_lr", cfg.peak_lr},
            {"warmup_fraction", cfg.warmup_fraction},
            {"decay_power", cfg.decay_power}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& obj) {
    TrainConfig cfg;
    cfg.epochs = obj.at("epochs").get<int>();
    cfg.batch_size = obj.at("batch_size").get<int>();
    cfg.peak_lr = obj.at("peak_lr").get<double>();
    cfg.warmup_fraction = obj.at("warmup_fraction").get<double>();
    cfg.decay_power = obj.at("decay_power").get<double>();
    return cfg;
}

} // namespace detail

// Ensemble directory: manifest.json plus one model file per member. The
// manifest records every candidate's seed and validation correlation, not
// just the winners, so the selection protocol is auditable after the fact.
inline void save_ensemble(const EnsembleModel& ens, const std::filesystem::path& dir) {
    if (ens.members.empty()) throw DataError("cannot save an empty ensemble");
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["format"] = std::string(kEnsembleFormatName);
    manifest["version"] = kEnsembleFormatVersion;
    manifest["k"] = ens.k;
    manifest["fold_seed"] = ens.fold_seed;
    manifest["candidate_seeds"] = ens.candidate_seeds;
    manifest["feature_config"] = detail::feature_config_to_json(ens.feature_config);
    manifest["train_config"] = detail::train_config_to_json(ens.train_config);
    nlohmann::json members = nlohmann::json::array();
    for (const EnsembleMember& member : ens.members) {
        const std::string file = detail::member_file_name(member.split_index);
        save_model(member.model, dir / file);
        nlohmann::json candidates = nlohmann::json::array();
        for (const CandidateReport& c : member.candidates) {
            nlohmann::json entry{{"seed", c.seed}};
            if (c.validation_r)
                entry["validation_r"] = *c.validation_r;
            else
                entry["validation_r"] = nullptr;
            candidates.push_back(entry);
        }
        members.push_back({{"split", member.split_index},
                           {"file", file},
                           {"seed", member.seed},
                           {"validation_r", member.validation_r},
                           {"model_fingerprint", to_hex(model_fingerprint(member.model))},
                           {"candidates", candidates}});
    }
    manifest["members"] = members;
    auto out = detail::open_output(dir / kEnsembleManifestFile);
    out << manifest.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + (dir / kEnsembleManifestFile).string());
}

inline EnsembleModel load_ensemble(const std::filesystem::path& dir) {
    const auto manifest_path = dir / kEnsembleManifestFile;
    auto in = detail::open_input(manifest_path);
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt ensemble manifest " + manifest_path.string() + ": " + e.what());
    }
    try {
        if (manifest.at("format").get<std::string>() != kEnsembleFormatName)
            throw DataError("not an ensemble manifest: " + manifest_path.string());
        const int version = manifest.at("version").get<int>();
        if (version != kEnsembleFormatVersion)
            throw DataError("unsupported ensemble format version " + std::to_string(version));
        EnsembleModel ens;
        ens.k = manifest.at("k").get<int>();
        ens.fold_seed = manifest.at("fold_seed").get<std::uint64_t>();
        ens.candidate_seeds = manifest.at("candidate_seeds").get<std::vector<std::uint64_t>>();
        ens.feature_config = detail::feature_config_from_json(manifest.at("feature_config"));
        ens.train_config = detail::train_config_from_json(manifest.at("train_config"));
        for (const auto& entry : manifest.at("members")) {
            EnsembleMember member;
            member.split_index = entry.at("split").get<int>();
            member.seed = entry.at("seed").get<std::uint64_t>();
            member.validation_r = entry.at("validation_r").get<double>();
            member.model = load_model(dir / entry.at("file").get<std::string>());
            if (!(member.model.feature_config == ens.feature_config))
                throw DataError("ensemble member feature config differs from manifest");
            if (to_hex(model_fingerprint(member.model)) !=
                entry.at("model_fingerprint").get<std::string>())
                throw DataError("fingerprint mismatch for " + entry.at("file").get<std::string>());
            for (const auto& c : entry.at("candidates")) {
                CandidateReport report;
                report.seed = c.at("seed").get<std::uint64_t>();
                if (!c.at("validation_r").is_null())
                    report.validation_r = c.at("validation_r").get<double>();
                member.candidates.push_back(report);
            }
            ens.members.push_back(std::move(member));
        }
        if (ens.members.empty()) throw DataError("ensemble manifest lists no members");
        return ens;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("corrupt ensemble manifest " + manifest_path.string() + ": " + e.what());
    }
}

} // namespace selftrain
