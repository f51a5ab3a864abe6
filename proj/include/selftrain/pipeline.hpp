#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "selftrain/corpus.hpp"
#include "selftrain/dataset_io.hpp"
#include "selftrain/ensemble.hpp"
#include "selftrain/error.hpp"
#include "selftrain/hash.hpp"
#include "selftrain/metrics.hpp"
#include "selftrain/model.hpp"
#include "selftrain/pseudolabel.hpp"
#include "selftrain/version.hpp"

namespace selftrain {

// A stage of run-all failed; carries the stage name for the abort message.
class StageError : public Error {
public:
    StageError(const std::string& stage, const std::string& what)
        : Error("stage " + stage + " failed: " + what), stage_(stage) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// Everything a full run needs. All randomness in a run flows from the three
// seed fields; the two fold seeds are distinct by default so the final
// stage re-splits the original data freshly.
struct PipelineConfig {
    std::filesystem::path train_path;
    std::filesystem::path unlabeled_path;
    std::filesystem::path test_path;
    std::filesystem::path workdir;
    FileFormat format = FileFormat::tsv;

    int k = 5;
    int m = 5;
    std::vector<std::uint64_t> seeds; // candidate seeds; filled 1..m when empty
    std::uint64_t fold_seed = 101;
    std::uint64_t final_fold_seed = 102;
    bool stratify_folds = false;

    NormalizationConfig normalization;
    TrainConfig train;
    FeatureConfig features;
    PseudoLabelConfig pseudo;

    bool export_clamp = true;
    int jobs = 1;
    bool force = false;

    void finalize_and_validate() {
        if (k < 2) throw DataError("k must be >= 2");
        if (m < 1) throw DataError("m must be >= 1");
        if (seeds.empty())
            for (int i = 1; i <= m; ++i) seeds.push_back(static_cast<std::uint64_t>(i));
        if (seeds.size() != static_cast<std::size_t>(m))
            throw DataError("expected " + std::to_string(m) + " candidate seeds, got " +
                            std::to_string(seeds.size()));
        std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
        if (unique.size() != seeds.size()) throw DataError("candidate seeds must be distinct");
        if (jobs < 1) throw DataError("jobs must be >= 1");
        std::vector<std::filesystem::path> paths = {train_path, unlabeled_path, test_path, workdir};
        for (std::size_t i = 0; i < paths.size(); ++i)
            for (std::size_t j = i + 1; j < paths.size(); ++j)
                if (!paths[i].empty() && paths[i] == paths[j])
                    throw DataError("paths must be distinct: " + paths[i].string());
        normalization.validate();
        train.validate();
        features.validate();
        pseudo.validate();
    }
};

struct PreprocessStats {
    std::size_t read = 0;
    std::size_t kept = 0;
    std::size_t dropped_too_short = 0;
    std::size_t dropped_language = 0;
    std::vector<LanguageStat> language_stats; // over kept records
};

inline void render_preprocess_stats(std::ostream& out, const PreprocessStats& stats) {
    out << "read " << stats.read << ", kept " << stats.kept << ", dropped too_short "
        << stats.dropped_too_short << ", dropped language " << stats.dropped_language << '\n';
    if (!stats.language_stats.empty()) {
        out << "language\tcount\tpercentage\n";
        for (const LanguageStat& row : stats.language_stats) {
            char pct[16];
            std::snprintf(pct, sizeof(pct), "%.1f", row.percentage);
            out << row.language << '\t' << row.count << '\t' << pct << '\n';
        }
    }
}

namespace detail {

inline void ensure_fresh(const std::filesystem::path& path, bool force) {
    if (!force && std::filesystem::exists(path))
        throw IoError("artifact " + path.string() +
                      " already exists; pass --force or use a fresh workdir");
}

} // namespace detail

// Streams input records through normalization and filtering, writing the
// survivors. Rerunning on its own output is the identity.
inline PreprocessStats cmd_preprocess(const std::filesystem::path& input,
                                      const std::filesystem::path& output, FileFormat format,
                                      const NormalizationConfig& cfg, bool force = false,
                                      bool header = false) {
    cfg.validate();
    detail::ensure_fresh(output, force);
    const Dataset raw = read_dataset(input, format);
    Dataset kept;
    PreprocessStats stats;
    stats.read = raw.size();
    for (const Example& ex : raw.examples()) {
        Example normalized = ex;
        normalized.text = normalize_text(ex.text, cfg);
        const FilterDecision decision = filter_record(normalized, cfg);
        if (decision.keep) {
            kept.add(std::move(normalized));
        } else if (decision.reason == DropReason::too_short) {
            ++stats.dropped_too_short;
        } else {
            ++stats.dropped_language;
        }
    }
    stats.kept = kept.size();
    stats.language_stats = corpus_stats(kept);
    write_dataset(kept, output, format, header);
    return stats;
}

enum class EnsembleStage { initial, final };

constexpr std::string_view to_string(EnsembleStage s) {
    return s == EnsembleStage::initial ? "initial" : "final";
}

// Initial stage: fold-plan the training file and run the fan-out. Final
// stage: the input is an expanded dataset; its gold part is fold-planned
// and its pseudo part becomes extra training data for every split.
inline EnsembleModel cmd_train_ensemble(const PipelineConfig& cfg, EnsembleStage stage,
                                        const std::filesystem::path& train_input,
                                        const std::filesystem::path& out_dir) {
    detail::ensure_fresh(out_dir / kEnsembleManifestFile, cfg.force);
    const Dataset input = read_dataset(train_input, cfg.format);
    EnsembleModel ens;
    if (stage == EnsembleStage::initial) {
        const FoldPlan plan = cfg.stratify_folds
                                  ? make_fold_plan_stratified(input, cfg.k, cfg.fold_seed)
                                  : make_fold_plan(input, cfg.k, cfg.fold_seed);
        ens = build_ensemble(input, plan, cfg.seeds, cfg.train, cfg.features, nullptr, cfg.jobs);
    } else {
        auto [gold, pseudo] = partition_by_origin(input);
        if (gold.empty()) throw DataError("expanded dataset has no gold examples");
        const FoldPlan plan = cfg.stratify_folds
                                  ? make_fold_plan_stratified(gold, cfg.k, cfg.final_fold_seed)
                                  : make_fold_plan(gold, cfg.k, cfg.final_fold_seed);
        ens = build_ensemble(gold, plan, cfg.seeds, cfg.train, cfg.features,
                             pseudo.empty() ? nullptr : &pseudo, cfg.jobs);
    }
    save_ensemble(ens, out_dir);
    return ens;
}

struct PseudoLabelOutputs {
    std::size_t scored = 0;
    std::size_t kept_confident = 0;
    std::size_t kept_capped = 0;
    std::vector<CellOccupancy> occupancy;
};

namespace detail {

// Scored lists reuse the dataset formats: one pseudo-origin record per
// item, score = ensemble mean (raw), confidence_std = ensemble std.
inline Dataset scored_to_dataset(const std::vector<ScoredExample>& scored) {
    Dataset ds;
    for (const ScoredExample& s : scored) {
        Example ex = s.example;
        ex.origin = Origin::pseudo;
        ex.score = s.mean;
        ex.confidence_std = s.stddev;
        ds.add(std::move(ex));
    }
    return ds;
}

inline std::vector<ScoredExample> dataset_to_scored(const Dataset& ds) {
    std::vector<ScoredExample> scored;
    scored.reserve(ds.size());
    for (const Example& ex : ds.examples()) {
        if (ex.origin != Origin::pseudo || !ex.score || !ex.confidence_std)
            throw DataError("record \"" + ex.id + "\" is not a scored pseudo-label row");
        Example bare = ex;
        bare.origin = Origin::gold;
        bare.score.reset();
        bare.confidence_std.reset();
        scored.push_back({std::move(bare), *ex.score, *ex.confidence_std});
    }
    return scored;
}

inline void write_occupancy(const std::vector<CellOccupancy>& occupancy,
                            const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "language\tbin\tbin_lo\tbin_hi\tkept\tdropped_overflow\n";
    for (const CellOccupancy& cell : occupancy)
        out << cell.language << '\t' << cell.bin << '\t' << format_double(cell.bin_lo) << '\t'
            << format_double(cell.bin_hi) << '\t' << cell.kept << '\t' << cell.dropped_overflow
            << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

} // namespace detail

// Scores the unlabeled pool with the ensemble and applies the confidence
// filter and the stratified cap. Emits the full scored list, the kept list
// and the per-cell occupancy table.
inline PseudoLabelOutputs cmd_pseudo_label(const PipelineConfig& cfg,
                                           const std::filesystem::path& ensemble_dir,
                                           const std::filesystem::path& unlabeled_path,
                                           const std::filesystem::path& scored_out,
                                           const std::filesystem::path& kept_out,
                                           const std::filesystem::path& occupancy_out) {
    detail::ensure_fresh(scored_out, cfg.force);
    detail::ensure_fresh(kept_out, cfg.force);
    detail::ensure_fresh(occupancy_out, cfg.force);
    const EnsembleModel ens = load_ensemble(ensemble_dir);
    const Dataset unlabeled = read_dataset(unlabeled_path, cfg.format);
    const auto scored = score_unlabeled(ens, unlabeled);
    const auto confident = confidence_filter(scored, cfg.pseudo);
    PseudoLabelOutputs outputs;
    const auto capped = stratified_cap(confident, cfg.pseudo, &outputs.occupancy);
    outputs.scored = scored.size();
    outputs.kept_confident = confident.size();
    outputs.kept_capped = capped.size();
    write_dataset(detail::scored_to_dataset(scored), scored_out, cfg.format);
    write_dataset(detail::scored_to_dataset(capped), kept_out, cfg.format);
    detail::write_occupancy(outputs.occupancy, occupancy_out);
    return outputs;
}

// Merges the kept pseudo-labels into the original training set.
inline std::size_t cmd_expand(const std::filesystem::path& original_path,
                              const std::filesystem::path& kept_path,
                              const std::filesystem::path& expanded_out, FileFormat format,
                              bool force = false) {
    detail::ensure_fresh(expanded_out, force);
    const Dataset original = read_dataset(original_path, format);
    const Dataset kept = read_dataset(kept_path, format);
    const Dataset expanded = expand_dataset(original, detail::dataset_to_scored(kept));
    write_dataset(expanded, expanded_out, format);
    return expanded.size();
}

// Ensemble-mean predictions for every input record. Text is normalized
// before featurizing; raw means are clamped to [1, 5] only when
// export_clamp is on.
inline std::map<std::string, double> cmd_predict(const std::filesystem::path& ensemble_dir,
                                                 const std::filesystem::path& input_path,
                                                 const std::filesystem::path& output_path,
                                                 FileFormat format, bool export_clamp,
                                                 const NormalizationConfig& norm,
                                                 bool force = false) {
    detail::ensure_fresh(output_path, force);
    const EnsembleModel ens = load_ensemble(ensemble_dir);
    const Dataset input = read_dataset(input_path, format);
    std::map<std::string, double> preds;
    for (const Example& ex : input.examples()) {
        const std::string normalized = normalize_text(ex.text, norm);
        const EnsemblePrediction p =
            ensemble_predict_counts(ens, featurize(normalized, ens.feature_config));
        preds[ex.id] = export_clamp ? std::clamp(p.mean, 1.0, 5.0) : p.mean;
    }
    write_predictions(preds, output_path);
    return preds;
}

// Scores a predictions file against gold labels, grouped by language, and
// writes the report in TSV and pretty-text form.
inline EvalReport cmd_evaluate(const std::filesystem::path& predictions_path,
                               const std::filesystem::path& gold_path, FileFormat format,
                               const std::filesystem::path& report_tsv,
                               const std::filesystem::path& report_txt, bool force = false) {
    detail::ensure_fresh(report_tsv, force);
    detail::ensure_fresh(report_txt, force);
    const auto predictions = read_predictions(predictions_path);
    const Dataset gold = read_dataset(gold_path, format);
    const EvalReport report = evaluate(predictions, gold);
    {
        auto out = detail::open_output(report_tsv);
        render_eval_report_tsv(out, report);
    }
    {
        auto out = detail::open_output(report_txt);
        render_eval_report_text(out, report);
    }
    return report;
}

struct RunArtifacts {
    std::filesystem::path train_preprocessed;
    std::filesystem::path unlabeled_preprocessed;
    std::filesystem::path initial_ensemble;
    std::filesystem::path scored;
    std::filesystem::path kept;
    std::filesystem::path occupancy;
    std::filesystem::path expanded;
    std::filesystem::path final_ensemble;
    std::filesystem::path predictions;
    std::filesystem::path report_tsv;
    std::filesystem::path report_txt;
    std::filesystem::path run_manifest;
};

inline RunArtifacts run_artifact_paths(const PipelineConfig& cfg) {
    const auto ext = std::string(".") + std::string(to_string(cfg.format));
    const auto& w = cfg.workdir;
    return {w / ("train_preprocessed" + ext),
            w / ("unlabeled_preprocessed" + ext),
            w / "ensemble_initial",
            w / ("pseudo_scored" + ext),
            w / ("pseudo_kept" + ext),
            w / "pseudo_occupancy.tsv",
            w / ("expanded" + ext),
            w / "ensemble_final",
            w / "predictions.tsv",
            w / "eval_report.tsv",
            w / "eval_report.txt",
            w / "run_manifest.json"};
}

struct RunSummary {
    RunArtifacts artifacts;
    PreprocessStats train_stats;
    PreprocessStats unlabeled_stats;
    PseudoLabelOutputs pseudo;
    std::size_t expanded_size = 0;
    EvalReport report;
};

namespace detail {

inline std::string file_checksum(const std::filesystem::path& path) {
    auto in = open_input(path);
    std::uint64_t h = kFnvOffset;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        h = fnv1a64(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
        if (!in) break;
    }
    return "fnv1a64:" + to_hex(h);
}

inline nlohmann::json pipeline_config_to_json(const PipelineConfig& cfg) {
    nlohmann::json obj;
    obj["train"] = cfg.train_path.string();
    obj["unlabeled"] = cfg.unlabeled_path.string();
    obj["test"] = cfg.test_path.string();
    obj["workdir"] = cfg.workdir.string();
    obj["format"] = std::string(to_string(cfg.format));
    obj["k"] = cfg.k;
    obj["m"] = cfg.m;
    obj["seeds"] = cfg.seeds;
    obj["fold_seed"] = cfg.fold_seed;
    obj["final_fold_seed"] = cfg.final_fold_seed;
    obj["stratify_folds"] = cfg.stratify_folds;
    obj["user_token"] = cfg.normalization.user_token;
    obj["url_token"] = cfg.normalization.url_token;
    obj["min_chars"] = cfg.normalization.min_chars;
    obj["languages"] = std::vector<std::string>(cfg.normalization.language_whitelist.begin(),
                                                cfg.normalization.language_whitelist.end());
    obj["train_config"] = train_config_to_json(cfg.train);
    obj["feature_config"] = feature_config_to_json(cfg.features);
    obj["std_threshold"] = cfg.pseudo.std_threshold;
    obj["cap_per_cell"] = cfg.pseudo.cap_per_cell;
    obj["bin_edges"] = cfg.pseudo.bin_edges;
    obj["export_clamp"] = cfg.export_clamp;
    return obj;
}

inline void add_artifact_checksums(nlohmann::json& artifacts, const std::filesystem::path& root,
                                   const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(path))
            if (entry.is_regular_file()) files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files)
            artifacts[std::filesystem::relative(file, root).generic_string()] = file_checksum(file);
    } else {
        artifacts[std::filesystem::relative(path, root).generic_string()] = file_checksum(path);
    }
}

} // namespace detail

// The whole protocol, stage by stage: preprocess both corpora, train the
// initial ensemble, pseudo-label, expand, train the final ensemble, predict
// the test set, evaluate. Every stage reads its inputs from the previous
// stage's files, exactly as the standalone subcommands do, and the run
// manifest records a checksum of every artifact produced.
inline RunSummary run_all(const PipelineConfig& config, std::ostream* log = nullptr) {
    PipelineConfig cfg = config;
    cfg.finalize_and_validate();
    if (cfg.train_path.empty() || cfg.unlabeled_path.empty() || cfg.test_path.empty() ||
        cfg.workdir.empty())
        throw DataError("run-all needs train, unlabeled, test and workdir paths");
    std::filesystem::create_directories(cfg.workdir);

    RunSummary summary;
    summary.artifacts = run_artifact_paths(cfg);
    const RunArtifacts& a = summary.artifacts;
    auto note = [&](const std::string& line) {
        if (log) *log << line << '\n';
    };

    auto stage = [&](const std::string& name, auto&& body) {
        note("[stage] " + name);
        try {
            body();
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
    };

    stage("preprocess", [&] {
        summary.train_stats =
            cmd_preprocess(cfg.train_path, a.train_preprocessed, cfg.format, cfg.normalization,
                           cfg.force);
        summary.unlabeled_stats =
            cmd_preprocess(cfg.unlabeled_path, a.unlabeled_preprocessed, cfg.format,
                           cfg.normalization, cfg.force);
    });
    stage("train-ensemble-initial", [&] {
        cmd_train_ensemble(cfg, EnsembleStage::initial, a.train_preprocessed, a.initial_ensemble);
    });
    stage("pseudo-label", [&] {
        summary.pseudo = cmd_pseudo_label(cfg, a.initial_ensemble, a.unlabeled_preprocessed,
                                          a.scored, a.kept, a.occupancy);
    });
    stage("expand", [&] {
        summary.expanded_size =
            cmd_expand(a.train_preprocessed, a.kept, a.expanded, cfg.format, cfg.force);
    });
    stage("train-ensemble-final", [&] {
        cmd_train_ensemble(cfg, EnsembleStage::final, a.expanded, a.final_ensemble);
    });
    stage("predict", [&] {
        cmd_predict(a.final_ensemble, cfg.test_path, a.predictions, cfg.format, cfg.export_clamp,
                    cfg.normalization, cfg.force);
    });
    stage("evaluate", [&] {
        summary.report = cmd_evaluate(a.predictions, cfg.test_path, cfg.format, a.report_tsv,
                                      a.report_txt, cfg.force);
    });

    stage("run-manifest", [&] {
        detail::ensure_fresh(a.run_manifest, cfg.force);
        nlohmann::json manifest;
        manifest["tool"] = {{"name", std::string(kToolName)}, {"version", std::string(kToolVersion)}};
        manifest["config"] = detail::pipeline_config_to_json(cfg);
        manifest["stages"] = {"preprocess",           "train-ensemble-initial",
                              "pseudo-label",         "expand",
                              "train-ensemble-final", "predict",
                              "evaluate"};
        manifest["counts"] = {{"train_kept", summary.train_stats.kept},
                              {"unlabeled_kept", summary.unlabeled_stats.kept},
                              {"scored", summary.pseudo.scored},
                              {"kept_confident", summary.pseudo.kept_confident},
                              {"kept_capped", summary.pseudo.kept_capped},
                              {"expanded", summary.expanded_size}};
        manifest["results"] = {{"overall_r", summary.report.overall_r},
                               {"macro_avg_r", summary.report.macro_avg_r}};
        nlohmann::json artifacts;
        for (const auto& path :
             {a.train_preprocessed, a.unlabeled_preprocessed, a.initial_ensemble, a.scored, a.kept,
              a.occupancy, a.expanded, a.final_ensemble, a.predictions, a.report_tsv, a.report_txt})
            detail::add_artifact_checksums(artifacts, cfg.workdir, path);
        manifest["artifacts"] = artifacts;
        auto out = detail::open_output(a.run_manifest);
        out << manifest.dump(2) << '\n';
        if (!out) throw IoError("failed writing " + a.run_manifest.string());
    });

    note("[done] overall_r=" + format_double(summary.report.overall_r) +
         " macro_avg_r=" + format_double(summary.report.macro_avg_r));
    return summary;
}

} // namespace selftrain
