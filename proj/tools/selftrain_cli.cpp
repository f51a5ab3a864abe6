// Command-line front end for the self-training pipeline. Every subcommand
// is a thin wrapper over the library stage functions, so a full run-all and
// the same stages invoked one by one produce identical artifacts.

#include <cctype>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selftrain/selftrain.hpp"

namespace {

using namespace selftrain;

struct CliState {
    PipelineConfig cfg;
    std::string format = "tsv";
    std::string seeds_csv;
    std::string languages_csv;
    std::string bin_edges_csv;
    std::string stage = "initial";
    bool header = false;
    bool no_clamp = false;
};

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(csv);
    while (std::getline(ss, item, ',')) {
        while (!item.empty() && (item.front() == ' ' || item.front() == '\t')) item.erase(0, 1);
        while (!item.empty() && (item.back() == ' ' || item.back() == '\t')) item.pop_back();
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void apply_csv_options(CliState& st) {
    st.cfg.format = file_format_from_string(st.format);
    try {
        if (!st.seeds_csv.empty()) {
            st.cfg.seeds.clear();
            for (const std::string& s : split_csv(st.seeds_csv))
                st.cfg.seeds.push_back(std::stoull(s));
        }
        if (!st.bin_edges_csv.empty()) {
            st.cfg.pseudo.bin_edges.clear();
            for (const std::string& edge : split_csv(st.bin_edges_csv))
                st.cfg.pseudo.bin_edges.push_back(std::stod(edge));
        }
    } catch (const std::logic_error&) {
        throw DataError("bad number in --seeds or --bin-edges list");
    }
    if (!st.languages_csv.empty()) {
        st.cfg.normalization.language_whitelist.clear();
        for (const std::string& lang : split_csv(st.languages_csv))
            st.cfg.normalization.language_whitelist.insert(lang);
    }
}

void add_format_option(CLI::App* sub, CliState& st) {
    sub->add_option("--format", st.format, "Dataset file format: tsv or jsonl")
        ->check(CLI::IsMember({"tsv", "jsonl"}))
        ->capture_default_str();
}

void add_norm_options(CLI::App* sub, CliState& st) {
    sub->add_option("--user-token", st.cfg.normalization.user_token,
                    "Replacement for @username mentions")
        ->capture_default_str();
    sub->add_option("--url-token", st.cfg.normalization.url_token, "Replacement for URLs")
        ->capture_default_str();
    sub->add_option("--min-chars", st.cfg.normalization.min_chars,
                    "Drop records shorter than this many characters")
        ->capture_default_str();
    sub->add_option("--languages", st.languages_csv,
                    "Comma-separated language whitelist (default: the ten task languages)");
}

void add_model_options(CLI::App* sub, CliState& st) {
    sub->add_option("-k,--k", st.cfg.k, "Number of folds")->capture_default_str();
    sub->add_option("-m,--m", st.cfg.m, "Candidate models per split")->capture_default_str();
    sub->add_option("--seeds", st.seeds_csv, "Comma-separated candidate seeds (default 1..m)");
    sub->add_option("--fold-seed", st.cfg.fold_seed, "Fold plan seed, initial stage")
        ->capture_default_str();
    sub->add_option("--final-fold-seed", st.cfg.final_fold_seed, "Fold plan seed, final stage")
        ->capture_default_str();
    sub->add_flag("--stratify-folds", st.cfg.stratify_folds,
                  "Stratify fold assignment by language");
    sub->add_option("--epochs", st.cfg.train.epochs, "Training epochs")->capture_default_str();
    sub->add_option("--batch-size", st.cfg.train.batch_size, "Mini-batch size")
        ->capture_default_str();
    sub->add_option("--peak-lr", st.cfg.train.peak_lr, "Peak learning rate")
        ->capture_default_str();
    sub->add_option("--warmup-fraction", st.cfg.train.warmup_fraction,
                    "Warmup share of total steps, in (0,1)")
        ->capture_default_str();
    sub->add_option("--decay-power", st.cfg.train.decay_power, "Polynomial decay power")
        ->capture_default_str();
    sub->add_option("--feature-dim", st.cfg.features.dim,
                    "Hashed feature dimension (power of two)")
        ->capture_default_str();
    sub->add_option("--word-ngram-min", st.cfg.features.word_ngram_min, "Smallest word n-gram")
        ->capture_default_str();
    sub->add_option("--word-ngram-max", st.cfg.features.word_ngram_max, "Largest word n-gram")
        ->capture_default_str();
    sub->add_option("--char-ngram-min", st.cfg.features.char_ngram_min, "Smallest char n-gram")
        ->capture_default_str();
    sub->add_option("--char-ngram-max", st.cfg.features.char_ngram_max, "Largest char n-gram")
        ->capture_default_str();
    sub->add_option("--hash-seed", st.cfg.features.hash_seed, "Feature hashing seed")
        ->capture_default_str();
    sub->add_option("-j,--jobs", st.cfg.jobs, "Worker threads for independent trainings")
        ->capture_default_str();
}

void add_pseudo_options(CLI::App* sub, CliState& st) {
    sub->add_option("--std-threshold", st.cfg.pseudo.std_threshold,
                    "Keep pseudo-labels with ensemble std strictly below this")
        ->capture_default_str();
    sub->add_option("--cap-per-cell", st.cfg.pseudo.cap_per_cell,
                    "Max kept examples per (language, score bin) cell")
        ->capture_default_str();
    sub->add_option("--bin-edges", st.bin_edges_csv,
                    "Comma-separated ascending score bin edges (default 1,2,3,4,5)");
}

void add_force_option(CLI::App* sub, CliState& st) {
    sub->add_flag("--force", st.cfg.force, "Overwrite existing output artifacts");
}

std::string config_placeholder; // consumed in the pre-parse phase

void add_config_option(CLI::App* sub) {
    sub->add_option("--config", config_placeholder,
                    "Read options from a flat key = value config file "
                    "(command-line flags take precedence)");
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw DataError("config key \"" + key + "\": expected a boolean, got \"" + value + "\"");
}

// Applies a config file to the state before CLI11 parses the command line,
// so explicit flags override file values. Keys mirror the long option names
// without the leading dashes; unknown keys are rejected.
void apply_config_file(const std::filesystem::path& path, CliState& st) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::map<std::string, std::function<void(const std::string&)>> setters;
    auto set_path = [](std::filesystem::path& target) {
        return [&target](const std::string& v) { target = v; };
    };
    setters["train"] = set_path(st.cfg.train_path);
    setters["unlabeled"] = set_path(st.cfg.unlabeled_path);
    setters["test"] = set_path(st.cfg.test_path);
    setters["workdir"] = set_path(st.cfg.workdir);
    setters["format"] = [&](const std::string& v) { st.format = v; };
    setters["k"] = [&](const std::string& v) { st.cfg.k = std::stoi(v); };
    setters["m"] = [&](const std::string& v) { st.cfg.m = std::stoi(v); };
    setters["seeds"] = [&](const std::string& v) { st.seeds_csv = v; };
    setters["fold-seed"] = [&](const std::string& v) { st.cfg.fold_seed = std::stoull(v); };
    setters["final-fold-seed"] = [&](const std::string& v) {
        st.cfg.final_fold_seed = std::stoull(v);
    };
    setters["stratify-folds"] = [&](const std::string& v) {
        st.cfg.stratify_folds = parse_bool(v, "stratify-folds");
    };
    setters["user-token"] = [&](const std::string& v) { st.cfg.normalization.user_token = v; };
    setters["url-token"] = [&](const std::string& v) { st.cfg.normalization.url_token = v; };
    setters["min-chars"] = [&](const std::string& v) {
        st.cfg.normalization.min_chars = std::stoul(v);
    };
    setters["languages"] = [&](const std::string& v) { st.languages_csv = v; };
    setters["epochs"] = [&](const std::string& v) { st.cfg.train.epochs = std::stoi(v); };
    setters["batch-size"] = [&](const std::string& v) { st.cfg.train.batch_size = std::stoi(v); };
    setters["peak-lr"] = [&](const std::string& v) { st.cfg.train.peak_lr = std::stod(v); };
    setters["warmup-fraction"] = [&](const std::string& v) {
        st.cfg.train.warmup_fraction = std::stod(v);
    };
    setters["decay-power"] = [&](const std::string& v) { st.cfg.train.decay_power = std::stod(v); };
    setters["feature-dim"] = [&](const std::string& v) {
        st.cfg.features.dim = static_cast<std::uint32_t>(std::stoul(v));
    };
    setters["word-ngram-min"] = [&](const std::string& v) {
        st.cfg.features.word_ngram_min = std::stoi(v);
    };
    setters["word-ngram-max"] = [&](const std::string& v) {
        st.cfg.features.word_ngram_max = std::stoi(v);
    };
    setters["char-ngram-min"] = [&](const std::string& v) {
        st.cfg.features.char_ngram_min = std::stoi(v);
    };
    setters["char-ngram-max"] = [&](const std::string& v) {
        st.cfg.features.char_ngram_max = std::stoi(v);
    };
    setters["hash-seed"] = [&](const std::string& v) { st.cfg.features.hash_seed = std::stoull(v); };
    setters["std-threshold"] = [&](const std::string& v) {
        st.cfg.pseudo.std_threshold = std::stod(v);
    };
    setters["cap-per-cell"] = [&](const std::string& v) {
        st.cfg.pseudo.cap_per_cell = std::stoul(v);
    };
    setters["bin-edges"] = [&](const std::string& v) { st.bin_edges_csv = v; };
    setters["export-clamp"] = [&](const std::string& v) {
        st.no_clamp = !parse_bool(v, "export-clamp");
    };
    setters["jobs"] = [&](const std::string& v) { st.cfg.jobs = std::stoi(v); };
    setters["force"] = [&](const std::string& v) { st.cfg.force = parse_bool(v, "force"); };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        auto trim = [](std::string s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(0, 1);
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            return s;
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto it = setters.find(key);
        if (it == setters.end())
            throw DataError(path.string() + ":" + std::to_string(lineno) +
                            ": unknown config key \"" + key + "\"");
        try {
            it->second(value);
        } catch (const std::invalid_argument&) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": bad value \"" +
                            value + "\" for key \"" + key + "\"");
        } catch (const std::out_of_range&) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": value \"" + value +
                            "\" out of range for key \"" + key + "\"");
        }
    }
}

// Finds --config in the raw argv ahead of CLI11, so file values land before
// command-line ones.
void preload_config_files(int argc, char** argv, CliState& st) {
    for (int i = 1; i < argc; ++i) {
        const std::string_view arg = argv[i];
        if (arg == "--config") {
            if (i + 1 >= argc) throw DataError("--config needs a file path");
            apply_config_file(argv[i + 1], st);
            ++i;
        } else if (arg.starts_with("--config=")) {
            apply_config_file(std::string(arg.substr(9)), st);
        }
    }
}

int dispatch(CLI::App& app, CliState& st, int argc, char** argv) {
    try {
        preload_config_files(argc, argv, st);
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) {
    CliState st;
    CLI::App app{"Semi-supervised text regression pipeline: ensemble training, "
                 "confidence-filtered pseudo-labeling, expanded retraining, evaluation."};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    // preprocess ------------------------------------------------------------
    std::filesystem::path in_path, out_path;
    auto* preprocess = app.add_subcommand("preprocess", "Normalize and filter a raw dataset");
    preprocess->add_option("--input", in_path, "Raw dataset")->required();
    preprocess->add_option("--output", out_path, "Preprocessed dataset")->required();
    preprocess->add_flag("--header", st.header, "Emit a TSV header row");
    add_format_option(preprocess, st);
    add_norm_options(preprocess, st);
    add_force_option(preprocess, st);
    add_config_option(preprocess);
    preprocess->callback([&] {
        apply_csv_options(st);
        const auto stats = cmd_preprocess(in_path, out_path, st.cfg.format, st.cfg.normalization,
                                          st.cfg.force, st.header);
        render_preprocess_stats(std::cout, stats);
    });

    // train-ensemble ---------------------------------------------------------
    std::filesystem::path train_input, ensemble_dir;
    auto* train_cmd = app.add_subcommand("train-ensemble", "Fold/seed fan-out ensemble training");
    train_cmd->add_option("--train", train_input, "Training dataset (expanded one for --stage final)")
        ->required();
    train_cmd->add_option("--out", ensemble_dir, "Output ensemble directory")->required();
    train_cmd->add_option("--stage", st.stage, "initial: original data; final: expanded data")
        ->check(CLI::IsMember({"initial", "final"}))
        ->capture_default_str();
    add_format_option(train_cmd, st);
    add_model_options(train_cmd, st);
    add_force_option(train_cmd, st);
    add_config_option(train_cmd);
    train_cmd->callback([&] {
        apply_csv_options(st);
        st.cfg.finalize_and_validate();
        const auto stage = st.stage == "final" ? EnsembleStage::final : EnsembleStage::initial;
        const EnsembleModel ens = cmd_train_ensemble(st.cfg, stage, train_input, ensemble_dir);
        std::cout << "trained " << ens.members.size() * ens.candidate_seeds.size()
                  << " candidates, selected " << ens.members.size() << " members\n";
        for (const EnsembleMember& member : ens.members)
            std::cout << "  split " << member.split_index << ": seed " << member.seed
                      << ", validation r " << format_double(member.validation_r) << '\n';
    });

    // pseudo-label -----------------------------------------------------------
    std::filesystem::path unlabeled_path, scored_out, kept_out, occupancy_out;
    auto* pseudo_cmd =
        app.add_subcommand("pseudo-label", "Score an unlabeled pool and select confident items");
    pseudo_cmd->add_option("--ensemble", ensemble_dir, "Ensemble directory")->required();
    pseudo_cmd->add_option("--unlabeled", unlabeled_path, "Unlabeled dataset")->required();
    pseudo_cmd->add_option("--scored-out", scored_out, "Full scored list output")->required();
    pseudo_cmd->add_option("--kept-out", kept_out, "Kept (filtered + capped) list output")
        ->required();
    pseudo_cmd->add_option("--occupancy-out", occupancy_out, "Per-(language, bin) cell report")
        ->required();
    add_format_option(pseudo_cmd, st);
    add_pseudo_options(pseudo_cmd, st);
    add_force_option(pseudo_cmd, st);
    add_config_option(pseudo_cmd);
    pseudo_cmd->callback([&] {
        apply_csv_options(st);
        st.cfg.pseudo.validate();
        const auto outputs = cmd_pseudo_label(st.cfg, ensemble_dir, unlabeled_path, scored_out,
                                              kept_out, occupancy_out);
        std::cout << "scored " << outputs.scored << ", confident " << outputs.kept_confident
                  << ", kept after cap " << outputs.kept_capped << '\n';
        const auto kept_stats = corpus_stats(read_dataset(kept_out, st.cfg.format));
        if (!kept_stats.empty()) {
            std::cout << "language\tkept\tpercentage\n";
            for (const LanguageStat& row : kept_stats) {
                char pct[16];
                std::snprintf(pct, sizeof(pct), "%.1f", row.percentage);
                std::cout << row.language << '\t' << row.count << '\t' << pct << '\n';
            }
        }
    });

    // expand -----------------------------------------------------------------
    std::filesystem::path original_path, kept_path, expanded_out;
    auto* expand_cmd =
        app.add_subcommand("expand", "Merge kept pseudo-labels into the training set");
    expand_cmd->add_option("--original", original_path, "Original training dataset")->required();
    expand_cmd->add_option("--kept", kept_path, "Kept pseudo-label list")->required();
    expand_cmd->add_option("--out", expanded_out, "Expanded dataset output")->required();
    add_format_option(expand_cmd, st);
    add_force_option(expand_cmd, st);
    add_config_option(expand_cmd);
    expand_cmd->callback([&] {
        apply_csv_options(st);
        const std::size_t n =
            cmd_expand(original_path, kept_path, expanded_out, st.cfg.format, st.cfg.force);
        std::cout << "expanded dataset has " << n << " examples\n";
    });

    // predict ----------------------------------------------------------------
    std::filesystem::path predictions_out;
    auto* predict_cmd = app.add_subcommand("predict", "Ensemble-mean predictions for a dataset");
    predict_cmd->add_option("--ensemble", ensemble_dir, "Ensemble directory")->required();
    predict_cmd->add_option("--input", in_path, "Input dataset")->required();
    predict_cmd->add_option("--out", predictions_out, "Predictions TSV output")->required();
    predict_cmd->add_flag("--no-clamp", st.no_clamp, "Emit raw means instead of clamping to [1,5]");
    add_format_option(predict_cmd, st);
    add_norm_options(predict_cmd, st);
    add_force_option(predict_cmd, st);
    add_config_option(predict_cmd);
    predict_cmd->callback([&] {
        apply_csv_options(st);
        const auto preds = cmd_predict(ensemble_dir, in_path, predictions_out, st.cfg.format,
                                       !st.no_clamp, st.cfg.normalization, st.cfg.force);
        std::cout << "wrote " << preds.size() << " predictions\n";
    });

    // evaluate ---------------------------------------------------------------
    std::vector<std::filesystem::path> prediction_files;
    std::filesystem::path gold_path, report_tsv, report_txt;
    std::string group_by = "language";
    auto* eval_cmd = app.add_subcommand("evaluate", "Pearson report: pooled, per-group, macro");
    eval_cmd->add_option("--predictions", prediction_files,
                         "Predictions TSV (repeat for a multi-system disparity ranking)")
        ->required();
    eval_cmd->add_option("--gold", gold_path, "Gold dataset")->required();
    eval_cmd->add_option("--report-tsv", report_tsv, "Report TSV path")->required();
    eval_cmd->add_option("--report-txt", report_txt, "Report text path")->required();
    eval_cmd->add_option("--group-by", group_by, "Grouping field")
        ->check(CLI::IsMember({"language"}))
        ->capture_default_str();
    add_format_option(eval_cmd, st);
    add_force_option(eval_cmd, st);
    add_config_option(eval_cmd);
    eval_cmd->callback([&] {
        apply_csv_options(st);
        if (prediction_files.size() == 1) {
            const EvalReport report = cmd_evaluate(prediction_files.front(), gold_path,
                                                   st.cfg.format, report_tsv, report_txt,
                                                   st.cfg.force);
            render_eval_report_text(std::cout, report);
            return;
        }
        const Dataset gold = read_dataset(gold_path, st.cfg.format);
        std::vector<std::pair<std::string, EvalReport>> systems;
        for (const auto& file : prediction_files) {
            const std::string name = file.stem().string();
            for (const auto& [existing, report] : systems)
                if (existing == name)
                    throw DataError("two prediction files share the name \"" + name +
                                    "\"; rename one");
            systems.emplace_back(name, evaluate(read_predictions(file), gold));
        }
        const DisparityReport ranking = disparity_report(systems);
        detail::ensure_fresh(report_tsv, st.cfg.force);
        detail::ensure_fresh(report_txt, st.cfg.force);
        {
            auto out = detail::open_output(report_tsv);
            render_disparity_tsv(out, ranking);
        }
        {
            auto out = detail::open_output(report_txt);
            render_disparity_text(out, ranking);
        }
        render_disparity_text(std::cout, ranking);
    });

    // run-all ----------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run-all", "Run every stage end to end");
    run_cmd->add_option("--train", st.cfg.train_path, "Raw labeled training dataset")->required();
    run_cmd->add_option("--unlabeled", st.cfg.unlabeled_path, "Raw unlabeled dataset")->required();
    run_cmd->add_option("--test", st.cfg.test_path, "Test dataset with gold scores")->required();
    run_cmd->add_option("--workdir", st.cfg.workdir, "Directory for all artifacts")
        ->envname("SELFTRAIN_WORKDIR")
        ->required();
    run_cmd->add_flag("--no-clamp", st.no_clamp, "Emit raw means instead of clamping to [1,5]");
    add_format_option(run_cmd, st);
    add_norm_options(run_cmd, st);
    add_model_options(run_cmd, st);
    add_pseudo_options(run_cmd, st);
    add_force_option(run_cmd, st);
    add_config_option(run_cmd);
    run_cmd->callback([&] {
        apply_csv_options(st);
        st.cfg.export_clamp = !st.no_clamp;
        const RunSummary summary = run_all(st.cfg, &std::cout);
        std::cout << "train preprocess: ";
        render_preprocess_stats(std::cout, summary.train_stats);
        std::cout << "unlabeled preprocess: ";
        render_preprocess_stats(std::cout, summary.unlabeled_stats);
        render_eval_report_text(std::cout, summary.report);
        std::cout << "artifacts in " << st.cfg.workdir.string() << '\n';
    });

    return dispatch(app, st, argc, argv);
}
