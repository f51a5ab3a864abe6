#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "selftrain/corpus.hpp"
#include "selftrain/error.hpp"

namespace selftrain {

enum class FileFormat { tsv, jsonl };

inline FileFormat file_format_from_string(std::string_view s) {
    if (s == "tsv") return FileFormat::tsv;
    if (s == "jsonl") return FileFormat::jsonl;
    throw DataError("unknown file format: \"" + std::string(s) + "\" (expected tsv or jsonl)");
}

constexpr std::string_view to_string(FileFormat f) {
    return f == FileFormat::tsv ? "tsv" : "jsonl";
}

// Infers the format from the file extension, defaulting to TSV.
inline FileFormat guess_format(const std::filesystem::path& path) {
    return path.extension() == ".jsonl" ? FileFormat::jsonl : FileFormat::tsv;
}

// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline double parse_double_field(std::string_view field, const std::string& where) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw DataError(where + ": not a number: \"" + std::string(field) + "\"");
    return v;
}

inline constexpr std::string_view kTsvHeader = "id\tlanguage\tscore\torigin\tconfidence_std\ttext";

namespace detail {

inline std::vector<std::string_view> split_tsv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '\t') {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

// TSV stays line-oriented: tabs, newlines and carriage returns inside the
// text column are written as single spaces.
inline std::string sanitize_tsv_text(std::string_view text) {
    std::string out(text);
    for (char& c : out)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return out;
}

inline Example example_from_fields(const std::vector<std::string_view>& f, const std::string& where) {
    Example ex;
    ex.id = std::string(f[0]);
    ex.language = std::string(f[1]);
    if (!f[2].empty()) ex.score = parse_double_field(f[2], where + " score");
    ex.origin = origin_from_string(f[3]);
    if (!f[4].empty()) ex.confidence_std = parse_double_field(f[4], where + " confidence_std");
    ex.text = std::string(f[5]);
    return ex;
}

inline void add_checked(Dataset& ds, Example ex, const std::string& where) {
    try {
        ds.add(std::move(ex));
    } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
    }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

} // namespace detail

inline Dataset read_dataset_tsv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    Dataset ds;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1 && line == kTsvHeader) continue;
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        auto fields = detail::split_tsv(line);
        if (fields.size() != 6)
            throw DataError(where + ": expected 6 tab-separated columns, got " +
                            std::to_string(fields.size()));
        detail::add_checked(ds, detail::example_from_fields(fields, where), where);
    }
    return ds;
}

inline Dataset read_dataset_jsonl(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    Dataset ds;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(where + ": invalid JSON: " + e.what());
        }
        Example ex;
        try {
            ex.id = obj.at("id").get<std::string>();
            ex.language = obj.at("language").get<std::string>();
            ex.text = obj.at("text").get<std::string>();
            ex.origin = origin_from_string(obj.at("origin").get<std::string>());
            if (obj.contains("score") && !obj["score"].is_null())
                ex.score = obj["score"].get<double>();
            if (obj.contains("confidence_std") && !obj["confidence_std"].is_null())
                ex.confidence_std = obj["confidence_std"].get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw DataError(where + ": " + e.what());
        }
        detail::add_checked(ds, std::move(ex), where);
    }
    return ds;
}

inline Dataset read_dataset(const std::filesystem::path& path, FileFormat format) {
    return format == FileFormat::tsv ? read_dataset_tsv(path) : read_dataset_jsonl(path);
}

inline void write_dataset_tsv(const Dataset& ds, const std::filesystem::path& path,
                              bool header = false) {
    auto out = detail::open_output(path);
    if (header) out << kTsvHeader << '\n';
    for (const Example& ex : ds.examples()) {
        out << ex.id << '\t' << ex.language << '\t'
            << (ex.score ? format_double(*ex.score) : "") << '\t' << to_string(ex.origin) << '\t'
            << (ex.confidence_std ? format_double(*ex.confidence_std) : "") << '\t'
            << detail::sanitize_tsv_text(ex.text) << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

inline void write_dataset_jsonl(const Dataset& ds, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    for (const Example& ex : ds.examples()) {
        nlohmann::json obj;
        obj["id"] = ex.id;
        obj["language"] = ex.language;
        obj["text"] = ex.text;
        obj["origin"] = std::string(to_string(ex.origin));
        if (ex.score) obj["score"] = *ex.score;
        if (ex.confidence_std) obj["confidence_std"] = *ex.confidence_std;
        out << obj.dump() << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

inline void write_dataset(const Dataset& ds, const std::filesystem::path& path, FileFormat format,
                          bool header = false) {
    if (format == FileFormat::tsv)
        write_dataset_tsv(ds, path, header);
    else
        write_dataset_jsonl(ds, path);
}

// Predictions file: `id<TAB>prediction`, one row per example.
inline void write_predictions(const std::map<std::string, double>& preds,
                              const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    for (const auto& [id, value] : preds) out << id << '\t' << format_double(value) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

inline std::map<std::string, double> read_predictions(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    std::map<std::string, double> preds;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        auto fields = detail::split_tsv(line);
        if (fields.size() != 2)
            throw DataError(where + ": expected 2 tab-separated columns, got " +
                            std::to_string(fields.size()));
        double v = parse_double_field(fields[1], where + " prediction");
        if (!preds.emplace(std::string(fields[0]), v).second)
            throw DataError(where + ": duplicate prediction id \"" + std::string(fields[0]) + "\"");
    }
    return preds;
}

} // namespace selftrain
