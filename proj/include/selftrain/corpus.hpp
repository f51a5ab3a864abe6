#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "selftrain/error.hpp"
#include "selftrain/text.hpp"

namespace selftrain {

enum class Origin { gold, pseudo };

constexpr std::string_view to_string(Origin o) {
    return o == Origin::gold ? "gold" : "pseudo";
}

inline Origin origin_from_string(std::string_view s) {
    if (s == "gold") return Origin::gold;
    if (s == "pseudo") return Origin::pseudo;
    throw DataError("unknown origin value: \"" + std::string(s) + "\"");
}

// One text record. `score` holds the gold annotation for labeled data, or
// the ensemble mean for pseudo-labeled records; `confidence_std` is the
// ensemble standard deviation and is present exactly when origin == pseudo.
// Pseudo scores keep the raw ensemble mean and may fall outside [1, 5].
struct Example {
    std::string id;
    std::string text;
    std::string language; // lowercase two-letter code
    std::optional<double> score;
    Origin origin = Origin::gold;
    std::optional<double> confidence_std;
};

inline bool valid_language_code(std::string_view lang) {
    return lang.size() == 2 && lang[0] >= 'a' && lang[0] <= 'z' && lang[1] >= 'a' && lang[1] <= 'z';
}

// Checks the per-record invariants shared by every ingestion path.
// Returns the reason a record is invalid, or nullopt when it is fine.
inline std::optional<std::string> example_violation(const Example& ex) {
    if (ex.id.empty()) return "empty id";
    if (!valid_language_code(ex.language)) return "bad language code \"" + ex.language + "\"";
    if (ex.score && !std::isfinite(*ex.score)) return "non-finite score";
    if (ex.origin == Origin::gold) {
        if (ex.score && (*ex.score < 1.0 || *ex.score > 5.0))
            return "score out of range [1,5]";
        if (ex.confidence_std) return "confidence_std set on gold record";
    } else {
        if (!ex.score) return "pseudo record without score";
        if (!ex.confidence_std) return "pseudo record without confidence_std";
    }
    if (ex.confidence_std && (!std::isfinite(*ex.confidence_std) || *ex.confidence_std < 0.0))
        return "confidence_std must be finite and nonnegative";
    return std::nullopt;
}

// Ordered collection of examples with per-language bookkeeping.
// Ids are unique; language_counts always equals the histogram over examples.
class Dataset {
public:
    Dataset() = default;

    void add(Example ex) {
        if (auto why = example_violation(ex)) throw DataError("invalid example \"" + ex.id + "\": " + *why);
        if (!ids_.insert(ex.id).second) throw DataError("duplicate id \"" + ex.id + "\"");
        ++language_counts_[ex.language];
        examples_.push_back(std::move(ex));
    }

    const std::vector<Example>& examples() const { return examples_; }
    const std::map<std::string, std::size_t>& language_counts() const { return language_counts_; }
    std::size_t size() const { return examples_.size(); }
    bool empty() const { return examples_.empty(); }
    bool contains_id(const std::string& id) const { return ids_.count(id) != 0; }

    const Example& operator[](std::size_t i) const { return examples_[i]; }

private:
    std::vector<Example> examples_;
    std::map<std::string, std::size_t> language_counts_;
    std::unordered_set<std::string> ids_;
};

// Text normalization and filtering rules applied to raw records.
struct NormalizationConfig {
    std::string user_token = "@user";
    std::string url_token = "http";
    std::size_t min_chars = 20;
    std::set<std::string> language_whitelist = {"en", "es", "pt", "it", "fr",
                                                "zh", "hi", "nl", "ko", "ar"};

    void validate() const {
        if (language_whitelist.empty()) throw DataError("language whitelist must not be empty");
    }
};

namespace detail {

constexpr bool starts_with_url_prefix(std::string_view token) {
    return token.starts_with("http://") || token.starts_with("https://") ||
           token.starts_with("www.");
}

} // namespace detail

// Masks usernames and URLs:
//   - `@` followed by one or more word characters ([A-Za-z0-9_]) becomes
//     cfg.user_token, anywhere in the text;
//   - a whitespace-delimited token starting with http://, https:// or www.
//     becomes cfg.url_token wholesale.
// Everything else, hashtags included, passes through. Idempotent under the
// default tokens: "@user" re-matches to itself and "http" has no URL prefix.
inline std::string normalize_text(std::string_view text, const NormalizationConfig& cfg) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_space(text[i])) {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < text.size() && !is_space(text[end])) ++end;
        std::string_view token = text.substr(i, end - i);
        if (detail::starts_with_url_prefix(token)) {
            out += cfg.url_token;
        } else {
            for (std::size_t j = 0; j < token.size();) {
                if (token[j] == '@' && j + 1 < token.size() && is_word_char(token[j + 1])) {
                    std::size_t k = j + 1;
                    while (k < token.size() && is_word_char(token[k])) ++k;
                    out += cfg.user_token;
                    j = k;
                } else {
                    out.push_back(token[j]);
                    ++j;
                }
            }
        }
        i = end;
    }
    return out;
}

enum class DropReason { none, too_short, language };

constexpr std::string_view to_string(DropReason r) {
    switch (r) {
    case DropReason::too_short: return "too_short";
    case DropReason::language: return "language";
    default: return "none";
    }
}

struct FilterDecision {
    bool keep = true;
    DropReason reason = DropReason::none;
};

// Decides keep/drop for an already-normalized record. Length is counted in
// unicode scalar values. Depends only on (text length, language).
inline FilterDecision filter_record(const Example& ex, const NormalizationConfig& cfg) {
    if (scalar_count(ex.text) < cfg.min_chars) return {false, DropReason::too_short};
    if (!cfg.language_whitelist.count(ex.language)) return {false, DropReason::language};
    return {true, DropReason::none};
}

struct LanguageStat {
    std::string language;
    std::size_t count = 0;
    double percentage = 0.0;
};

// Per-language counts and shares, largest first (ties by language code).
inline std::vector<LanguageStat> corpus_stats(const Dataset& ds) {
    std::vector<LanguageStat> rows;
    if (ds.empty()) return rows;
    const double total = static_cast<double>(ds.size());
    for (const auto& [lang, count] : ds.language_counts())
        rows.push_back({lang, count, 100.0 * static_cast<double>(count) / total});
    std::sort(rows.begin(), rows.end(), [](const LanguageStat& a, const LanguageStat& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.language < b.language;
    });
    return rows;
}

} // namespace selftrain
