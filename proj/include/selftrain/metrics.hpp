#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "selftrain/corpus.hpp"
#include "selftrain/error.hpp"

namespace selftrain {

// Product-moment correlation, or nullopt when undefined (fewer than two
// points, or zero variance on either side). Two passes: means first, then
// centered sums, which keeps the computation stable for near-constant data.
inline std::optional<double> try_pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw DataError("pearson: length mismatch (" + std::to_string(x.size()) + " vs " +
                        std::to_string(y.size()) + ")");
    const std::size_t n = x.size();
    if (n < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    auto r = try_pearson(x, y);
    if (!r)
        throw UndefinedCorrelation("pearson undefined: need at least two points "
                                   "with nonzero variance on both sides");
    return *r;
}

// Pooled and per-group correlations for one system.
// per_group_r holds only groups where the correlation is defined; groups
// that fail the preconditions are listed in undefined_groups instead and
// are excluded from the macro average rather than zero-filled.
struct EvalReport {
    double overall_r = 0.0;
    std::map<std::string, double> per_group_r;
    double macro_avg_r = 0.0;
    std::size_t n_overall = 0;
    std::map<std::string, std::size_t> n_per_group;
    std::vector<std::string> undefined_groups;
};

inline double macro_average(const std::map<std::string, double>& per_group_r) {
    if (per_group_r.empty()) throw UndefinedCorrelation("macro average of zero groups");
    double sum = 0.0;
    for (const auto& [group, r] : per_group_r) sum += r;
    return sum / static_cast<double>(per_group_r.size());
}

using GroupSelector = std::function<std::string(const Example&)>;

inline std::string group_by_language(const Example& ex) { return ex.language; }

// Scores predictions against gold labels, pooled and per group.
// Every gold example must carry a score and have a prediction; extra
// predictions are ignored.
inline EvalReport evaluate(const std::map<std::string, double>& predictions, const Dataset& gold,
                           const GroupSelector& group_by = group_by_language) {
    std::vector<std::string> missing;
    for (const Example& ex : gold.examples()) {
        if (!ex.score) throw DataError("gold example \"" + ex.id + "\" has no score");
        if (!predictions.count(ex.id)) missing.push_back(ex.id);
    }
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        std::string msg = "missing predictions for " + std::to_string(missing.size()) + " ids:";
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
        if (missing.size() > 20) msg += " ...";
        throw DataError(msg);
    }

    std::vector<double> all_gold, all_pred;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const Example& ex : gold.examples()) {
        const double g = *ex.score;
        const double p = predictions.at(ex.id);
        all_gold.push_back(g);
        all_pred.push_back(p);
        auto& [gs, ps] = groups[group_by(ex)];
        gs.push_back(g);
        ps.push_back(p);
    }

    EvalReport report;
    report.n_overall = all_gold.size();
    report.overall_r = pearson(all_gold, all_pred);
    for (const auto& [group, pair] : groups) {
        report.n_per_group[group] = pair.first.size();
        if (auto r = try_pearson(pair.first, pair.second))
            report.per_group_r[group] = *r;
        else
            report.undefined_groups.push_back(group);
    }
    report.macro_avg_r = macro_average(report.per_group_r);
    return report;
}

// One system's standing in the side-by-side ranking.
struct SystemRank {
    std::string name;
    double overall_r = 0.0;
    double macro_avg_r = 0.0;
    int rank_overall = 0; // 1-based
    int rank_macro = 0;
    bool rank_inversion = false;
};

struct DisparityReport {
    std::vector<SystemRank> rows; // ordered by rank_overall
};

// Ranks systems by pooled correlation and by macro average side by side,
// flagging systems whose two ranks disagree. Ties order by system name.
inline DisparityReport disparity_report(const std::vector<std::pair<std::string, EvalReport>>& systems) {
    if (systems.empty()) throw DataError("disparity report needs at least one system");

    auto group_keys = [](const EvalReport& r) {
        std::set<std::string> keys;
        for (const auto& [g, n] : r.n_per_group) keys.insert(g);
        return keys;
    };
    const auto reference = group_keys(systems.front().second);
    for (const auto& [name, report] : systems) {
        if (group_keys(report) != reference)
            throw DataError("system \"" + name + "\" has a different group set");
    }

    DisparityReport out;
    for (const auto& [name, report] : systems)
        out.rows.push_back({name, report.overall_r, report.macro_avg_r, 0, 0, false});

    auto assign_ranks = [&](auto key, auto setter) {
        std::vector<std::size_t> order(out.rows.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (key(out.rows[a]) != key(out.rows[b])) return key(out.rows[a]) > key(out.rows[b]);
            return out.rows[a].name < out.rows[b].name;
        });
        for (std::size_t pos = 0; pos < order.size(); ++pos)
            setter(out.rows[order[pos]], static_cast<int>(pos) + 1);
    };
    assign_ranks([](const SystemRank& r) { return r.overall_r; },
                 [](SystemRank& r, int rank) { r.rank_overall = rank; });
    assign_ranks([](const SystemRank& r) { return r.macro_avg_r; },
                 [](SystemRank& r, int rank) { r.rank_macro = rank; });

    for (SystemRank& row : out.rows) row.rank_inversion = row.rank_overall != row.rank_macro;
    std::sort(out.rows.begin(), out.rows.end(), [](const SystemRank& a, const SystemRank& b) {
        return a.rank_overall < b.rank_overall;
    });
    return out;
}

inline void render_eval_report_tsv(std::ostream& out, const EvalReport& report) {
    out << "group\tn\tr\n";
    out << "ALL\t" << report.n_overall << '\t' << report.overall_r << '\n';
    for (const auto& [group, r] : report.per_group_r)
        out << group << '\t' << report.n_per_group.at(group) << '\t' << r << '\n';
    for (const auto& group : report.undefined_groups)
        out << group << '\t' << report.n_per_group.at(group) << '\t' << "undefined" << '\n';
    out << "AVG\t" << report.n_overall << '\t' << report.macro_avg_r << '\n';
}

inline void render_eval_report_text(std::ostream& out, const EvalReport& report) {
    out << std::left << std::setw(12) << "group" << std::right << std::setw(8) << "n"
        << std::setw(10) << "r" << '\n';
    auto row = [&](std::string_view name, std::size_t n, double r) {
        out << std::left << std::setw(12) << name << std::right << std::setw(8) << n
            << std::setw(10) << std::fixed << std::setprecision(4) << r << '\n';
    };
    row("ALL", report.n_overall, report.overall_r);
    for (const auto& [group, r] : report.per_group_r) row(group, report.n_per_group.at(group), r);
    for (const auto& group : report.undefined_groups)
        out << std::left << std::setw(12) << group << std::right << std::setw(8)
            << report.n_per_group.at(group) << std::setw(10) << "undef" << '\n';
    row("AVG", report.n_overall, report.macro_avg_r);
    if (!report.undefined_groups.empty())
        out << "warning: " << report.undefined_groups.size()
            << " group(s) with undefined correlation excluded from AVG\n";
    out.unsetf(std::ios::fixed);
}

inline void render_disparity_tsv(std::ostream& out, const DisparityReport& report) {
    out << "system\toverall_r\trank_overall\tmacro_avg_r\trank_macro\tinversion\n";
    for (const SystemRank& row : report.rows)
        out << row.name << '\t' << row.overall_r << '\t' << row.rank_overall << '\t'
            << row.macro_avg_r << '\t' << row.rank_macro << '\t' << (row.rank_inversion ? "yes" : "no")
            << '\n';
}

inline void render_disparity_text(std::ostream& out, const DisparityReport& report) {
    out << std::left << std::setw(28) << "system" << std::right << std::setw(10) << "overall"
        << std::setw(6) << "rk" << std::setw(10) << "macro" << std::setw(6) << "rk"
        << "  flag" << '\n';
    for (const SystemRank& row : report.rows) {
        out << std::left << std::setw(28) << row.name << std::right << std::setw(10) << std::fixed
            << std::setprecision(4) << row.overall_r << std::setw(6) << row.rank_overall
            << std::setw(10) << row.macro_avg_r << std::setw(6) << row.rank_macro
            << (row.rank_inversion ? "  <>" : "") << '\n';
    }
    out.unsetf(std::ios::fixed);
}

} // namespace selftrain
