#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "selftrain/corpus.hpp"
#include "selftrain/ensemble.hpp"
#include "selftrain/error.hpp"

namespace selftrain {

// Confidence filtering and per-cell balancing for dataset expansion.
struct PseudoLabelConfig {
    double std_threshold = 0.05;           // strict: kept iff std < threshold
    std::size_t cap_per_cell = 10000;      // per (language, score bin)
    std::vector<double> bin_edges = {1.0, 2.0, 3.0, 4.0, 5.0};
    // overflow policy: lowest std first, ties by id (the only policy)

    void validate() const {
        if (!(std_threshold > 0.0)) throw DataError("std_threshold must be positive");
        if (bin_edges.size() < 2) throw DataError("need at least two bin edges");
        for (std::size_t i = 1; i < bin_edges.size(); ++i)
            if (!(bin_edges[i] > bin_edges[i - 1]))
                throw DataError("bin edges must be strictly ascending");
        if (bin_edges.front() != 1.0 || bin_edges.back() != 5.0)
            throw DataError("bin edges must span [1, 5]");
    }
};

struct ScoredExample {
    Example example; // the unlabeled record, untouched
    double mean = 0.0;
    double stddev = 0.0;
};

// Scores every unlabeled example with the ensemble; order preserved.
inline std::vector<ScoredExample> score_unlabeled(const EnsembleModel& ens,
                                                  const Dataset& unlabeled) {
    std::vector<ScoredExample> scored;
    scored.reserve(unlabeled.size());
    for (const Example& ex : unlabeled.examples()) {
        if (ex.score)
            throw DataError("unlabeled example \"" + ex.id + "\" already carries a score");
        const EnsemblePrediction p =
            ensemble_predict_counts(ens, featurize(ex.text, ens.feature_config));
        scored.push_back({ex, p.mean, p.stddev});
    }
    return scored;
}

// Keeps exactly the items whose ensemble std is strictly below the
// threshold; an item at the threshold is dropped. Order preserved.
inline std::vector<ScoredExample> confidence_filter(const std::vector<ScoredExample>& scored,
                                                    const PseudoLabelConfig& cfg) {
    std::vector<ScoredExample> kept;
    for (const ScoredExample& s : scored)
        if (s.stddev < cfg.std_threshold) kept.push_back(s);
    return kept;
}

// Bin index for a mean under half-open unit bins [e0,e1), [e1,e2), ...,
// with the top bin closed. Means outside [e0, elast] are clamped for
// binning only; stored scores keep the raw mean.
inline std::size_t bin_index(double mean, const std::vector<double>& edges) {
    const double clamped = std::clamp(mean, edges.front(), edges.back());
    const std::size_t bins = edges.size() - 1;
    for (std::size_t i = 0; i + 1 < bins; ++i)
        if (clamped < edges[i + 1]) return i;
    return bins - 1;
}

struct CellOccupancy {
    std::string language;
    std::size_t bin = 0;
    double bin_lo = 0.0;
    double bin_hi = 0.0;
    std::size_t kept = 0;
    std::size_t dropped_overflow = 0;
};

// Enforces the per-(language, bin) cap. Overflowing cells keep their
// cap_per_cell lowest-std items, ties broken by id, so the surviving set is
// independent of input order; survivors come out in input order.
inline std::vector<ScoredExample> stratified_cap(const std::vector<ScoredExample>& kept,
                                                 const PseudoLabelConfig& cfg,
                                                 std::vector<CellOccupancy>* occupancy = nullptr) {
    cfg.validate();
    using CellKey = std::pair<std::string, std::size_t>;
    std::map<CellKey, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < kept.size(); ++i)
        cells[{kept[i].example.language, bin_index(kept[i].mean, cfg.bin_edges)}].push_back(i);

    std::vector<bool> survives(kept.size(), true);
    if (occupancy) occupancy->clear();
    for (auto& [key, indices] : cells) {
        std::size_t dropped = 0;
        if (indices.size() > cfg.cap_per_cell) {
            std::vector<std::size_t> order = indices;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return std::tie(kept[a].stddev, kept[a].example.id) <
                       std::tie(kept[b].stddev, kept[b].example.id);
            });
            for (std::size_t pos = cfg.cap_per_cell; pos < order.size(); ++pos)
                survives[order[pos]] = false;
            dropped = order.size() - cfg.cap_per_cell;
        }
        if (occupancy)
            occupancy->push_back({key.first, key.second, cfg.bin_edges[key.second],
                                  cfg.bin_edges[key.second + 1], indices.size() - dropped, dropped});
    }

    std::vector<ScoredExample> out;
    out.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i)
        if (survives[i]) out.push_back(kept[i]);
    return out;
}

// Merges capped pseudo-labeled items into the original dataset. Originals
// pass through untouched; each pseudo record stores the raw ensemble mean
// as its score and the ensemble std as confidence_std.
inline Dataset expand_dataset(const Dataset& original, const std::vector<ScoredExample>& capped) {
    for (const ScoredExample& s : capped)
        if (original.contains_id(s.example.id))
            throw DataError("id collision between original and pseudo data: \"" + s.example.id +
                            "\"");
    Dataset expanded;
    for (const Example& ex : original.examples()) expanded.add(ex);
    for (const ScoredExample& s : capped) {
        Example ex = s.example;
        ex.origin = Origin::pseudo;
        ex.score = s.mean;
        ex.confidence_std = s.stddev;
        expanded.add(std::move(ex));
    }
    return expanded;
}

// Splits an expanded dataset back into its gold and pseudo components
// (order preserved); the final training stage fold-plans the gold part and
// feeds the pseudo part in as extra training data.
inline std::pair<Dataset, Dataset> partition_by_origin(const Dataset& ds) {
    Dataset gold, pseudo;
    for (const Example& ex : ds.examples()) {
        if (ex.origin == Origin::gold)
            gold.add(ex);
        else
            pseudo.add(ex);
    }
    return {std::move(gold), std::move(pseudo)};
}

} // namespace selftrain
