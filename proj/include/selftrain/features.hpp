#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "selftrain/error.hpp"
#include "selftrain/hash.hpp"
#include "selftrain/text.hpp"

namespace selftrain {

// Hashing-trick featurizer over word and character n-grams.
struct FeatureConfig {
    std::uint32_t dim = 1u << 18; // power of two
    int word_ngram_min = 1;
    int word_ngram_max = 2;
    int char_ngram_min = 3;
    int char_ngram_max = 5;
    std::uint64_t hash_seed = 42;

    void validate() const {
        if (dim < 2 || (dim & (dim - 1)) != 0)
            throw DataError("feature dim must be a power of two >= 2");
        if (word_ngram_min < 1 || word_ngram_max < word_ngram_min)
            throw DataError("word n-gram range is empty");
        if (char_ngram_min < 1 || char_ngram_max < char_ngram_min)
            throw DataError("char n-gram range is empty");
    }
};

// Sparse nonnegative counts, sorted by bucket index.
using SparseCounts = std::vector<std::pair<std::uint32_t, double>>;

namespace detail {

// Bucket for one n-gram. The hash state starts from the seed, then a tag
// byte ('w' for word, 'c' for char) and the n-gram size, so that equal byte
// sequences from different families land in independent buckets.
inline std::uint32_t ngram_bucket(char family, int n, std::string_view bytes,
                                  const FeatureConfig& cfg) {
    std::uint64_t h = fnv1a64_u64(cfg.hash_seed);
    h = fnv1a64(std::string_view(&family, 1), h);
    h = fnv1a64_u64(static_cast<std::uint64_t>(n), h);
    h = fnv1a64(bytes, h);
    return static_cast<std::uint32_t>(h & (cfg.dim - 1));
}

inline constexpr char kWordGramSep = '\x1f';

} // namespace detail

// Counts hashed n-grams of the text. Word n-grams run over whitespace
// tokens (joined by the 0x1f separator before hashing); char n-grams run
// over windows of unicode scalars, whitespace included. Deterministic for
// fixed (text, cfg); empty text maps to the empty vector.
inline SparseCounts featurize(std::string_view text, const FeatureConfig& cfg) {
    cfg.validate();
    std::unordered_map<std::uint32_t, double> counts;

    const auto tokens = split_tokens(text);
    std::string joined;
    for (int n = cfg.word_ngram_min; n <= cfg.word_ngram_max; ++n) {
        if (tokens.size() < static_cast<std::size_t>(n)) break;
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
            joined.clear();
            for (int j = 0; j < n; ++j) {
                if (j > 0) joined.push_back(detail::kWordGramSep);
                joined += tokens[i + static_cast<std::size_t>(j)];
            }
            counts[detail::ngram_bucket('w', n, joined, cfg)] += 1.0;
        }
    }

    const auto offsets = scalar_offsets(text);
    const std::size_t n_scalars = offsets.size() - 1;
    for (int n = cfg.char_ngram_min; n <= cfg.char_ngram_max; ++n) {
        if (n_scalars < static_cast<std::size_t>(n)) break;
        for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= n_scalars; ++i) {
            std::string_view window =
                text.substr(offsets[i], offsets[i + static_cast<std::size_t>(n)] - offsets[i]);
            counts[detail::ngram_bucket('c', n, window, cfg)] += 1.0;
        }
    }

    SparseCounts out(counts.begin(), counts.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace selftrain
