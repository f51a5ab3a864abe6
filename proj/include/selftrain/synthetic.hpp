#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "selftrain/corpus.hpp"
#include "selftrain/error.hpp"
#include "selftrain/rng.hpp"

namespace selftrain {

// Synthetic benchmark corpus: a hidden linear scorer over a per-language
// vocabulary. Each text is a bag of tokens; its score is a clamped affine
// function of the hidden token weights plus optional gaussian noise. The
// generator doubles as the oracle for trainer tests, since the target
// function is known exactly.
struct SyntheticConfig {
    std::vector<std::string> languages = {"en", "es", "pt", "it"};
    std::size_t vocab_per_language = 150;
    std::size_t min_tokens = 8;
    std::size_t max_tokens = 14;
    double weight_scale = 0.45; // token weights uniform in [-scale, scale]
    double noise_std = 0.15;    // label noise for labeled samples
    std::uint64_t seed = 7;
};

class SyntheticGenerator {
public:
    explicit SyntheticGenerator(SyntheticConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
        if (cfg_.languages.empty()) throw DataError("synthetic corpus needs at least one language");
        if (cfg_.min_tokens < 1 || cfg_.max_tokens < cfg_.min_tokens)
            throw DataError("bad token count range");
        for (const std::string& lang : cfg_.languages) {
            auto& vocab = vocab_[lang];
            while (vocab.size() < cfg_.vocab_per_language) {
                std::string token = lang;
                const std::size_t len = 3 + rng_.below(4);
                for (std::size_t i = 0; i < len; ++i)
                    token.push_back(static_cast<char>('a' + rng_.below(26)));
                if (weights_.emplace(token, 0.0).second) vocab.push_back(token);
            }
        }
        for (auto& [token, w] : weights_) w = (2.0 * rng_.unit() - 1.0) * cfg_.weight_scale;
    }

    // Score the generator would assign a text before noise and clamping has
    // been applied at sampling time; usable as an oracle on any token list.
    double clean_score(std::string_view text) const {
        double raw = 3.0;
        for (std::string_view token : split_tokens(text)) {
            auto it = weights_.find(std::string(token));
            if (it != weights_.end()) raw += it->second;
        }
        return std::clamp(raw, 1.0, 5.0);
    }

    Dataset labeled(std::size_t n, std::string_view id_prefix) {
        return sample(n, id_prefix, true, Origin::gold);
    }

    Dataset unlabeled(std::size_t n, std::string_view id_prefix) {
        return sample(n, id_prefix, false, Origin::gold);
    }

    const SyntheticConfig& config() const { return cfg_; }

private:
    Dataset sample(std::size_t n, std::string_view id_prefix, bool with_score, Origin origin) {
        Dataset ds;
        for (std::size_t i = 0; i < n; ++i) {
            Example ex;
            char idbuf[64];
            std::snprintf(idbuf, sizeof(idbuf), "%s%06zu", std::string(id_prefix).c_str(), i);
            ex.id = idbuf;
            ex.language = cfg_.languages[rng_.below(cfg_.languages.size())];
            const auto& vocab = vocab_.at(ex.language);
            const std::size_t len =
                cfg_.min_tokens + rng_.below(cfg_.max_tokens - cfg_.min_tokens + 1);
            double raw = 3.0;
            for (std::size_t t = 0; t < len; ++t) {
                const std::string& token = vocab[rng_.below(vocab.size())];
                if (t > 0) ex.text.push_back(' ');
                ex.text += token;
                raw += weights_.at(token);
            }
            if (with_score) {
                if (cfg_.noise_std > 0.0) raw += rng_.gaussian() * cfg_.noise_std;
                ex.score = std::clamp(raw, 1.0, 5.0);
            }
            ex.origin = origin;
            ds.add(std::move(ex));
        }
        return ds;
    }

    SyntheticConfig cfg_;
    Rng rng_;
    std::map<std::string, std::vector<std::string>> vocab_;
    std::map<std::string, double> weights_;
};

} // namespace selftrain
