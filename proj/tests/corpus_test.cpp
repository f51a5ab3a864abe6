#include "selftrain/corpus.hpp"

#include <gtest/gtest.h>

#include <string>

#include "selftrain/rng.hpp"
#include "support/normalization_cases.hpp"

namespace selftrain {
namespace {

Example make_example(std::string id, std::string text, std::string lang = "en") {
    Example ex;
    ex.id = std::move(id);
    ex.text = std::move(text);
    ex.language = std::move(lang);
    return ex;
}

TEST(NormalizeText, GoldenCases) {
    const NormalizationConfig cfg;
    for (const auto& c : testsupport::kNormalizationCases)
        EXPECT_EQ(normalize_text(c.input, cfg), c.expected) << "input: " << c.input;
}

TEST(NormalizeText, CustomTokens) {
    NormalizationConfig cfg;
    cfg.user_token = "<user>";
    cfg.url_token = "<url>";
    EXPECT_EQ(normalize_text("@bob sent www.a.b", cfg), "<user> sent <url>");
}

// Random byte soup mixing handles, URLs, unicode and whitespace; the second
// application must be the identity.
TEST(NormalizeText, IdempotenceFuzz) {
    const NormalizationConfig cfg;
    Rng rng(2024);
    const std::string pieces[] = {"@", "a", "Z", "9", "_", " ", "\t", "http://", "https://",
                                  "www.", "http", ".", ",", "#", "\xC3\xA9", "\xE6\x97\xA5",
                                  "user", "@user", "x.co/", ":", "/"};
    for (int iter = 0; iter < 2000; ++iter) {
        std::string text;
        const std::size_t n = rng.below(12);
        for (std::size_t i = 0; i < n; ++i)
            text += pieces[rng.below(std::size(pieces))];
        const std::string once = normalize_text(text, cfg);
        const std::string twice = normalize_text(once, cfg);
        ASSERT_EQ(once, twice) << "not idempotent on: " << text;
    }
}

TEST(FilterRecord, LengthBoundary) {
    const NormalizationConfig cfg;
    const std::string nineteen(19, 'a');
    const std::string twenty(20, 'a');
    const auto short_decision = filter_record(make_example("a", nineteen), cfg);
    EXPECT_FALSE(short_decision.keep);
    EXPECT_EQ(short_decision.reason, DropReason::too_short);
    EXPECT_TRUE(filter_record(make_example("b", twenty), cfg).keep);
}

TEST(FilterRecord, LengthCountsScalarsNotBytes) {
    const NormalizationConfig cfg;
    std::string cjk;
    for (int i = 0; i < 20; ++i) cjk += "\xE6\x97\xA5"; // 20 scalars, 60 bytes
    EXPECT_TRUE(filter_record(make_example("a", cjk, "zh"), cfg).keep);
    std::string nineteen_cjk;
    for (int i = 0; i < 19; ++i) nineteen_cjk += "\xE6\x97\xA5";
    EXPECT_FALSE(filter_record(make_example("b", nineteen_cjk, "zh"), cfg).keep);
}

TEST(FilterRecord, LanguageWhitelist) {
    const NormalizationConfig cfg;
    const std::string long_text(50, 'x');
    const auto decision = filter_record(make_example("a", long_text, "de"), cfg);
    EXPECT_FALSE(decision.keep);
    EXPECT_EQ(decision.reason, DropReason::language);
    EXPECT_TRUE(filter_record(make_example("b", long_text, "nl"), cfg).keep);
}

TEST(FilterRecord, TooShortTakesPrecedence) {
    const NormalizationConfig cfg;
    const auto decision = filter_record(make_example("a", "tiny", "de"), cfg);
    EXPECT_EQ(decision.reason, DropReason::too_short);
}

// Decisions depend only on (length, language): id, score and origin are
// irrelevant.
TEST(FilterRecord, PureInLengthAndLanguage) {
    const NormalizationConfig cfg;
    Example plain = make_example("a", std::string(25, 'x'), "en");
    Example decorated = make_example("b", std::string(25, 'y'), "en");
    decorated.score = 4.2;
    EXPECT_EQ(filter_record(plain, cfg).keep, filter_record(decorated, cfg).keep);
}

TEST(Dataset, RejectsDuplicateIds) {
    Dataset ds;
    ds.add(make_example("a", "text one"));
    EXPECT_THROW(ds.add(make_example("a", "text two")), DataError);
}

TEST(Dataset, LanguageCountsMatchHistogram) {
    Dataset ds;
    ds.add(make_example("a", "t", "en"));
    ds.add(make_example("b", "t", "es"));
    ds.add(make_example("c", "t", "en"));
    std::map<std::string, std::size_t> expected;
    for (const Example& ex : ds.examples()) ++expected[ex.language];
    EXPECT_EQ(ds.language_counts(), expected);
}

TEST(Dataset, RejectsInvalidExamples) {
    Dataset ds;
    Example bad_score = make_example("a", "t");
    bad_score.score = 5.5;
    EXPECT_THROW(ds.add(bad_score), DataError);

    Example gold_with_std = make_example("b", "t");
    gold_with_std.confidence_std = 0.01;
    EXPECT_THROW(ds.add(gold_with_std), DataError);

    Example pseudo_without_std = make_example("c", "t");
    pseudo_without_std.origin = Origin::pseudo;
    pseudo_without_std.score = 3.0;
    EXPECT_THROW(ds.add(pseudo_without_std), DataError);

    Example bad_lang = make_example("d", "t", "EN");
    EXPECT_THROW(ds.add(bad_lang), DataError);
}

TEST(Dataset, PseudoScoreMayExceedGoldRange) {
    Dataset ds;
    Example pseudo = make_example("a", "t");
    pseudo.origin = Origin::pseudo;
    pseudo.score = 5.3; // raw ensemble mean
    pseudo.confidence_std = 0.02;
    EXPECT_NO_THROW(ds.add(pseudo));
}

TEST(CorpusStats, TableProportions) {
    // Scaled-down shares mirroring the corpus distribution table.
    const std::map<std::string, std::size_t> counts = {
        {"en", 794}, {"es", 224}, {"pt", 163}, {"it", 25}, {"fr", 66},
        {"zh", 40},  {"hi", 27},  {"nl", 11},  {"ko", 83}, {"ar", 129}};
    Dataset ds;
    int next = 0;
    for (const auto& [lang, n] : counts)
        for (std::size_t i = 0; i < n; ++i)
            ds.add(make_example("id" + std::to_string(next++), "text", lang));
    const auto stats = corpus_stats(ds);
    ASSERT_EQ(stats.size(), counts.size());
    EXPECT_EQ(stats.front().language, "en"); // largest first
    EXPECT_NEAR(stats.front().percentage, 50.9, 0.1);
    double total = 0.0;
    for (const auto& row : stats) total += row.percentage;
    EXPECT_NEAR(total, 100.0, 0.1);
}

TEST(CorpusStats, SingleLanguageIsHundredPercent) {
    Dataset ds;
    ds.add(make_example("a", "t"));
    const auto stats = corpus_stats(ds);
    ASSERT_EQ(stats.size(), 1u);
    EXPECT_DOUBLE_EQ(stats.front().percentage, 100.0);
}

TEST(CorpusStats, EmptyDatasetEmptyTable) {
    EXPECT_TRUE(corpus_stats(Dataset{}).empty());
}

TEST(CorpusStats, PercentagesSumProperty) {
    Rng rng(77);
    const std::string langs[] = {"en", "es", "pt", "it", "fr"};
    for (int iter = 0; iter < 50; ++iter) {
        Dataset ds;
        const std::size_t n = 1 + rng.below(200);
        for (std::size_t i = 0; i < n; ++i)
            ds.add(make_example("id" + std::to_string(i), "text",
                                std::string(langs[rng.below(std::size(langs))])));
        double total = 0.0;
        for (const auto& row : corpus_stats(ds)) total += row.percentage;
        ASSERT_NEAR(total, 100.0, 0.1);
    }
}

} // namespace
} // namespace selftrain
