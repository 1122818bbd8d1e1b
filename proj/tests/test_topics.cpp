#include <gtest/gtest.h>

#include <sstream>

#include "stancedyn/topics.hpp"
#include "support.hpp"

using namespace stancedyn;
using testing_support::rec;

namespace {

TopicLexicon demo() {
    std::istringstream in("topic,stance,veracity,phrase\n"
                          "vaccine mandate,anti,genuine,vaccine mandate\n"
                          "vaccine mandate,anti,genuine,forced vaccination\n"
                          "microchips,anti,falsehood,microchip\n"
                          "side effects,both,genuine,side effects\n"
                          "pro general,pro,none,get vaccinated\n");
    return load_lexicon(in);
}

std::vector<std::string> topics_of(const std::vector<TopicTag>& tags, const TopicLexicon& lex) {
    std::vector<std::string> out;
    for (const auto& t : tags) out.push_back(lex.entry(t).topic);
    return out;
}

} // namespace

TEST(Normalize, StripsNoise) {
    EXPECT_EQ(normalize_text("No VACCINE-Mandate!! @gov https://x.y/z"), "no vaccine mandate");
    EXPECT_EQ(normalize_text("   "), "");
}

TEST(Tagging, SpecExamples) {
    const auto lex = demo();
    EXPECT_EQ(topics_of(tag_tweet("no vaccine mandate for me", Stance::Anti, lex), lex),
              std::vector<std::string>{"vaccine mandate"});
    EXPECT_EQ(lex.entry(tag_tweet("no vaccine mandate for me", Stance::Anti, lex)[0]).veracity, Veracity::Genuine);
    EXPECT_TRUE(tag_tweet("no vaccine mandate for me", Stance::Pro, lex).empty());
    EXPECT_EQ(topics_of(tag_tweet("Vaccine mandate = microchip implants", Stance::Anti, lex), lex),
              (std::vector<std::string>{"microchips", "vaccine mandate"}));
}

TEST(Tagging, TokenBoundariesAndBoth) {
    const auto lex = demo();
    EXPECT_TRUE(tag_tweet("microchipped", Stance::Anti, lex).empty());
    EXPECT_EQ(tag_tweet("side effects are rare", Stance::Pro, lex).size(), 1u);
    EXPECT_EQ(tag_tweet("side effects are rare", Stance::Anti, lex).size(), 1u);
    EXPECT_TRUE(tag_tweet("side effects", Stance::Neutral, lex).empty());
}

TEST(Lexicon, Errors) {
    std::istringstream bad_stance("topic,stance,veracity,phrase\nx,maybe,none,y\n");
    EXPECT_THROW(load_lexicon(bad_stance), DataError);
    std::istringstream conflict("topic,stance,veracity,phrase\nx,anti,none,y\nx,anti,genuine,z\n");
    EXPECT_THROW(load_lexicon(conflict), DataError);
    std::istringstream empty_phrase("topic,stance,veracity,phrase\nx,anti,none,!!!\n");
    EXPECT_THROW(load_lexicon(empty_phrase), DataError);
}

TEST(Expected, SpecValues) {
    EXPECT_DOUBLE_EQ(expected_counts(0.3, {100})[0], 30.0);
    EXPECT_DOUBLE_EQ(expected_counts(1.0, {77})[0], 77.0);
    EXPECT_DOUBLE_EQ(expected_counts(0.0, {77})[0], 0.0);
    EXPECT_THROW(expected_counts(1.5, {1}), std::domain_error);
}

TEST(Veracity, CountsWithOverlap) {
    const auto lex = demo();
    std::size_t g = 0, f = 0;
    for (std::size_t i = 0; i < lex.entries().size(); ++i) {
        if (lex.entries()[i].veracity == Veracity::Genuine) g = i;
        if (lex.entries()[i].veracity == Veracity::Falsehood) f = i;
    }
    const std::vector<std::vector<TopicTag>> tweets{{{g}}, {{f}}, {{f}, {g}}, {}};
    const auto c = count_veracity(tweets, lex);
    EXPECT_EQ(c.genuine, 2);
    EXPECT_EQ(c.falsehood, 2);
    EXPECT_EQ(c.unclassified, 1);
    const auto none = count_veracity(std::vector<std::vector<TopicTag>>(5), lex);
    EXPECT_EQ(none.genuine + none.falsehood, 0);
    EXPECT_EQ(none.unclassified, 5);
}

TEST(Report, PartitionConservation) {
    const auto lex = demo();
    std::vector<StanceRecord> recs;
    const char* texts[] = {"vaccine mandate", "microchip and forced vaccination", "side effects", "get vaccinated now", ""};
    for (int i = 0; i < 200; ++i) {
        auto r = rec("t" + std::to_string(i), "u" + std::to_string(i % 13), i % 9, i % 3 ? Stance::Anti : Stance::Pro);
        if (i % 5 != 4) r.text = texts[i % 5];
        recs.push_back(r);
    }
    const auto ds = Dataset::build(recs);
    std::map<std::string, std::string> groups;
    for (int u = 0; u < 13; ++u) groups["u" + std::to_string(u)] = u % 3 == 0 ? "a" : u % 3 == 1 ? "b" : "c";
    const auto rep = topic_report(ds, lex, groups, Denominator::Dataset, 2);
    std::map<std::pair<std::string, Stance>, double> exp_sum;
    std::map<std::pair<std::string, Stance>, std::int64_t> obs_sum;
    for (const auto& r : rep.rows) {
        exp_sum[{r.topic, r.stance}] += r.expected;
        obs_sum[{r.topic, r.stance}] += r.observed;
    }
    for (const auto& [k, e] : exp_sum) EXPECT_NEAR(e, static_cast<double>(obs_sum[k]), 1e-9);
}

TEST(Report, DualDenominatorIgnoresUngrouped) {
    const auto lex = demo();
    auto a = rec("1", "in", 0, Stance::Anti);
    a.text = "vaccine mandate";
    auto b = rec("2", "out", 0, Stance::Anti);
    b.text = "vaccine mandate";
    const auto ds = Dataset::build({a, b});
    const std::map<std::string, std::string> groups{{"in", "g"}};
    const auto dual = topic_report(ds, lex, groups, Denominator::Dual);
    const auto all = topic_report(ds, lex, groups, Denominator::Dataset);
    EXPECT_DOUBLE_EQ(dual.anti_share.at("g"), 1.0);
    EXPECT_DOUBLE_EQ(all.anti_share.at("g"), 0.5);
}
