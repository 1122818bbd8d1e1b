#pragma once

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "stancedyn/csv.hpp"
#include "stancedyn/error.hpp"
#include "stancedyn/ingest.hpp"
#include "stancedyn/parallel.hpp"

namespace stancedyn {

enum class StanceBucket { Anti, Pro, Both };
enum class Veracity { Genuine, Falsehood, None };

inline std::string_view to_string(StanceBucket b) {
    switch (b) {
    case StanceBucket::Anti: return "anti";
    case StanceBucket::Pro: return "pro";
    case StanceBucket::Both: return "both";
    }
    return "?";
}

inline std::string_view to_string(Veracity v) {
    switch (v) {
    case Veracity::Genuine: return "genuine";
    case Veracity::Falsehood: return "falsehood";
    case Veracity::None: return "none";
    }
    return "?";
}

inline bool bucket_matches(StanceBucket b, Stance s) {
    return s != Stance::Neutral && (b == StanceBucket::Both || (b == StanceBucket::Anti) == (s == Stance::Anti));
}

namespace detail {

inline bool url_or_mention(std::string_view token) {
    auto starts = [&](std::string_view p) { return token.substr(0, p.size()) == p; };
    std::string lower(token.substr(0, 8));
    for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::string_view l = lower;
    return starts("@") || l.substr(0, 7) == "http://" || l.substr(0, 8) == "https://" || l.substr(0, 4) == "www.";
}

inline std::vector<std::string> split_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

} // namespace detail

/// Lowercase (ASCII), URLs and @mentions removed, punctuation turned into
/// spaces, whitespace collapsed. Non-ASCII bytes pass through untouched.
inline std::string normalize_text(std::string_view raw) {
    std::string kept;
    for (const auto& tok : detail::split_tokens(raw)) {
        if (detail::url_or_mention(tok)) continue;
        kept += tok;
        kept += ' ';
    }
    std::string out;
    bool space = true;
    for (char ch : kept) {
        const auto c = static_cast<unsigned char>(ch);
        if (c < 0x80 && (std::isspace(c) || std::ispunct(c))) {
            if (!space) out.push_back(' ');
            space = true;
        } else {
            out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
            space = false;
        }
    }
    if (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

struct TopicEntry {
    std::string topic;
    StanceBucket bucket = StanceBucket::Anti;
    Veracity veracity = Veracity::None;
    std::vector<std::string> phrases; // normalized
};

/// A topic hit on a tweet; identifies the lexicon entry.
struct TopicTag {
    std::size_t entry = 0;
    friend auto operator<=>(const TopicTag&, const TopicTag&) = default;
};

class TopicLexicon {
public:
    TopicLexicon() = default;

    explicit TopicLexicon(std::vector<TopicEntry> entries) : entries_(std::move(entries)) {
        std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
            return std::tie(a.topic, a.bucket) < std::tie(b.topic, b.bucket);
        });
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            auto& e = entries_[i];
            if (i > 0 && entries_[i - 1].topic == e.topic && entries_[i - 1].bucket == e.bucket)
                throw DataError("lexicon: duplicate topic " + e.topic + "/" + std::string(to_string(e.bucket)));
            if (e.phrases.empty()) throw DataError("lexicon: topic " + e.topic + " has no phrases");
            for (auto& p : e.phrases) {
                p = normalize_text(p);
                if (p.empty()) throw DataError("lexicon: empty phrase in topic " + e.topic);
                auto toks = detail::split_tokens(p);
                by_first_token_[toks.front()].push_back({i, std::move(toks)});
            }
        }
    }

    const std::vector<TopicEntry>& entries() const { return entries_; }
    const TopicEntry& entry(const TopicTag& t) const { return entries_.at(t.entry); }

    /// Entries whose bucket admits `stance` and any of whose phrases occurs
    /// as a contiguous token run in the normalized text. Sorted, unique.
    std::vector<TopicTag> tag(std::string_view normalized, Stance stance) const {
        std::vector<TopicTag> hits;
        if (stance == Stance::Neutral) return hits;
        const auto tokens = detail::split_tokens(normalized);
        for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
            auto it = by_first_token_.find(tokens[pos]);
            if (it == by_first_token_.end()) continue;
            for (const auto& cand : it->second) {
                if (!bucket_matches(entries_[cand.entry].bucket, stance)) continue;
                if (pos + cand.tokens.size() > tokens.size()) continue;
                if (std::equal(cand.tokens.begin(), cand.tokens.end(), tokens.begin() + static_cast<std::ptrdiff_t>(pos)))
                    hits.push_back({cand.entry});
            }
        }
        std::sort(hits.begin(), hits.end());
        hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
        return hits;
    }

private:
    struct PhraseRef {
        std::size_t entry;
        std::vector<std::string> tokens;
    };
    std::vector<TopicEntry> entries_;
    std::unordered_map<std::string, std::vector<PhraseRef>> by_first_token_;
};

/// CSV `topic,stance,veracity,phrase`, one phrase per row.
inline TopicLexicon load_lexicon(std::istream& in) {
    csv::expect_header(in, "topic,stance,veracity,phrase", "lexicon");
    std::map<std::pair<std::string, StanceBucket>, TopicEntry> grouped;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto f = csv::split(line);
        const std::string where = "lexicon line " + std::to_string(lineno);
        if (f.size() != 4) throw DataError(where + ": expected 4 fields");
        StanceBucket b;
        if (f[1] == "anti") b = StanceBucket::Anti;
        else if (f[1] == "pro") b = StanceBucket::Pro;
        else if (f[1] == "both") b = StanceBucket::Both;
        else throw DataError(where + ": bad stance '" + f[1] + "'");
        Veracity v;
        if (f[2] == "genuine") v = Veracity::Genuine;
        else if (f[2] == "falsehood") v = Veracity::Falsehood;
        else if (f[2] == "none") v = Veracity::None;
        else throw DataError(where + ": bad veracity '" + f[2] + "'");
        auto [it, fresh] = grouped.try_emplace({f[0], b}, TopicEntry{f[0], b, v, {}});
        if (!fresh && it->second.veracity != v) throw DataError(where + ": conflicting veracity for " + f[0]);
        it->second.phrases.push_back(f[3]);
    }
    std::vector<TopicEntry> entries;
    for (auto& [_, e] : grouped) entries.push_back(std::move(e));
    return TopicLexicon(std::move(entries));
}

/// Topic hits for one text, normalizing first.
inline std::vector<TopicTag> tag_tweet(std::string_view text, Stance stance, const TopicLexicon& lex) {
    return lex.tag(normalize_text(text), stance);
}

/// expected(topic) = total(topic) * share.
inline std::vector<double> expected_counts(double share, const std::vector<std::int64_t>& topic_totals) {
    if (!(share >= 0.0 && share <= 1.0)) throw std::domain_error("expected_counts: share outside [0,1]");
    std::vector<double> out;
    out.reserve(topic_totals.size());
    for (auto t : topic_totals) out.push_back(static_cast<double>(t) * share);
    return out;
}

struct VeracityCounts {
    std::int64_t genuine = 0;   // tweets with at least one genuine topic
    std::int64_t falsehood = 0; // tweets with at least one falsehood topic
    std::int64_t unclassified = 0;
    std::int64_t total = 0;
};

inline VeracityCounts count_veracity(const std::vector<std::vector<TopicTag>>& tweets, const TopicLexicon& lex) {
    VeracityCounts c;
    for (const auto& tags : tweets) {
        bool g = false, f = false;
        for (const auto& t : tags) {
            g |= lex.entry(t).veracity == Veracity::Genuine;
            f |= lex.entry(t).veracity == Veracity::Falsehood;
        }
        c.genuine += g;
        c.falsehood += f;
        c.unclassified += !g && !f;
        ++c.total;
    }
    return c;
}

struct VeracityReport {
    std::int64_t genuine_observed = 0;
    double genuine_expected = 0.0;
    std::int64_t falsehood_observed = 0;
    double falsehood_expected = 0.0;
    std::int64_t unclassified = 0;
};

/// Group's genuine/falsehood counts against the universe totals scaled by
/// the group's share of anti tweets.
inline VeracityReport genuine_falsehood_report(const VeracityCounts& group, const VeracityCounts& universe,
                                               double anti_share) {
    const auto exp = expected_counts(anti_share, {universe.genuine, universe.falsehood});
    return {group.genuine, exp[0], group.falsehood, exp[1], group.unclassified};
}

/// Which tweets define the expected-count baseline.
enum class Denominator {
    Dataset, // every tweet in the dataset
    Dual,    // only tweets from users that belong to some group
};

struct TopicReportRow {
    std::string group;
    std::string topic;
    Stance stance = Stance::Anti;
    std::int64_t observed = 0;
    double expected = 0.0;
};

struct TopicReport {
    std::vector<TopicReportRow> rows;
    std::map<std::string, VeracityReport> veracity; // per group, anti tweets
    std::map<std::string, double> anti_share;
    std::map<std::string, double> pro_share;
};

/// Observed vs expected topic counts per user group. `group_of` maps
/// user_id to a group name; users without a group only enter the baseline
/// under Denominator::Dataset. Tweets without text count toward stance
/// totals but carry no topic.
inline TopicReport topic_report(const Dataset& ds, const TopicLexicon& lex,
                                const std::map<std::string, std::string>& group_of, Denominator denom,
                                unsigned threads = 1) {
    const auto& recs = ds.records();
    std::vector<std::vector<TopicTag>> tags(recs.size());
    parallel_for(recs.size(), threads, [&](std::size_t i) {
        const auto& r = recs[i];
        if (r.stance != Stance::Neutral && r.text) tags[i] = tag_tweet(*r.text, r.stance, lex);
    });

    std::set<std::string> groups;
    for (const auto& [_, g] : group_of) groups.insert(g);

    const std::size_t ne = lex.entries().size();
    struct Tally {
        std::int64_t anti = 0, pro = 0;
        std::vector<std::int64_t> topic_anti, topic_pro;
        std::vector<std::vector<TopicTag>> anti_tags;
    };
    auto fresh = [&] { return Tally{0, 0, std::vector<std::int64_t>(ne, 0), std::vector<std::int64_t>(ne, 0), {}}; };
    Tally universe = fresh();
    std::map<std::string, Tally> per_group;
    for (const auto& g : groups) per_group.emplace(g, fresh());

    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        if (r.stance == Stance::Neutral) continue;
        auto git = group_of.find(r.user_id);
        Tally* group = git == group_of.end() ? nullptr : &per_group.at(git->second);
        if (!group && denom == Denominator::Dual) continue;
        for (Tally* t : {&universe, group}) {
            if (!t) continue;
            if (r.stance == Stance::Anti) {
                ++t->anti;
                t->anti_tags.push_back(tags[i]);
            } else {
                ++t->pro;
            }
            for (const auto& tag : tags[i]) (r.stance == Stance::Anti ? t->topic_anti : t->topic_pro)[tag.entry] += 1;
        }
    }

    TopicReport rep;
    const auto universe_ver = count_veracity(universe.anti_tags, lex);
    for (const auto& [g, t] : per_group) {
        const double sa = universe.anti > 0 ? static_cast<double>(t.anti) / static_cast<double>(universe.anti) : 0.0;
        const double sp = universe.pro > 0 ? static_cast<double>(t.pro) / static_cast<double>(universe.pro) : 0.0;
        rep.anti_share[g] = sa;
        rep.pro_share[g] = sp;
        const auto exp_anti = expected_counts(sa, universe.topic_anti);
        const auto exp_pro = expected_counts(sp, universe.topic_pro);
        for (std::size_t e = 0; e < ne; ++e) {
            const auto& entry = lex.entries()[e];
            if (bucket_matches(entry.bucket, Stance::Anti))
                rep.rows.push_back({g, entry.topic, Stance::Anti, t.topic_anti[e], exp_anti[e]});
            if (bucket_matches(entry.bucket, Stance::Pro))
                rep.rows.push_back({g, entry.topic, Stance::Pro, t.topic_pro[e], exp_pro[e]});
        }
        rep.veracity[g] = genuine_falsehood_report(count_veracity(t.anti_tags, lex), universe_ver, sa);
    }
    return rep;
}

} // namespace stancedyn
