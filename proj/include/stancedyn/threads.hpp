#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stancedyn/dynamics.hpp"
#include "stancedyn/error.hpp"
#include "stancedyn/ingest.hpp"

namespace stancedyn {

struct ChangeComposition {
    double retweet_fraction = 0.0;
    double reply_fraction = 0.0;
    double original_fraction = 0.0;
    std::size_t total = 0;
};

inline ChangeComposition change_tweet_composition(const std::vector<ChangeEvent>& events) {
    if (events.empty()) throw DataError("change_tweet_composition: no change events");
    std::size_t rt = 0, rp = 0, og = 0;
    for (const auto& e : events) {
        switch (e.kind) {
        case TweetKind::Retweet: ++rt; break;
        case TweetKind::Reply: ++rp; break;
        case TweetKind::Original: ++og; break;
        }
    }
    const auto n = static_cast<double>(events.size());
    return {static_cast<double>(rt) / n, static_cast<double>(rp) / n, static_cast<double>(og) / n, events.size()};
}

inline std::vector<ChangeEvent> flatten_events(const std::vector<UserChanges>& users) {
    std::vector<ChangeEvent> out;
    for (const auto& u : users) out.insert(out.end(), u.events.begin(), u.events.end());
    return out;
}

/// Who a reply is credited to.
enum class ReplyAttribution {
    ThreadRoot,      // author of the thread's root tweet
    ImmediateParent, // author of the tweet replied to
};

namespace detail {

/// Top of the reply chain: the root_id tweet when given, otherwise the
/// highest ancestor reachable through parent_id links. Null when a link
/// points outside the dataset.
inline const StanceRecord* thread_root(const std::optional<std::string>& root_id,
                                       const std::optional<std::string>& parent_id, const Dataset& ds) {
    if (root_id) return ds.find(*root_id);
    if (!parent_id) return nullptr;
    const StanceRecord* cur = ds.find(*parent_id);
    for (std::size_t steps = 0; cur && cur->parent_id && cur->kind == TweetKind::Reply; ++steps) {
        if (steps > ds.size()) throw DataError("reply chain cycle at " + cur->tweet_id);
        cur = ds.find(*cur->parent_id);
    }
    return cur;
}

} // namespace detail

struct Attribution {
    std::map<std::string, std::int64_t> counts; // originator user → change-tweets
    std::int64_t unresolved = 0;

    std::int64_t attributed() const {
        std::int64_t s = 0;
        for (const auto& [_, c] : counts) s += c;
        return s;
    }
};

/// Credits each retweet change to the retweeted tweet's author and each
/// reply change to its thread root's author (or immediate parent's).
/// Original change-tweets are not attributed.
inline Attribution attribute_changes(const std::vector<ChangeEvent>& events, const Dataset& ds,
                                     ReplyAttribution mode = ReplyAttribution::ThreadRoot) {
    Attribution a;
    for (const auto& e : events) {
        if (e.kind == TweetKind::Original) continue;
        const StanceRecord* src = nullptr;
        if (e.kind == TweetKind::Retweet || mode == ReplyAttribution::ImmediateParent) {
            src = e.parent_id ? ds.find(*e.parent_id) : nullptr;
        } else {
            src = detail::thread_root(e.root_id, e.parent_id, ds);
        }
        if (src)
            ++a.counts[src->user_id];
        else
            ++a.unresolved;
    }
    return a;
}

/// Histogram over originators with 1, 2-10, 11-100, 101-1000 and 1000+
/// attributed change-tweets.
struct OriginatorBuckets {
    static constexpr std::array<const char*, 5> labels = {"1", "2-10", "11-100", "101-1000", "1000+"};
    std::array<std::int64_t, 5> originators{};
    std::array<std::int64_t, 5> changes{};
};

inline std::size_t originator_bucket(std::int64_t count) {
    if (count <= 1) return 0;
    if (count <= 10) return 1;
    if (count <= 100) return 2;
    if (count <= 1000) return 3;
    return 4;
}

inline OriginatorBuckets originator_buckets(const std::map<std::string, std::int64_t>& counts) {
    OriginatorBuckets b;
    for (const auto& [_, c] : counts) {
        const auto k = originator_bucket(c);
        ++b.originators[k];
        b.changes[k] += c;
    }
    return b;
}

/// Smallest number of top originators (by count, ties by user_id) whose
/// combined share of attributed changes reaches q.
inline std::size_t concentration(const std::map<std::string, std::int64_t>& counts, double q) {
    if (!(q > 0.0 && q <= 1.0)) throw std::domain_error("concentration: q must lie in (0, 1]");
    if (counts.empty()) throw DataError("concentration: empty attribution");
    std::vector<std::pair<std::string, std::int64_t>> sorted(counts.begin(), counts.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::int64_t total = 0;
    for (const auto& [_, c] : sorted) total += c;
    const double need = q * static_cast<double>(total);
    std::int64_t cum = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cum += sorted[i].second;
        if (static_cast<double>(cum) >= need) return i + 1;
    }
    return sorted.size();
}

struct ThreadStats {
    std::string thread_id;
    TweetKind kind = TweetKind::Retweet;
    std::int64_t change_tweet_count = 0;
    std::int64_t pro_count = 0;
    std::int64_t anti_count = 0;
    std::int32_t first_day = 0;
    std::int32_t last_day = 0;
    std::optional<std::string> originator;
};

/// Thread key of a retweet/reply change. Retweets key on the retweeted
/// tweet. Replies key on root_id, else the top of the parent chain within
/// the dataset, else the reply's own parent_id.
inline std::optional<std::string> thread_key(const ChangeEvent& e, const Dataset& ds) {
    if (e.kind == TweetKind::Original || !e.parent_id) return std::nullopt;
    if (e.kind == TweetKind::Retweet) return e.parent_id;
    if (e.root_id) return e.root_id;
    const StanceRecord* cur = ds.find(*e.parent_id);
    if (!cur) return e.parent_id;
    for (std::size_t steps = 0; cur->kind == TweetKind::Reply && cur->parent_id; ++steps) {
        if (steps > ds.size()) throw DataError("reply chain cycle at " + cur->tweet_id);
        const StanceRecord* up = ds.find(*cur->parent_id);
        if (!up) return cur->parent_id;
        cur = up;
    }
    return cur->tweet_id;
}

/// Groups retweet and reply change-tweets into threads. Counts cover
/// change-tweets only. Output ordered by (kind, thread_id).
inline std::vector<ThreadStats> assemble_threads(const std::vector<ChangeEvent>& events, const Dataset& ds) {
    std::map<std::pair<int, std::string>, ThreadStats> by_key;
    for (const auto& e : events) {
        const auto key = thread_key(e, ds);
        if (!key) continue;
        auto [it, fresh] = by_key.try_emplace({static_cast<int>(e.kind), *key});
        auto& t = it->second;
        if (fresh) {
            t.thread_id = *key;
            t.kind = e.kind;
            t.first_day = t.last_day = e.day_index;
            if (const auto* root = ds.find(*key)) t.originator = root->user_id;
        }
        ++t.change_tweet_count;
        (e.direction == ChangeDirection::IntoPro ? t.pro_count : t.anti_count) += 1;
        t.first_day = std::min(t.first_day, e.day_index);
        t.last_day = std::max(t.last_day, e.day_index);
    }
    std::vector<ThreadStats> out;
    out.reserve(by_key.size());
    for (auto& [_, t] : by_key) out.push_back(std::move(t));
    return out;
}

struct ThreadRatio {
    std::string thread_id;
    std::int64_t size = 0;
    double pro_ratio = 0.0;
};

/// Pro share of change-tweets in each reply thread with at least `min_size`.
inline std::vector<ThreadRatio> reply_composition(const std::vector<ThreadStats>& threads, std::int64_t min_size = 10) {
    std::vector<ThreadRatio> out;
    for (const auto& t : threads) {
        if (t.kind != TweetKind::Reply || t.change_tweet_count < min_size || t.change_tweet_count == 0) continue;
        out.push_back({t.thread_id, t.change_tweet_count,
                       static_cast<double>(t.pro_count) / static_cast<double>(t.change_tweet_count)});
    }
    return out;
}

struct ThreadLifespan {
    std::string thread_id;
    std::int64_t size = 0;
    std::int32_t lifespan_days = 0;
};

/// Days between first and last change-tweet of each retweet thread with at
/// least `min_size` change-tweets.
inline std::vector<ThreadLifespan> thread_lifespan(const std::vector<ThreadStats>& threads,
                                                   std::int64_t min_size = 1000) {
    std::vector<ThreadLifespan> out;
    for (const auto& t : threads) {
        if (t.kind != TweetKind::Retweet || t.change_tweet_count < min_size) continue;
        out.push_back({t.thread_id, t.change_tweet_count, t.last_day - t.first_day});
    }
    return out;
}

struct SignedEdge {
    std::string src_user; // author of the tweet replied to
    std::string dst_user; // replier
    int weight = 1;       // +1 same stance, -1 opposite
    std::int32_t day = 0;
    std::string reply_tweet_id;
    std::string parent_tweet_id;
};

struct GraphComponent {
    std::vector<std::string> nodes;
    std::size_t edges = 0;
    std::size_t roots = 0; // nodes with no incoming edge
    std::size_t negative_edges = 0;
};

struct SignedReplyGraph {
    std::set<std::string> nodes;
    std::vector<SignedEdge> edges;
    std::size_t skipped = 0; // replies whose parent is not in the dataset

    /// Weakly connected components, largest first (ties by first node).
    std::vector<GraphComponent> components() const {
        std::vector<std::string> names(nodes.begin(), nodes.end());
        std::map<std::string, std::size_t> id;
        for (std::size_t i = 0; i < names.size(); ++i) id[names[i]] = i;
        std::vector<std::size_t> parent(names.size());
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        auto find = [&](std::size_t v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        std::vector<std::size_t> indeg(names.size(), 0);
        for (const auto& e : edges) {
            const auto a = find(id.at(e.src_user)), b = find(id.at(e.dst_user));
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
            if (e.src_user != e.dst_user) ++indeg[id.at(e.dst_user)];
        }
        std::map<std::size_t, GraphComponent> comps;
        for (std::size_t v = 0; v < names.size(); ++v) {
            auto& c = comps[find(v)];
            c.nodes.push_back(names[v]);
            c.roots += indeg[v] == 0;
        }
        for (const auto& e : edges) {
            auto& c = comps[find(id.at(e.src_user))];
            ++c.edges;
            c.negative_edges += e.weight < 0;
        }
        std::vector<GraphComponent> out;
        for (auto& [_, c] : comps) out.push_back(std::move(c));
        std::stable_sort(out.begin(), out.end(),
                         [](const auto& a, const auto& b) { return a.nodes.size() > b.nodes.size(); });
        return out;
    }
};

/// One directed, signed edge per reply change-event (optionally only those
/// on `day`), from the parent tweet's author to the replier.
inline SignedReplyGraph build_signed_reply_graph(const std::vector<ChangeEvent>& events, const Dataset& ds,
                                                 std::optional<std::int32_t> day = std::nullopt) {
    SignedReplyGraph g;
    for (const auto& e : events) {
        if (e.kind != TweetKind::Reply) continue;
        if (day && e.day_index != *day) continue;
        const StanceRecord* parent = e.parent_id ? ds.find(*e.parent_id) : nullptr;
        if (!parent) {
            ++g.skipped;
            continue;
        }
        SignedEdge edge{parent->user_id, e.user_id, parent->stance == e.stance() ? 1 : -1, e.day_index, e.tweet_id,
                        parent->tweet_id};
        g.nodes.insert(edge.src_user);
        g.nodes.insert(edge.dst_user);
        g.edges.push_back(std::move(edge));
    }
    return g;
}

} // namespace stancedyn
