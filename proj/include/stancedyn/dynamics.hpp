#pragma once

#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stancedyn/error.hpp"
#include "stancedyn/ingest.hpp"
#include "stancedyn/parallel.hpp"

namespace stancedyn {

enum class ChangeDirection { IntoPro, IntoAnti };

/// A non-neutral tweet whose stance differs from the author's previous
/// non-neutral tweet.
struct ChangeEvent {
    std::string user_id;
    std::string tweet_id;
    std::int32_t day_index = 0;
    ChangeDirection direction = ChangeDirection::IntoPro;
    TweetKind kind = TweetKind::Original;
    std::optional<std::string> parent_id;
    std::optional<std::string> root_id;
    Stance stance() const { return direction == ChangeDirection::IntoPro ? Stance::Pro : Stance::Anti; }
};

struct UserChanges {
    std::string user_id;
    std::vector<ChangeEvent> events; // in tweet order
    std::int64_t into_pro = 0;
    std::int64_t into_anti = 0;
    std::int64_t non_neutral = 0;

    /// Dense per-day counts (delta_plus_i(n), delta_minus_i(n)).
    std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> daily(std::int32_t day_count) const {
        std::vector<std::int64_t> plus(static_cast<std::size_t>(day_count), 0), minus(plus);
        for (const auto& e : events) {
            auto& v = e.direction == ChangeDirection::IntoPro ? plus : minus;
            v.at(static_cast<std::size_t>(e.day_index)) += 1;
        }
        return {std::move(plus), std::move(minus)};
    }
};

/// Scans one user's records (already in (timestamp, tweet_id) order),
/// skipping neutral tweets. The first non-neutral tweet emits nothing.
inline UserChanges per_user_changes(std::span<const StanceRecord* const> records) {
    UserChanges out;
    std::optional<Stance> prev;
    for (const StanceRecord* r : records) {
        if (r->stance == Stance::Neutral) continue;
        if (out.user_id.empty()) out.user_id = r->user_id;
        ++out.non_neutral;
        if (prev && *prev != r->stance) {
            ChangeEvent e;
            e.user_id = r->user_id;
            e.tweet_id = r->tweet_id;
            e.day_index = r->day_index;
            e.direction = r->stance == Stance::Pro ? ChangeDirection::IntoPro : ChangeDirection::IntoAnti;
            e.kind = r->kind;
            e.parent_id = r->parent_id;
            e.root_id = r->root_id;
            (e.direction == ChangeDirection::IntoPro ? out.into_pro : out.into_anti) += 1;
            out.events.push_back(std::move(e));
        }
        prev = r->stance;
    }
    return out;
}

/// Change scan for every user in the dataset (user_id order). Users without
/// any change contribute an empty entry only when `include_unchanged`.
inline std::vector<UserChanges> all_user_changes(const Dataset& ds, unsigned threads = 1,
                                                 bool include_unchanged = false) {
    std::vector<const std::pair<const std::string, std::vector<std::size_t>>*> users;
    users.reserve(ds.per_user().size());
    for (const auto& entry : ds.per_user()) users.push_back(&entry);
    std::vector<UserChanges> changes(users.size());
    parallel_for(users.size(), threads, [&](std::size_t i) {
        std::vector<const StanceRecord*> recs;
        recs.reserve(users[i]->second.size());
        for (auto idx : users[i]->second) recs.push_back(&ds.records()[idx]);
        changes[i] = per_user_changes(recs);
        if (changes[i].user_id.empty()) changes[i].user_id = users[i]->first;
    });
    if (include_unchanged) return changes;
    std::vector<UserChanges> out;
    for (auto& c : changes)
        if (!c.events.empty()) out.push_back(std::move(c));
    return out;
}

/// Daily aggregate stance-change counts over all users.
struct StanceChangeSeries {
    std::int32_t day_count = 0;
    std::vector<std::int64_t> delta_plus;
    std::vector<std::int64_t> delta_minus;

    std::vector<std::int64_t> diff() const {
        std::vector<std::int64_t> d(delta_plus.size());
        for (std::size_t n = 0; n < d.size(); ++n) d[n] = delta_plus[n] - delta_minus[n];
        return d;
    }

    /// S(n) = sum_{k <= n} (delta_plus(k) - delta_minus(k)).
    std::vector<std::int64_t> cumulative() const {
        auto d = diff();
        std::int64_t s = 0;
        for (auto& v : d) v = (s += v);
        return d;
    }

    std::vector<double> plus_as_double() const { return {delta_plus.begin(), delta_plus.end()}; }
    std::vector<double> minus_as_double() const { return {delta_minus.begin(), delta_minus.end()}; }
};

/// Elementwise sums of per-user changes. Throws ConsistencyError if any
/// user's totals differ by more than one, which alternation rules out.
inline StanceChangeSeries aggregate_series(const std::vector<UserChanges>& users, std::int32_t day_count) {
    StanceChangeSeries s;
    s.day_count = day_count;
    s.delta_plus.assign(static_cast<std::size_t>(std::max(day_count, 0)), 0);
    s.delta_minus.assign(s.delta_plus.size(), 0);
    for (const auto& u : users) {
        if (std::llabs(u.into_pro - u.into_anti) > 1)
            throw ConsistencyError("user " + u.user_id + " has |delta+ - delta-| > 1");
        if (static_cast<std::int64_t>(u.events.size()) >= std::max<std::int64_t>(u.non_neutral, 1))
            throw ConsistencyError("user " + u.user_id + " has more changes than non-neutral tweets");
        for (const auto& e : u.events) {
            if (e.day_index < 0 || e.day_index >= day_count)
                throw ConsistencyError("change event outside the series window");
            auto& v = e.direction == ChangeDirection::IntoPro ? s.delta_plus : s.delta_minus;
            v[static_cast<std::size_t>(e.day_index)] += 1;
        }
    }
    return s;
}

/// Restricts a series to days [first, last).
inline StanceChangeSeries window(const StanceChangeSeries& s, std::int32_t first, std::int32_t last) {
    if (first < 0 || last > s.day_count || first > last) throw std::out_of_range("series window out of range");
    StanceChangeSeries w;
    w.day_count = last - first;
    w.delta_plus.assign(s.delta_plus.begin() + first, s.delta_plus.begin() + last);
    w.delta_minus.assign(s.delta_minus.begin() + first, s.delta_minus.begin() + last);
    return w;
}

/// out[k] = in[k+1] - in[k].
inline std::vector<double> first_difference(std::span<const double> series) {
    if (series.size() < 2) throw std::invalid_argument("first_difference needs at least 2 values");
    std::vector<double> out(series.size() - 1);
    for (std::size_t k = 0; k + 1 < series.size(); ++k) out[k] = series[k + 1] - series[k];
    return out;
}

inline std::vector<double> cumulative_sum(std::span<const double> series) {
    std::vector<double> out(series.size());
    double s = 0.0;
    for (std::size_t k = 0; k < series.size(); ++k) out[k] = (s += series[k]);
    return out;
}

} // namespace stancedyn
