#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "stancedyn/error.hpp"
#include "stancedyn/timeutil.hpp"

namespace stancedyn {

enum class Stance { Anti, Pro, Neutral };
enum class TweetKind { Original, Retweet, Reply };

inline std::string_view to_string(Stance s) {
    switch (s) {
    case Stance::Anti: return "anti";
    case Stance::Pro: return "pro";
    case Stance::Neutral: return "neutral";
    }
    return "?";
}

inline std::string_view to_string(TweetKind k) {
    switch (k) {
    case TweetKind::Original: return "original";
    case TweetKind::Retweet: return "retweet";
    case TweetKind::Reply: return "reply";
    }
    return "?";
}

inline std::optional<Stance> parse_stance(std::string_view s) {
    if (s == "anti") return Stance::Anti;
    if (s == "pro") return Stance::Pro;
    if (s == "neutral") return Stance::Neutral;
    return std::nullopt;
}

inline std::optional<TweetKind> parse_kind(std::string_view s) {
    if (s == "original") return TweetKind::Original;
    if (s == "retweet") return TweetKind::Retweet;
    if (s == "reply") return TweetKind::Reply;
    return std::nullopt;
}

struct StanceRecord {
    std::string tweet_id;
    std::string user_id;
    Instant timestamp{};
    std::int32_t day_index = 0; // filled by Dataset
    Stance stance = Stance::Neutral;
    TweetKind kind = TweetKind::Original;
    std::optional<std::string> parent_id;
    std::optional<std::string> root_id;
    std::optional<std::string> text;

    friend bool operator==(const StanceRecord&, const StanceRecord&) = default;
};

/// Empty when the record satisfies the kind/parent invariant.
inline std::string record_violation(const StanceRecord& r) {
    if (r.tweet_id.empty()) return "empty tweet_id";
    if (r.user_id.empty()) return "empty user_id";
    const bool needs_parent = r.kind != TweetKind::Original;
    if (needs_parent && (!r.parent_id || r.parent_id->empty())) return "retweet/reply without parent_id";
    if (!needs_parent && r.parent_id) return "original tweet with parent_id";
    return {};
}

/// Immutable, time-ordered record set with per-user and per-tweet indexes.
class Dataset {
public:
    Dataset() = default;

    /// Sorts by (timestamp, tweet_id), assigns day indexes relative to
    /// `start` (default: UTC midnight of the earliest record) and builds the
    /// indexes. Throws DataError on a record before `start` or a duplicate id.
    static Dataset build(std::vector<StanceRecord> records, std::optional<Instant> start = std::nullopt) {
        Dataset ds;
        std::sort(records.begin(), records.end(), [](const StanceRecord& a, const StanceRecord& b) {
            if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
            return a.tweet_id < b.tweet_id;
        });
        if (start) {
            ds.start_ = *start;
        } else if (!records.empty()) {
            ds.start_ = utc_midnight(records.front().timestamp);
        }
        std::int32_t max_day = -1;
        ds.by_id_.reserve(records.size());
        for (std::size_t i = 0; i < records.size(); ++i) {
            auto& r = records[i];
            const auto offset = (r.timestamp - ds.start_).count();
            if (offset < 0) throw DataError("record " + r.tweet_id + " precedes dataset start");
            r.day_index = static_cast<std::int32_t>(offset / seconds_per_day);
            max_day = std::max(max_day, r.day_index);
            if (!ds.by_id_.emplace(r.tweet_id, i).second) throw DataError("duplicate tweet_id " + r.tweet_id);
            ds.per_user_[r.user_id].push_back(i);
        }
        ds.day_count_ = max_day + 1;
        ds.records_ = std::move(records);
        return ds;
    }

    const std::vector<StanceRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    Instant dataset_start() const { return start_; }
    std::int32_t day_count() const { return day_count_; }

    /// user_id → record indexes in (timestamp, tweet_id) order.
    const std::map<std::string, std::vector<std::size_t>>& per_user() const { return per_user_; }

    const StanceRecord* find(std::string_view tweet_id) const {
        auto it = by_id_.find(std::string(tweet_id));
        return it == by_id_.end() ? nullptr : &records_[it->second];
    }

    friend bool operator==(const Dataset& a, const Dataset& b) {
        return a.start_ == b.start_ && a.day_count_ == b.day_count_ && a.records_ == b.records_;
    }

private:
    std::vector<StanceRecord> records_;
    std::map<std::string, std::vector<std::size_t>> per_user_;
    std::unordered_map<std::string, std::size_t> by_id_;
    Instant start_{};
    std::int32_t day_count_ = 0;
};

struct ParseOptions {
    std::optional<Instant> dataset_start;
    bool strict = false;
};

struct ParseReport {
    std::size_t lines = 0;
    std::size_t accepted = 0;
    std::size_t skipped = 0;
    std::vector<std::string> messages; // first few skip reasons
};

namespace detail {

inline std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key, std::string& err) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) {
        err = std::string(key) + " must be a string";
        return std::nullopt;
    }
    return it->get<std::string>();
}

} // namespace detail

/// Parses one JSON record line. Returns the reason on failure.
inline std::optional<StanceRecord> parse_record_line(std::string_view line, std::string& err) {
    const auto obj = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object()) {
        err = "not a JSON object";
        return std::nullopt;
    }
    auto req = [&](const char* key) -> const std::string* {
        auto it = obj.find(key);
        if (it == obj.end() || !it->is_string()) {
            err = std::string("missing or non-string field ") + key;
            return nullptr;
        }
        return it->get_ptr<const std::string*>();
    };
    StanceRecord r;
    const std::string *tid = req("tweet_id"), *uid = tid ? req("user_id") : nullptr,
                      *ts = uid ? req("ts") : nullptr, *st = ts ? req("stance") : nullptr,
                      *kd = st ? req("kind") : nullptr;
    if (!kd) return std::nullopt;
    r.tweet_id = *tid;
    r.user_id = *uid;
    const auto when = parse_iso8601(*ts);
    if (!when) {
        err = "bad timestamp '" + *ts + "'";
        return std::nullopt;
    }
    r.timestamp = *when;
    const auto stance = parse_stance(*st);
    if (!stance) {
        err = "bad stance '" + *st + "'";
        return std::nullopt;
    }
    r.stance = *stance;
    const auto kind = parse_kind(*kd);
    if (!kind) {
        err = "bad kind '" + *kd + "'";
        return std::nullopt;
    }
    r.kind = *kind;
    err.clear();
    r.parent_id = detail::optional_string(obj, "parent_id", err);
    if (err.empty()) r.root_id = detail::optional_string(obj, "root_id", err);
    if (err.empty()) r.text = detail::optional_string(obj, "text", err);
    if (!err.empty()) return std::nullopt;
    err = record_violation(r);
    if (!err.empty()) return std::nullopt;
    return r;
}

/// Reads line-delimited JSON records. Malformed lines are skipped and
/// counted unless `opts.strict`, in which case the first one throws.
inline Dataset parse_records(std::istream& in, const ParseOptions& opts, ParseReport* report = nullptr) {
    if (!in) throw DataError("unreadable record source");
    ParseReport rep;
    std::vector<StanceRecord> records;
    std::unordered_map<std::string, bool> seen;
    std::string line, err;
    auto skip = [&](const std::string& why) {
        if (opts.strict) throw DataError("line " + std::to_string(rep.lines) + ": " + why);
        ++rep.skipped;
        if (rep.messages.size() < 20) rep.messages.push_back("line " + std::to_string(rep.lines) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++rep.lines;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto rec = parse_record_line(line, err);
        if (!rec) {
            skip(err);
            continue;
        }
        if (opts.dataset_start && rec->timestamp < *opts.dataset_start) {
            skip("timestamp before dataset start");
            continue;
        }
        if (!seen.emplace(rec->tweet_id, true).second) {
            skip("duplicate tweet_id " + rec->tweet_id);
            continue;
        }
        records.push_back(std::move(*rec));
    }
    if (in.bad()) throw DataError("read error on record source");
    rep.accepted = records.size();
    if (report) *report = rep;
    return Dataset::build(std::move(records), opts.dataset_start);
}

inline nlohmann::json record_to_json(const StanceRecord& r) {
    nlohmann::json j = {{"tweet_id", r.tweet_id},
                        {"user_id", r.user_id},
                        {"ts", format_iso8601(r.timestamp)},
                        {"stance", to_string(r.stance)},
                        {"kind", to_string(r.kind)}};
    if (r.parent_id) j["parent_id"] = *r.parent_id;
    if (r.root_id) j["root_id"] = *r.root_id;
    if (r.text) j["text"] = *r.text;
    return j;
}

inline void write_records(std::ostream& out, const Dataset& ds) {
    for (const auto& r : ds.records()) out << record_to_json(r).dump() << '\n';
}

struct UserAggregate {
    std::string user_id;
    std::int64_t n_a = 0;
    std::int64_t n_p = 0;
    std::int64_t n_neutral = 0;
    std::int32_t median_day = 0; // lower median over non-neutral tweet days
    double dual_probability = 0.0;

    bool dual_detected() const { return n_a >= 1 && n_p >= 1; }
};

inline UserAggregate aggregate_user(const Dataset& ds, const std::string& user,
                                    const std::vector<std::size_t>& idx) {
    UserAggregate agg;
    agg.user_id = user;
    std::vector<std::int32_t> days;
    for (auto i : idx) {
        const auto& r = ds.records()[i];
        switch (r.stance) {
        case Stance::Anti: ++agg.n_a; days.push_back(r.day_index); break;
        case Stance::Pro: ++agg.n_p; days.push_back(r.day_index); break;
        case Stance::Neutral: ++agg.n_neutral; break;
        }
    }
    if (days.empty())
        for (auto i : idx) days.push_back(ds.records()[i].day_index);
    if (!days.empty()) {
        // per-user indexes are time-ordered, so days are already sorted
        agg.median_day = days[(days.size() - 1) / 2];
    }
    return agg;
}

/// Per-user anti/pro/neutral counts, keyed by user_id.
inline std::map<std::string, UserAggregate> aggregate_users(const Dataset& ds) {
    std::map<std::string, UserAggregate> out;
    for (const auto& [user, idx] : ds.per_user()) out.emplace_hint(out.end(), user, aggregate_user(ds, user, idx));
    return out;
}

} // namespace stancedyn
