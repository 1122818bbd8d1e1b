#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "stancedyn/cohort.hpp"
#include "stancedyn/csv.hpp"
#include "stancedyn/error.hpp"
#include "stancedyn/ingest.hpp"
#include "stancedyn/parallel.hpp"
#include "stancedyn/rng.hpp"
#include "stancedyn/timeutil.hpp"

namespace stancedyn {

enum class UserType { PureAnti, PurePro, DualProLean, DualAntiLean, DualBalanced };

inline constexpr std::array<UserType, 5> all_user_types = {UserType::PureAnti, UserType::PurePro,
                                                           UserType::DualProLean, UserType::DualAntiLean,
                                                           UserType::DualBalanced};

inline std::string_view to_string(UserType t) {
    switch (t) {
    case UserType::PureAnti: return "pure-anti";
    case UserType::PurePro: return "pure-pro";
    case UserType::DualProLean: return "dual-pro-lean";
    case UserType::DualAntiLean: return "dual-anti-lean";
    case UserType::DualBalanced: return "dual-balanced";
    }
    return "?";
}

/// Probabilities over {Anti, Pro, Neutral}.
using StanceDist = std::array<double, 3>;

struct GeneratorConfig {
    std::uint64_t seed = 1;
    std::size_t n_users = 2000;
    std::array<double, 5> type_mix = {0.30, 0.40, 0.12, 0.06, 0.12};

    // tweets per user: P(k) ∝ k^-exponent on [min, cap]
    double tweets_exponent = 2.2;
    std::int64_t tweets_min = 1;
    std::int64_t tweets_cap = 500;

    // true-stance emission per user type
    std::array<StanceDist, 5> emission = {{{0.80, 0.00, 0.20},
                                           {0.00, 0.80, 0.20},
                                           {0.15, 0.65, 0.20},
                                           {0.65, 0.15, 0.20},
                                           {0.40, 0.40, 0.20}}};

    // detector channel: row = true stance, column = detected stance
    std::array<StanceDist, 3> channel = {{{0.85, 0.08, 0.07}, {0.05, 0.90, 0.05}, {0.10, 0.10, 0.80}}};

    // cascades
    std::array<double, 3> kind_mix = {0.16, 0.67, 0.17}; // original, retweet, reply
    std::size_t n_originators = 500;
    double originator_exponent = 1.8;
    std::size_t sources_per_originator = 3;
    StanceDist originator_stance_mix = {0.4, 0.4, 0.2};
    std::int32_t burst_width = 3;
    double missing_parent_rate = 0.0;
    double root_id_rate = 1.0;

    std::int32_t day_count = 365;
    Instant start = std::chrono::sys_days{std::chrono::year{2020} / 3 / 1};

    // optional tweet text: "<filler> <phrase>" for a uniformly chosen phrase
    double text_rate = 0.0;
    std::vector<std::string> anti_phrases;
    std::vector<std::string> pro_phrases;

    void validate() const;
};

namespace detail {

inline void check_distribution(std::span<const double> p, const std::string& what) {
    double s = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw DataError(what + ": negative probability");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) throw DataError(what + ": probabilities must sum to 1");
}

inline bool unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

} // namespace detail

inline void GeneratorConfig::validate() const {
    if (n_users == 0) throw DataError("generator: n_users must be positive");
    detail::check_distribution(type_mix, "type_mix");
    for (std::size_t t = 0; t < emission.size(); ++t)
        detail::check_distribution(emission[t], "emission " + std::string(to_string(all_user_types[t])));
    for (const auto& row : channel) detail::check_distribution(row, "channel");
    detail::check_distribution(kind_mix, "kind_mix");
    detail::check_distribution(originator_stance_mix, "originator_stance_mix");
    if (tweets_min < 1 || tweets_cap < tweets_min) throw DataError("generator: need 1 <= tweets_min <= tweets_cap");
    if (day_count < 1) throw DataError("generator: day_count must be positive");
    if (burst_width < 0) throw DataError("generator: burst_width must be >= 0");
    if (!detail::unit_interval(missing_parent_rate) || !detail::unit_interval(root_id_rate) ||
        !detail::unit_interval(text_rate))
        throw DataError("generator: rates must lie in [0,1]");
    if ((kind_mix[1] > 0.0 || kind_mix[2] > 0.0) && (n_originators == 0 || sources_per_originator == 0))
        throw DataError("generator: retweets/replies need originators");
}

/// Inverse-CDF sampler for a discrete power law truncated to [min, cap].
class PowerLawSampler {
public:
    PowerLawSampler(double exponent, std::int64_t min, std::int64_t cap) : min_(min) {
        if (min < 1 || cap < min) throw std::invalid_argument("power law: need 1 <= min <= cap");
        cdf_.reserve(static_cast<std::size_t>(cap - min + 1));
        double acc = 0.0;
        for (std::int64_t k = min; k <= cap; ++k) cdf_.push_back(acc += std::pow(static_cast<double>(k), -exponent));
        for (auto& c : cdf_) c /= acc;
        cdf_.back() = 1.0;
    }

    template <class Rng>
    std::int64_t operator()(Rng& rng) const {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return min_ + static_cast<std::int64_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                                                         static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
    }

private:
    std::int64_t min_;
    std::vector<double> cdf_;
};

struct UserTruth {
    std::string user_id;
    UserType type = UserType::PureAnti;
    std::int64_t true_anti = 0;
    std::int64_t true_pro = 0;
    /// Has a correctly detected anti tweet and a correctly detected pro tweet.
    bool confirmed_dual = false;
};

struct GroundTruth {
    std::vector<UserTruth> users;        // population users in user_id order
    std::vector<Stance> tweet_stance;    // aligned with Dataset::records()
    std::vector<char> is_source;         // originator tweets (not passed through the channel)
    AlphaPair implied_precision;         // closed form from channel and mixes
    AlphaPair empirical_precision;       // measured on the generated population tweets
};

struct SyntheticData {
    Dataset dataset;
    GroundTruth truth;
};

/// Pooled precision implied by the channel: P(true s | detected s) with the
/// true-stance marginal taken from the type-weighted emission mix.
inline AlphaPair implied_precision(const GeneratorConfig& cfg) {
    StanceDist marginal{};
    for (std::size_t t = 0; t < 5; ++t)
        for (std::size_t s = 0; s < 3; ++s) marginal[s] += cfg.type_mix[t] * cfg.emission[t][s];
    auto precision = [&](std::size_t s) {
        double detected = 0.0;
        for (std::size_t tr = 0; tr < 3; ++tr) detected += marginal[tr] * cfg.channel[tr][s];
        return detected > 0.0 ? marginal[s] * cfg.channel[s][s] / detected : 1.0;
    };
    return {precision(0), precision(1)};
}

namespace detail {

inline Stance stance_at(std::size_t i) { return static_cast<Stance>(i); }

template <class Rng>
std::size_t draw(const std::array<double, 3>& p, Rng& rng) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i)
        if (u < (acc += p[i])) return i;
    return p.size() - 1;
}

template <class Rng, std::size_t N>
std::size_t draw_n(const std::array<double, N>& p, Rng& rng) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < N; ++i)
        if (u < (acc += p[i])) return i;
    return N - 1;
}

inline std::string padded(char prefix, std::size_t v, int width) {
    std::string s = std::to_string(v);
    if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
    return prefix + s;
}

struct Source {
    std::string tweet_id;
    std::string user_id;
    Instant timestamp;
    std::int32_t day;
    Stance stance;
};

struct SourcePool {
    std::vector<std::size_t> ids;    // indexes into the source list
    std::vector<double> cumulative;  // originator popularity weights, normalized
};

template <class Rng>
std::size_t pick_source(const SourcePool& pool, Rng& rng) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    auto it = std::upper_bound(pool.cumulative.begin(), pool.cumulative.end(), u);
    const auto k = std::min<std::ptrdiff_t>(it - pool.cumulative.begin(), static_cast<std::ptrdiff_t>(pool.ids.size()) - 1);
    return pool.ids[static_cast<std::size_t>(k)];
}

inline const std::array<const char*, 6> filler = {"thoughts on", "reading about", "so much talk of",
                                                  "news about", "again with", "cannot stop thinking about"};

} // namespace detail

/// Generates a labeled tweet stream with ground truth. Each user and each
/// originator draws from its own RNG stream derived from (seed, index), so
/// the output does not depend on `threads`.
inline SyntheticData generate_stream(const GeneratorConfig& cfg, unsigned threads = 1) {
    cfg.validate();
    using namespace std::chrono;

    // originators and their source tweets
    std::vector<detail::Source> sources;
    std::vector<double> originator_weight;
    std::array<detail::SourcePool, 3> pools;
    std::array<std::vector<double>, 3> pool_weights;
    std::vector<double> any_weights;
    detail::SourcePool any_pool;
    const int id_width = 6;
    for (std::size_t o = 0; o < cfg.n_originators; ++o) {
        std::mt19937_64 rng(detail::stream_seed(cfg.seed, 0x6f726967ULL, o, 0));
        const auto stance = detail::stance_at(detail::draw(cfg.originator_stance_mix, rng));
        const double w = std::pow(static_cast<double>(o + 1), -cfg.originator_exponent);
        const std::string user = detail::padded('o', o, id_width);
        for (std::size_t k = 0; k < cfg.sources_per_originator; ++k) {
            const auto day = std::uniform_int_distribution<std::int32_t>(0, cfg.day_count - 1)(rng);
            const auto sec = std::uniform_int_distribution<std::int64_t>(0, seconds_per_day - 1)(rng);
            detail::Source s{user + "-s" + std::to_string(k), user,
                             cfg.start + days{day} + seconds{sec}, day, stance};
            const std::size_t idx = sources.size();
            sources.push_back(std::move(s));
            pools[static_cast<std::size_t>(stance)].ids.push_back(idx);
            pool_weights[static_cast<std::size_t>(stance)].push_back(w / static_cast<double>(cfg.sources_per_originator));
            any_pool.ids.push_back(idx);
            any_weights.push_back(w / static_cast<double>(cfg.sources_per_originator));
        }
    }
    auto normalize = [](const std::vector<double>& w) {
        std::vector<double> c(w.size());
        std::partial_sum(w.begin(), w.end(), c.begin());
        for (auto& v : c) v /= c.back();
        return c;
    };
    for (std::size_t s = 0; s < 3; ++s)
        if (!pool_weights[s].empty()) pools[s].cumulative = normalize(pool_weights[s]);
    if (!any_weights.empty()) any_pool.cumulative = normalize(any_weights);

    const PowerLawSampler tweet_count(cfg.tweets_exponent, cfg.tweets_min, cfg.tweets_cap);

    struct Generated {
        std::vector<StanceRecord> records;
        std::vector<Stance> truth;
        UserTruth user;
        std::array<std::int64_t, 4> tallies{}; // det anti, det&true anti, det pro, det&true pro
    };
    std::vector<Generated> per_user(cfg.n_users);
    parallel_for(cfg.n_users, threads, [&](std::size_t u) {
        std::mt19937_64 rng(detail::stream_seed(cfg.seed, 0x75736572ULL, u, 0));
        auto& g = per_user[u];
        g.user.user_id = detail::padded('u', u, id_width);
        g.user.type = all_user_types[detail::draw_n(cfg.type_mix, rng)];
        const auto& emit = cfg.emission[static_cast<std::size_t>(g.user.type)];
        const auto n = tweet_count(rng);
        bool anti_ok = false, pro_ok = false;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (std::int64_t k = 0; k < n; ++k) {
            const auto true_idx = detail::draw(emit, rng);
            const auto det_idx = detail::draw(cfg.channel[true_idx], rng);
            const Stance truth = detail::stance_at(true_idx), det = detail::stance_at(det_idx);
            StanceRecord r;
            r.tweet_id = g.user.user_id + "-" + std::to_string(k);
            r.user_id = g.user.user_id;
            r.stance = det;
            const auto kind = detail::draw(cfg.kind_mix, rng);
            const detail::SourcePool* pool = nullptr;
            if (kind == 1 && !pools[true_idx].ids.empty()) pool = &pools[true_idx];
            if (kind == 2 && !any_pool.ids.empty()) pool = &any_pool;
            if (pool) {
                const auto& src = sources[detail::pick_source(*pool, rng)];
                const auto day = std::min(cfg.day_count - 1,
                                          src.day + std::uniform_int_distribution<std::int32_t>(0, cfg.burst_width)(rng));
                const auto src_sec = (src.timestamp - (cfg.start + days{src.day})).count();
                const auto lo = day == src.day ? std::min<std::int64_t>(src_sec + 1, seconds_per_day - 1) : 0;
                const auto sec = std::uniform_int_distribution<std::int64_t>(lo, seconds_per_day - 1)(rng);
                r.timestamp = cfg.start + days{day} + seconds{sec};
                r.kind = kind == 1 ? TweetKind::Retweet : TweetKind::Reply;
                const bool missing = unit(rng) < cfg.missing_parent_rate;
                r.parent_id = missing ? "missing-" + r.tweet_id : src.tweet_id;
                if (r.kind == TweetKind::Reply && unit(rng) < cfg.root_id_rate) r.root_id = r.parent_id;
            } else {
                const auto day = std::uniform_int_distribution<std::int32_t>(0, cfg.day_count - 1)(rng);
                const auto sec = std::uniform_int_distribution<std::int64_t>(0, seconds_per_day - 1)(rng);
                r.timestamp = cfg.start + days{day} + seconds{sec};
                r.kind = TweetKind::Original;
            }
            if (cfg.text_rate > 0.0 && det != Stance::Neutral) {
                const auto& phrases = det == Stance::Anti ? cfg.anti_phrases : cfg.pro_phrases;
                if (!phrases.empty() && unit(rng) < cfg.text_rate) {
                    const auto f = std::uniform_int_distribution<std::size_t>(0, detail::filler.size() - 1)(rng);
                    const auto p = std::uniform_int_distribution<std::size_t>(0, phrases.size() - 1)(rng);
                    r.text = std::string(detail::filler[f]) + " " + phrases[p];
                }
            }
            g.user.true_anti += truth == Stance::Anti;
            g.user.true_pro += truth == Stance::Pro;
            if (det == Stance::Anti) {
                ++g.tallies[0];
                g.tallies[1] += truth == Stance::Anti;
                anti_ok |= truth == Stance::Anti;
            } else if (det == Stance::Pro) {
                ++g.tallies[2];
                g.tallies[3] += truth == Stance::Pro;
                pro_ok |= truth == Stance::Pro;
            }
            g.records.push_back(std::move(r));
            g.truth.push_back(truth);
        }
        g.user.confirmed_dual = anti_ok && pro_ok;
    });

    // Concatenate, then order exactly as Dataset::build will so the truth
    // vector stays aligned with the records.
    std::vector<StanceRecord> records;
    std::vector<Stance> truth;
    std::vector<char> is_source;
    std::array<std::int64_t, 4> tallies{};
    GroundTruth gt;
    gt.users.reserve(cfg.n_users);
    for (const auto& s : sources) {
        StanceRecord r;
        r.tweet_id = s.tweet_id;
        r.user_id = s.user_id;
        r.timestamp = s.timestamp;
        r.stance = s.stance;
        records.push_back(std::move(r));
        truth.push_back(s.stance);
        is_source.push_back(1);
    }
    for (auto& g : per_user) {
        for (std::size_t i = 0; i < g.records.size(); ++i) {
            records.push_back(std::move(g.records[i]));
            truth.push_back(g.truth[i]);
            is_source.push_back(0);
        }
        for (std::size_t k = 0; k < 4; ++k) tallies[k] += g.tallies[k];
        gt.users.push_back(std::move(g.user));
    }
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (records[a].timestamp != records[b].timestamp) return records[a].timestamp < records[b].timestamp;
        return records[a].tweet_id < records[b].tweet_id;
    });
    std::vector<StanceRecord> sorted;
    sorted.reserve(records.size());
    gt.tweet_stance.reserve(records.size());
    gt.is_source.reserve(records.size());
    for (auto i : order) {
        sorted.push_back(std::move(records[i]));
        gt.tweet_stance.push_back(truth[i]);
        gt.is_source.push_back(is_source[i]);
    }
    gt.implied_precision = implied_precision(cfg);
    gt.empirical_precision = {tallies[0] > 0 ? static_cast<double>(tallies[1]) / static_cast<double>(tallies[0]) : 1.0,
                              tallies[2] > 0 ? static_cast<double>(tallies[3]) / static_cast<double>(tallies[2]) : 1.0};
    return {Dataset::build(std::move(sorted), cfg.start), std::move(gt)};
}

/// Stable 64-bit FNV-1a, used to derive per-tweet random streams.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Later snapshot in which each anti (pro) tweet was deleted with
/// probability p_anti (p_pro). Neutral tweets are kept.
inline Dataset selective_deletion(const Dataset& ds, double p_anti, double p_pro, std::uint64_t seed) {
    std::vector<StanceRecord> kept;
    for (const auto& r : ds.records()) {
        const double p = r.stance == Stance::Anti ? p_anti : r.stance == Stance::Pro ? p_pro : 0.0;
        std::mt19937_64 rng(detail::splitmix64(seed ^ fnv1a(r.tweet_id)));
        if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= p) kept.push_back(r);
    }
    return Dataset::build(std::move(kept), ds.dataset_start());
}

/// Coupled logistic maps
///   x(t+1) = x(t) (r_x - r_x x(t) - beta_xy y(t))
///   y(t+1) = y(t) (r_y - r_y y(t) - beta_yx x(t)),
/// returning n samples after discarding the first burn_in.
inline std::pair<std::vector<double>, std::vector<double>> coupled_logistic(std::size_t n, double x0, double y0,
                                                                            double r_x, double r_y, double beta_xy,
                                                                            double beta_yx, std::size_t burn_in = 0) {
    if (n < 1) throw std::invalid_argument("coupled_logistic: n must be >= 1");
    if (!(x0 > 0.0 && x0 < 1.0 && y0 > 0.0 && y0 < 1.0))
        throw std::invalid_argument("coupled_logistic: initial values must lie in (0,1)");
    std::vector<double> xs, ys;
    xs.reserve(n);
    ys.reserve(n);
    double x = x0, y = y0;
    for (std::size_t t = 0; t < burn_in + n; ++t) {
        if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) throw DataError("divergent parameters");
        if (t >= burn_in) {
            xs.push_back(x);
            ys.push_back(y);
        }
        const double nx = x * (r_x - r_x * x - beta_xy * y);
        const double ny = y * (r_y - r_y * y - beta_yx * x);
        x = nx;
        y = ny;
    }
    return {std::move(xs), std::move(ys)};
}

namespace detail {

template <std::size_t N>
std::array<double, N> parse_probs(const std::string& v, const std::string& key) {
    const auto f = csv::split(v);
    if (f.size() != N) throw DataError("config " + key + ": expected " + std::to_string(N) + " values");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = csv::to_double(f[i], key);
    return out;
}

inline std::vector<std::string> parse_phrases(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, '|'))
        if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace detail

/// Applies one `key=value` setting. Unknown keys are an error.
inline void apply_config_setting(GeneratorConfig& cfg, const std::string& key, const std::string& value) {
    auto as_size = [&] {
        const auto v = csv::to_int(value, key);
        if (v < 0) throw DataError("config " + key + " must be non-negative");
        return static_cast<std::size_t>(v);
    };
    if (key == "seed") cfg.seed = static_cast<std::uint64_t>(csv::to_int(value, key));
    else if (key == "n_users") cfg.n_users = as_size();
    else if (key == "type_mix") cfg.type_mix = detail::parse_probs<5>(value, key);
    else if (key == "tweets_exponent") cfg.tweets_exponent = csv::to_double(value, key);
    else if (key == "tweets_min") cfg.tweets_min = csv::to_int(value, key);
    else if (key == "tweets_cap") cfg.tweets_cap = csv::to_int(value, key);
    else if (key == "emission_pure_anti") cfg.emission[0] = detail::parse_probs<3>(value, key);
    else if (key == "emission_pure_pro") cfg.emission[1] = detail::parse_probs<3>(value, key);
    else if (key == "emission_dual_pro_lean") cfg.emission[2] = detail::parse_probs<3>(value, key);
    else if (key == "emission_dual_anti_lean") cfg.emission[3] = detail::parse_probs<3>(value, key);
    else if (key == "emission_dual_balanced") cfg.emission[4] = detail::parse_probs<3>(value, key);
    else if (key == "channel_anti") cfg.channel[0] = detail::parse_probs<3>(value, key);
    else if (key == "channel_pro") cfg.channel[1] = detail::parse_probs<3>(value, key);
    else if (key == "channel_neutral") cfg.channel[2] = detail::parse_probs<3>(value, key);
    else if (key == "kind_mix") cfg.kind_mix = detail::parse_probs<3>(value, key);
    else if (key == "n_originators") cfg.n_originators = as_size();
    else if (key == "originator_exponent") cfg.originator_exponent = csv::to_double(value, key);
    else if (key == "sources_per_originator") cfg.sources_per_originator = as_size();
    else if (key == "originator_stance_mix") cfg.originator_stance_mix = detail::parse_probs<3>(value, key);
    else if (key == "burst_width") cfg.burst_width = static_cast<std::int32_t>(csv::to_int(value, key));
    else if (key == "missing_parent_rate") cfg.missing_parent_rate = csv::to_double(value, key);
    else if (key == "root_id_rate") cfg.root_id_rate = csv::to_double(value, key);
    else if (key == "day_count") cfg.day_count = static_cast<std::int32_t>(csv::to_int(value, key));
    else if (key == "start") {
        const auto t = parse_iso8601(value);
        if (!t) throw DataError("config start: bad date '" + value + "'");
        cfg.start = *t;
    } else if (key == "text_rate") cfg.text_rate = csv::to_double(value, key);
    else if (key == "anti_phrases") cfg.anti_phrases = detail::parse_phrases(value);
    else if (key == "pro_phrases") cfg.pro_phrases = detail::parse_phrases(value);
    else throw DataError("unknown generator setting '" + key + "'");
}

/// Flat `key=value` lines; `#` starts a comment.
inline GeneratorConfig load_generator_config(std::istream& in, GeneratorConfig cfg = {}) {
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError("generator config: expected key=value in '" + line + "'");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        apply_config_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

} // namespace stancedyn
