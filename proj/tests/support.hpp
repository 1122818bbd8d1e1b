#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stancedyn/ingest.hpp"
#include "stancedyn/syngen.hpp"

namespace testing_support {

using namespace stancedyn;

/// Sequential splitmix64 stream with Box-Muller normals. Mirrors the
/// generator in tests/oracle/stationarity_reference.py.
class RefRng {
public:
    explicit RefRng(std::uint64_t state) : state_(state) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0); }

    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

private:
    std::uint64_t state_;
};

inline const std::vector<std::string> reference_processes = {"white_noise", "random_walk", "ar1"};

inline std::vector<double> reference_draw(const std::string& process, std::uint64_t seed, std::size_t n = 500) {
    std::uint64_t code = 0;
    while (reference_processes[code] != process) ++code;
    RefRng rng(code * 1000000 + seed);
    std::vector<double> e(n);
    for (auto& v : e) v = rng.normal();
    if (process == "white_noise") return e;
    std::vector<double> out;
    double acc = 0.0;
    for (double v : e) {
        acc = process == "random_walk" ? acc + v : 0.5 * acc + v;
        out.push_back(acc);
    }
    return out;
}

inline Instant at(int day, int second = 0) {
    return Instant{std::chrono::sys_days{std::chrono::year{2021} / 1 / 1}} + std::chrono::days{day} +
           std::chrono::seconds{second};
}

inline StanceRecord rec(std::string id, std::string user, int day, Stance s, TweetKind k = TweetKind::Original,
                        std::optional<std::string> parent = std::nullopt, std::optional<std::string> root = std::nullopt,
                        int second = 0) {
    StanceRecord r;
    r.tweet_id = std::move(id);
    r.user_id = std::move(user);
    r.timestamp = at(day, second);
    r.stance = s;
    r.kind = k;
    r.parent_id = std::move(parent);
    r.root_id = std::move(root);
    return r;
}

/// Small mixed population with cascades, for property tests.
inline GeneratorConfig small_config(std::uint64_t seed, std::size_t users = 300) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.n_users = users;
    cfg.tweets_cap = 80;
    cfg.n_originators = 40;
    cfg.day_count = 60;
    return cfg;
}

} // namespace testing_support
