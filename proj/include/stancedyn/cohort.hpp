#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stancedyn/csv.hpp"
#include "stancedyn/error.hpp"
#include "stancedyn/ingest.hpp"
#include "stancedyn/parallel.hpp"

namespace stancedyn {

/// Detector precisions: probability that a tweet detected as anti (pro)
/// truly carries that stance.
struct AlphaPair {
    double anti = 1.0;
    double pro = 1.0;
    friend bool operator==(const AlphaPair&, const AlphaPair&) = default;
};

struct PrecisionPeriod {
    std::int32_t start_day = 0;
    std::int32_t end_day = 0; // inclusive
    AlphaPair alpha;
};

class PrecisionModel {
public:
    PrecisionModel() = default;

    explicit PrecisionModel(AlphaPair global) : global_(global) { check(global); }

    PrecisionModel(std::vector<PrecisionPeriod> periods, std::optional<AlphaPair> global)
        : periods_(std::move(periods)), global_(global) {
        std::sort(periods_.begin(), periods_.end(),
                  [](const auto& a, const auto& b) { return a.start_day < b.start_day; });
        for (std::size_t i = 0; i < periods_.size(); ++i) {
            const auto& p = periods_[i];
            if (p.end_day < p.start_day) throw DataError("precision period with end_day < start_day");
            if (i > 0 && p.start_day <= periods_[i - 1].end_day) throw DataError("overlapping precision periods");
            check(p.alpha);
        }
        if (global_) check(*global_);
    }

    const std::vector<PrecisionPeriod>& periods() const { return periods_; }
    const std::optional<AlphaPair>& global() const { return global_; }

    AlphaPair global_pair() const {
        if (!global_) throw DataError("precision model has no global pair (row 0,-1)");
        return *global_;
    }

    /// Pair for the period containing `day`, else the global pair.
    AlphaPair for_day(std::int32_t day) const {
        auto it = std::upper_bound(periods_.begin(), periods_.end(), day,
                                   [](std::int32_t d, const PrecisionPeriod& p) { return d < p.start_day; });
        if (it != periods_.begin()) {
            --it;
            if (day <= it->end_day) return it->alpha;
        }
        if (!global_) throw DataError("day " + std::to_string(day) + " not covered by any precision period");
        return *global_;
    }

    /// Componentwise (min, max) over every pair the model carries.
    std::pair<AlphaPair, AlphaPair> extremes() const {
        std::vector<AlphaPair> all;
        for (const auto& p : periods_) all.push_back(p.alpha);
        if (global_) all.push_back(*global_);
        if (all.empty()) throw DataError("empty precision model");
        AlphaPair lo = all.front(), hi = all.front();
        for (const auto& a : all) {
            lo.anti = std::min(lo.anti, a.anti);
            lo.pro = std::min(lo.pro, a.pro);
            hi.anti = std::max(hi.anti, a.anti);
            hi.pro = std::max(hi.pro, a.pro);
        }
        return {lo, hi};
    }

private:
    static void check(const AlphaPair& a) {
        if (!(a.anti >= 0.0 && a.anti <= 1.0 && a.pro >= 0.0 && a.pro <= 1.0))
            throw DataError("precision outside [0,1]");
    }

    std::vector<PrecisionPeriod> periods_;
    std::optional<AlphaPair> global_;
};

/// CSV `start_day,end_day,alpha_anti,alpha_pro`; the row `0,-1,..` is the global pair.
inline PrecisionModel load_precision_model(std::istream& in) {
    csv::expect_header(in, "start_day,end_day,alpha_anti,alpha_pro", "precision model");
    std::vector<PrecisionPeriod> periods;
    std::optional<AlphaPair> global;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto f = csv::split(line);
        if (f.size() != 4) throw DataError("precision model: expected 4 fields in '" + line + "'");
        const auto start = csv::to_int(f[0], "start_day");
        const auto end = csv::to_int(f[1], "end_day");
        const AlphaPair a{csv::to_double(f[2], "alpha_anti"), csv::to_double(f[3], "alpha_pro")};
        if (start == 0 && end == -1) {
            if (global) throw DataError("precision model: duplicate global row");
            global = a;
        } else {
            periods.push_back({static_cast<std::int32_t>(start), static_cast<std::int32_t>(end), a});
        }
    }
    return PrecisionModel(std::move(periods), global);
}

/// Which precision pair applies to a user.
enum class AlphaSource {
    Global,    // the model's global pair for everyone
    PerPeriod, // the period containing the user's median tweet day
};

inline AlphaPair alpha_for_user(const UserAggregate& u, const PrecisionModel& pm, AlphaSource src) {
    return src == AlphaSource::Global ? pm.global_pair() : pm.for_day(u.median_day);
}

namespace detail {

/// 1 - (1-alpha)^n, in log space for large n.
inline double prob_at_least_one(std::int64_t n, double alpha) {
    if (alpha >= 1.0) return 1.0;
    if (alpha <= 0.0) return 0.0;
    if (n > 1000) return -std::expm1(static_cast<double>(n) * std::log1p(-alpha));
    return 1.0 - std::pow(1.0 - alpha, static_cast<double>(n));
}

} // namespace detail

/// Probability that a user with n_a detected-anti and n_p detected-pro tweets
/// has at least one truly anti and one truly pro tweet:
/// 1 - (1-a_a)^n_a - (1-a_p)^n_p + (1-a_a)^n_a (1-a_p)^n_p.
inline double dual_probability(std::int64_t n_a, std::int64_t n_p, double alpha_anti, double alpha_pro) {
    if (n_a < 1 || n_p < 1) throw std::domain_error("dual_probability requires n_a >= 1 and n_p >= 1");
    if (!(alpha_anti >= 0.0 && alpha_anti <= 1.0 && alpha_pro >= 0.0 && alpha_pro <= 1.0))
        throw std::domain_error("dual_probability: precision outside [0,1]");
    // The four-term form factors as a product of the two "at least one" events.
    return detail::prob_at_least_one(n_a, alpha_anti) * detail::prob_at_least_one(n_p, alpha_pro);
}

struct CohortEstimate {
    std::size_t users = 0;   // dual-detected users summed over
    double effective = 0.0;  // N_e with the chosen alpha source
    double effective_min = 0.0;
    double effective_max = 0.0;
};

/// Fills `dual_probability` for every dual-detected user (0 otherwise).
inline void assign_dual_probabilities(std::map<std::string, UserAggregate>& users, const PrecisionModel& pm,
                                      AlphaSource src, unsigned threads = 1) {
    std::vector<UserAggregate*> slots;
    slots.reserve(users.size());
    for (auto& [_, u] : users) slots.push_back(&u);
    parallel_for(slots.size(), threads, [&](std::size_t i) {
        auto& u = *slots[i];
        if (!u.dual_detected()) {
            u.dual_probability = 0.0;
            return;
        }
        const auto a = alpha_for_user(u, pm, src);
        u.dual_probability = dual_probability(u.n_a, u.n_p, a.anti, a.pro);
    });
}

/// N_e = sum of dual probabilities over dual-detected users, plus the
/// bounds from evaluating every user at the model's extreme precision pairs.
/// Summation runs in user_id order so the result is bit-stable.
inline CohortEstimate effective_cohort_size(const std::map<std::string, UserAggregate>& users,
                                            const PrecisionModel& pm, AlphaSource src, unsigned threads = 1) {
    std::vector<const UserAggregate*> dual;
    for (const auto& [_, u] : users)
        if (u.dual_detected()) dual.push_back(&u);
    CohortEstimate est;
    est.users = dual.size();
    if (dual.empty()) return est;
    const auto [lo, hi] = pm.extremes();
    std::vector<double> p(dual.size()), pmin(dual.size()), pmax(dual.size());
    parallel_for(dual.size(), threads, [&](std::size_t i) {
        const auto& u = *dual[i];
        const auto a = alpha_for_user(u, pm, src);
        p[i] = dual_probability(u.n_a, u.n_p, a.anti, a.pro);
        pmin[i] = dual_probability(u.n_a, u.n_p, lo.anti, lo.pro);
        pmax[i] = dual_probability(u.n_a, u.n_p, hi.anti, hi.pro);
    });
    for (std::size_t i = 0; i < dual.size(); ++i) {
        est.effective += p[i];
        est.effective_min += pmin[i];
        est.effective_max += pmax[i];
    }
    return est;
}

/// Sum over an explicit probability list.
inline double effective_cohort_size(const std::vector<double>& dual_probabilities) {
    double s = 0.0;
    for (double p : dual_probabilities) s += p;
    return s;
}

} // namespace stancedyn
