#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stancedyn/binomial.hpp"
#include "stancedyn/cohort.hpp"
#include "stancedyn/error.hpp"
#include "stancedyn/ingest.hpp"
#include "stancedyn/parallel.hpp"

namespace stancedyn {

/// How the leaning probabilities are evaluated.
///
/// AsWritten follows the published summation bounds literally: outcomes with
/// zero true tweets on the outer side are dropped, and the inner pro-sum stops
/// at min(n_a + 1, n_p). Exact is P(J > I), P(I > J), P(I = J) for
/// I ~ Bin(n_a, alpha_anti), J ~ Bin(n_p, alpha_pro) over the full support.
enum class ProbabilityMode { AsWritten, Exact };

inline std::string_view to_string(ProbabilityMode m) {
    return m == ProbabilityMode::Exact ? "exact" : "as-written";
}

inline std::optional<ProbabilityMode> parse_mode(std::string_view s) {
    if (s == "exact") return ProbabilityMode::Exact;
    if (s == "as-written") return ProbabilityMode::AsWritten;
    return std::nullopt;
}

enum class LeaningClass { ProLeaning, AntiLeaning, Balanced, PurePro, PureAnti, AllDeleted };

inline constexpr std::array<LeaningClass, 6> all_classes = {LeaningClass::ProLeaning, LeaningClass::AntiLeaning,
                                                            LeaningClass::Balanced,   LeaningClass::PurePro,
                                                            LeaningClass::PureAnti,   LeaningClass::AllDeleted};

inline std::string_view to_string(LeaningClass c) {
    switch (c) {
    case LeaningClass::ProLeaning: return "pro-leaning";
    case LeaningClass::AntiLeaning: return "anti-leaning";
    case LeaningClass::Balanced: return "balanced";
    case LeaningClass::PurePro: return "pure-pro";
    case LeaningClass::PureAnti: return "pure-anti";
    case LeaningClass::AllDeleted: return "all-deleted";
    }
    return "?";
}

inline std::optional<LeaningClass> parse_class(std::string_view s) {
    for (auto c : all_classes)
        if (to_string(c) == s) return c;
    return std::nullopt;
}

struct LeaningProbabilities {
    double pr_pro = 0.0;
    double pr_anti = 0.0;
    double pr_bal = 0.0;
    ProbabilityMode mode = ProbabilityMode::AsWritten;
};

namespace detail {

inline void require_counts(std::int64_t n_a, std::int64_t n_p) {
    if (n_a < 1 || n_p < 1) throw std::domain_error("leaning probabilities require n_a >= 1 and n_p >= 1");
}

/// suffix[k] = sum_{j >= k} pmf[j], with suffix[n+1] = 0.
inline std::vector<double> suffix_sums(const std::vector<double>& pmf) {
    std::vector<double> s(pmf.size() + 1, 0.0);
    for (std::size_t k = pmf.size(); k-- > 0;) s[k] = s[k + 1] + pmf[k];
    return s;
}

/// prefix[k] = sum_{j < k} pmf[j].
inline std::vector<double> prefix_sums(const std::vector<double>& pmf) {
    std::vector<double> s(pmf.size() + 1, 0.0);
    for (std::size_t k = 0; k < pmf.size(); ++k) s[k + 1] = s[k] + pmf[k];
    return s;
}

/// P(B > A) with A ~ outer pmf, B ~ inner pmf.
inline double exact_greater(const std::vector<double>& outer, const std::vector<double>& inner) {
    const auto tail = suffix_sums(inner);
    double s = 0.0;
    for (std::size_t i = 0; i < outer.size() && i + 1 < tail.size(); ++i) s += outer[i] * tail[i + 1];
    return s;
}

/// The printed double sum: outer i = 1..min(n_o, n_i - 1),
/// inner j = i+1..min(n_o + 1, n_i).
inline double as_written_greater(const std::vector<double>& outer, const std::vector<double>& inner) {
    const auto n_o = static_cast<std::int64_t>(outer.size()) - 1;
    const auto n_i = static_cast<std::int64_t>(inner.size()) - 1;
    const auto pre = prefix_sums(inner);
    const std::int64_t i_hi = std::min(n_o, n_i - 1);
    const std::int64_t j_hi = std::min(n_o + 1, n_i);
    double s = 0.0;
    for (std::int64_t i = 1; i <= i_hi; ++i) {
        if (i + 1 > j_hi) continue;
        const double inner_mass = pre[static_cast<std::size_t>(j_hi + 1)] - pre[static_cast<std::size_t>(i + 1)];
        s += outer[static_cast<std::size_t>(i)] * inner_mass;
    }
    return s;
}

inline double equal_mass(const std::vector<double>& a, const std::vector<double>& b, std::size_t from) {
    double s = 0.0;
    for (std::size_t i = from; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace detail

/// Probability the user truly sent more pro than anti tweets.
inline double pr_pro(std::int64_t n_a, std::int64_t n_p, double alpha_anti, double alpha_pro, ProbabilityMode mode) {
    detail::require_counts(n_a, n_p);
    const auto pa = binomial_pmf(n_a, alpha_anti);
    const auto pp = binomial_pmf(n_p, alpha_pro);
    return mode == ProbabilityMode::Exact ? detail::exact_greater(pa, pp) : detail::as_written_greater(pa, pp);
}

/// Mirror image of pr_pro.
inline double pr_anti(std::int64_t n_a, std::int64_t n_p, double alpha_anti, double alpha_pro,
                      ProbabilityMode mode) {
    detail::require_counts(n_a, n_p);
    const auto pa = binomial_pmf(n_a, alpha_anti);
    const auto pp = binomial_pmf(n_p, alpha_pro);
    return mode == ProbabilityMode::Exact ? detail::exact_greater(pp, pa) : detail::as_written_greater(pp, pa);
}

inline double pr_bal(std::int64_t n_a, std::int64_t n_p, double alpha_anti, double alpha_pro, ProbabilityMode mode) {
    detail::require_counts(n_a, n_p);
    const auto pa = binomial_pmf(n_a, alpha_anti);
    const auto pp = binomial_pmf(n_p, alpha_pro);
    return detail::equal_mass(pa, pp, mode == ProbabilityMode::Exact ? 0 : 1);
}

/// All three at once, sharing the two pmfs.
inline LeaningProbabilities leaning_probabilities(std::int64_t n_a, std::int64_t n_p, double alpha_anti,
                                                  double alpha_pro, ProbabilityMode mode) {
    detail::require_counts(n_a, n_p);
    const auto pa = binomial_pmf(n_a, alpha_anti);
    const auto pp = binomial_pmf(n_p, alpha_pro);
    LeaningProbabilities out;
    out.mode = mode;
    if (mode == ProbabilityMode::Exact) {
        out.pr_pro = detail::exact_greater(pa, pp);
        out.pr_anti = detail::exact_greater(pp, pa);
        out.pr_bal = detail::equal_mass(pa, pp, 0);
    } else {
        out.pr_pro = detail::as_written_greater(pa, pp);
        out.pr_anti = detail::as_written_greater(pp, pa);
        out.pr_bal = detail::equal_mass(pa, pp, 1);
    }
    return out;
}

inline void check_epsilon(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon < 0.5)) throw std::domain_error("epsilon must lie in [0, 0.5)");
}

/// Pro-leaning (anti-leaning) when that probability beats both others by
/// more than epsilon; balanced otherwise.
inline LeaningClass classify_user(const LeaningProbabilities& p, double epsilon) {
    check_epsilon(epsilon);
    if (p.pr_pro > p.pr_anti + epsilon && p.pr_pro > p.pr_bal + epsilon) return LeaningClass::ProLeaning;
    if (p.pr_anti > p.pr_pro + epsilon && p.pr_anti > p.pr_bal + epsilon) return LeaningClass::AntiLeaning;
    return LeaningClass::Balanced;
}

struct LeaningResult {
    std::string user_id;
    std::int64_t n_a = 0;
    std::int64_t n_p = 0;
    double dual_probability = 0.0;
    LeaningProbabilities probabilities;
    double epsilon = 0.05;
    LeaningClass cls = LeaningClass::Balanced;
};

struct ClassifyParams {
    PrecisionModel precision{AlphaPair{}};
    AlphaSource alpha_source = AlphaSource::Global;
    ProbabilityMode mode = ProbabilityMode::AsWritten;
    double epsilon = 0.05;
    double min_dual_probability = 0.0; // users below are left out
    unsigned threads = 1;
};

/// Classifies every dual-detected user, in user_id order.
inline std::vector<LeaningResult> classify_users(const std::map<std::string, UserAggregate>& users,
                                                 const ClassifyParams& params) {
    check_epsilon(params.epsilon);
    std::vector<const UserAggregate*> dual;
    for (const auto& [_, u] : users)
        if (u.dual_detected()) dual.push_back(&u);
    std::vector<LeaningResult> results(dual.size());
    std::vector<char> keep(dual.size(), 0);
    parallel_for(dual.size(), params.threads, [&](std::size_t i) {
        const auto& u = *dual[i];
        const auto a = alpha_for_user(u, params.precision, params.alpha_source);
        auto& r = results[i];
        r.user_id = u.user_id;
        r.n_a = u.n_a;
        r.n_p = u.n_p;
        r.dual_probability = dual_probability(u.n_a, u.n_p, a.anti, a.pro);
        if (r.dual_probability < params.min_dual_probability) return;
        r.probabilities = leaning_probabilities(u.n_a, u.n_p, a.anti, a.pro, params.mode);
        r.epsilon = params.epsilon;
        r.cls = classify_user(r.probabilities, params.epsilon);
        keep[i] = 1;
    });
    std::vector<LeaningResult> out;
    out.reserve(results.size());
    for (std::size_t i = 0; i < results.size(); ++i)
        if (keep[i]) out.push_back(std::move(results[i]));
    return out;
}

struct SweepRow {
    double epsilon = 0.0;
    std::size_t pro = 0;
    std::size_t anti = 0;
    std::size_t bal = 0;
};

/// Class counts for each tolerance in an ascending grid.
inline std::vector<SweepRow> sweep_epsilon(const std::vector<LeaningProbabilities>& users,
                                           const std::vector<double>& grid) {
    if (grid.empty()) throw std::domain_error("sweep_epsilon: empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        check_epsilon(grid[i]);
        if (i > 0 && !(grid[i] > grid[i - 1])) throw std::domain_error("sweep_epsilon: grid must be ascending");
    }
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double eps : grid) {
        SweepRow row{eps};
        for (const auto& p : users) {
            switch (classify_user(p, eps)) {
            case LeaningClass::ProLeaning: ++row.pro; break;
            case LeaningClass::AntiLeaning: ++row.anti; break;
            default: ++row.bal; break;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<SweepRow> sweep_epsilon(const std::vector<LeaningResult>& users, const std::vector<double>& grid) {
    std::vector<LeaningProbabilities> probs;
    probs.reserve(users.size());
    for (const auto& u : users) probs.push_back(u.probabilities);
    return sweep_epsilon(probs, grid);
}

/// Class transitions between a classified snapshot and a later snapshot in
/// which some tweets were deleted. Rows are the three leaning classes,
/// columns all six destinations.
struct MigrationMatrix {
    std::array<std::array<std::size_t, 6>, 3> cells{};
    std::size_t missing = 0; // users absent from the later snapshot (also counted as AllDeleted)

    std::size_t& at(LeaningClass from, LeaningClass to) {
        return cells[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
    }
    std::size_t at(LeaningClass from, LeaningClass to) const {
        return cells[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
    }
    std::size_t row_sum(LeaningClass from) const {
        std::size_t s = 0;
        for (auto v : cells[static_cast<std::size_t>(from)]) s += v;
        return s;
    }
};

/// Destination class for a user's retained counts.
inline LeaningClass migration_destination(const UserAggregate& after, const ClassifyParams& params) {
    if (after.n_a == 0 && after.n_p == 0) return LeaningClass::AllDeleted;
    if (after.n_a == 0) return LeaningClass::PurePro;
    if (after.n_p == 0) return LeaningClass::PureAnti;
    const auto a = alpha_for_user(after, params.precision, params.alpha_source);
    return classify_user(leaning_probabilities(after.n_a, after.n_p, a.anti, a.pro, params.mode), params.epsilon);
}

inline MigrationMatrix migration_matrix(const std::vector<LeaningResult>& before,
                                        const std::map<std::string, UserAggregate>& after,
                                        const ClassifyParams& params) {
    MigrationMatrix m;
    for (const auto& b : before) {
        if (b.cls != LeaningClass::ProLeaning && b.cls != LeaningClass::AntiLeaning && b.cls != LeaningClass::Balanced)
            throw DataError("migration source class must be a leaning class");
        auto it = after.find(b.user_id);
        if (it == after.end()) {
            ++m.missing;
            ++m.at(b.cls, LeaningClass::AllDeleted);
            continue;
        }
        ++m.at(b.cls, migration_destination(it->second, params));
    }
    return m;
}

} // namespace stancedyn
