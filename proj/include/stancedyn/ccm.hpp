#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stancedyn/error.hpp"
#include "stancedyn/knn.hpp"
#include "stancedyn/parallel.hpp"
#include "stancedyn/rng.hpp"
#include "stancedyn/stats.hpp"

namespace stancedyn {

/// Time-delay embedding. Point t is (s(t), s(t - tau), ..., s(t - (E-1) tau))
/// for t = (E-1) tau .. n-1, newest coordinate first.
struct DelayEmbedding {
    std::size_t source_length = 0;
    int E = 1;
    int tau = 1;
    std::vector<double> coords;           // row-major, size() * E values
    std::vector<std::size_t> time_index;  // source index of each point

    std::size_t size() const { return time_index.size(); }
    std::span<const double> point(std::size_t i) const {
        return std::span<const double>(coords).subspan(i * static_cast<std::size_t>(E), static_cast<std::size_t>(E));
    }
};

inline std::size_t embedding_offset(int E, int tau) {
    return static_cast<std::size_t>(E - 1) * static_cast<std::size_t>(tau);
}

inline DelayEmbedding delay_embed(std::span<const double> series, int E, int tau) {
    if (E < 1) throw std::invalid_argument("delay_embed: E must be >= 1");
    if (tau < 1) throw std::invalid_argument("delay_embed: tau must be >= 1");
    const std::size_t offset = embedding_offset(E, tau);
    if (series.size() <= offset + 1)
        throw std::invalid_argument("delay_embed: series of length " + std::to_string(series.size()) +
                                    " too short; needs at least " + std::to_string(offset + 2));
    DelayEmbedding emb;
    emb.source_length = series.size();
    emb.E = E;
    emb.tau = tau;
    const std::size_t count = series.size() - offset;
    emb.coords.reserve(count * static_cast<std::size_t>(E));
    emb.time_index.reserve(count);
    for (std::size_t t = offset; t < series.size(); ++t) {
        emb.time_index.push_back(t);
        for (int j = 0; j < E; ++j) emb.coords.push_back(series[t - static_cast<std::size_t>(j * tau)]);
    }
    return emb;
}

struct CrossMapOptions {
    /// Library points within this many time steps of the predicted point are
    /// excluded from its neighbors. 0 excludes only the point itself.
    std::size_t exclusion_radius = 0;
    /// Libraries at or above this size use a k-d tree instead of a scan.
    std::size_t tree_threshold = 50000;
};

struct CrossMapPrediction {
    std::vector<std::size_t> points;            // embedding rows predicted
    std::vector<double> estimate;               // estimated target values
    std::vector<double> observed;               // actual target values
    std::vector<std::vector<double>> weights;   // per-point neighbor weights
};

namespace detail {

/// Simplex weights exp(-d_k / d_1), normalized. When the nearest distance is
/// zero, exact matches share the weight uniformly.
inline std::vector<double> simplex_weights(const std::vector<Neighbor>& nn) {
    std::vector<double> w(nn.size(), 0.0);
    if (nn.empty()) return w;
    const double d1 = std::sqrt(nn.front().first);
    double total = 0.0;
    for (std::size_t k = 0; k < nn.size(); ++k) {
        const double d = std::sqrt(nn[k].first);
        w[k] = d1 > 0.0 ? std::exp(-d / d1) : (d == 0.0 ? 1.0 : 0.0);
        total += w[k];
    }
    for (auto& v : w) v /= total;
    return w;
}

inline bool outside_radius(std::size_t a, std::size_t b, std::size_t radius) {
    const std::size_t gap = a > b ? a - b : b - a;
    return gap > radius;
}

} // namespace detail

/// Estimates target(t) for every embedding point from its E+1 nearest
/// neighbors inside `library` (embedding row ids).
inline CrossMapPrediction cross_map_predict(std::span<const double> target, const DelayEmbedding& shadow,
                                            std::span<const std::size_t> library, const CrossMapOptions& opts = {},
                                            bool keep_weights = false) {
    if (target.size() != shadow.source_length) throw std::invalid_argument("cross map: target/shadow length mismatch");
    const auto k = static_cast<std::size_t>(shadow.E) + 1;
    CrossMapPrediction out;
    const std::size_t n = shadow.size();
    out.points.reserve(n);
    out.estimate.reserve(n);
    out.observed.reserve(n);
    std::optional<KdTree> tree;
    if (library.size() >= opts.tree_threshold)
        tree.emplace(shadow.coords, static_cast<std::size_t>(shadow.E),
                     std::vector<std::size_t>(library.begin(), library.end()));
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t tp = shadow.time_index[p];
        auto keep = [&](std::size_t id) {
            return detail::outside_radius(shadow.time_index[id], tp, opts.exclusion_radius);
        };
        std::vector<Neighbor> nn;
        if (tree) {
            nn = tree->query(shadow.point(p), k, keep);
        } else {
            NeighborHeap heap(k);
            for (std::size_t id : library)
                if (keep(id)) heap.offer({squared_distance(shadow.point(p), shadow.point(id)), id});
            nn = std::move(heap).sorted();
        }
        if (nn.empty()) continue;
        const auto w = detail::simplex_weights(nn);
        double est = 0.0;
        for (std::size_t j = 0; j < nn.size(); ++j) est += w[j] * target[shadow.time_index[nn[j].second]];
        out.points.push_back(p);
        out.estimate.push_back(est);
        out.observed.push_back(target[tp]);
        if (keep_weights) out.weights.push_back(w);
    }
    return out;
}

/// Draws `size` distinct embedding rows (partial Fisher-Yates).
inline std::vector<std::size_t> draw_library(std::size_t points, std::size_t size, std::mt19937_64& rng) {
    if (size > points) throw std::invalid_argument("library larger than the embedding");
    std::vector<std::size_t> ids(points);
    for (std::size_t i = 0; i < points; ++i) ids[i] = i;
    for (std::size_t i = 0; i < size; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, points - 1);
        std::swap(ids[i], ids[pick(rng)]);
    }
    ids.resize(size);
    std::sort(ids.begin(), ids.end());
    return ids;
}

/// Cross-map skill: Pearson correlation between the target and its estimate
/// from a random library of `library_size` shadow points.
inline double simplex_cross_map(std::span<const double> target, const DelayEmbedding& shadow,
                                std::size_t library_size, std::mt19937_64& rng, const CrossMapOptions& opts = {}) {
    if (library_size < static_cast<std::size_t>(shadow.E) + 2)
        throw std::invalid_argument("simplex_cross_map: library size must be >= E + 2");
    if (stats::variance(target) <= 0.0) throw DataError("zero variance target");
    const auto lib = draw_library(shadow.size(), library_size, rng);
    const auto pred = cross_map_predict(target, shadow, lib, opts);
    const double r = stats::pearson(pred.observed, pred.estimate);
    return std::isnan(r) ? 0.0 : r;
}

struct CcmResult {
    std::vector<std::size_t> library_sizes;
    /// y estimated from x's shadow manifold (high when y drives x).
    std::vector<double> skill_x_xmap_y;
    /// x estimated from y's shadow manifold (high when x drives y).
    std::vector<double> skill_y_xmap_x;
    std::vector<double> sd_x_xmap_y;
    std::vector<double> sd_y_xmap_x;
    int E = 0;
    int tau = 0;
    std::size_t num_samples = 0;
    std::uint64_t seed = 0;
};

struct CcmOptions {
    CrossMapOptions cross_map;
    bool standardize = true;
    unsigned threads = 1;
};

/// Mean cross-map skill over `samples` random libraries per size, both
/// directions. Deterministic for a given seed, whatever the thread count.
inline CcmResult skill_curve(std::span<const double> x, std::span<const double> y, int E, int tau,
                             std::vector<std::size_t> library_sizes, std::size_t samples, std::uint64_t seed,
                             const CcmOptions& opts = {}) {
    if (x.size() != y.size()) throw std::invalid_argument("skill_curve: series lengths differ");
    if (samples == 0) throw std::invalid_argument("skill_curve: samples must be >= 1");
    if (library_sizes.empty()) throw std::invalid_argument("skill_curve: no library sizes");
    const std::vector<double> xs = opts.standardize ? stats::standardize(x) : std::vector<double>(x.begin(), x.end());
    const std::vector<double> ys = opts.standardize ? stats::standardize(y) : std::vector<double>(y.begin(), y.end());
    if (stats::variance(xs) <= 0.0 || stats::variance(ys) <= 0.0) throw DataError("zero variance target");
    const auto mx = delay_embed(xs, E, tau);
    const auto my = delay_embed(ys, E, tau);
    for (std::size_t i = 0; i < library_sizes.size(); ++i) {
        if (i > 0 && library_sizes[i] <= library_sizes[i - 1])
            throw std::invalid_argument("skill_curve: library sizes must be strictly ascending");
        if (library_sizes[i] > mx.size())
            throw std::invalid_argument("skill_curve: library size " + std::to_string(library_sizes[i]) +
                                        " exceeds the " + std::to_string(mx.size()) + " embedded points");
        if (library_sizes[i] < static_cast<std::size_t>(E) + 2)
            throw std::invalid_argument("skill_curve: library size must be >= E + 2");
    }

    const std::size_t nsizes = library_sizes.size();
    // skills[direction][size][sample]; direction 0 = x xmap y, 1 = y xmap x
    std::vector<double> skills(2 * nsizes * samples);
    parallel_for(skills.size(), opts.threads, [&](std::size_t job) {
        const std::size_t dir = job / (nsizes * samples);
        const std::size_t si = (job / samples) % nsizes;
        const std::size_t sample = job % samples;
        std::mt19937_64 rng(detail::stream_seed(seed, dir, si, sample));
        // x xmap y: y is estimated from x's manifold
        skills[job] = dir == 0 ? simplex_cross_map(ys, mx, library_sizes[si], rng, opts.cross_map)
                               : simplex_cross_map(xs, my, library_sizes[si], rng, opts.cross_map);
    });

    CcmResult r;
    r.library_sizes = std::move(library_sizes);
    r.E = E;
    r.tau = tau;
    r.num_samples = samples;
    r.seed = seed;
    for (std::size_t dir = 0; dir < 2; ++dir) {
        auto& mean_out = dir == 0 ? r.skill_x_xmap_y : r.skill_y_xmap_x;
        auto& sd_out = dir == 0 ? r.sd_x_xmap_y : r.sd_y_xmap_x;
        for (std::size_t si = 0; si < nsizes; ++si) {
            const std::span<const double> s(skills.data() + (dir * nsizes + si) * samples, samples);
            mean_out.push_back(stats::mean(s));
            sd_out.push_back(std::sqrt(stats::variance(s)));
        }
    }
    return r;
}

/// `count` library sizes spread evenly from E + 2 to the number of
/// embedded points of a series with `length` values.
inline std::vector<std::size_t> default_library_sizes(std::size_t length, int E, int tau, std::size_t count = 10) {
    const std::size_t offset = embedding_offset(E, tau);
    if (length <= offset + 1) throw std::invalid_argument("series too short for embedding");
    const std::size_t hi = length - offset;
    const std::size_t lo = std::min(hi, static_cast<std::size_t>(E) + 2);
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < count; ++i) {
        const double f = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        const auto s = static_cast<std::size_t>(std::llround(static_cast<double>(lo) + f * static_cast<double>(hi - lo)));
        if (sizes.empty() || s > sizes.back()) sizes.push_back(s);
    }
    return sizes;
}

enum class CausalDirection { XDrivenByY, YDrivenByX, Indeterminate };

inline std::string_view to_string(CausalDirection d) {
    switch (d) {
    case CausalDirection::XDrivenByY: return "x-driven-by-y";
    case CausalDirection::YDrivenByX: return "y-driven-by-x";
    case CausalDirection::Indeterminate: return "indeterminate";
    }
    return "?";
}

struct CausalVerdict {
    CausalDirection driven = CausalDirection::Indeterminate;
    double margin = 0.0; // |difference of final skills|
    bool converged = false;
};

/// Compares skills at the largest library. The direction with the higher
/// skill is taken as driven by the other variable; the verdict is
/// Indeterminate when the margin is below `min_margin` or the winning curve
/// did not rise by `min_rise` from its smallest library.
inline CausalVerdict causal_compare(const CcmResult& r, double min_margin = 0.05, double min_rise = 0.02) {
    CausalVerdict v;
    if (r.skill_x_xmap_y.empty() || r.skill_y_xmap_x.empty()) return v;
    const double a = r.skill_x_xmap_y.back(); // high: x carries y's signature, y drives x
    const double b = r.skill_y_xmap_x.back(); // high: x drives y
    v.margin = std::abs(a - b);
    const auto& winner = a > b ? r.skill_x_xmap_y : r.skill_y_xmap_x;
    v.converged = winner.size() == 1 || winner.back() >= winner.front() + min_rise;
    if (v.margin < min_margin || !v.converged) return v;
    v.driven = a > b ? CausalDirection::XDrivenByY : CausalDirection::YDrivenByX;
    return v;
}

struct EmbeddingScore {
    int E = 0;
    double skill_x_xmap_y = 0.0;
    double skill_y_xmap_x = 0.0;
    double score() const { return 0.5 * (skill_x_xmap_y + skill_y_xmap_x); }
};

/// Full-library cross-map skill for each candidate E; the best is the one
/// with the highest mean skill over both directions.
inline std::vector<EmbeddingScore> sweep_embedding_dimension(std::span<const double> x, std::span<const double> y,
                                                            int tau, const std::vector<int>& dims,
                                                            const CcmOptions& opts = {}) {
    std::vector<EmbeddingScore> out;
    for (int E : dims) {
        const std::size_t offset = embedding_offset(E, tau);
        if (x.size() <= offset + static_cast<std::size_t>(E) + 2) break;
        const std::size_t points = x.size() - offset;
        const auto r = skill_curve(x, y, E, tau, {points}, 1, 0, opts);
        out.push_back({E, r.skill_x_xmap_y.front(), r.skill_y_xmap_x.front()});
    }
    return out;
}

} // namespace stancedyn
