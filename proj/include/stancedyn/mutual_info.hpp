#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace stancedyn {

/// Equal-frequency bin labels in [0, bins). Bin of v is
/// floor(rank(v) * bins / n) with rank the count of strictly smaller values,
/// so tied values always share a bin.
inline std::vector<int> quantile_bins(std::span<const double> x, int bins) {
    if (bins < 1) throw std::invalid_argument("quantile_bins: bins must be >= 1");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> out(x.size());
    const auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto rank = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), x[i]) - sorted.begin());
        out[i] = std::min(bins - 1, static_cast<int>(std::floor(rank * bins / n)));
    }
    return out;
}

/// Plug-in mutual information (nats) on a bins x bins equal-frequency grid.
inline double mutual_information(std::span<const double> x, std::span<const double> y, int bins = 16) {
    if (x.size() != y.size()) throw std::invalid_argument("mutual_information: length mismatch");
    if (x.empty()) throw std::invalid_argument("mutual_information: empty input");
    const auto bx = quantile_bins(x, bins);
    const auto by = quantile_bins(y, bins);
    const auto b = static_cast<std::size_t>(bins);
    std::vector<double> joint(b * b, 0.0), px(b, 0.0), py(b, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto ix = static_cast<std::size_t>(bx[i]), iy = static_cast<std::size_t>(by[i]);
        joint[ix * b + iy] += 1.0;
        px[ix] += 1.0;
        py[iy] += 1.0;
    }
    const auto n = static_cast<double>(x.size());
    double mi = 0.0;
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t j = 0; j < b; ++j) {
            const double c = joint[i * b + j];
            if (c > 0.0) mi += c / n * std::log(c * n / (px[i] * py[j]));
        }
    return std::max(0.0, mi);
}

struct MiPoint {
    int lag = 0;
    double mi_nats = 0.0;
};

struct MiCurve {
    std::vector<MiPoint> points;
    int argmin = 0; // global minimum (first on ties)
    int argmax = 0;
};

/// MI between x(t - lag) and y(t) over the overlapping window, for
/// lag = 0..max_lag. A positive lag means y trails x.
inline MiCurve mutual_information_lag(std::span<const double> x, std::span<const double> y, int max_lag,
                                      int bins = 16) {
    if (x.size() != y.size()) throw std::invalid_argument("mutual_information_lag: length mismatch");
    if (max_lag < 0) throw std::invalid_argument("mutual_information_lag: negative max_lag");
    if (static_cast<std::size_t>(max_lag) + 20 > x.size())
        throw std::invalid_argument("mutual_information_lag: need length >= max_lag + 20");
    MiCurve curve;
    const std::size_t n = x.size();
    for (int lag = 0; lag <= max_lag; ++lag) {
        const auto l = static_cast<std::size_t>(lag);
        const double mi = mutual_information(x.subspan(0, n - l), y.subspan(l, n - l), bins);
        curve.points.push_back({lag, mi});
    }
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        if (curve.points[i].mi_nats < curve.points[static_cast<std::size_t>(curve.argmin)].mi_nats)
            curve.argmin = static_cast<int>(i);
        if (curve.points[i].mi_nats > curve.points[static_cast<std::size_t>(curve.argmax)].mi_nats)
            curve.argmax = static_cast<int>(i);
    }
    return curve;
}

} // namespace stancedyn
