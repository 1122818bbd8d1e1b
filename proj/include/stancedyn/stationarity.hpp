#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stancedyn/error.hpp"
#include "stancedyn/stats.hpp"

namespace stancedyn {

struct AdfResult {
    double statistic = 0.0;
    double critical_5pct = 0.0;
    bool reject_unit_root_at_5pct = false;
    int lag_used = 0;
    std::size_t nobs = 0;
};

struct KpssResult {
    double statistic = 0.0;
    double critical_5pct = 0.463;
    bool reject_stationarity_at_5pct = false;
    int bandwidth = 0;
};

/// floor(12 (N/100)^(1/4)).
inline int schwert_lag(std::size_t n) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

/// floor(4 (N/100)^(1/4)).
inline int kpss_bandwidth(std::size_t n) {
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

/// 5% Dickey-Fuller critical value for the constant-only regression,
/// interpolated linearly between tabulated sample sizes.
inline double dickey_fuller_critical_5pct(std::size_t n) {
    static constexpr std::array<std::pair<double, double>, 5> table = {
        {{25.0, -3.00}, {50.0, -2.93}, {100.0, -2.89}, {250.0, -2.88}, {500.0, -2.87}}};
    static constexpr double asymptotic = -2.86;
    const double x = static_cast<double>(n);
    if (x <= table.front().first) return table.front().second;
    for (std::size_t i = 1; i < table.size(); ++i) {
        if (x <= table[i].first) {
            const auto [x0, y0] = table[i - 1];
            const auto [x1, y1] = table[i];
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
        }
    }
    // beyond the last row, move toward the asymptote linearly in 1/N
    const auto [xl, yl] = table.back();
    return asymptotic + (yl - asymptotic) * (xl / x);
}

namespace detail {

inline void require_variance(std::span<const double> x, const char* who) {
    if (x.size() < 20) throw std::invalid_argument(std::string(who) + ": series needs at least 20 values");
    if (stats::variance(x) <= 0.0) throw DataError(std::string(who) + ": zero variance");
}

} // namespace detail

/// Augmented Dickey-Fuller with a constant:
///   dy_t = c + g y_{t-1} + sum_{i=1..p} b_i dy_{t-i} + e_t,
/// statistic is the OLS t-ratio of g. Lag p defaults to the Schwert rule.
inline AdfResult adf_test(std::span<const double> y, std::optional<int> max_lag = std::nullopt) {
    detail::require_variance(y, "adf_test");
    const int p = max_lag ? *max_lag : schwert_lag(y.size());
    if (p < 0) throw std::invalid_argument("adf_test: negative lag");
    const std::size_t n = y.size();
    if (static_cast<std::size_t>(p) + 1 >= n) throw std::invalid_argument("adf_test: lag too large for series");
    std::vector<double> dy(n - 1);
    for (std::size_t t = 1; t < n; ++t) dy[t - 1] = y[t] - y[t - 1];
    const std::size_t nobs = dy.size() - static_cast<std::size_t>(p);
    const Eigen::Index k = p + 2;
    if (static_cast<Eigen::Index>(nobs) <= k) throw std::invalid_argument("adf_test: too few observations for lag");

    Eigen::MatrixXd X(static_cast<Eigen::Index>(nobs), k);
    Eigen::VectorXd Y(static_cast<Eigen::Index>(nobs));
    for (std::size_t r = 0; r < nobs; ++r) {
        const std::size_t t = r + static_cast<std::size_t>(p); // index into dy
        const auto row = static_cast<Eigen::Index>(r);
        Y(row) = dy[t];
        X(row, 0) = y[t]; // level y_{t-1} in dy's indexing
        for (int i = 1; i <= p; ++i) X(row, i) = dy[t - static_cast<std::size_t>(i)];
        X(row, k - 1) = 1.0;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) throw DataError("adf_test: singular regression");
    const Eigen::VectorXd beta = qr.solve(Y);
    const Eigen::VectorXd resid = Y - X * beta;
    const double s2 = resid.squaredNorm() / static_cast<double>(static_cast<Eigen::Index>(nobs) - k);
    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
    const double se = std::sqrt(s2 * xtx_inv(0, 0));

    AdfResult r;
    r.statistic = beta(0) / se;
    r.lag_used = p;
    r.nobs = nobs;
    r.critical_5pct = dickey_fuller_critical_5pct(n);
    r.reject_unit_root_at_5pct = r.statistic < r.critical_5pct;
    return r;
}

/// Level-stationarity KPSS with a Bartlett-kernel long-run variance.
inline KpssResult kpss_test(std::span<const double> x, std::optional<int> bandwidth = std::nullopt) {
    detail::require_variance(x, "kpss_test");
    const std::size_t n = x.size();
    const int lags = bandwidth ? *bandwidth : kpss_bandwidth(n);
    if (lags < 0 || static_cast<std::size_t>(lags) >= n) throw std::invalid_argument("kpss_test: bad bandwidth");
    const double m = stats::mean(x);
    std::vector<double> e(n);
    for (std::size_t t = 0; t < n; ++t) e[t] = x[t] - m;

    double eta = 0.0, partial = 0.0;
    for (double v : e) {
        partial += v;
        eta += partial * partial;
    }
    eta /= static_cast<double>(n) * static_cast<double>(n);

    double s = 0.0;
    for (double v : e) s += v * v;
    for (int l = 1; l <= lags; ++l) {
        double acc = 0.0;
        for (std::size_t t = static_cast<std::size_t>(l); t < n; ++t) acc += e[t] * e[t - static_cast<std::size_t>(l)];
        s += 2.0 * acc * (1.0 - static_cast<double>(l) / static_cast<double>(lags + 1));
    }
    s /= static_cast<double>(n);

    KpssResult r;
    r.statistic = eta / s;
    r.bandwidth = lags;
    r.reject_stationarity_at_5pct = r.statistic > r.critical_5pct;
    return r;
}

} // namespace stancedyn
