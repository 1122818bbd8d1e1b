#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace stancedyn {

/// Binomial(n, p) probability mass over k = 0..n.
///
/// Uses the multiplicative recurrence P(k+1) = P(k) (n-k)/(k+1) p/(1-p),
/// started from (1-p)^n. When n exceeds 10^3 or (1-p)^n would leave the
/// normal double range, the same recurrence runs on logarithms.
inline std::vector<double> binomial_pmf(std::int64_t n, double p) {
    if (n < 0) throw std::domain_error("binomial_pmf: negative n");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial_pmf: p outside [0,1]");
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    if (p == 0.0) {
        pmf.front() = 1.0;
        return pmf;
    }
    if (p == 1.0) {
        pmf.back() = 1.0;
        return pmf;
    }
    const double log_q = std::log1p(-p);
    const double log_p0 = static_cast<double>(n) * log_q;
    if (n <= 1000 && log_p0 > -690.0) {
        const double ratio = p / (1.0 - p);
        double v = std::exp(log_p0);
        pmf[0] = v;
        for (std::int64_t k = 0; k < n; ++k) {
            v *= static_cast<double>(n - k) / static_cast<double>(k + 1) * ratio;
            pmf[static_cast<std::size_t>(k + 1)] = v;
        }
        return pmf;
    }
    const double log_ratio = std::log(p) - log_q;
    double lv = log_p0;
    pmf[0] = std::exp(lv);
    for (std::int64_t k = 0; k < n; ++k) {
        lv += std::log(static_cast<double>(n - k)) - std::log(static_cast<double>(k + 1)) + log_ratio;
        pmf[static_cast<std::size_t>(k + 1)] = std::exp(lv);
    }
    return pmf;
}

} // namespace stancedyn
