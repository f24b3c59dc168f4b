#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "fairtest/errors.hpp"

namespace fairtest {

// Midranks of `values`: ties share the average of the positions they occupy
// in the ascending sort (1-based).
inline std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
        i = j + 1;
    }
    return ranks;
}

// Kruskal-Wallis rank-sum statistic H for two groups, computed as the
// between-group rank variance over its expected scale N(N+1)/12, on midranks
// of the pooled sample. With ties the statistic is divided by
// 1 - sum(t^3 - t)/(N^3 - N); on tie-free data this reduces to the closed
// form 12/(N(N+1)) * sum(R_f^2/n_f) - 3(N+1).
inline double kruskal_wallis_h(std::span<const double> group0, std::span<const double> group1) {
    if (group0.empty() || group1.empty())
        throw degenerate_partition_error("kruskal_wallis_h requires two nonempty groups");
    const std::size_t n0 = group0.size();
    const std::size_t n1 = group1.size();
    const std::size_t n = n0 + n1;
    if (n < 3) throw degenerate_partition_error("kruskal_wallis_h requires at least 3 values");

    std::vector<double> pooled;
    pooled.reserve(n);
    pooled.insert(pooled.end(), group0.begin(), group0.end());
    pooled.insert(pooled.end(), group1.begin(), group1.end());
    const std::vector<double> ranks = midranks(pooled);

    double r0 = 0.0;
    for (std::size_t i = 0; i < n0; ++i) r0 += ranks[i];
    double r1 = 0.0;
    for (std::size_t i = n0; i < n; ++i) r1 += ranks[i];

    const double grand_mean = 0.5 * static_cast<double>(n + 1);
    const double between =
        static_cast<double>(n0) * (r0 / n0 - grand_mean) * (r0 / n0 - grand_mean) +
        static_cast<double>(n1) * (r1 / n1 - grand_mean) * (r1 / n1 - grand_mean);
    const double scale = static_cast<double>(n) * static_cast<double>(n + 1) / 12.0;
    double h = between / scale;

    // Tie correction over pooled tie groups.
    std::sort(pooled.begin(), pooled.end());
    double tie_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[j + 1] == pooled[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_sum += t * t * t - t;
        i = j + 1;
    }
    const double nn = static_cast<double>(n);
    const double correction = 1.0 - tie_sum / (nn * nn * nn - nn);
    if (correction == 0.0)
        throw undefined_statistic_error("all pooled values identical, H undefined");
    return h / correction;
}

namespace detail {

// Inverse standard normal CDF: Acklam's rational approximation refined with
// one Halley step against erfc, good to ~1e-15.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw parameter_error("normal quantile requires p in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement: e = Phi(x) - p.
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
    return x;
}

}  // namespace detail

// (1 - alpha) quantile of the chi-square distribution with 1 degree of
// freedom; the H-test critical value.
inline double chi_square_critical(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw parameter_error("alpha must lie in (0,1)");
    const double z = detail::normal_quantile(1.0 - alpha / 2.0);
    return z * z;
}

}  // namespace fairtest
