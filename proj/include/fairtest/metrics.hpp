#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairtest/rank_stats.hpp"

namespace fairtest {

// Tanimoto coefficient of two activation patterns: common active bits over
// bits active in either. Two all-zero patterns compare as identical (1.0).
inline double tanimoto(std::span<const std::uint8_t> a, std::span<const std::uint8_t> a_prime) {
    if (a.size() != a_prime.size()) throw shape_error("tanimoto: pattern length mismatch");
    std::size_t common = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        na += a[i] != 0;
        nb += a_prime[i] != 0;
        common += (a[i] != 0) && (a_prime[i] != 0);
    }
    const std::size_t denom = na + nb - common;
    if (denom == 0) return 1.0;
    return static_cast<double>(common) / static_cast<double>(denom);
}

// Cosine similarity of activation value vectors. Undefined on a zero-norm
// side; callers skip (and count) such pairs.
inline std::optional<double> cosine(std::span<const double> v, std::span<const double> v_prime) {
    if (v.size() != v_prime.size()) throw shape_error("cosine: vector length mismatch");
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        dot += v[i] * v_prime[i];
        n1 += v[i] * v[i];
        n2 += v_prime[i] * v_prime[i];
    }
    if (n1 == 0.0 || n2 == 0.0) return std::nullopt;
    return dot / (std::sqrt(n1) * std::sqrt(n2));
}

namespace detail {

inline bool all_equal(std::span<const double> v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] != v[0]) return false;
    return true;
}

// Pearson on pre-computed vectors; nullopt when either side has zero
// variance.
inline std::optional<double> pearson_impl(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace detail

// Pearson product-moment correlation.
inline std::optional<double> pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw shape_error("pearson: length mismatch");
    if (xs.size() < 2) return std::nullopt;
    return detail::pearson_impl(xs, ys);
}

// Spearman rank correlation: Pearson on midranks. Equals the closed form
// 1 - 6*sum(d^2)/(n(n^2-1)) whenever no ties exist. Undefined (skipped) for
// n < 2 or a constant vector.
inline std::optional<double> spearman(std::span<const double> v, std::span<const double> v_prime) {
    if (v.size() != v_prime.size()) throw shape_error("spearman: vector length mismatch");
    if (v.size() < 2) return std::nullopt;
    if (detail::all_equal(v) || detail::all_equal(v_prime)) return std::nullopt;
    const std::vector<double> r1 = midranks(v);
    const std::vector<double> r2 = midranks(v_prime);
    return detail::pearson_impl(r1, r2);
}

enum class DistanceMode { Absolute, Relative };

// Neuron distance between the activation values of one fairness-related
// neuron, defined only when both sides are activated (pre-activation > 0).
inline std::optional<double> neuron_distance(double v, double v_prime, bool active,
                                             bool active_prime, DistanceMode mode) {
    if (!active || !active_prime) return std::nullopt;
    if (mode == DistanceMode::Absolute) return std::abs(v - v_prime);
    const double hi = std::max(v, v_prime);
    const double lo = std::min(v, v_prime);
    return hi / lo;
}

}  // namespace fairtest
