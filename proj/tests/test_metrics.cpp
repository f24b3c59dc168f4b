#include "fairtest/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using namespace fairtest;

using Bits = std::vector<std::uint8_t>;
using Vec = std::vector<double>;

TEST(Tanimoto, HandCases) {
    EXPECT_DOUBLE_EQ(tanimoto(Bits{1, 0, 1}, Bits{1, 0, 1}), 1.0);
    // dot = 1, |A| + |A'| - dot = 2 + 2 - 1 = 3
    EXPECT_DOUBLE_EQ(tanimoto(Bits{1, 1, 0, 0}, Bits{1, 0, 1, 0}), 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(tanimoto(Bits{0, 0, 0}, Bits{0, 0, 0}), 1.0);
    EXPECT_DOUBLE_EQ(tanimoto(Bits{1, 1}, Bits{0, 0}), 0.0);
    EXPECT_THROW(tanimoto(Bits{1}, Bits{1, 0}), shape_error);
}

TEST(Cosine, HandCases) {
    EXPECT_DOUBLE_EQ(*cosine(Vec{1, 2, 3}, Vec{1, 2, 3}), 1.0);
    EXPECT_DOUBLE_EQ(*cosine(Vec{1, 0}, Vec{0, 1}), 0.0);
    EXPECT_NEAR(*cosine(Vec{1, 2, 2}, Vec{2, 4, 4}), 1.0, 1e-12);
    EXPECT_FALSE(cosine(Vec{0, 0}, Vec{1, 2}).has_value());
    EXPECT_THROW(cosine(Vec{1}, Vec{1, 2}), shape_error);
}

TEST(Spearman, HandCases) {
    EXPECT_DOUBLE_EQ(*spearman(Vec{1, 5, 9, 12}, Vec{3, 4, 8, 20}), 1.0);
    EXPECT_DOUBLE_EQ(*spearman(Vec{1, 2, 3}, Vec{9, 5, 2}), -1.0);
    // d = (0, -1, 1, 0), sum d^2 = 2: 1 - 12/60 = 0.8
    EXPECT_NEAR(*spearman(Vec{1, 2, 3, 4}, Vec{1, 3, 2, 4}), 0.8, 1e-12);
    EXPECT_FALSE(spearman(Vec{2, 2, 2}, Vec{1, 2, 3}).has_value());
    EXPECT_FALSE(spearman(Vec{4}, Vec{4}).has_value());
}

TEST(Spearman, MidrankMatchesClosedFormWhenTieFree) {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng() % 10;
        Vec v(n), w(n);
        for (double& x : v) x = val(rng);
        for (double& x : w) x = val(rng);
        const std::vector<double> rv = midranks(v);
        const std::vector<double> rw = midranks(w);
        double d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) d2 += (rv[i] - rw[i]) * (rv[i] - rw[i]);
        const double nn = static_cast<double>(n);
        const double closed = 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
        EXPECT_NEAR(*spearman(v, w), closed, 1e-9);
    }
}

TEST(NeuronDistance, HandCases) {
    EXPECT_DOUBLE_EQ(*neuron_distance(5, 3, true, true, DistanceMode::Absolute), 2.0);
    EXPECT_DOUBLE_EQ(*neuron_distance(5, 3, true, true, DistanceMode::Relative), 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(*neuron_distance(4, 4, true, true, DistanceMode::Absolute), 0.0);
    EXPECT_DOUBLE_EQ(*neuron_distance(4, 4, true, true, DistanceMode::Relative), 1.0);
    EXPECT_FALSE(neuron_distance(2, 0, true, false, DistanceMode::Absolute).has_value());
    EXPECT_FALSE(neuron_distance(0, 2, false, true, DistanceMode::Relative).has_value());
}

TEST(Pearson, HandCases) {
    Vec xs = {1, 2, 3};
    Vec doubled = {3, 5, 7};  // 2x + 1
    EXPECT_NEAR(*pearson(xs, doubled), 1.0, 1e-12);
    Vec negated = {-1, -2, -3};
    EXPECT_NEAR(*pearson(xs, negated), -1.0, 1e-12);
    EXPECT_NEAR(*pearson(Vec{1, 2, 3}, Vec{1, 3, 2}), 0.5, 1e-12);
    EXPECT_FALSE(pearson(Vec{2, 2, 2}, Vec{1, 2, 3}).has_value());
}

TEST(Metrics, BoundsAndSymmetryOnRandomizedTraces) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> val(0.0, 3.0);
    std::bernoulli_distribution dead(0.3);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 2 + rng() % 8;
        Vec v(n), w(n);
        Bits a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            // post-ReLU style values: non-negative with occasional zeros
            v[i] = dead(rng) ? 0.0 : val(rng);
            w[i] = dead(rng) ? 0.0 : val(rng);
            a[i] = v[i] > 0.0;
            b[i] = w[i] > 0.0;
        }

        const double tc = tanimoto(a, b);
        EXPECT_GE(tc, 0.0);
        EXPECT_LE(tc, 1.0);
        EXPECT_DOUBLE_EQ(tc, tanimoto(b, a));

        if (const auto cs = cosine(v, w)) {
            EXPECT_GE(*cs, 0.0);
            EXPECT_LE(*cs, 1.0 + 1e-12);
            EXPECT_DOUBLE_EQ(*cs, *cosine(w, v));
        }
        if (const auto sc = spearman(v, w)) {
            EXPECT_GE(*sc, -1.0 - 1e-12);
            EXPECT_LE(*sc, 1.0 + 1e-12);
            EXPECT_NEAR(*sc, *spearman(w, v), 1e-12);
        }
        const bool act = v[0] > 0.0, act2 = w[0] > 0.0;
        if (const auto abs_d = neuron_distance(v[0], w[0], act, act2, DistanceMode::Absolute)) {
            EXPECT_GE(*abs_d, 0.0);
            EXPECT_DOUBLE_EQ(
                *abs_d, *neuron_distance(w[0], v[0], act2, act, DistanceMode::Absolute));
        }
        if (const auto rel_d = neuron_distance(v[0], w[0], act, act2, DistanceMode::Relative)) {
            EXPECT_GE(*rel_d, 1.0);
            EXPECT_DOUBLE_EQ(
                *rel_d, *neuron_distance(w[0], v[0], act2, act, DistanceMode::Relative));
        }
    }
}

TEST(Metrics, IdentityPairsScoreAsIdentical) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> val(0.1, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 6;
        Vec v(n);
        for (double& x : v) x = val(rng);
        Bits a(n, 1);
        EXPECT_DOUBLE_EQ(tanimoto(a, a), 1.0);
        EXPECT_NEAR(*cosine(v, v), 1.0, 1e-12);
        bool constant = true;
        for (double x : v)
            if (x != v[0]) constant = false;
        if (!constant) EXPECT_NEAR(*spearman(v, v), 1.0, 1e-12);
        EXPECT_DOUBLE_EQ(*neuron_distance(v[0], v[0], true, true, DistanceMode::Absolute), 0.0);
        EXPECT_DOUBLE_EQ(*neuron_distance(v[0], v[0], true, true, DistanceMode::Relative), 1.0);
    }
}

}  // namespace
