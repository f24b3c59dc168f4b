#include "fairtest/coverage.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace fairtest;

// 4 inputs -> 4 ReLU units wired as identity -> 2-class head, so hidden
// activations equal the (non-negative) inputs and metric values are directly
// controllable.
Model identity_hidden_model() {
    Model m;
    m.input_dim = 4;
    m.class_count = 2;
    DenseLayer hidden;
    hidden.in_width = 4;
    hidden.out_width = 4;
    hidden.activation = Activation::Relu;
    hidden.weights = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
    hidden.biases = {0, 0, 0, 0};
    DenseLayer head;
    head.in_width = 4;
    head.out_width = 2;
    head.activation = Activation::Softmax;
    head.weights = {1, 1, 0, 0, 0, 0, 1, 1};
    head.biases = {0, 0};
    m.layers.push_back(hidden);
    m.layers.push_back(head);
    return m;
}

FairnessNeuronMap hand_map(const Model& m, std::vector<std::vector<std::size_t>> nf, int top_k) {
    FairnessNeuronMap map;
    map.alpha = 0.05;
    map.critical_value = 3.8415;
    map.top_k = top_k;
    map.group0_size = map.group1_size = 10;
    map.stats.resize(m.layers.size());
    for (std::size_t j = 0; j < m.layers.size(); ++j) map.stats[j].resize(m.layer_width(j));
    nf.resize(m.layers.size());
    map.nf = std::move(nf);
    for (std::size_t j = 0; j < map.nf.size(); ++j)
        for (std::size_t r = 0; r < map.nf[j].size(); ++r) {
            map.stats[j][map.nf[j][r]].significant = true;
            map.stats[j][map.nf[j][r]].h = 1000.0 - static_cast<double>(r);
            map.stats[j][map.nf[j][r]].rank_in_layer = static_cast<int>(r) + 1;
        }
    return map;
}

SamplePair make_pair(std::vector<double> x, std::vector<double> y) {
    SamplePair p;
    p.x = std::move(x);
    p.x_prime = std::move(y);
    p.label = 0;
    p.source_attr = 0;
    p.target_attr = 1;
    return p;
}

// A pair whose hidden-layer cosine similarity is exactly `c` (first two
// neurons carry the angle, the rest are zero).
SamplePair cosine_pair(double c) {
    return make_pair({1.0, 0.0, 0.0, 0.0}, {c, std::sqrt(1.0 - c * c), 0.0, 0.0});
}

TEST(ProfileRanges, DistanceUpperBoundsFromTrainingMax) {
    const Model m = identity_hidden_model();
    const FairnessNeuronMap map = hand_map(m, {{0}}, 1);
    // abs diffs on neuron 0: {0.2, 1.4} -> upper 1.4
    std::vector<SamplePair> train = {make_pair({1.0, 1, 1, 1}, {1.2, 1, 1, 1}),
                                     make_pair({2.0, 1, 1, 1}, {3.4, 1, 1, 1})};
    const RangeProfile prof = profile_ranges(m, train, map, std::vector<std::size_t>{0}, 1, 10);
    ASSERT_EQ(prof.absolute_dims.size(), 1u);
    EXPECT_DOUBLE_EQ(prof.absolute_dims[0].lower, 0.0);
    EXPECT_NEAR(prof.absolute_dims[0].upper, 1.4, 1e-12);
    ASSERT_EQ(prof.relative_dims.size(), 1u);
    EXPECT_DOUBLE_EQ(prof.relative_dims[0].lower, 1.0);
    EXPECT_NEAR(prof.relative_dims[0].upper, 3.4 / 2.0, 1e-12);
}

TEST(ProfileRanges, IdenticalTrainingPairsDropAllDistanceDims) {
    const Model m = identity_hidden_model();
    const FairnessNeuronMap map = hand_map(m, {{0, 1}}, 2);
    std::vector<SamplePair> train = {make_pair({1, 2, 0, 0}, {1, 2, 0, 0}),
                                     make_pair({3, 1, 0, 0}, {3, 1, 0, 0})};
    const RangeProfile prof = profile_ranges(m, train, map, std::vector<std::size_t>{0}, 2, 10);
    EXPECT_TRUE(prof.absolute_dims.empty());
    EXPECT_TRUE(prof.relative_dims.empty());
    EXPECT_EQ(prof.absolute_dropped, 2u);
    EXPECT_EQ(prof.relative_dropped, 2u);
}

TEST(ProfileRanges, RerunIsIdentical) {
    const Model m = identity_hidden_model();
    const FairnessNeuronMap map = hand_map(m, {{0, 1, 2}}, 3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(0.0, 4.0);
    std::vector<SamplePair> train;
    for (int i = 0; i < 30; ++i)
        train.push_back(make_pair({val(rng), val(rng), val(rng), val(rng)},
                                  {val(rng), val(rng), val(rng), val(rng)}));
    const RangeProfile a = profile_ranges(m, train, map, std::vector<std::size_t>{0}, 3, 50);
    const RangeProfile b = profile_ranges(m, train, map, std::vector<std::size_t>{0}, 3, 50);
    ASSERT_EQ(a.absolute_dims.size(), b.absolute_dims.size());
    for (std::size_t i = 0; i < a.absolute_dims.size(); ++i) {
        EXPECT_EQ(a.absolute_dims[i].upper, b.absolute_dims[i].upper);
        EXPECT_EQ(a.absolute_dims[i].neuron, b.absolute_dims[i].neuron);
    }
}

TEST(Coverage, TwoValuesHitTwoOfTenBins) {
    const Model m = identity_hidden_model();
    const FairnessNeuronMap map = hand_map(m, {{0, 1, 2, 3}}, 4);
    std::vector<SamplePair> train = {make_pair({1, 1, 1, 1}, {2, 2, 2, 2})};
    const RangeProfile prof = profile_ranges(m, train, map, std::vector<std::size_t>{0}, 4, 10);

    std::vector<SamplePair> suite = {cosine_pair(0.05), cosine_pair(0.55)};
    const CoverageReport rep = coverage(suite, m, map, prof, MetricKind::Cosine);
    EXPECT_EQ(rep.dimension_count, 1u);
    EXPECT_EQ(rep.hit_bins.size(), 2u);
    EXPECT_DOUBLE_EQ(rep.ratio(), 0.2);
    EXPECT_TRUE(rep.hit_bins.count({0, 0}));
    EXPECT_TRUE(rep.hit_bins.count({0, 5}));
}

TEST(Coverage, EmptySuiteGivesZeroRatio) {
    const Model m = identity_hidden_model();
    const FairnessNeuronMap map = hand_map(m, {{0, 1}}, 2);
    std::vector<SamplePair> train = {make_pair({1, 1, 0, 0}, {2, 2, 0, 0})};
    const RangeProfile prof = profile_ranges(m, train, map, std::vector<std::size_t>{0}, 2, 10);
    const CoverageReport rep =
        coverage(std::vector<SamplePair>{}, m, map, prof, MetricKind::Tanimoto);
    EXPECT_DOUBLE_EQ(rep.ratio(), 0.0);
    EXPECT_TRUE(rep.hit_bins.empty());
}

TEST(Coverage, DuplicatingPairsLeavesRatioUnchanged) {
    const Model m = identity_hidden_model();
    const FairnessNeuronMap map = hand_map(m, {{0, 1, 2, 3}}, 4);
    std::vector<SamplePair> train = {make_pair({1, 1, 1, 1}, {2, 3, 2, 3})};
    const RangeProfile prof = profile_ranges(m, train, map, std::vector<std::size_t>{0}, 4, 20);

    std::vector<SamplePair> suite = {cosine_pair(0.3), cosine_pair(0.8), cosine_pair(0.05)};
    std::vector<SamplePair> doubled = suite;
    doubled.insert(doubled.end(), suite.begin(), suite.end());
    for (MetricKind metric : all_metrics()) {
        const CoverageReport a = coverage(suite, m, map, prof, metric);
        const CoverageReport b = coverage(doubled, m, map, prof, metric);
        EXPECT_DOUBLE_EQ(a.ratio(), b.ratio()) << to_string(metric);
        EXPECT_EQ(a.hit_bins, b.hit_bins) << to_string(metric);
    }
}

TEST(Coverage, MonotoneUnderSuiteGrowth) {
    const Model m = make_mlp(6, {8, 5}, 2, 3);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    auto rand_pair = [&] {
        std::vector<double> x(6), y(6);
        for (double& v : x) v = val(rng);
        for (double& v : y) v = val(rng);
        return make_pair(x, y);
    };
    std::vector<SamplePair> train;
    for (int i = 0; i < 60; ++i) train.push_back(rand_pair());
    const DiffCollection dc = collect_diffs(m, train);
    if (dc.group_size(0) == 0 || dc.group_size(1) == 0) GTEST_SKIP();
    const FairnessNeuronMap map = select_fairness_neurons(m, train, 0.5, 4);
    const RangeProfile prof =
        profile_ranges(m, train, map, std::vector<std::size_t>{0, 1}, 4, 25);

    std::vector<SamplePair> small, large;
    for (int i = 0; i < 15; ++i) small.push_back(rand_pair());
    large = small;
    for (int i = 0; i < 25; ++i) large.push_back(rand_pair());

    for (MetricKind metric : all_metrics()) {
        const CoverageReport a = coverage(small, m, map, prof, metric);
        const CoverageReport b = coverage(large, m, map, prof, metric);
        EXPECT_LE(a.ratio(), b.ratio()) << to_string(metric);
        for (const auto& hb : a.hit_bins) EXPECT_TRUE(b.hit_bins.count(hb));
    }
}

TEST(Coverage, ValuesAboveUpperAreOutOfRangeNotBinned) {
    const Model m = identity_hidden_model();
    const FairnessNeuronMap map = hand_map(m, {{0}}, 1);
    std::vector<SamplePair> train = {make_pair({1, 0, 0, 0}, {2.4, 0, 0, 0})};  // abs upper 1.4
    const RangeProfile prof = profile_ranges(m, train, map, std::vector<std::size_t>{0}, 1, 10);
    ASSERT_EQ(prof.absolute_dims.size(), 1u);

    std::vector<SamplePair> suite = {make_pair({1, 0, 0, 0}, {3.5, 0, 0, 0})};  // diff 2.5 > 1.4
    const CoverageReport rep = coverage(suite, m, map, prof, MetricKind::AbsoluteDistance);
    EXPECT_EQ(rep.out_of_range, 1u);
    EXPECT_TRUE(rep.hit_bins.empty());
}

TEST(Coverage, InactiveNeuronsAreSkipped) {
    const Model m = identity_hidden_model();
    const FairnessNeuronMap map = hand_map(m, {{0}}, 1);
    std::vector<SamplePair> train = {make_pair({1, 0, 0, 0}, {2, 0, 0, 0})};
    const RangeProfile prof = profile_ranges(m, train, map, std::vector<std::size_t>{0}, 1, 10);

    // x' deactivates neuron 0 (input 0 -> pre 0, not > 0)
    std::vector<SamplePair> suite = {make_pair({1, 1, 0, 0}, {0, 1, 0, 0})};
    const CoverageReport rep = coverage(suite, m, map, prof, MetricKind::AbsoluteDistance);
    EXPECT_EQ(rep.skipped, 1u);
    EXPECT_TRUE(rep.hit_bins.empty());
}

TEST(Coverage, ProfileMapMismatchIsConfigurationError) {
    const Model m = identity_hidden_model();
    const FairnessNeuronMap map_a = hand_map(m, {{0, 1}}, 2);
    const FairnessNeuronMap map_b = hand_map(m, {{2, 3}}, 2);
    std::vector<SamplePair> train = {make_pair({1, 1, 1, 1}, {2, 2, 2, 2})};
    const RangeProfile prof = profile_ranges(m, train, map_a, std::vector<std::size_t>{0}, 2, 10);
    EXPECT_THROW(coverage(train, m, map_b, prof, MetricKind::Cosine), config_error);
}

TEST(Coverage, MetricNamesRoundTrip) {
    for (MetricKind metric : all_metrics())
        EXPECT_EQ(metric_from_string(to_string(metric)), metric);
    EXPECT_THROW(metric_from_string("gini"), config_error);
}

TEST(Coverage, ZEqualsOneGivesFractionOfDimensionsHit) {
    const Model m = identity_hidden_model();
    const FairnessNeuronMap map = hand_map(m, {{0, 1, 2, 3}}, 4);
    std::vector<SamplePair> train = {make_pair({1, 1, 1, 1}, {2, 2, 2, 2})};
    const RangeProfile prof = profile_ranges(m, train, map, std::vector<std::size_t>{0}, 4, 1);
    std::vector<SamplePair> suite = {cosine_pair(0.4)};
    const CoverageReport rep = coverage(suite, m, map, prof, MetricKind::Cosine);
    EXPECT_DOUBLE_EQ(rep.ratio(), 1.0);  // one dimension, one bin, hit
}

}  // namespace
