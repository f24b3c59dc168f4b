#pragma once

#include <charconv>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fairtest/dataset.hpp"
#include "fairtest/model.hpp"
#include "fairtest/parallel.hpp"
#include "fairtest/rank_stats.hpp"

namespace fairtest {

// Per-layer activation-difference samples for every neuron over a pair set.
// The outcome partition is pair-level: group 1 where the pair's predictions
// disagree, group 0 where they agree.
struct DiffCollection {
    // diffs[layer][neuron][pair] = |post(x) - post(x')|
    std::vector<std::vector<std::vector<double>>> diffs;
    std::vector<std::uint8_t> outcome_group;  // per pair
    std::size_t pair_count = 0;

    std::size_t group_size(int g) const {
        std::size_t n = 0;
        for (std::uint8_t v : outcome_group) n += (v == g);
        return n;
    }
};

inline DiffCollection collect_diffs(const Model& model, std::span<const SamplePair> pairs) {
    if (pairs.empty()) throw data_error("collect_diffs: no pairs");
    DiffCollection c;
    c.pair_count = pairs.size();
    c.outcome_group.assign(pairs.size(), 0);
    c.diffs.resize(model.layers.size());
    for (std::size_t j = 0; j < model.layers.size(); ++j)
        c.diffs[j].assign(model.layer_width(j), std::vector<double>(pairs.size(), 0.0));

    parallel_for(pairs.size(), [&](std::size_t p) {
        const ActivationTrace tx = forward_with_trace(model, pairs[p].x);
        const ActivationTrace ty = forward_with_trace(model, pairs[p].x_prime);
        c.outcome_group[p] = tx.predicted_class == ty.predicted_class ? 0 : 1;
        for (std::size_t j = 0; j < model.layers.size(); ++j)
            for (std::size_t k = 0; k < model.layer_width(j); ++k)
                c.diffs[j][k][p] = std::abs(tx.post[j][k] - ty.post[j][k]);
    });
    return c;
}

struct NeuronStat {
    double h = std::numeric_limits<double>::quiet_NaN();  // NaN when degenerate
    bool significant = false;
    int rank_in_layer = 0;  // 1-based, descending H, NaN last
};

// H statistic per neuron plus the per-layer significant sets.
struct FairnessNeuronMap {
    std::vector<std::vector<NeuronStat>> stats;   // [layer][neuron]
    std::vector<std::vector<std::size_t>> nf;     // significant neurons, descending H
    double alpha = 0.05;
    double critical_value = 0.0;
    int top_k = 10;
    std::size_t group0_size = 0;
    std::size_t group1_size = 0;
    bool low_power = false;  // a tiny outcome group weakens the chi-square approximation

    // topK prefix of NF_j, used by the neuron-distance dimensions.
    std::vector<std::size_t> top_neurons(std::size_t layer) const {
        const std::vector<std::size_t>& all = nf[layer];
        const std::size_t n = std::min<std::size_t>(all.size(), static_cast<std::size_t>(top_k));
        return {all.begin(), all.begin() + n};
    }

    std::size_t significant_count(std::size_t layer) const { return nf[layer].size(); }
};

inline FairnessNeuronMap select_fairness_neurons(const Model& model,
                                                 std::span<const SamplePair> pairs, double alpha,
                                                 int top_k) {
    if (top_k < 1) throw parameter_error("topK must be >= 1");
    const DiffCollection c = collect_diffs(model, pairs);

    FairnessNeuronMap map;
    map.alpha = alpha;
    map.critical_value = chi_square_critical(alpha);
    map.top_k = top_k;
    map.group0_size = c.group_size(0);
    map.group1_size = c.group_size(1);
    if (map.group0_size == 0 || map.group1_size == 0)
        throw degenerate_partition_error(
            "outcome partition is degenerate: need at least one fair and one unfair pair");
    map.low_power = std::min(map.group0_size, map.group1_size) < 5;

    map.stats.resize(model.layers.size());
    map.nf.resize(model.layers.size());
    for (std::size_t j = 0; j < model.layers.size(); ++j) {
        map.stats[j].resize(model.layer_width(j));
        parallel_for(model.layer_width(j), [&](std::size_t k) {
            std::vector<double> g0, g1;
            g0.reserve(map.group0_size);
            g1.reserve(map.group1_size);
            for (std::size_t p = 0; p < c.pair_count; ++p)
                (c.outcome_group[p] == 0 ? g0 : g1).push_back(c.diffs[j][k][p]);
            NeuronStat& st = map.stats[j][k];
            try {
                st.h = kruskal_wallis_h(g0, g1);
                st.significant = st.h > map.critical_value;
            } catch (const undefined_statistic_error&) {
                // all diffs identical (e.g. a dead neuron): not significant
            } catch (const degenerate_partition_error&) {
            }
        });

        std::vector<std::size_t> order(model.layer_width(j));
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double ha = map.stats[j][a].h;
            const double hb = map.stats[j][b].h;
            const bool fa = std::isnan(ha);
            const bool fb = std::isnan(hb);
            if (fa != fb) return fb;  // NaN sorts last
            if (!fa && ha != hb) return ha > hb;
            return a < b;
        });
        for (std::size_t r = 0; r < order.size(); ++r)
            map.stats[j][order[r]].rank_in_layer = static_cast<int>(r + 1);
        for (std::size_t k : order)
            if (map.stats[j][k].significant) map.nf[j].push_back(k);
    }
    return map;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[48];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

}  // namespace detail

// CSV export: layer,neuron,h,significant,rank_in_layer.
inline void write_neuron_map_csv(const FairnessNeuronMap& map, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot write " + path);
    os << "layer,neuron,h,significant,rank_in_layer\n";
    for (std::size_t j = 0; j < map.stats.size(); ++j)
        for (std::size_t k = 0; k < map.stats[j].size(); ++k) {
            const NeuronStat& st = map.stats[j][k];
            os << j << "," << k << "," << detail::format_double(st.h) << ","
               << (st.significant ? 1 : 0) << "," << st.rank_in_layer << "\n";
        }
}

}  // namespace fairtest
