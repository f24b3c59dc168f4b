#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairtest/metrics.hpp"
#include "fairtest/neuron_selection.hpp"

namespace fairtest {

enum class MetricKind { Tanimoto, Cosine, Spearman, AbsoluteDistance, RelativeDistance };

inline const std::vector<MetricKind>& all_metrics() {
    static const std::vector<MetricKind> m = {MetricKind::Tanimoto, MetricKind::Cosine,
                                              MetricKind::Spearman, MetricKind::AbsoluteDistance,
                                              MetricKind::RelativeDistance};
    return m;
}

inline const char* to_string(MetricKind m) {
    switch (m) {
        case MetricKind::Tanimoto: return "tanimoto";
        case MetricKind::Cosine: return "cosine";
        case MetricKind::Spearman: return "spearman";
        case MetricKind::AbsoluteDistance: return "absolute_distance";
        case MetricKind::RelativeDistance: return "relative_distance";
    }
    return "?";
}

inline MetricKind metric_from_string(const std::string& s) {
    for (MetricKind m : all_metrics())
        if (s == to_string(m)) return m;
    throw config_error("unknown metric '" + s +
                       "'; valid: tanimoto, cosine, spearman, absolute_distance, "
                       "relative_distance");
}

inline bool is_layer_metric(MetricKind m) {
    return m == MetricKind::Tanimoto || m == MetricKind::Cosine || m == MetricKind::Spearman;
}

// Activation values and boolean pattern of one layer restricted to its
// fairness-related neurons.
struct LayerSignature {
    std::vector<double> values;         // post-activation over NF_j
    std::vector<std::uint8_t> pattern;  // pre-activation > 0
};

inline LayerSignature layer_signature(const ActivationTrace& t, std::size_t layer,
                                      std::span<const std::size_t> neurons) {
    LayerSignature s;
    s.values.reserve(neurons.size());
    s.pattern.reserve(neurons.size());
    for (std::size_t k : neurons) {
        s.values.push_back(t.post[layer][k]);
        s.pattern.push_back(t.pre[layer][k] > 0.0 ? 1 : 0);
    }
    return s;
}

// Layer-level metric value of one traced pair over the given neuron set;
// nullopt when the metric is undefined there (empty set, zero norms, ties).
inline std::optional<double> layer_metric_value(const ActivationTrace& tx,
                                                const ActivationTrace& ty, std::size_t layer,
                                                std::span<const std::size_t> neurons,
                                                MetricKind metric) {
    if (neurons.empty()) return std::nullopt;
    const LayerSignature sx = layer_signature(tx, layer, neurons);
    const LayerSignature sy = layer_signature(ty, layer, neurons);
    switch (metric) {
        case MetricKind::Tanimoto: return tanimoto(sx.pattern, sy.pattern);
        case MetricKind::Cosine: return cosine(sx.values, sy.values);
        case MetricKind::Spearman: return spearman(sx.values, sy.values);
        default: throw config_error("layer_metric_value: not a layer metric");
    }
}

struct DistanceDim {
    std::size_t layer = 0;
    std::size_t neuron = 0;
    double lower = 0.0;
    double upper = 0.0;
};

// Bin layout for every metric: analytic ranges for the layer metrics,
// per-neuron upper bounds from training pairs for the distances.
struct RangeProfile {
    int z = 100;
    int top_k = 10;
    std::vector<std::size_t> layers;                 // configured layers
    std::vector<std::vector<std::size_t>> top_nf;    // topK neuron ids per configured layer
    std::vector<DistanceDim> absolute_dims;          // kept dimensions only
    std::vector<DistanceDim> relative_dims;
    std::size_t absolute_dropped = 0;                // dims with no usable observation
    std::size_t relative_dropped = 0;
};

inline void layer_metric_range(MetricKind m, double& lower, double& upper) {
    lower = m == MetricKind::Spearman ? -1.0 : 0.0;
    upper = 1.0;
}

inline RangeProfile profile_ranges(const Model& model, std::span<const SamplePair> training_pairs,
                                   const FairnessNeuronMap& nf_map,
                                   std::span<const std::size_t> layers, int top_k, int z) {
    if (training_pairs.empty()) throw data_error("profile_ranges: no training pairs");
    if (z < 1) throw parameter_error("Z must be >= 1");
    RangeProfile prof;
    prof.z = z;
    prof.top_k = top_k;
    prof.layers.assign(layers.begin(), layers.end());
    for (std::size_t j : prof.layers)
        if (j >= model.layers.size())
            throw config_error("configured layer " + std::to_string(j) + " out of range");

    for (std::size_t j : prof.layers) prof.top_nf.push_back(nf_map.top_neurons(j));

    // max observed distance per (layer, neuron), over pairs with both sides
    // activated
    std::map<std::pair<std::size_t, std::size_t>, std::pair<double, double>> seen;  // abs, rel max
    for (const SamplePair& p : training_pairs) {
        const ActivationTrace tx = forward_with_trace(model, p.x);
        const ActivationTrace ty = forward_with_trace(model, p.x_prime);
        for (std::size_t li = 0; li < prof.layers.size(); ++li) {
            const std::size_t j = prof.layers[li];
            for (std::size_t k : prof.top_nf[li]) {
                const bool a = tx.pre[j][k] > 0.0;
                const bool b = ty.pre[j][k] > 0.0;
                if (!a || !b) continue;
                const double av = *neuron_distance(tx.post[j][k], ty.post[j][k], a, b,
                                                   DistanceMode::Absolute);
                const double rv = *neuron_distance(tx.post[j][k], ty.post[j][k], a, b,
                                                   DistanceMode::Relative);
                auto [it, inserted] = seen.try_emplace({j, k}, std::pair<double, double>{av, rv});
                if (!inserted) {
                    it->second.first = std::max(it->second.first, av);
                    it->second.second = std::max(it->second.second, rv);
                }
            }
        }
    }
    for (std::size_t li = 0; li < prof.layers.size(); ++li) {
        const std::size_t j = prof.layers[li];
        for (std::size_t k : prof.top_nf[li]) {
            auto it = seen.find({j, k});
            if (it == seen.end()) {  // never co-activated on training pairs
                ++prof.absolute_dropped;
                ++prof.relative_dropped;
                continue;
            }
            if (it->second.first > 0.0)
                prof.absolute_dims.push_back({j, k, 0.0, it->second.first});
            else
                ++prof.absolute_dropped;
            if (it->second.second > 1.0)
                prof.relative_dims.push_back({j, k, 1.0, it->second.second});
            else
                ++prof.relative_dropped;
        }
    }
    return prof;
}

struct CoverageReport {
    MetricKind metric = MetricKind::Tanimoto;
    int z = 0;
    std::size_t dimension_count = 0;  // |C|
    std::set<std::pair<std::size_t, std::size_t>> hit_bins;  // (dimension, bin)
    std::vector<std::size_t> hits_per_dimension;
    std::size_t out_of_range = 0;
    std::size_t skipped = 0;
    std::size_t pair_count = 0;

    double ratio() const {
        const std::size_t total = static_cast<std::size_t>(z) * dimension_count;
        return total == 0 ? 0.0 : static_cast<double>(hit_bins.size()) / static_cast<double>(total);
    }
};

namespace detail {

inline std::optional<std::size_t> bin_of(double val, double lower, double upper, int z) {
    if (!(val >= lower && val <= upper)) return std::nullopt;
    const double t = static_cast<double>(z) * (val - lower) / (upper - lower);
    auto b = static_cast<long>(t);
    if (b < 0) b = 0;
    if (b >= z) b = z - 1;
    return static_cast<std::size_t>(b);
}

inline void check_profile(const RangeProfile& prof, const FairnessNeuronMap& nf_map) {
    if (prof.layers.size() != prof.top_nf.size())
        throw config_error("corrupt range profile");
    for (std::size_t li = 0; li < prof.layers.size(); ++li)
        if (prof.top_nf[li] != nf_map.top_neurons(prof.layers[li]))
            throw config_error("profile was built with a different fairness-neuron map");
}

}  // namespace detail

// Bin coverage of one metric over a pair suite. A value lands in
// floor(Z*(v-lower)/(upper-lower)) when v lies inside the profiled range;
// values outside hit no bin and are counted as out_of_range. Undefined metric
// values (dead signatures, inactive neurons) are skipped and counted.
inline CoverageReport coverage(std::span<const SamplePair> pairs, const Model& model,
                               const FairnessNeuronMap& nf_map, const RangeProfile& prof,
                               MetricKind metric) {
    detail::check_profile(prof, nf_map);
    CoverageReport rep;
    rep.metric = metric;
    rep.z = prof.z;
    rep.pair_count = pairs.size();

    const std::vector<DistanceDim>* dist_dims = nullptr;
    if (metric == MetricKind::AbsoluteDistance) dist_dims = &prof.absolute_dims;
    if (metric == MetricKind::RelativeDistance) dist_dims = &prof.relative_dims;
    rep.dimension_count = is_layer_metric(metric) ? prof.layers.size() : dist_dims->size();
    rep.hits_per_dimension.assign(rep.dimension_count, 0);

    struct PairResult {
        std::vector<std::pair<std::size_t, std::size_t>> hits;
        std::size_t out_of_range = 0;
        std::size_t skipped = 0;
    };
    std::vector<PairResult> results(pairs.size());

    double lo = 0.0, hi = 1.0;
    if (is_layer_metric(metric)) layer_metric_range(metric, lo, hi);

    parallel_for(pairs.size(), [&](std::size_t p) {
        PairResult& out = results[p];
        const ActivationTrace tx = forward_with_trace(model, pairs[p].x);
        const ActivationTrace ty = forward_with_trace(model, pairs[p].x_prime);
        if (is_layer_metric(metric)) {
            for (std::size_t li = 0; li < prof.layers.size(); ++li) {
                const std::size_t j = prof.layers[li];
                const auto val = layer_metric_value(tx, ty, j, nf_map.nf[j], metric);
                if (!val) {
                    ++out.skipped;
                    continue;
                }
                if (auto bin = detail::bin_of(*val, lo, hi, prof.z))
                    out.hits.emplace_back(li, *bin);
                else
                    ++out.out_of_range;
            }
        } else {
            for (std::size_t di = 0; di < dist_dims->size(); ++di) {
                const DistanceDim& dim = (*dist_dims)[di];
                const bool a = tx.pre[dim.layer][dim.neuron] > 0.0;
                const bool b = ty.pre[dim.layer][dim.neuron] > 0.0;
                const auto val = neuron_distance(
                    tx.post[dim.layer][dim.neuron], ty.post[dim.layer][dim.neuron], a, b,
                    metric == MetricKind::AbsoluteDistance ? DistanceMode::Absolute
                                                           : DistanceMode::Relative);
                if (!val) {
                    ++out.skipped;
                    continue;
                }
                if (auto bin = detail::bin_of(*val, dim.lower, dim.upper, prof.z))
                    out.hits.emplace_back(di, *bin);
                else
                    ++out.out_of_range;
            }
        }
    });

    for (const PairResult& r : results) {
        rep.out_of_range += r.out_of_range;
        rep.skipped += r.skipped;
        for (const auto& hb : r.hits)
            if (rep.hit_bins.insert(hb).second) ++rep.hits_per_dimension[hb.first];
    }
    return rep;
}

inline nlohmann::json coverage_report_to_json(const CoverageReport& rep, const RangeProfile& prof) {
    nlohmann::json dims = nlohmann::json::array();
    if (is_layer_metric(rep.metric)) {
        for (std::size_t li = 0; li < prof.layers.size(); ++li)
            dims.push_back({{"layer", prof.layers[li]},
                            {"hit_bins", rep.hits_per_dimension[li]}});
    } else {
        const auto& dd = rep.metric == MetricKind::AbsoluteDistance ? prof.absolute_dims
                                                                    : prof.relative_dims;
        for (std::size_t di = 0; di < dd.size(); ++di)
            dims.push_back({{"layer", dd[di].layer},
                            {"neuron", dd[di].neuron},
                            {"lower", dd[di].lower},
                            {"upper", dd[di].upper},
                            {"hit_bins", rep.hits_per_dimension[di]}});
    }
    return nlohmann::json{{"metric", to_string(rep.metric)},
                          {"z", rep.z},
                          {"dimension_count", rep.dimension_count},
                          {"pair_count", rep.pair_count},
                          {"hit_bin_count", rep.hit_bins.size()},
                          {"ratio", rep.ratio()},
                          {"out_of_range", rep.out_of_range},
                          {"skipped", rep.skipped},
                          {"dimensions", std::move(dims)}};
}

}  // namespace fairtest
