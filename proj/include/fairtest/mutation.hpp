#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "fairtest/model.hpp"

namespace fairtest {

struct MutationSpec {
    enum class Operator { GaussianFuzz, WeightShuffle, NeuronSwitch, ActivationInverse };

    Operator op = Operator::GaussianFuzz;
    double intensity = 1.0;   // noise scale (fuzz) or neuron count (shuffle/inverse)
    int target_layer = -1;    // -1 = all layers (hidden only for neuron_switch)
    std::uint64_t seed = 0;
};

inline const char* to_string(MutationSpec::Operator op) {
    switch (op) {
        case MutationSpec::Operator::GaussianFuzz: return "gaussian_fuzz";
        case MutationSpec::Operator::WeightShuffle: return "weight_shuffle";
        case MutationSpec::Operator::NeuronSwitch: return "neuron_switch";
        case MutationSpec::Operator::ActivationInverse: return "activation_inverse";
    }
    return "?";
}

inline MutationSpec::Operator mutation_operator_from_string(const std::string& s) {
    if (s == "gaussian_fuzz") return MutationSpec::Operator::GaussianFuzz;
    if (s == "weight_shuffle") return MutationSpec::Operator::WeightShuffle;
    if (s == "neuron_switch") return MutationSpec::Operator::NeuronSwitch;
    if (s == "activation_inverse") return MutationSpec::Operator::ActivationInverse;
    throw config_error("unknown mutation operator '" + s + "'");
}

namespace detail {

inline std::vector<std::size_t> target_layers(const Model& m, int target, bool hidden_only) {
    std::vector<std::size_t> layers;
    if (target >= 0) {
        if (static_cast<std::size_t>(target) >= m.layers.size())
            throw mutation_error("target layer " + std::to_string(target) + " does not exist");
        layers.push_back(static_cast<std::size_t>(target));
    } else {
        const std::size_t last = m.layers.size() - 1;
        for (std::size_t j = 0; j < m.layers.size(); ++j)
            if (!hidden_only || j != last || m.layers.size() == 1) layers.push_back(j);
    }
    return layers;
}

// (layer, neuron) pool over the targeted layers.
inline std::vector<std::pair<std::size_t, std::size_t>> neuron_pool(
    const Model& m, const std::vector<std::size_t>& layers) {
    std::vector<std::pair<std::size_t, std::size_t>> pool;
    for (std::size_t j : layers)
        for (std::size_t k = 0; k < m.layers[j].out_width; ++k) pool.emplace_back(j, k);
    return pool;
}

inline double layer_weight_std(const DenseLayer& l) {
    double mean = 0.0;
    for (double w : l.weights) mean += w;
    mean /= static_cast<double>(l.weights.size());
    double var = 0.0;
    for (double w : l.weights) var += (w - mean) * (w - mean);
    return std::sqrt(var / static_cast<double>(l.weights.size()));
}

}  // namespace detail

// Seeded model mutation. Layer dimensions and activation kinds are never
// changed; only weights and biases move.
inline Model mutate_model(const Model& model, const MutationSpec& spec) {
    model.validate();
    Model m = model;
    std::mt19937_64 rng(spec.seed);

    switch (spec.op) {
        case MutationSpec::Operator::GaussianFuzz: {
            if (spec.intensity < 0.0) throw parameter_error("fuzz intensity must be >= 0");
            for (std::size_t j : detail::target_layers(m, spec.target_layer, false)) {
                DenseLayer& l = m.layers[j];
                const double sigma = spec.intensity * detail::layer_weight_std(l);
                if (sigma == 0.0) continue;
                std::normal_distribution<double> noise(0.0, sigma);
                for (double& w : l.weights) w += noise(rng);
            }
            break;
        }
        case MutationSpec::Operator::WeightShuffle: {
            auto pool = detail::neuron_pool(m, detail::target_layers(m, spec.target_layer, false));
            const auto count = static_cast<std::size_t>(spec.intensity);
            if (count < 1) throw parameter_error("weight_shuffle needs intensity >= 1");
            if (count > pool.size())
                throw mutation_error("weight_shuffle: fewer neurons than requested");
            std::shuffle(pool.begin(), pool.end(), rng);
            for (std::size_t i = 0; i < count; ++i) {
                auto [j, k] = pool[i];
                DenseLayer& l = m.layers[j];
                std::shuffle(l.weights.begin() + k * l.in_width,
                             l.weights.begin() + (k + 1) * l.in_width, rng);
            }
            break;
        }
        case MutationSpec::Operator::NeuronSwitch: {
            // Swap two neurons of one layer: incoming rows, biases, and the
            // outgoing columns of the next layer when one exists.
            const auto layers = detail::target_layers(m, spec.target_layer, true);
            std::vector<std::size_t> wide;
            for (std::size_t j : layers)
                if (m.layers[j].out_width >= 2) wide.push_back(j);
            if (wide.empty())
                throw mutation_error("neuron_switch requires a target layer of width >= 2");
            const std::size_t j = wide[std::uniform_int_distribution<std::size_t>(
                0, wide.size() - 1)(rng)];
            DenseLayer& l = m.layers[j];
            std::uniform_int_distribution<std::size_t> pick(0, l.out_width - 1);
            const std::size_t a = pick(rng);
            std::size_t b = std::uniform_int_distribution<std::size_t>(0, l.out_width - 2)(rng);
            if (b >= a) ++b;
            for (std::size_t i = 0; i < l.in_width; ++i)
                std::swap(l.weights[a * l.in_width + i], l.weights[b * l.in_width + i]);
            std::swap(l.biases[a], l.biases[b]);
            if (j + 1 < m.layers.size()) {
                DenseLayer& next = m.layers[j + 1];
                for (std::size_t o = 0; o < next.out_width; ++o)
                    std::swap(next.weights[o * next.in_width + a],
                              next.weights[o * next.in_width + b]);
            }
            break;
        }
        case MutationSpec::Operator::ActivationInverse: {
            auto pool = detail::neuron_pool(m, detail::target_layers(m, spec.target_layer, false));
            const auto count = static_cast<std::size_t>(spec.intensity);
            if (count < 1) throw parameter_error("activation_inverse needs intensity >= 1");
            if (count > pool.size())
                throw mutation_error("activation_inverse: fewer neurons than requested");
            std::shuffle(pool.begin(), pool.end(), rng);
            for (std::size_t i = 0; i < count; ++i) {
                auto [j, k] = pool[i];
                DenseLayer& l = m.layers[j];
                for (std::size_t c = 0; c < l.in_width; ++c) l.weights[k * l.in_width + c] *= -1.0;
                l.biases[k] *= -1.0;
            }
            break;
        }
    }
    return m;
}

}  // namespace fairtest
