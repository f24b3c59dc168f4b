#pragma once

#include <cstdint>
#include <numeric>
#include <random>

#include "fairtest/dataset.hpp"
#include "fairtest/gradients.hpp"

namespace fairtest {

// Mean cross-entropy loss over a dataset.
inline double dataset_loss(const Model& model, const Dataset& data) {
    if (data.samples.empty()) throw data_error("empty dataset");
    double total = 0.0;
    for (const Sample& s : data.samples) total += cross_entropy_loss(model, s.x, s.label);
    return total / static_cast<double>(data.samples.size());
}

inline double accuracy(const Model& model, const Dataset& data) {
    if (data.samples.empty()) throw data_error("empty dataset");
    std::size_t hit = 0;
    for (const Sample& s : data.samples)
        if (predict(model, s.x) == s.label) ++hit;
    return static_cast<double>(hit) / static_cast<double>(data.samples.size());
}

// Mini-batch SGD on cross-entropy. The input model is left untouched; the
// updated copy is returned. Shuffling is seeded, so identical arguments give
// an identical result. clip_norm > 0 rescales each averaged batch gradient
// to that global L2 norm; raw pixel inputs otherwise blow up the first
// layer and kill its ReLUs.
inline Model train(const Model& model, const Dataset& data, int epochs, double learning_rate,
                   std::size_t batch_size, std::uint64_t seed = 0x5eed, double clip_norm = 0.0) {
    if (data.samples.empty()) throw data_error("cannot train on an empty dataset");
    if (learning_rate < 0.0) throw parameter_error("learning_rate must be >= 0");
    if (batch_size == 0) throw parameter_error("batch_size must be >= 1");

    Model m = model;
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(data.samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int e = 0; e < epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += batch_size) {
            const std::size_t end = std::min(order.size(), start + batch_size);
            const double inv = 1.0 / static_cast<double>(end - start);

            std::vector<std::vector<double>> gw(m.layers.size());
            std::vector<std::vector<double>> gb(m.layers.size());
            for (std::size_t j = 0; j < m.layers.size(); ++j) {
                gw[j].assign(m.layers[j].weights.size(), 0.0);
                gb[j].assign(m.layers[j].biases.size(), 0.0);
            }
            for (std::size_t k = start; k < end; ++k) {
                const Sample& s = data.samples[order[k]];
                LossGradients g = loss_gradients(m, s.x, s.label);
                for (std::size_t j = 0; j < m.layers.size(); ++j) {
                    for (std::size_t i = 0; i < gw[j].size(); ++i) gw[j][i] += g.weights[j][i];
                    for (std::size_t i = 0; i < gb[j].size(); ++i) gb[j][i] += g.biases[j][i];
                }
            }
            double scale = inv;
            if (clip_norm > 0.0) {
                double sq = 0.0;
                for (std::size_t j = 0; j < m.layers.size(); ++j) {
                    for (double g : gw[j]) sq += inv * g * inv * g;
                    for (double g : gb[j]) sq += inv * g * inv * g;
                }
                const double norm = std::sqrt(sq);
                if (norm > clip_norm) scale = inv * clip_norm / norm;
            }
            for (std::size_t j = 0; j < m.layers.size(); ++j) {
                for (std::size_t i = 0; i < gw[j].size(); ++i)
                    m.layers[j].weights[i] -= learning_rate * scale * gw[j][i];
                for (std::size_t i = 0; i < gb[j].size(); ++i)
                    m.layers[j].biases[i] -= learning_rate * scale * gb[j][i];
            }
        }
    }
    return m;
}

}  // namespace fairtest
