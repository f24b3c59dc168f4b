#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairtest/errors.hpp"

namespace fairtest {

enum class Activation { Relu, Softmax, Identity };

inline const char* to_string(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Softmax: return "softmax";
        case Activation::Identity: return "identity";
    }
    return "?";
}

inline Activation activation_from_string(std::string_view s) {
    if (s == "relu") return Activation::Relu;
    if (s == "softmax") return Activation::Softmax;
    if (s == "identity") return Activation::Identity;
    throw validation_error("unknown activation '" + std::string(s) + "'");
}

// Fully connected layer. Weights are row-major: weight(o, i) multiplies
// input i into output o.
struct DenseLayer {
    std::size_t in_width = 0;
    std::size_t out_width = 0;
    Activation activation = Activation::Relu;
    std::vector<double> weights;  // out_width * in_width
    std::vector<double> biases;   // out_width

    double weight(std::size_t out, std::size_t in) const {
        return weights[out * in_width + in];
    }
    double& weight(std::size_t out, std::size_t in) {
        return weights[out * in_width + in];
    }
};

// Layered feedforward classifier; the subject under test.
struct Model {
    std::size_t input_dim = 0;
    std::size_t class_count = 0;
    std::vector<DenseLayer> layers;

    std::size_t layer_count() const { return layers.size(); }
    std::size_t layer_width(std::size_t j) const { return layers[j].out_width; }

    // Throws validation_error on any structural inconsistency.
    void validate() const {
        if (input_dim == 0) throw validation_error("input_dim must be positive");
        if (class_count < 2) throw validation_error("class_count must be >= 2");
        if (layers.empty()) throw validation_error("model has no layers");
        std::size_t prev = input_dim;
        for (std::size_t j = 0; j < layers.size(); ++j) {
            const DenseLayer& l = layers[j];
            const std::string where = "layer " + std::to_string(j);
            if (l.out_width == 0) throw validation_error(where + ": out_width must be >= 1");
            if (l.in_width != prev)
                throw validation_error(where + ": in_width " + std::to_string(l.in_width) +
                                       " does not match previous width " + std::to_string(prev));
            if (l.weights.size() != l.out_width * l.in_width)
                throw validation_error(where + ": weight count mismatch");
            if (l.biases.size() != l.out_width)
                throw validation_error(where + ": bias count mismatch");
            if (l.activation == Activation::Softmax && j + 1 != layers.size())
                throw validation_error(where + ": softmax permitted only on the final layer");
            for (double w : l.weights)
                if (!std::isfinite(w)) throw validation_error(where + ": non-finite weight");
            for (double b : l.biases)
                if (!std::isfinite(b)) throw validation_error(where + ": non-finite bias");
            prev = l.out_width;
        }
        if (layers.back().out_width != class_count)
            throw validation_error("final layer width " + std::to_string(layers.back().out_width) +
                                   " does not match class_count " + std::to_string(class_count));
    }
};

// Per-layer pre/post activations recorded during one forward pass.
struct ActivationTrace {
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> post;
    int predicted_class = 0;

    const std::vector<double>& output() const { return post.back(); }
};

namespace detail {

inline void softmax_inplace(std::vector<double>& z) {
    double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : z) v /= sum;
}

inline int argmax_lowest_tie(const std::vector<double>& v) {
    int best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = static_cast<int>(i);
    return best;
}

}  // namespace detail

inline ActivationTrace forward_with_trace(const Model& model, std::span<const double> x) {
    if (x.size() != model.input_dim)
        throw shape_error("input length " + std::to_string(x.size()) +
                          " does not match input_dim " + std::to_string(model.input_dim));
    for (double v : x)
        if (!std::isfinite(v)) throw numeric_error("non-finite input entry");

    ActivationTrace trace;
    trace.pre.reserve(model.layers.size());
    trace.post.reserve(model.layers.size());

    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t j = 0; j < model.layers.size(); ++j) {
        const DenseLayer& l = model.layers[j];
        std::vector<double> z(l.out_width);
        for (std::size_t o = 0; o < l.out_width; ++o) {
            double s = l.biases[o];
            const double* w = &l.weights[o * l.in_width];
            for (std::size_t i = 0; i < l.in_width; ++i) s += w[i] * cur[i];
            if (!std::isfinite(s))
                throw numeric_error("non-finite pre-activation at layer " + std::to_string(j));
            z[o] = s;
        }
        trace.pre.push_back(z);
        switch (l.activation) {
            case Activation::Relu:
                for (double& v : z) v = v > 0.0 ? v : 0.0;
                break;
            case Activation::Softmax:
                detail::softmax_inplace(z);
                break;
            case Activation::Identity:
                break;
        }
        trace.post.push_back(z);
        cur = std::move(z);
    }
    trace.predicted_class = detail::argmax_lowest_tie(trace.post.back());
    return trace;
}

inline int predict(const Model& model, std::span<const double> x) {
    return forward_with_trace(model, x).predicted_class;
}

// Random MLP with ReLU hidden layers and a softmax output, He-scaled init.
// input_scale is the rough RMS magnitude of the inputs; the first layer's
// init is divided by it so pre-activations start O(1) (e.g. ~128 for raw
// pixel vectors, 1 for unit-scale features).
inline Model make_mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                      std::size_t class_count, std::uint64_t seed, double input_scale = 1.0) {
    if (input_scale <= 0.0) throw parameter_error("input_scale must be > 0");
    Model m;
    m.input_dim = input_dim;
    m.class_count = class_count;
    std::mt19937_64 rng(seed);
    std::size_t prev = input_dim;
    std::vector<std::size_t> widths = hidden;
    widths.push_back(class_count);
    for (std::size_t j = 0; j < widths.size(); ++j) {
        DenseLayer l;
        l.in_width = prev;
        l.out_width = widths[j];
        l.activation = (j + 1 == widths.size()) ? Activation::Softmax : Activation::Relu;
        const double scale = j == 0 ? input_scale : 1.0;
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(prev)) / scale);
        l.weights.resize(l.out_width * l.in_width);
        for (double& w : l.weights) w = dist(rng);
        l.biases.assign(l.out_width, 0.0);
        m.layers.push_back(std::move(l));
        prev = widths[j];
    }
    m.validate();
    return m;
}

}  // namespace fairtest
