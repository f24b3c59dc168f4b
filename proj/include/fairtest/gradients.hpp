#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "fairtest/model.hpp"

namespace fairtest {

// Loss and full gradient set for one (x, y): cross-entropy of the softmax
// output against label y. When the final layer already is softmax its
// pre-activations are the logits; otherwise the layer output is treated as
// logits and softmax is applied inside the loss.
struct LossGradients {
    double loss = 0.0;
    std::vector<double> input;                 // dJ/dx
    std::vector<std::vector<double>> weights;  // per layer, row-major
    std::vector<std::vector<double>> biases;   // per layer
};

namespace detail {

inline double log_sum_exp(const std::vector<double>& z) {
    double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    return m + std::log(s);
}

inline void check_label(const Model& model, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= model.class_count)
        throw label_error("label " + std::to_string(label) + " out of range [0, " +
                          std::to_string(model.class_count) + ")");
}

// Logits vector for the loss, given a completed trace.
inline const std::vector<double>& logits_of(const Model& model, const ActivationTrace& t) {
    return model.layers.back().activation == Activation::Softmax ? t.pre.back() : t.post.back();
}

}  // namespace detail

inline double cross_entropy_loss(const Model& model, std::span<const double> x, int label) {
    detail::check_label(model, label);
    ActivationTrace t = forward_with_trace(model, x);
    const std::vector<double>& z = detail::logits_of(model, t);
    return detail::log_sum_exp(z) - z[static_cast<std::size_t>(label)];
}

inline LossGradients loss_gradients(const Model& model, std::span<const double> x, int label) {
    detail::check_label(model, label);
    ActivationTrace t = forward_with_trace(model, x);

    const std::size_t J = model.layers.size();
    LossGradients g;
    g.weights.resize(J);
    g.biases.resize(J);

    const std::vector<double>& z = detail::logits_of(model, t);
    const double lse = detail::log_sum_exp(z);
    g.loss = lse - z[static_cast<std::size_t>(label)];

    // dJ/dlogits = softmax(z) - onehot(y)
    std::vector<double> delta(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) delta[i] = std::exp(z[i] - lse);
    delta[static_cast<std::size_t>(label)] -= 1.0;

    // delta holds dJ/dpre for the layer being processed. For a softmax final
    // layer the logits are its pre-activations, so delta is already there;
    // otherwise push it through the final activation first.
    if (model.layers.back().activation == Activation::Relu) {
        for (std::size_t i = 0; i < delta.size(); ++i)
            if (t.pre.back()[i] <= 0.0) delta[i] = 0.0;
    }

    const std::vector<double> input_copy(x.begin(), x.end());
    for (std::size_t jj = J; jj-- > 0;) {
        const DenseLayer& l = model.layers[jj];
        const std::vector<double>& below = jj == 0 ? input_copy : t.post[jj - 1];

        std::vector<double>& gw = g.weights[jj];
        gw.resize(l.out_width * l.in_width);
        for (std::size_t o = 0; o < l.out_width; ++o)
            for (std::size_t i = 0; i < l.in_width; ++i)
                gw[o * l.in_width + i] = delta[o] * below[i];
        g.biases[jj] = delta;

        // dJ/d(post of jj-1) for the layer below, or dJ/dx at the input.
        std::vector<double> dprev(l.in_width, 0.0);
        for (std::size_t o = 0; o < l.out_width; ++o) {
            const double d = delta[o];
            const double* w = &l.weights[o * l.in_width];
            for (std::size_t i = 0; i < l.in_width; ++i) dprev[i] += d * w[i];
        }
        if (jj == 0) {
            g.input = std::move(dprev);
        } else {
            if (model.layers[jj - 1].activation == Activation::Relu) {
                for (std::size_t i = 0; i < dprev.size(); ++i)
                    if (t.pre[jj - 1][i] <= 0.0) dprev[i] = 0.0;
            }
            delta = std::move(dprev);
        }
    }
    return g;
}

inline std::vector<double> input_gradient(const Model& model, std::span<const double> x, int label) {
    return loss_gradients(model, x, label).input;
}

}  // namespace fairtest
