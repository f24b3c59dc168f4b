#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fairtest/dataset.hpp"
#include "fairtest/gradients.hpp"
#include "fairtest/parallel.hpp"

namespace fairtest {

struct GenConfig {
    enum class Strategy { RG, GG, GI };

    Strategy strategy = Strategy::GG;
    double step_size = 5.0;       // pixel units (RG, GG)
    int max_iterations = 10;
    double gaussian_mu = 0.0;     // GI
    double gaussian_sigma = 7.0;  // GI
    double clip_low = 0.0;
    double clip_high = 255.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (step_size <= 0.0) throw parameter_error("step_size must be > 0");
        if (max_iterations < 1) throw parameter_error("max_iterations must be >= 1");
        if (gaussian_sigma <= 0.0) throw parameter_error("gaussian_sigma must be > 0");
        if (!(clip_low < clip_high)) throw parameter_error("clip range must be low < high");
    }
};

inline const char* to_string(GenConfig::Strategy s) {
    switch (s) {
        case GenConfig::Strategy::RG: return "RG";
        case GenConfig::Strategy::GG: return "GG";
        case GenConfig::Strategy::GI: return "GI";
    }
    return "?";
}

inline GenConfig::Strategy strategy_from_string(const std::string& s) {
    if (s == "RG") return GenConfig::Strategy::RG;
    if (s == "GG") return GenConfig::Strategy::GG;
    if (s == "GI") return GenConfig::Strategy::GI;
    throw config_error("unknown strategy '" + s + "'; valid: RG, GG, GI");
}

struct GenResult {
    SamplePair seed_pair;
    SamplePair final_pair;
    bool success = false;
    int iterations_used = 0;
    std::vector<double> perturbation;  // accumulated p, shared by both elements
};

// Random direction: each coordinate independently from {-1, 0, +1} times the
// step size.
inline std::vector<double> rg_step(std::size_t dim, double step_size, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dir(-1, 1);
    std::vector<double> p(dim);
    for (double& v : p) v = static_cast<double>(dir(rng)) * step_size;
    return p;
}

// Gradient-sign agreement: perturb only coordinates where the loss gradients
// at x and x' share a nonzero sign, in that shared direction. `stalled` is
// set when no coordinate agrees.
inline std::vector<double> gg_step(const Model& model, std::span<const double> x,
                                   std::span<const double> x_prime, int label, double step_size,
                                   bool* stalled = nullptr) {
    const std::vector<double> g = input_gradient(model, x, label);
    const std::vector<double> g_prime = input_gradient(model, x_prime, label);
    std::vector<double> p(x.size(), 0.0);
    bool any = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const int s = g[i] > 0.0 ? 1 : (g[i] < 0.0 ? -1 : 0);
        const int s2 = g_prime[i] > 0.0 ? 1 : (g_prime[i] < 0.0 ? -1 : 0);
        if (s != 0 && s == s2) {
            p[i] = static_cast<double>(s) * step_size;
            any = true;
        }
    }
    if (stalled) *stalled = !any;
    return p;
}

// Gaussian noise injection: i.i.d. draws from N(mu, sigma^2).
inline std::vector<double> gi_step(std::size_t dim, double mu, double sigma,
                                   std::mt19937_64& rng) {
    std::normal_distribution<double> noise(mu, sigma);
    std::vector<double> p(dim);
    for (double& v : p) v = noise(rng);
    return p;
}

namespace detail {

// Clamp the accumulated perturbation so that both pair elements stay inside
// the clip range while still receiving the identical p.
inline void clamp_joint(std::vector<double>& p, std::span<const double> x,
                        std::span<const double> x_prime, double low, double high) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double lo = low - std::min(x[i], x_prime[i]);
        const double hi = high - std::max(x[i], x_prime[i]);
        p[i] = std::clamp(p[i], lo, hi);
    }
}

}  // namespace detail

// Iterative perturbation of fair seed pairs until the predictions disagree
// or the iteration budget runs out. Both elements always receive the same
// accumulated perturbation. Already-unfair seeds return immediately as
// successes with p = 0.
inline std::vector<GenResult> generate_unfair(const Model& model,
                                              std::span<const SamplePair> seed_pairs,
                                              const GenConfig& config) {
    config.validate();
    for (const SamplePair& p : seed_pairs)
        if (p.x.size() != model.input_dim || p.x_prime.size() != model.input_dim)
            throw shape_error("seed pair dimension does not match model input_dim");

    std::vector<GenResult> results(seed_pairs.size());
    parallel_for(seed_pairs.size(), [&](std::size_t idx) {
        const SamplePair& seed = seed_pairs[idx];
        GenResult res;
        res.seed_pair = seed;
        res.final_pair = seed;
        res.perturbation.assign(model.input_dim, 0.0);

        if (predict(model, seed.x) != predict(model, seed.x_prime)) {
            res.success = true;
            res.iterations_used = 0;
            results[idx] = std::move(res);
            return;
        }

        std::mt19937_64 rng(config.seed ^ static_cast<std::uint64_t>(idx));
        std::vector<double> accum(model.input_dim, 0.0);
        std::vector<double> cx(seed.x);
        std::vector<double> cy(seed.x_prime);

        for (int it = 1; it <= config.max_iterations; ++it) {
            std::vector<double> step;
            bool stalled = false;
            switch (config.strategy) {
                case GenConfig::Strategy::RG:
                    step = rg_step(model.input_dim, config.step_size, rng);
                    break;
                case GenConfig::Strategy::GG:
                    step = gg_step(model, cx, cy, seed.label, config.step_size, &stalled);
                    break;
                case GenConfig::Strategy::GI:
                    step = gi_step(model.input_dim, config.gaussian_mu, config.gaussian_sigma,
                                   rng);
                    break;
            }
            res.iterations_used = it;
            if (stalled) break;  // no agreeing gradient signs left

            for (std::size_t i = 0; i < accum.size(); ++i) accum[i] += step[i];
            detail::clamp_joint(accum, seed.x, seed.x_prime, config.clip_low, config.clip_high);
            for (std::size_t i = 0; i < accum.size(); ++i) {
                cx[i] = seed.x[i] + accum[i];
                cy[i] = seed.x_prime[i] + accum[i];
            }
            if (predict(model, cx) != predict(model, cy)) {
                res.success = true;
                break;
            }
        }
        res.final_pair.x = cx;
        res.final_pair.x_prime = cy;
        res.perturbation = accum;
        results[idx] = std::move(res);
    });
    return results;
}

}  // namespace fairtest
