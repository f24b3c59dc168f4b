#pragma once

#include <span>

#include "fairtest/dataset.hpp"
#include "fairtest/parallel.hpp"
#include "fairtest/train.hpp"

namespace fairtest {

// Fraction of pairs the model treats consistently: M(x) == M(x').
inline double fairness_score(const Model& model, std::span<const SamplePair> pairs) {
    if (pairs.empty()) throw data_error("fairness_score: no pairs");
    std::vector<std::uint8_t> agree(pairs.size(), 0);
    parallel_for(pairs.size(), [&](std::size_t i) {
        agree[i] = predict(model, pairs[i].x) == predict(model, pairs[i].x_prime) ? 1 : 0;
    });
    std::size_t n = 0;
    for (std::uint8_t a : agree) n += a;
    return static_cast<double>(n) / static_cast<double>(pairs.size());
}

struct RetrainResult {
    Model model;
    std::size_t augmented_samples = 0;
    bool empty_augmentation = false;  // fell back to plain retraining
};

// Continue training on base_train plus the selected pairs, both pair
// elements labeled with the seed's ground truth. An empty selection falls
// back to plain retraining (flagged for the caller's warning).
inline RetrainResult augment_retrain(const Model& model, const Dataset& base_train,
                                     std::span<const SamplePair> selected_pairs, int epochs,
                                     double learning_rate, std::size_t batch_size,
                                     std::uint64_t seed = 0x5eed) {
    RetrainResult res;
    Dataset augmented = base_train;
    for (const SamplePair& p : selected_pairs) {
        augmented.samples.push_back({p.x, p.label, p.source_attr});
        augmented.samples.push_back({p.x_prime, p.label, p.target_attr});
    }
    res.augmented_samples = 2 * selected_pairs.size();
    res.empty_augmentation = selected_pairs.empty();
    res.model = train(model, augmented, epochs, learning_rate, batch_size, seed);
    return res;
}

}  // namespace fairtest
