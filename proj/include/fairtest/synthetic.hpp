#pragma once

#include <cstdint>
#include <random>

#include "fairtest/dataset.hpp"
#include "fairtest/transform.hpp"

namespace fairtest {

struct PatchSpec {
    std::vector<std::size_t> indices;
    std::map<int, std::vector<double>> value_map;  // tag -> |indices| fill values
};

// Default sensitive patch: the last `patch_size` coordinates, tag 0 ("A")
// filled with 0, tag 1 ("B") filled with 255.
inline PatchSpec make_default_patch(std::size_t dim, std::size_t patch_size) {
    if (patch_size >= dim) throw construction_error("patch covers the whole input");
    PatchSpec p;
    for (std::size_t i = dim - patch_size; i < dim; ++i) p.indices.push_back(i);
    p.value_map[0] = std::vector<double>(patch_size, 0.0);
    p.value_map[1] = std::vector<double>(patch_size, 255.0);
    return p;
}

struct Synthetic {
    Dataset dataset;
    Transform transform;
};

// Gaussian class clusters on the non-patch coordinates, pixel units [0,255].
// The sensitive attribute is encoded only in the patch, so labels are a
// function of the non-patch coordinates alone by construction. attr_bias is
// the probability that a class-c sample carries tag c (mod tags): 0.5 keeps
// every class balanced across the attribute domain; above 0.5 the tag
// correlates with the class the way biased real-world collections do, which
// trains models with genuine patch sensitivity.
inline Synthetic generate_synthetic(std::uint64_t seed, std::size_t n_per_class,
                                    std::size_t class_count, std::size_t dim,
                                    const PatchSpec& patch, double attr_bias = 0.5) {
    if (n_per_class == 0) throw construction_error("n_per_class must be >= 1");
    if (class_count < 2) throw construction_error("class_count must be >= 2");
    if (patch.indices.size() >= dim)
        throw construction_error("patch covers all coordinates, no room for class signal");
    for (std::size_t idx : patch.indices)
        if (idx >= dim) throw construction_error("patch index outside dimension");
    if (patch.value_map.size() < 2)
        throw construction_error("value_map must cover at least two attributes");
    for (const auto& [tag, fill] : patch.value_map)
        if (fill.size() != patch.indices.size())
            throw construction_error("value_map entry size does not match patch size");
    if (!(attr_bias >= 0.0 && attr_bias <= 1.0))
        throw construction_error("attr_bias must lie in [0,1]");

    std::vector<bool> in_patch(dim, false);
    for (std::size_t idx : patch.indices) in_patch[idx] = true;

    // Cluster means close enough that classes overlap moderately: desk-scale
    // models then sit near the reported >= 90% accuracy instead of saturating.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mean_dist(112.0, 143.0);
    std::normal_distribution<double> noise(0.0, 35.0);

    // Per-class mean on non-patch coordinates.
    std::vector<std::vector<double>> means(class_count, std::vector<double>(dim, 0.0));
    for (std::size_t c = 0; c < class_count; ++c)
        for (std::size_t i = 0; i < dim; ++i)
            if (!in_patch[i]) means[c][i] = mean_dist(rng);

    std::vector<int> tags;
    for (const auto& [tag, fill] : patch.value_map) tags.push_back(tag);
    std::bernoulli_distribution keep_own_tag(attr_bias);
    std::uniform_int_distribution<std::size_t> other_offset(1, tags.size() - 1);

    Synthetic out;
    out.dataset.dim = dim;
    out.dataset.class_count = class_count;
    std::size_t n = 0;
    for (std::size_t c = 0; c < class_count; ++c) {
        for (std::size_t k = 0; k < n_per_class; ++k, ++n) {
            Sample s;
            s.label = static_cast<int>(c);
            if (attr_bias == 0.5) {
                s.sensitive_value = tags[n % tags.size()];  // exactly balanced
            } else {
                const std::size_t own = c % tags.size();
                s.sensitive_value =
                    keep_own_tag(rng) ? tags[own] : tags[(own + other_offset(rng)) % tags.size()];
            }
            s.x.resize(dim);
            const std::vector<double>& fill = patch.value_map.at(s.sensitive_value);
            for (std::size_t i = 0; i < dim; ++i)
                s.x[i] = in_patch[i] ? 0.0 : std::clamp(means[c][i] + noise(rng), 0.0, 255.0);
            for (std::size_t t = 0; t < patch.indices.size(); ++t) s.x[patch.indices[t]] = fill[t];
            out.dataset.samples.push_back(std::move(s));
        }
    }
    int max_tag = 0;
    for (int t : tags) max_tag = std::max(max_tag, t);
    out.dataset.attribute_names.resize(max_tag + 1);
    for (int t = 0; t <= max_tag; ++t)
        out.dataset.attribute_names[t] = std::string(1, static_cast<char>('A' + t));

    out.transform.kind = Transform::Kind::PatchFlip;
    out.transform.patch_indices = patch.indices;
    out.transform.value_map = patch.value_map;
    return out;
}

}  // namespace fairtest
