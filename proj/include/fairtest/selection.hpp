#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fairtest/errors.hpp"

namespace fairtest {

struct SelectionConfig {
    enum class Metric { Tanimoto, Cosine, Spearman };

    Metric metric = Metric::Cosine;
    std::size_t layer = 0;
    int k_sections = 5;
    std::size_t n_select = 0;
    std::uint64_t seed = 0;
};

struct KmStResult {
    std::vector<std::size_t> selected;       // candidate indices
    std::vector<double> boundaries;          // k_sections + 1 section edges
    std::vector<std::size_t> section_counts; // selected per section
};

// K-Multisection selection: split [min, max] of the candidate metric values
// into k equal sections, draw an even quota from each uniformly without
// replacement, and redistribute the shortfall of under-populated sections
// round-robin to sections that still have candidates. A zero-width value
// range degenerates to one section, i.e. plain uniform selection.
inline KmStResult km_st_select(std::span<const double> values, int k_sections,
                               std::size_t n_select, std::uint64_t seed) {
    if (values.empty()) throw selection_error("km_st_select: no candidates");
    if (k_sections < 1) throw parameter_error("k_sections must be >= 1");
    if (n_select < 1) throw parameter_error("n_select must be >= 1");
    if (n_select > values.size())
        throw selection_error("n_select " + std::to_string(n_select) +
                              " exceeds candidate count " + std::to_string(values.size()));

    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const bool degenerate = !(hi > lo);
    const int k = degenerate ? 1 : k_sections;

    KmStResult res;
    res.boundaries.resize(k + 1);
    const double width = degenerate ? 0.0 : (hi - lo) / static_cast<double>(k);
    for (int s = 0; s <= k; ++s) res.boundaries[s] = lo + width * s;
    res.boundaries.back() = hi;

    std::vector<std::vector<std::size_t>> sections(k);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::size_t s = 0;
        if (!degenerate) {
            s = static_cast<std::size_t>(static_cast<double>(k) * (values[i] - lo) / (hi - lo));
            if (s >= static_cast<std::size_t>(k)) s = k - 1;  // v == max
        }
        sections[s].push_back(i);
    }

    std::mt19937_64 rng(seed);
    for (auto& sec : sections) std::shuffle(sec.begin(), sec.end(), rng);

    // Even quotas, the remainder going to the leading sections.
    std::vector<std::size_t> taken(k, 0);
    const std::size_t base = n_select / static_cast<std::size_t>(k);
    const std::size_t extra = n_select % static_cast<std::size_t>(k);
    for (int s = 0; s < k; ++s) {
        const std::size_t quota = base + (static_cast<std::size_t>(s) < extra ? 1 : 0);
        taken[s] = std::min(quota, sections[s].size());
    }
    std::size_t total = 0;
    for (std::size_t t : taken) total += t;

    // Round-robin redistribution of the shortfall.
    while (total < n_select) {
        bool progressed = false;
        for (int s = 0; s < k && total < n_select; ++s) {
            if (taken[s] < sections[s].size()) {
                ++taken[s];
                ++total;
                progressed = true;
            }
        }
        if (!progressed) break;  // unreachable: n_select <= candidate count
    }

    res.section_counts.assign(k, 0);
    for (int s = 0; s < k; ++s) {
        res.section_counts[s] = taken[s];
        for (std::size_t i = 0; i < taken[s]; ++i) res.selected.push_back(sections[s][i]);
    }
    return res;
}

inline KmStResult km_st_select(std::span<const double> values, const SelectionConfig& config) {
    return km_st_select(values, config.k_sections, config.n_select, config.seed);
}

}  // namespace fairtest
