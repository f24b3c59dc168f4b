#pragma once

#include <cstring>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fairtest/dataset.hpp"

namespace fairtest {

// Desk-scale stand-ins for the domain transformation: a constant patch
// substitution, or a lookup of externally produced counterparts.
struct Transform {
    enum class Kind { ExplicitPairing, PatchFlip };

    Kind kind = Kind::PatchFlip;

    // patch_flip: x' = x with patch_indices overwritten by value_map[to].
    std::vector<std::size_t> patch_indices;
    std::map<int, std::vector<double>> value_map;  // tag -> |patch| fill values

    // explicit_pairing: registered counterparts keyed by (x, from, to).
    void register_pair(std::span<const double> x, int from, int to,
                       std::span<const double> counterpart) {
        registry_[key(x, from, to)].assign(counterpart.begin(), counterpart.end());
    }

    const std::unordered_map<std::string, std::vector<double>>& registry() const {
        return registry_;
    }

    static std::string key(std::span<const double> x, int from, int to) {
        std::string k;
        k.resize(x.size() * sizeof(double) + 2 * sizeof(int));
        std::memcpy(k.data(), x.data(), x.size() * sizeof(double));
        std::memcpy(k.data() + x.size() * sizeof(double), &from, sizeof(int));
        std::memcpy(k.data() + x.size() * sizeof(double) + sizeof(int), &to, sizeof(int));
        return k;
    }

private:
    std::unordered_map<std::string, std::vector<double>> registry_;
};

// Builds an explicit-pairing transform from stored (x, x') pairs, registered
// in both directions.
inline Transform make_explicit_pairing(std::span<const SamplePair> pairs) {
    Transform t;
    t.kind = Transform::Kind::ExplicitPairing;
    for (const SamplePair& p : pairs) {
        t.register_pair(p.x, p.source_attr, p.target_attr, p.x_prime);
        t.register_pair(p.x_prime, p.target_attr, p.source_attr, p.x);
    }
    return t;
}

inline std::vector<double> apply_transform(const Transform& t, std::span<const double> x,
                                           int from, int to) {
    if (from == to) throw attribute_error("transform source and target attribute are equal");
    if (t.kind == Transform::Kind::PatchFlip) {
        auto it = t.value_map.find(to);
        if (it == t.value_map.end())
            throw attribute_error("no fill values for attribute tag " + std::to_string(to));
        if (t.value_map.find(from) == t.value_map.end())
            throw attribute_error("no fill values for attribute tag " + std::to_string(from));
        if (it->second.size() != t.patch_indices.size())
            throw validation_error("value_map entry size does not match patch size");
        std::vector<double> out(x.begin(), x.end());
        for (std::size_t i = 0; i < t.patch_indices.size(); ++i) {
            const std::size_t idx = t.patch_indices[i];
            if (idx >= out.size())
                throw validation_error("patch index " + std::to_string(idx) +
                                       " outside input dimension");
            out[idx] = it->second[i];
        }
        return out;
    }
    auto it = t.registry().find(Transform::key(x, from, to));
    if (it == t.registry().end())
        throw pairing_error("sample has no registered counterpart for requested transform");
    return it->second;
}

struct PairingResult {
    std::vector<SamplePair> pairs;
    std::size_t skipped = 0;  // samples already in the target domain
};

// One SamplePair per sample not already in the target domain.
inline PairingResult pair_dataset(const Dataset& d, const Transform& t, int target) {
    if (d.samples.empty()) throw pairing_error("empty dataset, nothing to pair");
    PairingResult res;
    for (const Sample& s : d.samples) {
        if (s.sensitive_value == target) {
            ++res.skipped;
            continue;
        }
        SamplePair p;
        p.x = s.x;
        p.x_prime = apply_transform(t, s.x, s.sensitive_value, target);
        p.label = s.label;
        p.source_attr = s.sensitive_value;
        p.target_attr = target;
        res.pairs.push_back(std::move(p));
    }
    if (res.pairs.empty()) throw pairing_error("no eligible samples to pair");
    return res;
}

}  // namespace fairtest
