#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "fairtest/model.hpp"

namespace fairtest {

inline nlohmann::json model_to_json(const Model& m) {
    m.validate();
    nlohmann::json j;
    j["format_version"] = 1;
    j["input_dim"] = m.input_dim;
    j["class_count"] = m.class_count;
    j["layers"] = nlohmann::json::array();
    for (const DenseLayer& l : m.layers) {
        nlohmann::json lj;
        lj["in_width"] = l.in_width;
        lj["out_width"] = l.out_width;
        lj["activation"] = to_string(l.activation);
        lj["weights"] = l.weights;
        lj["biases"] = l.biases;
        j["layers"].push_back(std::move(lj));
    }
    return j;
}

inline Model model_from_json(const nlohmann::json& j) {
    Model m;
    try {
        if (j.at("format_version").get<int>() != 1)
            throw validation_error("unsupported model format_version");
        m.input_dim = j.at("input_dim").get<std::size_t>();
        m.class_count = j.at("class_count").get<std::size_t>();
        for (const auto& lj : j.at("layers")) {
            DenseLayer l;
            l.in_width = lj.at("in_width").get<std::size_t>();
            l.out_width = lj.at("out_width").get<std::size_t>();
            l.activation = activation_from_string(lj.at("activation").get<std::string>());
            l.weights = lj.at("weights").get<std::vector<double>>();
            l.biases = lj.at("biases").get<std::vector<double>>();
            m.layers.push_back(std::move(l));
        }
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("model document: ") + e.what());
    }
    m.validate();
    return m;
}

// Weights travel as JSON numbers with shortest round-trip formatting, so a
// save/load cycle reproduces every double bit-exactly.
inline void save_model(const Model& m, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot write " + path);
    os << model_to_json(m).dump(2) << "\n";
    if (!os) throw io_error("failed writing " + path);
}

inline Model load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot read " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(path + ": " + e.what(), e.byte);
    }
    return model_from_json(j);
}

}  // namespace fairtest
