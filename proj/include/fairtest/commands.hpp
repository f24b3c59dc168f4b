#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairtest/coverage.hpp"
#include "fairtest/dataset.hpp"
#include "fairtest/enhancement.hpp"
#include "fairtest/generation.hpp"
#include "fairtest/model_io.hpp"
#include "fairtest/mutation.hpp"
#include "fairtest/neuron_selection.hpp"
#include "fairtest/selection.hpp"
#include "fairtest/synthetic.hpp"
#include "fairtest/train.hpp"
#include "fairtest/transform.hpp"

namespace fairtest {

// ---------------------------------------------------------------------------
// Run configuration. Defaults follow the reference experiment configuration:
// alpha 0.05, step_size 5, mu 0, sigma 7, maxIt 10, topK 10; Z defaults to
// the desk-scale 100 (1000 available via config).
// ---------------------------------------------------------------------------

struct TransformSpec {
    std::string kind = "patch_flip";  // patch_flip | explicit_pairing
    std::vector<std::size_t> patch_indices;
    std::map<std::string, std::vector<double>> value_map;  // attribute name -> fill values
    std::string pairs_path;                                // explicit_pairing source
    std::string target = "B";                              // target attribute name
};

struct GenerateOptions {
    std::string strategies = "all";  // RG | GG | GI | all
    GenConfig config;
    std::size_t max_seed_pairs = 0;  // 0 = use every fair pair
};

struct EnhanceOptions {
    std::vector<std::string> pairs;             // candidate containers
    std::vector<std::string> validation_pairs;  // optional; defaults to tail split
    int epochs = 8;
    double learning_rate = 0.05;
    std::size_t batch_size = 32;
    std::size_t validation_per_source = 100;
};

struct MutateOptions {
    int per_operator = 10;
    double gaussian_fuzz_intensity = 0.25;
    int weight_shuffle_count = 2;
    int activation_inverse_count = 1;
    std::string suite = "per_mutant";  // per_mutant | fixed
    std::size_t fair_suite_size = 400;
};

struct RunConfig {
    std::string model_path;
    std::string dataset_path;
    std::string out_dir = "out";
    TransformSpec transform;
    double alpha = 0.05;
    int top_k = 10;
    int z = 100;
    std::vector<std::size_t> layers;  // empty = deepest hidden layer
    std::uint64_t seed = 42;

    GenerateOptions generate;
    SelectionConfig selection;  // n_select/k_sections for enhance
    std::string selection_metric = "cosine";
    bool selection_layer_set = false;
    EnhanceOptions enhance;
    MutateOptions mutate;
};

namespace detail {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        detail::maybe(j, "model", c.model_path);
        detail::maybe(j, "dataset", c.dataset_path);
        detail::maybe(j, "out", c.out_dir);
        detail::maybe(j, "alpha", c.alpha);
        detail::maybe(j, "topK", c.top_k);
        detail::maybe(j, "Z", c.z);
        detail::maybe(j, "layers", c.layers);
        detail::maybe(j, "seed", c.seed);
        if (j.contains("transform")) {
            const auto& t = j.at("transform");
            detail::maybe(t, "kind", c.transform.kind);
            detail::maybe(t, "patch_indices", c.transform.patch_indices);
            detail::maybe(t, "pairs", c.transform.pairs_path);
            detail::maybe(t, "target", c.transform.target);
            if (t.contains("value_map"))
                for (const auto& [name, vals] : t.at("value_map").items())
                    c.transform.value_map[name] = vals.get<std::vector<double>>();
        }
        if (j.contains("generation")) {
            const auto& g = j.at("generation");
            detail::maybe(g, "strategy", c.generate.strategies);
            detail::maybe(g, "step_size", c.generate.config.step_size);
            detail::maybe(g, "max_iterations", c.generate.config.max_iterations);
            detail::maybe(g, "gaussian_mu", c.generate.config.gaussian_mu);
            detail::maybe(g, "gaussian_sigma", c.generate.config.gaussian_sigma);
            detail::maybe(g, "clip_low", c.generate.config.clip_low);
            detail::maybe(g, "clip_high", c.generate.config.clip_high);
            detail::maybe(g, "max_seed_pairs", c.generate.max_seed_pairs);
        }
        if (j.contains("selection")) {
            const auto& s = j.at("selection");
            detail::maybe(s, "metric", c.selection_metric);
            if (s.contains("layer")) {
                c.selection.layer = s.at("layer").get<std::size_t>();
                c.selection_layer_set = true;
            }
            int k = c.selection.k_sections;
            detail::maybe(s, "k_sections", k);
            c.selection.k_sections = k;
            std::size_t n = c.selection.n_select;
            detail::maybe(s, "n_select", n);
            c.selection.n_select = n;
        }
        if (j.contains("enhance")) {
            const auto& e = j.at("enhance");
            detail::maybe(e, "pairs", c.enhance.pairs);
            detail::maybe(e, "validation_pairs", c.enhance.validation_pairs);
            detail::maybe(e, "epochs", c.enhance.epochs);
            detail::maybe(e, "learning_rate", c.enhance.learning_rate);
            detail::maybe(e, "batch_size", c.enhance.batch_size);
            detail::maybe(e, "validation_per_source", c.enhance.validation_per_source);
        }
        if (j.contains("mutate")) {
            const auto& m = j.at("mutate");
            detail::maybe(m, "per_operator", c.mutate.per_operator);
            detail::maybe(m, "gaussian_fuzz_intensity", c.mutate.gaussian_fuzz_intensity);
            detail::maybe(m, "weight_shuffle_count", c.mutate.weight_shuffle_count);
            detail::maybe(m, "activation_inverse_count", c.mutate.activation_inverse_count);
            detail::maybe(m, "suite", c.mutate.suite);
            detail::maybe(m, "fair_suite_size", c.mutate.fair_suite_size);
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot read config " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(path + ": " + e.what(), e.byte);
    }
    return run_config_from_json(j);
}

inline nlohmann::json run_config_to_json(const RunConfig& c) {
    nlohmann::json vm;
    for (const auto& [name, vals] : c.transform.value_map) vm[name] = vals;
    return nlohmann::json{
        {"model", c.model_path},
        {"dataset", c.dataset_path},
        {"out", c.out_dir},
        {"alpha", c.alpha},
        {"topK", c.top_k},
        {"Z", c.z},
        {"layers", c.layers},
        {"seed", c.seed},
        {"transform",
         {{"kind", c.transform.kind},
          {"patch_indices", c.transform.patch_indices},
          {"value_map", std::move(vm)},
          {"pairs", c.transform.pairs_path},
          {"target", c.transform.target}}},
        {"generation",
         {{"strategy", c.generate.strategies},
          {"step_size", c.generate.config.step_size},
          {"max_iterations", c.generate.config.max_iterations},
          {"gaussian_mu", c.generate.config.gaussian_mu},
          {"gaussian_sigma", c.generate.config.gaussian_sigma},
          {"clip_low", c.generate.config.clip_low},
          {"clip_high", c.generate.config.clip_high},
          {"max_seed_pairs", c.generate.max_seed_pairs}}},
        {"selection",
         {{"metric", c.selection_metric},
          {"layer", c.selection.layer},
          {"k_sections", c.selection.k_sections},
          {"n_select", c.selection.n_select}}},
        {"enhance",
         {{"pairs", c.enhance.pairs},
          {"validation_pairs", c.enhance.validation_pairs},
          {"epochs", c.enhance.epochs},
          {"learning_rate", c.enhance.learning_rate},
          {"batch_size", c.enhance.batch_size},
          {"validation_per_source", c.enhance.validation_per_source}}},
        {"mutate",
         {{"per_operator", c.mutate.per_operator},
          {"gaussian_fuzz_intensity", c.mutate.gaussian_fuzz_intensity},
          {"weight_shuffle_count", c.mutate.weight_shuffle_count},
          {"activation_inverse_count", c.mutate.activation_inverse_count},
          {"suite", c.mutate.suite},
          {"fair_suite_size", c.mutate.fair_suite_size}}}};
}

// ---------------------------------------------------------------------------
// Shared command plumbing
// ---------------------------------------------------------------------------

namespace detail {

inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot write " + path.string());
    os << j.dump(2) << "\n";
    if (!os) throw io_error("failed writing " + path.string());
}

inline void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                           const RunConfig& config, const nlohmann::json& results,
                           const std::vector<std::string>& outputs) {
    write_json_file(out_dir / "manifest.json", nlohmann::json{{"command", command},
                                                              {"config", run_config_to_json(config)},
                                                              {"results", results},
                                                              {"outputs", outputs}});
}

struct LoadedInputs {
    Model model;
    Dataset dataset;
    Transform transform;
    int target_tag = 0;
    std::vector<SamplePair> pairs;  // pair_dataset over the whole dataset
    std::size_t skipped = 0;
};

inline Transform build_transform(const TransformSpec& spec, const Dataset& dataset) {
    if (spec.kind == "patch_flip") {
        Transform t;
        t.kind = Transform::Kind::PatchFlip;
        t.patch_indices = spec.patch_indices;
        for (const auto& [name, vals] : spec.value_map) t.value_map[dataset.attribute_tag(name)] = vals;
        if (t.patch_indices.empty()) throw config_error("patch_flip transform needs patch_indices");
        if (t.value_map.empty()) throw config_error("patch_flip transform needs a value_map");
        return t;
    }
    if (spec.kind == "explicit_pairing") {
        if (spec.pairs_path.empty())
            throw config_error("explicit_pairing transform needs a pairs file");
        const PairFile pf = read_pairs(spec.pairs_path);
        return make_explicit_pairing(pf.pairs);
    }
    throw config_error("unknown transform kind '" + spec.kind + "'");
}

inline LoadedInputs load_inputs(const RunConfig& config) {
    if (config.model_path.empty()) throw config_error("missing model path");
    if (config.dataset_path.empty()) throw config_error("missing dataset path");
    LoadedInputs in;
    in.model = load_model(config.model_path);
    in.dataset = read_dataset(config.dataset_path);
    if (in.dataset.dim != in.model.input_dim)
        throw shape_error("dataset dimension does not match model input_dim");
    in.transform = build_transform(config.transform, in.dataset);
    in.target_tag = in.dataset.attribute_tag(config.transform.target);
    PairingResult pr = pair_dataset(in.dataset, in.transform, in.target_tag);
    in.pairs = std::move(pr.pairs);
    in.skipped = pr.skipped;
    return in;
}

inline std::vector<std::size_t> configured_layers(const RunConfig& config, const Model& model) {
    if (!config.layers.empty()) {
        for (std::size_t j : config.layers)
            if (j >= model.layer_count())
                throw config_error("configured layer " + std::to_string(j) + " out of range");
        return config.layers;
    }
    // default: the deepest hidden layer
    return {model.layer_count() >= 2 ? model.layer_count() - 2 : 0};
}

inline std::string suite_name(const std::string& path, std::size_t index) {
    std::string stem = std::filesystem::path(path).stem().string();
    std::string clean;
    for (char ch : stem)
        clean += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') ? ch : '_';
    if (clean.empty()) clean = "suite";
    return std::to_string(index) + "_" + clean;
}

inline nlohmann::json error_record(const std::string& command, const error& e) {
    return nlohmann::json{{"error", {{"command", command}, {"kind", e.kind()}, {"message", e.what()}}}};
}

// Runs a command body with the standard error-record contract: on failure the
// record goes to stderr as one JSON line and, when possible, to
// <out>/error.json; the exit status is nonzero.
template <typename Fn>
int run_command(const std::string& name, const RunConfig& config, Fn&& body) {
    try {
        std::filesystem::create_directories(config.out_dir);
        body();
        return 0;
    } catch (const error& e) {
        const nlohmann::json rec = error_record(name, e);
        std::cerr << rec.dump() << "\n";
        try {
            write_json_file(std::filesystem::path(config.out_dir) / "error.json", rec);
        } catch (...) {
        }
        return 1;
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// select-neurons
// ---------------------------------------------------------------------------

inline int cmd_select_neurons(const RunConfig& config) {
    return detail::run_command("select-neurons", config, [&] {
        detail::LoadedInputs in = detail::load_inputs(config);
        const FairnessNeuronMap map =
            select_fairness_neurons(in.model, in.pairs, config.alpha, config.top_k);

        const std::filesystem::path out(config.out_dir);
        write_neuron_map_csv(map, (out / "neuron_map.csv").string());

        nlohmann::json layers = nlohmann::json::array();
        for (std::size_t j = 0; j < map.stats.size(); ++j) {
            layers.push_back({{"layer", j},
                              {"total_neurons", map.stats[j].size()},
                              {"significant", map.significant_count(j)},
                              {"top_neurons", map.top_neurons(j)}});
        }
        nlohmann::json summary{{"alpha", map.alpha},
                               {"critical_value", map.critical_value},
                               {"pairs", in.pairs.size()},
                               {"skipped_samples", in.skipped},
                               {"fair_pairs", map.group0_size},
                               {"unfair_pairs", map.group1_size},
                               {"low_power", map.low_power},
                               {"layers", std::move(layers)}};
        detail::write_json_file(out / "summary.json", summary);
        detail::write_manifest(out, "select-neurons", config, summary,
                               {"neuron_map.csv", "summary.json"});
    });
}

// ---------------------------------------------------------------------------
// coverage
// ---------------------------------------------------------------------------

inline int cmd_coverage(const RunConfig& config, const std::vector<std::string>& suite_paths) {
    return detail::run_command("coverage", config, [&] {
        detail::LoadedInputs in = detail::load_inputs(config);
        const FairnessNeuronMap map =
            select_fairness_neurons(in.model, in.pairs, config.alpha, config.top_k);
        const std::vector<std::size_t> layers = detail::configured_layers(config, in.model);
        const RangeProfile profile =
            profile_ranges(in.model, in.pairs, map, layers, config.top_k, config.z);

        const std::filesystem::path out(config.out_dir);
        std::vector<std::string> outputs;
        nlohmann::json comparison = nlohmann::json::array();
        for (std::size_t si = 0; si < suite_paths.size(); ++si) {
            const PairFile suite = read_pairs(suite_paths[si]);
            const std::string name = detail::suite_name(suite_paths[si], si);
            nlohmann::json reports = nlohmann::json::array();
            nlohmann::json row{{"suite", name}, {"path", suite_paths[si]},
                               {"pairs", suite.pairs.size()}};
            for (MetricKind metric : all_metrics()) {
                const CoverageReport rep = coverage(suite.pairs, in.model, map, profile, metric);
                reports.push_back(coverage_report_to_json(rep, profile));
                row[to_string(metric)] = rep.ratio();
            }
            const std::string file = "coverage_" + name + ".json";
            detail::write_json_file(out / file, nlohmann::json{{"suite", name},
                                                               {"path", suite_paths[si]},
                                                               {"reports", std::move(reports)}});
            outputs.push_back(file);
            comparison.push_back(std::move(row));
        }
        nlohmann::json summary{{"suites", comparison},
                               {"layers", layers},
                               {"z", config.z},
                               {"profile",
                                {{"absolute_dims", profile.absolute_dims.size()},
                                 {"absolute_dropped", profile.absolute_dropped},
                                 {"relative_dims", profile.relative_dims.size()},
                                 {"relative_dropped", profile.relative_dropped}}}};
        detail::write_json_file(out / "coverage_summary.json", summary);
        outputs.push_back("coverage_summary.json");
        detail::write_manifest(out, "coverage", config, summary, outputs);
    });
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

inline int cmd_generate(const RunConfig& config) {
    return detail::run_command("generate", config, [&] {
        detail::LoadedInputs in = detail::load_inputs(config);

        std::vector<GenConfig::Strategy> strategies;
        if (config.generate.strategies == "all")
            strategies = {GenConfig::Strategy::RG, GenConfig::Strategy::GG,
                          GenConfig::Strategy::GI};
        else
            strategies = {strategy_from_string(config.generate.strategies)};

        // Fair seeds only; unfair pairs need no generating.
        std::vector<SamplePair> seeds;
        for (const SamplePair& p : in.pairs) {
            if (predict(in.model, p.x) == predict(in.model, p.x_prime)) {
                seeds.push_back(p);
                if (config.generate.max_seed_pairs != 0 &&
                    seeds.size() >= config.generate.max_seed_pairs)
                    break;
            }
        }

        const std::filesystem::path out(config.out_dir);
        std::vector<std::string> outputs;
        nlohmann::json per_strategy = nlohmann::json::array();
        for (GenConfig::Strategy strategy : strategies) {
            GenConfig gc = config.generate.config;
            gc.strategy = strategy;
            gc.seed = config.seed;
            const std::vector<GenResult> results = generate_unfair(in.model, seeds, gc);

            std::vector<SamplePair> unfair;
            std::map<int, std::size_t> iteration_histogram;
            for (const GenResult& r : results) {
                if (!r.success) continue;
                unfair.push_back(r.final_pair);
                ++iteration_histogram[r.iterations_used];
            }
            const std::string file = std::string("generated_") + to_string(strategy) + ".dft";
            write_pairs((out / file).string(), unfair, in.dataset.dim, in.dataset.class_count,
                        in.dataset.attribute_names);
            outputs.push_back(file);

            nlohmann::json hist = nlohmann::json::array();
            for (const auto& [iters, count] : iteration_histogram)
                hist.push_back({{"iterations", iters}, {"count", count}});
            per_strategy.push_back({{"strategy", to_string(strategy)},
                                    {"seeds", seeds.size()},
                                    {"successes", unfair.size()},
                                    {"success_rate",
                                     seeds.empty() ? 0.0
                                                   : static_cast<double>(unfair.size()) /
                                                         static_cast<double>(seeds.size())},
                                    {"iterations_histogram", std::move(hist)},
                                    {"output", file}});
        }
        nlohmann::json results{{"fair_seeds", seeds.size()},
                               {"total_pairs", in.pairs.size()},
                               {"strategies", per_strategy}};
        detail::write_manifest(out, "generate", config, results, outputs);
    });
}

// ---------------------------------------------------------------------------
// enhance
// ---------------------------------------------------------------------------

inline int cmd_enhance(const RunConfig& config) {
    return detail::run_command("enhance", config, [&] {
        detail::LoadedInputs in = detail::load_inputs(config);
        if (config.enhance.pairs.empty())
            throw config_error("enhance needs generated pair containers under enhance.pairs");

        const FairnessNeuronMap map =
            select_fairness_neurons(in.model, in.pairs, config.alpha, config.top_k);
        std::size_t sel_layer = config.selection_layer_set
                                    ? config.selection.layer
                                    : detail::configured_layers(config, in.model)[0];
        if (sel_layer >= in.model.layer_count())
            throw config_error("selection layer out of range");

        // Candidate pool and validation pool. Shared containers are split
        // head/tail to keep them disjoint; dedicated validation containers are
        // used whole.
        std::vector<SamplePair> candidates;
        std::vector<std::vector<SamplePair>> validation_sources;
        if (config.enhance.validation_pairs.empty()) {
            for (const std::string& path : config.enhance.pairs) {
                PairFile pf = read_pairs(path);
                const std::size_t half = pf.pairs.size() / 2;
                candidates.insert(candidates.end(), pf.pairs.begin(), pf.pairs.begin() + half);
                validation_sources.emplace_back(pf.pairs.begin() + half, pf.pairs.end());
            }
        } else {
            for (const std::string& path : config.enhance.pairs) {
                PairFile pf = read_pairs(path);
                candidates.insert(candidates.end(), pf.pairs.begin(), pf.pairs.end());
            }
            for (const std::string& path : config.enhance.validation_pairs)
                validation_sources.push_back(read_pairs(path).pairs);
        }
        if (candidates.empty()) throw data_error("no candidate pairs to select from");

        // Validation: equal parts per source, unfair-under-the-base-model
        // pairs first (they are the ones retraining is meant to fix), plus the
        // original dataset pairs as one more source.
        validation_sources.push_back(in.pairs);
        std::vector<SamplePair> validation;
        for (const auto& source : validation_sources) {
            std::size_t taken = 0;
            for (const SamplePair& p : source) {
                if (taken >= config.enhance.validation_per_source) break;
                if (predict(in.model, p.x) != predict(in.model, p.x_prime)) {
                    validation.push_back(p);
                    ++taken;
                }
            }
        }
        if (validation.empty()) throw data_error("validation set is empty: no unfair pairs found");

        const double fairness_before = fairness_score(in.model, validation);
        const double accuracy_before = accuracy(in.model, in.dataset);

        const std::size_t n_select = std::min<std::size_t>(
            config.selection.n_select == 0 ? candidates.size() / 10 + 1
                                           : config.selection.n_select,
            candidates.size());

        // Candidate metric values for the KM-ST strategies.
        struct Valued {
            std::size_t index;
            double value;
        };
        std::map<std::string, std::vector<Valued>> metric_values;
        {
            const std::vector<std::string> names = {"tanimoto", "cosine", "spearman"};
            std::vector<std::vector<std::optional<double>>> vals(
                candidates.size(), std::vector<std::optional<double>>(3));
            parallel_for(candidates.size(), [&](std::size_t i) {
                const ActivationTrace tx = forward_with_trace(in.model, candidates[i].x);
                const ActivationTrace ty = forward_with_trace(in.model, candidates[i].x_prime);
                vals[i][0] = layer_metric_value(tx, ty, sel_layer, map.nf[sel_layer],
                                                MetricKind::Tanimoto);
                vals[i][1] =
                    layer_metric_value(tx, ty, sel_layer, map.nf[sel_layer], MetricKind::Cosine);
                vals[i][2] =
                    layer_metric_value(tx, ty, sel_layer, map.nf[sel_layer], MetricKind::Spearman);
            });
            for (std::size_t m = 0; m < names.size(); ++m) {
                auto& list = metric_values[names[m]];
                for (std::size_t i = 0; i < candidates.size(); ++i)
                    if (vals[i][m]) list.push_back({i, *vals[i][m]});
            }
        }

        const std::filesystem::path out(config.out_dir);
        std::vector<std::string> outputs;
        nlohmann::json strategies = nlohmann::json::array();
        const std::vector<std::string> strategy_names = {"random", "tanimoto", "cosine",
                                                         "spearman"};
        for (std::size_t si = 0; si < strategy_names.size(); ++si) {
            const std::string& strat = strategy_names[si];
            std::vector<std::size_t> chosen;
            nlohmann::json selection_info;
            const std::uint64_t strat_seed = config.seed ^ (0x9e37 + si);

            if (strat == "random") {
                std::vector<std::size_t> idx(candidates.size());
                std::iota(idx.begin(), idx.end(), std::size_t{0});
                std::mt19937_64 rng(strat_seed);
                std::shuffle(idx.begin(), idx.end(), rng);
                chosen.assign(idx.begin(), idx.begin() + n_select);
                selection_info = {{"strategy", "random"}, {"n_select", n_select}};
            } else {
                const std::vector<Valued>& pool = metric_values[strat];
                if (pool.size() < n_select)
                    throw selection_error("strategy " + strat + ": only " +
                                          std::to_string(pool.size()) +
                                          " candidates carry a defined metric value");
                std::vector<double> values(pool.size());
                for (std::size_t i = 0; i < pool.size(); ++i) values[i] = pool[i].value;
                const KmStResult km =
                    km_st_select(values, config.selection.k_sections, n_select, strat_seed);
                for (std::size_t i : km.selected) chosen.push_back(pool[i].index);
                selection_info = {{"strategy", strat},
                                  {"metric", strat},
                                  {"layer", sel_layer},
                                  {"k_sections", config.selection.k_sections},
                                  {"n_select", n_select},
                                  {"boundaries", km.boundaries},
                                  {"section_counts", km.section_counts},
                                  {"candidates_with_value", pool.size()}};
            }
            std::sort(chosen.begin(), chosen.end());
            std::vector<SamplePair> selected;
            for (std::size_t i : chosen) selected.push_back(candidates[i]);

            const RetrainResult rr =
                augment_retrain(in.model, in.dataset, selected, config.enhance.epochs,
                                config.enhance.learning_rate, config.enhance.batch_size,
                                config.seed);
            const double fairness_after = fairness_score(rr.model, validation);
            const double accuracy_after = accuracy(rr.model, in.dataset);

            const std::string model_file = "enhanced_" + strat + ".json";
            save_model(rr.model, (out / model_file).string());
            outputs.push_back(model_file);
            selection_info["selected_indices"] = chosen;
            const std::string sel_file = "selection_" + strat + ".json";
            detail::write_json_file(out / sel_file, selection_info);
            outputs.push_back(sel_file);

            strategies.push_back({{"strategy", strat},
                                  {"selected", selected.size()},
                                  {"fairness_before", fairness_before},
                                  {"fairness_after", fairness_after},
                                  {"accuracy_before", accuracy_before},
                                  {"accuracy_after", accuracy_after},
                                  {"model", model_file}});
        }

        nlohmann::json report{{"validation_pairs", validation.size()},
                              {"candidates", candidates.size()},
                              {"fairness_before", fairness_before},
                              {"accuracy_before", accuracy_before},
                              {"strategies", strategies}};
        detail::write_json_file(out / "enhancement_report.json", report);
        outputs.push_back("enhancement_report.json");
        detail::write_manifest(out, "enhance", config, report, outputs);
    });
}

// ---------------------------------------------------------------------------
// mutate
// ---------------------------------------------------------------------------

inline int cmd_mutate(const RunConfig& config) {
    return detail::run_command("mutate", config, [&] {
        detail::LoadedInputs in = detail::load_inputs(config);
        const FairnessNeuronMap map =
            select_fairness_neurons(in.model, in.pairs, config.alpha, config.top_k);
        const std::vector<std::size_t> layers = detail::configured_layers(config, in.model);
        const RangeProfile profile =
            profile_ranges(in.model, in.pairs, map, layers, config.top_k, config.z);

        // Fair suite: pairs the original model treats consistently.
        std::vector<SamplePair> base_fair;
        for (const SamplePair& p : in.pairs) {
            if (base_fair.size() >= config.mutate.fair_suite_size) break;
            if (predict(in.model, p.x) == predict(in.model, p.x_prime)) base_fair.push_back(p);
        }
        if (base_fair.empty()) throw data_error("no fair pairs for the coverage suite");
        const bool per_mutant = config.mutate.suite == "per_mutant";

        const std::filesystem::path out(config.out_dir);
        std::filesystem::create_directories(out / "mutants");

        const std::vector<MutationSpec::Operator> operators = {
            MutationSpec::Operator::GaussianFuzz, MutationSpec::Operator::WeightShuffle,
            MutationSpec::Operator::NeuronSwitch, MutationSpec::Operator::ActivationInverse};

        struct Row {
            std::string op;
            std::uint64_t seed;
            double accuracy;
            double fairness;
            std::map<std::string, double> coverage;
            std::string file;
        };
        std::vector<Row> rows;
        std::vector<std::string> outputs;

        for (std::size_t oi = 0; oi < operators.size(); ++oi) {
            for (int i = 0; i < config.mutate.per_operator; ++i) {
                MutationSpec spec;
                spec.op = operators[oi];
                spec.seed = config.seed + 1000 * (oi + 1) + static_cast<std::uint64_t>(i);
                switch (spec.op) {
                    case MutationSpec::Operator::GaussianFuzz:
                        spec.intensity = config.mutate.gaussian_fuzz_intensity;
                        break;
                    case MutationSpec::Operator::WeightShuffle:
                        spec.intensity = config.mutate.weight_shuffle_count;
                        break;
                    case MutationSpec::Operator::ActivationInverse:
                        spec.intensity = config.mutate.activation_inverse_count;
                        break;
                    case MutationSpec::Operator::NeuronSwitch:
                        break;
                }
                const Model mutant = mutate_model(in.model, spec);

                Row row;
                row.op = to_string(spec.op);
                row.seed = spec.seed;
                row.accuracy = accuracy(mutant, in.dataset);
                row.fairness = fairness_score(mutant, in.pairs);

                std::vector<SamplePair> suite;
                if (per_mutant) {
                    for (const SamplePair& p : in.pairs) {
                        if (suite.size() >= config.mutate.fair_suite_size) break;
                        if (predict(mutant, p.x) == predict(mutant, p.x_prime)) suite.push_back(p);
                    }
                } else {
                    suite = base_fair;
                }
                for (MetricKind metric : all_metrics()) {
                    const CoverageReport rep = coverage(suite, mutant, map, profile, metric);
                    row.coverage[to_string(metric)] = rep.ratio();
                }

                row.file = "mutants/mutant_" + row.op + "_" + std::to_string(i) + ".json";
                save_model(mutant, (out / row.file).string());
                outputs.push_back(row.file);
                rows.push_back(std::move(row));
            }
        }

        // Registry CSV: one row per mutant.
        {
            std::ofstream os(out / "mutant_registry.csv");
            if (!os) throw io_error("cannot write mutant_registry.csv");
            os << "operator,seed,accuracy,fairness_score\n";
            for (const Row& r : rows)
                os << r.op << "," << r.seed << "," << detail::format_double(r.accuracy) << ","
                   << detail::format_double(r.fairness) << "\n";
            outputs.push_back("mutant_registry.csv");
        }

        // Pearson correlation matrix over the five coverage ratios and the
        // fairness score, across mutants.
        std::vector<std::string> axes;
        for (MetricKind m : all_metrics()) axes.push_back(to_string(m));
        axes.push_back("fairness_score");
        std::vector<std::vector<double>> series(axes.size());
        for (const Row& r : rows) {
            for (std::size_t m = 0; m < all_metrics().size(); ++m)
                series[m].push_back(r.coverage.at(axes[m]));
            series.back().push_back(r.fairness);
        }
        nlohmann::json matrix = nlohmann::json::array();
        for (std::size_t a = 0; a < axes.size(); ++a) {
            nlohmann::json rowj = nlohmann::json::array();
            for (std::size_t b = 0; b < axes.size(); ++b) {
                const auto r = pearson(series[a], series[b]);
                rowj.push_back(r ? nlohmann::json(*r) : nlohmann::json());
            }
            matrix.push_back(std::move(rowj));
        }
        nlohmann::json mutant_rows = nlohmann::json::array();
        for (const Row& r : rows) {
            nlohmann::json mj{{"operator", r.op},
                              {"seed", r.seed},
                              {"accuracy", r.accuracy},
                              {"fairness_score", r.fairness},
                              {"model", r.file}};
            for (const auto& [k, v] : r.coverage) mj[k] = v;
            mutant_rows.push_back(std::move(mj));
        }
        nlohmann::json report{{"axes", axes},
                              {"pearson", matrix},
                              {"suite_mode", per_mutant ? "per_mutant" : "fixed"},
                              {"suite_size", base_fair.size()},
                              {"mutants", mutant_rows}};
        detail::write_json_file(out / "correlation_report.json", report);
        outputs.push_back("correlation_report.json");
        detail::write_manifest(out, "mutate", config, report, outputs);
    });
}

// ---------------------------------------------------------------------------
// make-bench: synthetic dataset + trained model, the standalone quickstart.
// ---------------------------------------------------------------------------

struct BenchOptions {
    std::size_t n_per_class = 500;
    std::size_t class_count = 2;
    std::size_t dim = 64;
    std::size_t patch_size = 4;
    double attr_bias = 0.65;
    std::vector<std::size_t> hidden = {32, 16};
    int epochs = 60;
    double learning_rate = 0.0003;
    std::size_t batch_size = 32;
    double clip_norm = 5.0;
};

inline int cmd_make_bench(const RunConfig& config, const BenchOptions& opts) {
    return detail::run_command("make-bench", config, [&] {
        const PatchSpec patch = make_default_patch(opts.dim, opts.patch_size);
        Synthetic syn = generate_synthetic(config.seed, opts.n_per_class, opts.class_count,
                                           opts.dim, patch, opts.attr_bias);
        // Data stays in pixel units [0,255] (step_size 5 / sigma 7 presume
        // that scale); the init is told so.
        Model model = make_mlp(opts.dim, opts.hidden, opts.class_count, config.seed + 1, 128.0);
        model = train(model, syn.dataset, opts.epochs, opts.learning_rate, opts.batch_size,
                      config.seed + 2, opts.clip_norm);

        const std::filesystem::path out(config.out_dir);
        write_dataset((out / "bench_dataset.dft").string(), syn.dataset);
        save_model(model, (out / "bench_model.json").string());

        nlohmann::json patch_json = nlohmann::json::array();
        for (std::size_t i : patch.indices) patch_json.push_back(i);
        nlohmann::json results{{"accuracy", accuracy(model, syn.dataset)},
                               {"samples", syn.dataset.size()},
                               {"patch_indices", patch_json},
                               {"dataset", "bench_dataset.dft"},
                               {"model", "bench_model.json"}};
        detail::write_manifest(out, "make-bench", config, results,
                               {"bench_dataset.dft", "bench_model.json"});
    });
}

}  // namespace fairtest
