// fairtest CLI: orchestrates the fairness-testing pipeline over model and
// dataset files. Every subcommand takes --config <json> plus --seed/--out
// overrides and writes a manifest embedding the resolved configuration.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairtest/fairtest.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration")->required();
        seed_opt = cmd->add_option("--seed", seed_value, "Override the config seed");
        out_opt = cmd->add_option("--out", out_value, "Override the output directory");
    }

    fairtest::RunConfig load() {
        fairtest::RunConfig config = fairtest::load_run_config(config_path);
        if (seed_opt->count() > 0) config.seed = seed_value;
        if (out_opt->count() > 0) config.out_dir = out_value;
        return config;
    }

private:
    CLI::Option* seed_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    std::uint64_t seed_value = 0;
    std::string out_value;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fairness adequacy testing toolkit"};
    app.require_subcommand(1);

    CommonArgs select_args, coverage_args, generate_args, enhance_args, mutate_args, bench_args;
    std::vector<std::string> suites;
    fairtest::BenchOptions bench;

    CLI::App* select = app.add_subcommand("select-neurons",
                                          "Rank-test neurons and export the fairness map");
    select_args.attach(select);

    CLI::App* coverage = app.add_subcommand("coverage", "Adequacy coverage of pair suites");
    coverage_args.attach(coverage);
    coverage->add_option("suites", suites, "Paired containers to measure")->required();

    CLI::App* generate = app.add_subcommand("generate", "Generate unfair pairs from fair seeds");
    generate_args.attach(generate);

    CLI::App* enhance = app.add_subcommand("enhance",
                                           "Select augmentation pairs and retrain");
    enhance_args.attach(enhance);

    CLI::App* mutate = app.add_subcommand("mutate",
                                          "Mutant sweep and coverage/fairness correlation");
    mutate_args.attach(mutate);

    CLI::App* make_bench = app.add_subcommand("make-bench",
                                              "Write a synthetic benchmark dataset and model");
    bench_args.attach(make_bench);
    make_bench->add_option("--n-per-class", bench.n_per_class, "Samples per class");
    make_bench->add_option("--dim", bench.dim, "Input dimension");
    make_bench->add_option("--patch-size", bench.patch_size, "Sensitive patch size");
    make_bench->add_option("--attr-bias", bench.attr_bias,
                           "Class/attribute correlation (0.5 = balanced)");
    make_bench->add_option("--hidden", bench.hidden, "Hidden layer widths");
    make_bench->add_option("--epochs", bench.epochs, "Training epochs");
    make_bench->add_option("--learning-rate", bench.learning_rate, "SGD learning rate");
    make_bench->add_option("--batch-size", bench.batch_size, "SGD batch size");
    make_bench->add_option("--clip-norm", bench.clip_norm, "Gradient clipping norm (0 = off)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (select->parsed()) return fairtest::cmd_select_neurons(select_args.load());
        if (coverage->parsed()) return fairtest::cmd_coverage(coverage_args.load(), suites);
        if (generate->parsed()) return fairtest::cmd_generate(generate_args.load());
        if (enhance->parsed()) return fairtest::cmd_enhance(enhance_args.load());
        if (mutate->parsed()) return fairtest::cmd_mutate(mutate_args.load());
        if (make_bench->parsed()) return fairtest::cmd_make_bench(bench_args.load(), bench);
    } catch (const fairtest::error& e) {
        // config loading failed before a command could own the error record
        std::cerr << nlohmann::json{{"error", {{"command", "cli"}, {"kind", e.kind()},
                                               {"message", e.what()}}}}
                         .dump()
                  << "\n";
        return 1;
    }
    return 0;
}
