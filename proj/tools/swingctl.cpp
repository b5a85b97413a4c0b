// swingctl: swing option pricing and convergence experiments.
//
// Exit status: 0 when every verdict passes, 1 when a verdict fails, 2 on
// configuration or runtime errors.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "swing/config.hpp"
#include "swing/error.hpp"
#include "swing/run.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App& sub, Overrides& o) {
    sub.add_option("--config", o.config, "run configuration file")->required()->check(CLI::ExistingFile);
    sub.add_option("--out", o.out, "output directory");
    sub.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    sub.add_option("--seed", o.seed, "simulation seed; training and forward seeds are derived from it");
}

const char* describe(swing::Command c) {
    using swing::Command;
    switch (c) {
        case Command::price: return "simulate, fit continuation values and revalue out of sample";
        case Command::oracle: return "exact dynamic programming table on a finite-state chain";
        case Command::sweep_m: return "exact projection error over nested basis sizes";
        case Command::sweep_n: return "Monte Carlo error rate in the number of paths";
        case Command::mz_check: return "L^p rate of a sample mean";
        case Command::tails: return "coefficient deviation frequencies in the number of paths";
        case Command::continuity: return "value continuity in cumulative volume under grid refinement";
        case Command::nn_sweep: return "neural continuation across network widths";
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Swing option pricing by least-squares and neural backward induction"};
    app.require_subcommand(1);
    Overrides overrides;
    std::optional<swing::Command> chosen;
    for (swing::Command c : swing::all_commands()) {
        CLI::App* sub = app.add_subcommand(swing::to_string(c), describe(c));
        add_common(*sub, overrides);
        sub->callback([&chosen, c] { chosen = c; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        swing::RunConfig config = swing::load_config(overrides.config);
        swing::apply_env_overrides(config);
        if (overrides.out) config.out_dir = *overrides.out;
        if (overrides.threads) config.threads = *overrides.threads;
        if (overrides.seed) config.reseed(*overrides.seed);
        const swing::RunManifest manifest = swing::run(config, *chosen);
        for (const auto& v : manifest.verdicts) {
            std::cout << (v.passed ? "PASS " : (v.inconclusive ? "INCONCLUSIVE " : "FAIL ")) << v.criterion << ": "
                      << v.detail << '\n';
        }
        std::cout << manifest.command << ": " << manifest.files.size() << " files in " << config.out_dir << '\n';
        return manifest.passed ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "swingctl: " << e.what() << '\n';
        return 2;
    }
}
