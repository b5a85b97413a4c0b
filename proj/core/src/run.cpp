#include "swing/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "swing/continuation.hpp"
#include "swing/error.hpp"
#include "swing/grid.hpp"
#include "swing/lsmc.hpp"
#include "swing/neural.hpp"
#include "swing/oracle.hpp"

namespace swing {

namespace {

constexpr const char* kCommandNames[] = {"price", "oracle", "sweep-m", "sweep-n",
                                         "mz-check", "tails", "continuity", "nn-sweep"};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string digest(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : bytes) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& bytes) {
        std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
        out << bytes;
        out.close();
        if (!out) throw Error("failed to write " + (dir_ / name).string());
        records_.push_back({name, bytes.size(), digest(bytes)});
    }

    [[nodiscard]] const std::vector<ArtifactRecord>& records() const { return records_; }
    [[nodiscard]] const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::vector<ArtifactRecord> records_;
};

void write_report(ArtifactWriter& writer, const ConvergenceReport& report, RunManifest& manifest) {
    std::ostringstream data;
    write_report_data(data, report);
    writer.write("data.csv", data.str());
    std::ostringstream summary;
    write_report_summary(summary, report);
    writer.write("summary.txt", summary.str());
    manifest.verdicts = report.verdicts;
}

Verdict within(const std::string& name, double value, double target, double tolerance) {
    const double gap = std::abs(value - target);
    return {name, gap <= tolerance, false,
            "|" + fmt(value) + " - " + fmt(target) + "| = " + fmt(gap) + " <= " + fmt(tolerance)};
}

void run_price(const RunConfig& config, ArtifactWriter& writer, RunManifest& manifest) {
    const MarketModel model = config.model.build();
    const VolumeLadder ladder = build_ladder(config.contract, config.discrete);
    const QGrid grid = make_grid(config.contract, ladder, config.grid_density);
    const PathSet paths =
        simulate_paths(model, config.contract.n_dates, config.n_paths, config.seed, config.threads);

    ContinuationModel continuation;
    ValueSurface date0;
    PriceEstimate backward;
    std::string engine;
    if (config.engine == EngineMode::nn) {
        TrainConfig training = config.training;
        training.seed = config.training_seed;
        NeuralSweepResult res =
            nn_backward_sweep(config.contract, ladder, paths, config.network, training, grid, config.threads);
        continuation = std::move(res.model);
        date0 = std::move(res.date0);
        backward = res.in_sample;
        engine = "nn";
    } else {
        BackwardOptions options;
        options.threads = config.threads;
        BackwardResult res = backward_sweep(config.contract, ladder, paths, config.basis, grid, options);
        continuation = std::move(res.model);
        date0 = std::move(res.date0);
        backward = res.in_sample;
        engine = "lsmc";
    }
    const PriceEstimate forward = forward_valuation(config.contract, ladder, model, continuation,
                                                    config.forward_paths, config.forward_seed, config.threads);

    std::ostringstream snapshot;
    write_snapshot(snapshot, continuation);
    writer.write("continuation.json", snapshot.str());

    std::ostringstream prices;
    write_price_header(prices);
    write_price_row(prices, engine, backward);
    write_price_row(prices, engine, forward);
    writer.write("prices.csv", prices.str());

    std::ostringstream surface;
    surface << "Q,mean,std_dev\n";
    for (std::size_t l = 0; l < date0.levels.size(); ++l) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", date0.levels[l], date0.mean(l), date0.std_dev(l));
        surface << buf;
    }
    writer.write("value_surface.csv", surface.str());

    std::ostringstream summary;
    summary << "price (" << engine << ")\n";
    summary << "  backward: " << fmt(backward.value) << " (se " << fmt(backward.std_error) << ", N = "
            << backward.n_paths << ")\n";
    summary << "  forward:  " << fmt(forward.value) << " (se " << fmt(forward.std_error) << ", N = "
            << forward.n_paths << ")\n";
    for (const auto& w : backward.warnings) summary << "warning: " << w << '\n';
    for (const auto& w : forward.warnings) summary << "warning: " << w << '\n';
    if (const auto* finite = std::get_if<FiniteStateModel>(&model)) {
        const ExactValueTable exact = solve_exact(config.contract, ladder, *finite, grid);
        summary << "  exact:    " << fmt(exact.price) << '\n';
        const double floor = config.engine == EngineMode::nn ? 0.01 * std::abs(exact.price) : 0.0;
        manifest.verdicts.push_back(within("backward_vs_exact", backward.value, exact.price,
                                           std::max(3.0 * backward.std_error, floor)));
        manifest.verdicts.push_back(within("forward_vs_exact", forward.value, exact.price,
                                           std::max(3.0 * forward.std_error, floor)));
    }
    for (const auto& v : manifest.verdicts) {
        summary << (v.passed ? "PASS " : "FAIL ") << v.criterion << ": " << v.detail << '\n';
    }
    writer.write("summary.txt", summary.str());
}

void run_oracle(const RunConfig& config, ArtifactWriter& writer) {
    const FiniteStateModel model = config.model.finite_model();
    const VolumeLadder ladder = build_ladder(config.contract, config.discrete);
    const QGrid grid = make_grid(config.contract, ladder, config.grid_density);
    const ExactValueTable table = solve_exact(config.contract, ladder, model, grid);
    std::ostringstream csv;
    write_table_csv(csv, table);
    writer.write("exact_table.csv", csv.str());
    std::ostringstream summary;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", table.price);
    summary << "exact price: " << buf << '\n';
    summary << "states: " << table.n_states << ", dates: " << config.contract.n_dates
            << ", grid: " << (grid.discrete ? "discrete" : "continuous, density " + std::to_string(grid.density))
            << '\n';
    writer.write("summary.txt", summary.str());
}

ConvergenceReport run_experiment(const RunConfig& config, Command command) {
    const ExperimentSpec& ex = config.experiment;
    switch (command) {
        case Command::sweep_m:
            return sweep_basis_size(finite_setup(config), basis_kind_from_string(ex.sweep_basis), ex.basis_sizes);
        case Command::sweep_n: {
            McSweepOptions o;
            o.basis = config.basis;
            o.sample_sizes = ex.mc_sizes;
            o.replications = ex.mc_replications;
            o.norm_order = ex.norm_order;
            o.slope_lo = ex.slope_lo;
            o.slope_hi = ex.slope_hi;
            o.seed = config.seed;
            o.threads = config.threads;
            return sweep_mc_size(finite_setup(config), o);
        }
        case Command::mz_check: {
            MzOptions o;
            o.law = sample_law_from_string(ex.mz_law);
            o.parameter = ex.mz_parameter;
            o.order = ex.mz_order;
            o.sample_sizes = ex.mz_sizes;
            o.replications = ex.mz_replications;
            o.expected_slope = ex.mz_expected_slope;
            o.slope_tolerance = ex.mz_slope_tolerance;
            o.seed = config.seed;
            o.threads = config.threads;
            return mz_rate_check(o);
        }
        case Command::tails: {
            TailOptions o;
            o.basis = config.basis;
            o.sample_sizes = ex.tail_sizes;
            o.replications = ex.tail_replications;
            o.norm_order = ex.norm_order;
            o.delta = ex.tail_delta;
            o.target_frequency = ex.tail_target_frequency;
            o.slope_slack = ex.tail_slope_slack;
            o.seed = config.seed;
            o.threads = config.threads;
            return deviation_tail_check(finite_setup(config), o);
        }
        case Command::continuity:
            return continuity_scan(finite_setup(config), ex.densities);
        case Command::nn_sweep: {
            NnSweepOptions o;
            o.widths = ex.nn_widths;
            o.depth = config.network.depth;
            o.activation = config.network.activation;
            o.training = config.training;
            o.training.seed = config.training_seed;
            o.n_paths = config.n_paths;
            o.loss_tolerance = ex.nn_loss_tolerance;
            o.seed = config.seed;
            o.threads = config.threads;
            return nn_width_sweep(finite_setup(config), o);
        }
        default: break;
    }
    throw ConfigError("not an experiment: " + to_string(command));
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& manifest, const RunConfig& config) {
    nlohmann::ordered_json j;
    j["command"] = manifest.command;
    j["config_hash"] = manifest.config_hash;
    j["versions"] = {{"library", manifest.library_version}, {"snapshot_format", manifest.snapshot_version}};
    j["wall_clock_seconds"] = manifest.wall_clock_seconds;
    j["threads"] = config.threads;
    j["seeds"] = {{"simulation", config.seed}, {"training", config.training_seed}, {"forward", config.forward_seed}};
    auto files = nlohmann::ordered_json::array();
    for (const auto& f : manifest.files) files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", f.digest}});
    j["files"] = files;
    auto verdicts = nlohmann::ordered_json::array();
    for (const auto& v : manifest.verdicts) {
        verdicts.push_back(
            {{"criterion", v.criterion}, {"passed", v.passed}, {"inconclusive", v.inconclusive}, {"detail", v.detail}});
    }
    j["verdicts"] = verdicts;
    j["passed"] = manifest.passed;
    j["config"] = serialize_config(config);

    const auto target = dir / "manifest.json";
    const auto temp = dir / "manifest.json.tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        out << j.dump(2) << '\n';
        if (!out) throw Error("failed to write " + temp.string());
    }
    std::filesystem::rename(temp, target);
}

template <class E>
[[noreturn]] void rethrow_with(const std::string& context, const E& e) {
    throw E(context + ": " + e.what());
}

}  // namespace

std::string to_string(Command command) { return kCommandNames[static_cast<int>(command)]; }

Command command_from_string(const std::string& name) {
    for (Command c : all_commands()) {
        if (to_string(c) == name) return c;
    }
    throw ConfigError("unknown command '" + name + "'");
}

std::vector<Command> all_commands() {
    return {Command::price, Command::oracle, Command::sweep_m, Command::sweep_n,
            Command::mz_check, Command::tails, Command::continuity, Command::nn_sweep};
}

void apply_env_overrides(RunConfig& config) {
    if (const char* dir = std::getenv("SWING_OUT_DIR"); dir && *dir) config.out_dir = dir;
    if (const char* threads = std::getenv("SWING_THREADS"); threads && *threads) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(threads, &end, 10);
        if (*end != '\0' || v == 0) throw ConfigError(std::string("SWING_THREADS: expected a positive integer, got '") +
                                                      threads + "'");
        config.threads = static_cast<unsigned>(v);
    }
}

RunManifest run(const RunConfig& config, Command command) {
    const auto start = std::chrono::steady_clock::now();
    config.validate();
    RunManifest manifest;
    manifest.command = to_string(command);
    manifest.config_hash = config_hash(config);
    manifest.snapshot_version = kSnapshotVersion;
    ArtifactWriter writer(config.out_dir);
    const std::string context = manifest.command;
    try {
        switch (command) {
            case Command::price: run_price(config, writer, manifest); break;
            case Command::oracle: run_oracle(config, writer); break;
            default: write_report(writer, run_experiment(config, command), manifest); break;
        }
    } catch (const ConfigError& e) {
        rethrow_with(context, e);
    } catch (const FeasibilityError& e) {
        rethrow_with(context, e);
    } catch (const DomainError& e) {
        rethrow_with(context, e);
    } catch (const NumericalError& e) {
        rethrow_with(context, e);
    }
    manifest.files = writer.records();
    for (const auto& v : manifest.verdicts) manifest.passed = manifest.passed && v.passed;
    manifest.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(writer.dir(), manifest, config);
    return manifest;
}

}  // namespace swing
