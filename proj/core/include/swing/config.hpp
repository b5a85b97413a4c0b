#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "swing/basis.hpp"
#include "swing/contract.hpp"
#include "swing/lab.hpp"
#include "swing/market.hpp"
#include "swing/mlp.hpp"

namespace swing {

enum class EngineMode { lsmc, nn, oracle };
std::string to_string(EngineMode mode);
EngineMode engine_mode_from_string(const std::string& name);

/// Model parameters as written in a config file.
struct ModelSpec {
    enum class Kind { gaussian, finite };
    Kind kind = Kind::finite;

    // gaussian
    double mean_reversion = 0.0;
    double vol = 0.2;
    double x0 = 0.0;
    std::vector<double> forward_curve;
    double state_bound = 6.0;

    // finite
    std::vector<double> states;
    std::vector<std::vector<double>> transition;  ///< one homogeneous J x J matrix
    std::vector<double> initial;
    std::vector<std::vector<double>> spot;  ///< one row, or one row per date

    [[nodiscard]] MarketModel build() const;
    /// Throws ConfigError unless kind == finite.
    [[nodiscard]] FiniteStateModel finite_model() const;

    friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Settings of the convergence experiments; only the selected one is used.
struct ExperimentSpec {
    std::vector<std::size_t> basis_sizes{1, 2, 3, 4, 5};
    std::string sweep_basis = "normalized_hermite";

    std::vector<std::size_t> mc_sizes{1000, 4000, 16000, 64000};
    std::size_t mc_replications = 200;
    double norm_order = 2.0;
    double slope_lo = -0.65;
    double slope_hi = -0.35;

    std::string mz_law = "normal";
    double mz_parameter = 1.0;
    double mz_order = 2.0;
    std::vector<std::size_t> mz_sizes{100, 400, 1600, 6400};
    std::size_t mz_replications = 2000;
    double mz_expected_slope = -0.5;
    double mz_slope_tolerance = 0.03;

    std::vector<std::size_t> tail_sizes{1000, 4000, 16000};
    std::size_t tail_replications = 500;
    double tail_delta = 0.0;
    double tail_target_frequency = 0.8;
    double tail_slope_slack = 0.35;

    std::vector<int> densities{51, 101, 201};

    std::vector<std::size_t> nn_widths{2, 4, 8, 16, 32};
    double nn_loss_tolerance = 1e-4;

    friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

struct RunConfig {
    SwingContract contract;
    bool discrete = true;
    ModelSpec model;
    EngineMode engine = EngineMode::lsmc;
    BasisSpec basis;
    MlpSpec network;
    TrainConfig training;
    std::size_t n_paths = 10000;
    std::size_t forward_paths = 10000;
    int grid_density = 51;
    std::uint64_t seed = 1;           ///< simulation
    std::uint64_t training_seed = 0;  ///< network initialization and shuffling
    std::uint64_t forward_seed = 0;   ///< out-of-sample paths
    ExperimentSpec experiment;
    std::string out_dir = "out";
    unsigned threads = 1;

    /// Throws ConfigError naming the offending field(s).
    void validate() const;
    /// Sets the simulation seed and re-derives the training and forward seeds.
    void reseed(std::uint64_t simulation_seed);

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses `key = value` lines; `#` starts a comment, lists are comma
/// separated and matrix rows are separated by `;`. Missing keys keep their
/// defaults; unset training and forward seeds derive from `seed`.
/// Syntax errors carry the line number.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Every key, at full precision; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// 16 hex digits of FNV-1a over serialize_config with out_dir and threads
/// left out, so the hash identifies the computation only.
std::string config_hash(const RunConfig& config);

FiniteSetup finite_setup(const RunConfig& config);

}  // namespace swing
