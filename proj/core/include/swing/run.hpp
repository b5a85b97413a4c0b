#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "swing/config.hpp"
#include "swing/lab.hpp"

namespace swing {

enum class Command { price, oracle, sweep_m, sweep_n, mz_check, tails, continuity, nn_sweep };
std::string to_string(Command command);
Command command_from_string(const std::string& name);
std::vector<Command> all_commands();

inline constexpr const char* kLibraryVersion = "0.1.0";

struct ArtifactRecord {
    std::string name;
    std::uintmax_t bytes = 0;
    std::string digest;  ///< FNV-1a 64 of the file contents
};

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::string library_version = kLibraryVersion;
    int snapshot_version = 0;
    double wall_clock_seconds = 0.0;
    std::vector<ArtifactRecord> files;
    std::vector<Verdict> verdicts;
    bool passed = true;
};

/// Applies SWING_OUT_DIR and SWING_THREADS when set. No other environment
/// variable is consulted.
void apply_env_overrides(RunConfig& config);

/// Runs one command, writes its artifacts under config.out_dir and finishes
/// with manifest.json (written through a temporary file and a rename).
/// Module errors propagate with the command name prepended.
RunManifest run(const RunConfig& config, Command command);

}  // namespace swing
