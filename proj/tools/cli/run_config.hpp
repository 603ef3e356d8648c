#pragma once

#include <string>
#include <vector>

#include "fcvar/backtest/engine.hpp"

namespace fcvar::cli {

/// Everything a subcommand needs: data paths, engine knobs, output location.
/// Values come from (highest precedence first) command-line flags, the
/// --config file, then the protocol defaults baked into BacktestConfig.
struct RunConfig {
    std::string prices_path;
    std::string factors_dir;
    std::string universe_path;
    backtest::BacktestConfig bt;
    bool seed_set = false;
    bool diagnostics = false;
    std::string out_dir = "out";
    std::string log_level = "info";
    int threads = 0;
};

/// Parses the flat key-value config file (sections [data], [backtest],
/// [output]); appends one message per problem to `errors` instead of stopping
/// at the first.
void apply_config_file(const std::string& path, RunConfig& cfg, std::vector<std::string>& errors);

/// Post-merge validation for a subcommand; appends every problem found.
void validate(const RunConfig& cfg, const std::string& subcommand,
              std::vector<std::string>& errors);

/// Serializes the effective config back to the file format (round-trip aid).
std::string to_config_text(const RunConfig& cfg);

/// Writes content to path atomically (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

void log_info(const RunConfig& cfg, const std::string& msg);
void log_debug(const RunConfig& cfg, const std::string& msg);

}  // namespace fcvar::cli
