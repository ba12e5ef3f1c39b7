#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "aoii/config.hpp"

namespace aoii::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kConfigError = 2, kInfeasible = 3, kNumericError = 4 };

struct Options {
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  bool emit_plot_script = false;
};

/// Loads the config, applies command-line overrides and runs the command.
/// Errors propagate as aoii::Error.
void run(const Options& opts);

int exit_code_for(ErrorKind kind);

}  // namespace aoii::cli
