#pragma once

// Batch commands behind the CLI and the C API. Each command turns a RunConfig
// into a JSON report, optional CSV tables and an exit code:
//   0 pass, 1 condition fails, 2 config error, 3 criteria disagree, 4 numerical failure.

#include "sublab/config.hpp"

#include "json.hpp"

#include <exception>
#include <string>
#include <vector>

namespace sublab::commands {

enum ExitCode : int { kPass = 0, kFail = 1, kConfigError = 2, kDisagree = 3, kNumerical = 4 };

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  [[nodiscard]] std::string text() const;
};

struct CommandResult {
  std::string command;
  int exit_code = kPass;
  nlohmann::json report;
  std::vector<CsvTable> tables;
  std::string summary;  // one line for the terminal
};

[[nodiscard]] const std::vector<std::string>& command_names();

/// Throws sublab::Error subclasses for config and numerical failures.
[[nodiscard]] CommandResult run_command(const std::string& name, const config::RunConfig& cfg);

/// Maps an exception escaping run_command to an exit code.
[[nodiscard]] int exit_code_for(const std::exception& e) noexcept;

/// Stable serialisation used for every report file.
[[nodiscard]] std::string dump(const nlohmann::json& j);

}  // namespace sublab::commands
