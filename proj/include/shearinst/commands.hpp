#pragma once

#include <string>
#include <vector>

#include "shearinst/config.hpp"
#include "shearinst/error.hpp"

namespace shearinst {

inline constexpr const char* kVersion = "0.1.0";

/// 0 success, 1 usage/config/IO, 2 mathematical precondition, 3 invariant violation.
enum class ExitCode : int { Ok = 0, Usage = 1, Precondition = 2, Invariant = 3 };

struct CommandResult {
  ExitCode exit = ExitCode::Ok;
  /// Human-readable summary printed by the CLI.
  std::string text;
  /// Report JSON (also written next to the CSV when the command writes one).
  std::string report;
  std::vector<std::string> files;
};

/// %.17g, so CSV values round-trip exactly.
std::string format_number(double v);

/// Rows as already formatted cells; writes header plus rows with '\n' endings.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

struct ValidateRow {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// The invariant suite behind `validate`, in a fixed order.
std::vector<ValidateRow> validate_table(const RunConfig& config);

/// neutral | lambda | dispersion | sheet | glue | validate. Never throws;
/// errors are mapped onto the exit code and described in `text`.
CommandResult run_command(const std::string& name, const RunConfig& config);

/// Exit code for an error raised inside a command.
ExitCode exit_code_for(const Error& error);

}  // namespace shearinst
