#pragma once

#include <iosfwd>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eqalloc::cli {

enum class Subcommand { Simulate, SweepRho, SweepPareto, Learn, Project, Validate };

struct Invocation {
  Subcommand subcommand = Subcommand::Validate;
  std::string config_path;
  std::string output_dir;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed_override;
  // learn
  std::string history_path;
  std::optional<std::size_t> window;
  // project
  std::string input_path;
  // sweeps
  std::vector<double> rho_values;
  std::vector<double> sigma_values;
};

/// Executes a parsed invocation. Returns the process exit status; module
/// errors are reported on `err`.
int run(const Invocation& invocation, std::ostream& out, std::ostream& err);

/// Parses argv and runs. Exit status 0 on success.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Default output directory: $EQALLOC_OUTPUT_DIR, else "out".
std::string default_output_dir();

}  // namespace eqalloc::cli
