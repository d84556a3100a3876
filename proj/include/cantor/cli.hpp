#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cantor/potential.hpp"
#include "cantor/spectrum.hpp"

namespace cantor::cli {

enum class Subcommand { potential, spectrum, states, staircase, clusters, sweep, plot };
enum class OutputFormat { csv, json_lines };

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 1;
inline constexpr int kExitConfigError = 2;

struct RunConfig {
  Subcommand command = Subcommand::spectrum;
  CantorSpec cantor;
  /// Segment-table file used instead of the Cantor construction.
  std::optional<std::string> potential_file;
  double mu = 300.0;
  std::vector<double> mu_list;
  double lo = -1.0;
  double hi = 0.0;
  double tolerance = 1e-10;
  std::optional<std::size_t> grid_points;
  Engine engine = Engine::fd;
  std::size_t resolution = 1000;
  std::optional<double> gap_threshold;
  std::vector<double> energies;
  std::size_t lowest_states = 10;
  std::string output;
  OutputFormat format = OutputFormat::csv;
  std::string data_path;
};

/// Usage errors and --help. `exit_code` is 0 for help, 2 otherwise;
/// what() holds the text to print.
class CliError : public std::runtime_error {
 public:
  CliError(int exit_code, const std::string& message)
      : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

/// args excludes the program name. Precedence: flags, then --config
/// key=value lines, then defaults. Throws CliError.
RunConfig parse_args(const std::vector<std::string>& args);

/// Flat "key = value" lines ('#' comments) turned into "--key value"
/// tokens. Throws CliError naming the bad line.
std::vector<std::string> config_tokens(const std::string& text);

/// Executes the subcommand, writing to config.output or `out`; diagnostics
/// go to `err`. Returns kExitOk, kExitSolverFailure (non-convergence or an
/// unreadable plot data file) or kExitConfigError.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// gnuplot script for a data file written by one of the subcommands; the
/// plot style follows the file's header. Throws std::runtime_error when the
/// file cannot be read.
std::string emit_plot_script(const RunConfig& config, const std::filesystem::path& data_path);

/// argv entry point used by the tool.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cantor::cli
