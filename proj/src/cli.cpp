#include "cantor/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <variant>

#include "cantor/analysis.hpp"
#include "cantor/error.hpp"
#include "cantor/fd_solver.hpp"
#include "cantor/tm_solver.hpp"

namespace cantor::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<double> parse_real_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string item = trim(rest.substr(0, comma));
    double value = 0.0;
    const char* begin = item.data();
    if (!item.empty() && item.front() == '+') ++begin;
    const auto res = std::from_chars(begin, item.data() + item.size(), value);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw CliError(kExitConfigError, "--" + flag + ": malformed number '" + item + "'");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void validate(const RunConfig& c) {
  const auto fail = [](const std::string& msg) { throw CliError(kExitConfigError, msg); };
  try {
    c.cantor.validate();
  } catch (const ValidationError& e) {
    fail(e.what());
  }
  if (!(c.mu > 0.0) || !std::isfinite(c.mu)) fail("--mu must be positive and finite");
  for (double mu : c.mu_list) {
    if (!(mu > 0.0) || !std::isfinite(mu)) fail("--mu-list entries must be positive and finite");
  }
  if (!std::isfinite(c.lo) || !std::isfinite(c.hi) || !(c.lo < c.hi)) fail("need finite --lo < --hi");
  if (!(c.tolerance > 0.0)) fail("--tol must be positive");
  if (c.grid_points && *c.grid_points == 0) fail("--grid must be at least 1");
  if (c.resolution == 0) fail("--resolution must be positive");
  if (c.gap_threshold && !(*c.gap_threshold > 0.0)) fail("--gap-threshold must be positive");
  if (c.lowest_states == 0) fail("--lowest must be positive");
  for (double e : c.energies) {
    if (!std::isfinite(e)) fail("--eps entries must be finite");
  }
  if (c.command == Subcommand::plot && c.data_path.empty()) fail("plot needs --data");
}

}  // namespace

std::vector<std::string> config_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw CliError(kExitConfigError,
                     "config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty() || key == "config") {
      throw CliError(kExitConfigError, "config line " + std::to_string(line_no) + ": bad entry");
    }
    tokens.push_back("--" + key);
    tokens.push_back(value);
  }
  return tokens;
}

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig c;
  CLI::App app{"Bound states of a quantum particle in a Cantor-like potential well.",
               "cantor_spectra"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string config_path;
  std::string mu_list;
  std::string energies;
  std::string engine = "fd";
  std::string format = "csv";
  std::size_t grid = 0;
  double gap = 0.0;
  std::string potential_file;

  app.add_option("--config", config_path, "Flat key=value file; flags take precedence");
  app.add_option("--order", c.cantor.order, "Cantor construction order N")->capture_default_str();
  app.add_option("--well-value", c.cantor.well_value, "Potential in retained intervals")
      ->capture_default_str();
  app.add_option("--barrier-value", c.cantor.barrier_value, "Potential in removed intervals")
      ->capture_default_str();
  app.add_option("--removal-fraction", c.cantor.removal_fraction, "Removed central fraction")
      ->capture_default_str();
  app.add_option("--potential-file", potential_file, "Segment table to use instead of a Cantor build");
  app.add_option("--mu", c.mu, "Dimensionless measure mu")->capture_default_str();
  app.add_option("--mu-list", mu_list, "Comma-separated mu values for sweep");
  app.add_option("--lo", c.lo, "Energy window lower bound (exclusive)")->capture_default_str();
  app.add_option("--hi", c.hi, "Energy window upper bound (inclusive)")->capture_default_str();
  app.add_option("--tol", c.tolerance, "Bisection tolerance in eps")->capture_default_str();
  auto* grid_opt = app.add_option("--grid", grid, "Interior grid points (default: resolution rule)");
  app.add_option("--engine", engine, "Solver engine")->check(CLI::IsMember({"fd", "tm"}))->capture_default_str();
  app.add_option("--resolution", c.resolution, "Staircase intervals")->capture_default_str();
  auto* gap_opt = app.add_option("--gap-threshold", gap, "Cluster gap threshold (default: geometric rule)");
  app.add_option("--eps", energies, "Comma-separated energies for states");
  app.add_option("--lowest", c.lowest_states, "Lowest states per sweep record")->capture_default_str();
  app.add_option("--output,-o", c.output, "Output file (default: stdout)");
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json-lines"}))
      ->capture_default_str();
  app.add_option("--data", c.data_path, "Data file for plot");

  const std::vector<std::pair<const char*, Subcommand>> subcommands{
      {"potential", Subcommand::potential}, {"spectrum", Subcommand::spectrum},
      {"states", Subcommand::states},       {"staircase", Subcommand::staircase},
      {"clusters", Subcommand::clusters},   {"sweep", Subcommand::sweep},
      {"plot", Subcommand::plot}};
  const std::vector<std::pair<const char*, const char*>> descriptions{
      {"potential", "Emit the potential segment table"},
      {"spectrum", "Eigenvalues in the window with participation ratios"},
      {"states", "Probability densities of selected states"},
      {"staircase", "Integrated density of states"},
      {"clusters", "Gap-threshold clustering of the spectrum"},
      {"sweep", "One summary row per mu"},
      {"plot", "gnuplot script for a data file"}};
  for (const auto& [name, desc] : descriptions) app.add_subcommand(name, desc)->fallthrough();
  app.require_subcommand(1, 1);

  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
    if (!path.empty()) {
      std::string text;
      try {
        text = read_file(path);
      } catch (const std::exception& e) {
        throw CliError(kExitConfigError, e.what());
      }
      const auto more = config_tokens(text);
      tokens.insert(tokens.end(), more.begin(), more.end());
    }
  }
  tokens.insert(tokens.end(), args.begin(), args.end());
  std::reverse(tokens.begin(), tokens.end());

  try {
    app.parse(tokens);
  } catch (const CLI::CallForHelp&) {
    throw CliError(kExitOk, app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw CliError(kExitOk, app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    throw CliError(kExitConfigError, std::string(e.what()) + "\n\n" + app.help());
  }

  for (const auto& [name, cmd] : subcommands) {
    if (app.got_subcommand(name)) c.command = cmd;
  }
  if (!mu_list.empty()) c.mu_list = parse_real_list(mu_list, "mu-list");
  if (!energies.empty()) c.energies = parse_real_list(energies, "eps");
  if (grid_opt->count() > 0) c.grid_points = grid;
  if (gap_opt->count() > 0) c.gap_threshold = gap;
  if (!potential_file.empty()) c.potential_file = potential_file;
  c.engine = engine == "tm" ? Engine::tm : Engine::fd;
  c.format = format == "json-lines" ? OutputFormat::json_lines : OutputFormat::csv;
  try {
    validate(c);
  } catch (const CliError& e) {
    throw CliError(kExitConfigError, std::string(e.what()) + "\n\n" + app.help());
  }
  return c;
}

namespace {

using Cell = std::variant<double, std::size_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

void write_table(const Table& t, OutputFormat format, std::ostream& out) {
  if (format == OutputFormat::csv) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        std::visit(
            [&out](const auto& v) {
              using T = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<T, double>) {
                out << format_real(v);
              } else {
                out << v;
              }
            },
            row[i]);
      }
      out << '\n';
    }
    return;
  }
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              obj[t.columns[i]] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json();
            } else {
              obj[t.columns[i]] = v;
            }
          },
          row[i]);
    }
    out << obj.dump() << '\n';
  }
}

PiecewisePotential load_potential(const RunConfig& c) {
  if (!c.potential_file) return build_cantor_potential(c.cantor);
  std::string text;
  try {
    text = read_file(*c.potential_file);
  } catch (const std::exception& e) {
    throw CliError(kExitConfigError, e.what());
  }
  return parse_potential(text);
}

Grid grid_for(const RunConfig& c, const PiecewisePotential& p, const ModelParams& params) {
  return c.grid_points ? Grid(*c.grid_points) : default_grid(p, params);
}

// Eigenvalues in the window plus one state per eigenvalue from the chosen engine.
struct SolvedWindow {
  Spectrum spectrum;
  std::vector<Wavefunction> states;
};

SolvedWindow solve_window(const RunConfig& c, const PiecewisePotential& p) {
  const ModelParams params(c.mu);
  const Grid grid = grid_for(c, p, params);
  SolvedWindow out;
  if (c.engine == Engine::tm) {
    out.spectrum = tm_eigenvalues(p, params, c.lo, c.hi, c.tolerance);
    for (double e : out.spectrum.eigenvalues) out.states.push_back(tm_eigenfunction(p, params, e, grid.size()));
  } else {
    const auto h = assemble_hamiltonian(p, params, grid);
    out.spectrum = eigenvalues_in_range(h, c.lo, c.hi, c.tolerance);
    out.states = eigenvectors(h, out.spectrum);
  }
  return out;
}

Spectrum window_spectrum(const RunConfig& c, const PiecewisePotential& p) {
  const ModelParams params(c.mu);
  if (c.engine == Engine::tm) return tm_eigenvalues(p, params, c.lo, c.hi, c.tolerance);
  const auto h = assemble_hamiltonian(p, params, grid_for(c, p, params));
  return eigenvalues_in_range(h, c.lo, c.hi, c.tolerance);
}

void emit_potential(const RunConfig& c, const PiecewisePotential& p, std::ostream& out) {
  if (c.format == OutputFormat::csv) {
    out << serialize_potential(p);
    return;
  }
  Table t{{"start", "end", "value"}, {}};
  for (std::size_t j = 0; j < p.segment_count(); ++j) {
    t.rows.push_back({p.segment_start(j), p.segment_end(j), p.values()[j]});
  }
  write_table(t, c.format, out);
}

Table spectrum_table(const RunConfig& c, const PiecewisePotential& p) {
  const auto solved = solve_window(c, p);
  Table t{{"index", "epsilon", "participation_ratio"}, {}};
  for (std::size_t k = 0; k < solved.spectrum.size(); ++k) {
    t.rows.push_back({k, solved.spectrum[k], participation_ratio(solved.states[k])});
  }
  return t;
}

Table states_table(const RunConfig& c, const PiecewisePotential& p) {
  const auto solved = solve_window(c, p);
  if (solved.spectrum.empty()) throw DomainError("no eigenvalues in the energy window");
  std::vector<std::size_t> picks;
  if (c.energies.empty()) {
    for (std::size_t k = 0; k < solved.spectrum.size(); ++k) picks.push_back(k);
  } else {
    for (double e : c.energies) {
      const auto& ev = solved.spectrum.eigenvalues;
      std::size_t best = 0;
      for (std::size_t k = 1; k < ev.size(); ++k) {
        if (std::abs(ev[k] - e) < std::abs(ev[best] - e)) best = k;
      }
      picks.push_back(best);
    }
  }
  Table t{{"x", "v"}, {}};
  for (std::size_t k : picks) t.columns.push_back("eps=" + format_real(solved.spectrum[k]));
  const auto& first = solved.states[picks.front()];
  std::vector<std::vector<double>> densities;
  for (std::size_t k : picks) densities.push_back(probability_density(solved.states[k]));
  for (std::size_t i = 0; i < first.size(); ++i) {
    const double x = first.node(i);
    std::vector<Cell> row{x, sample_potential(p, x)};
    for (const auto& d : densities) row.emplace_back(d[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table staircase_table(const RunConfig& c, const PiecewisePotential& p) {
  const ModelParams params(c.mu);
  StaircaseData data;
  if (c.engine == Engine::tm) {
    data = staircase(tm_counter(p, params), c.lo, c.hi, c.resolution);
  } else {
    const auto h = assemble_hamiltonian(p, params, grid_for(c, p, params));
    data = staircase(fd_counter(h), c.lo, c.hi, c.resolution);
  }
  Table t{{"epsilon", "count"}, {}};
  for (std::size_t i = 0; i < data.energies.size(); ++i) t.rows.push_back({data.energies[i], data.counts[i]});
  return t;
}

Table clusters_table(const RunConfig& c, const PiecewisePotential& p) {
  const Spectrum s = window_spectrum(c, p);
  double threshold = c.tolerance;
  if (c.gap_threshold) {
    threshold = *c.gap_threshold;
  } else if (std::adjacent_find(s.eigenvalues.begin(), s.eigenvalues.end(), std::not_equal_to<>()) !=
             s.eigenvalues.end()) {
    threshold = geometric_gap_threshold(s);
  }
  const auto report = detect_clusters(s, threshold);
  Table t{{"cluster", "index", "epsilon"}, {}};
  for (std::size_t id = 0; id < report.clusters.size(); ++id) {
    for (std::size_t k = report.clusters[id].first; k <= report.clusters[id].last; ++k) {
      t.rows.push_back({id, k, s[k]});
    }
  }
  return t;
}

Table sweep_table(const RunConfig& c, const PiecewisePotential& p) {
  const std::vector<double> mus = c.mu_list.empty() ? std::vector<double>{c.mu} : c.mu_list;
  SweepOptions options;
  options.lo = c.lo;
  options.hi = c.hi;
  options.tolerance = c.tolerance;
  options.lowest_states = c.lowest_states;
  options.grid_points = c.grid_points;
  const auto records = mu_sweep(p, mus, options);
  Table t{{"mu", "grid_points", "count_below_zero", "count_in_window", "min_eps", "max_eps",
           "mean_pr_lowest"},
          {}};
  for (const auto& r : records) {
    t.rows.push_back({r.mu, r.grid_points, r.count_below_zero, r.spectrum.size(), r.min_eps(),
                      r.max_eps(), r.mean_lowest_participation()});
  }
  return t;
}

void produce(const RunConfig& c, std::ostream& out) {
  if (c.command == Subcommand::plot) {
    out << emit_plot_script(c, c.data_path);
    return;
  }
  const PiecewisePotential p = load_potential(c);
  switch (c.command) {
    case Subcommand::potential:
      emit_potential(c, p, out);
      return;
    case Subcommand::spectrum:
      write_table(spectrum_table(c, p), c.format, out);
      return;
    case Subcommand::states:
      write_table(states_table(c, p), c.format, out);
      return;
    case Subcommand::staircase:
      write_table(staircase_table(c, p), c.format, out);
      return;
    case Subcommand::clusters:
      write_table(clusters_table(c, p), c.format, out);
      return;
    case Subcommand::sweep:
      write_table(sweep_table(c, p), c.format, out);
      return;
    case Subcommand::plot:
      return;
  }
}

std::string gnuplot_quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) {
    if (ch == '\'') out += '\'';
    out += ch;
  }
  return out + "'";
}

}  // namespace

std::string emit_plot_script(const RunConfig& /*config*/, const std::filesystem::path& data_path) {
  const std::string text = read_file(data_path.string());
  const std::string file = gnuplot_quote(data_path.string());
  std::istringstream in(text);
  std::string header;
  while (std::getline(in, header) && trim(header).empty()) {
  }
  header = trim(header);
  std::size_t data_rows = 0;
  for (std::string line; std::getline(in, line);) {
    if (!trim(line).empty()) ++data_rows;
  }

  std::ostringstream s;
  s << "# gnuplot script for " << data_path.string() << "\n";
  if (header.empty()) {
    s << "# warning: empty data file, the plot range is empty\n";
    s << "set title 'no data'\nplot 1/0 notitle\n";
    return s.str();
  }
  const bool csv = header.find(',') != std::string::npos;
  if (csv) s << "set datafile separator ','\n";
  if (csv && data_rows == 0) s << "# warning: header only, the plot range is empty\n";
  s << "set terminal pngcairo size 900,600\n";
  s << "set output " << gnuplot_quote(data_path.stem().string() + ".png") << "\n";
  s << "set key outside right\n";

  if (header.rfind("epsilon,count", 0) == 0) {
    s << "set xlabel 'epsilon'\nset ylabel 'N(epsilon)'\n";
    s << "plot " << file << " using 1:2 every ::1 with steps lw 2 title 'integrated density of states'\n";
  } else if (header.rfind("x,v", 0) == 0) {
    const auto columns = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
    s << "set xlabel 'x'\nset ylabel '|psi|^2'\nset y2label 'v(x)'\nset y2range [-1.2:1.2]\nset y2tics\n";
    s << "plot " << file << " using 1:2 every ::1 axes x1y2 with steps lc rgb 'gray' title 'v(x)'";
    for (std::size_t col = 3; col <= columns; ++col) {
      s << ", \\\n     " << file << " using 1:" << col << " every ::1 with lines title columnheader(" << col
        << ")";
    }
    s << "\n";
  } else if (header.rfind("index,epsilon", 0) == 0) {
    s << "set xlabel 'epsilon'\nset ylabel 'participation ratio'\n";
    s << "plot " << file << " using 2:3 every ::1 with impulses title 'PR'\n";
  } else if (header.rfind("cluster,index,epsilon", 0) == 0) {
    s << "set xlabel 'index'\nset ylabel 'epsilon'\n";
    s << "plot " << file << " using 2:3:1 every ::1 with points pt 7 palette title 'clusters'\n";
  } else if (header.rfind("mu,", 0) == 0) {
    s << "set xlabel 'mu'\nset ylabel 'states below 0'\nset y2label 'mean PR (lowest)'\nset y2tics\n";
    s << "plot " << file << " using 1:3 every ::1 with linespoints title 'count below 0', \\\n     " << file
      << " using 1:7 every ::1 axes x1y2 with linespoints title 'mean PR'\n";
  } else if (!csv) {
    // Segment table: "start end value" records; draw v as filled steps.
    s << "set xlabel 'x'\nset ylabel 'v(x)'\nset yrange [-1.2:1.2]\n";
    s << "plot " << file << " using 1:3 with fillsteps fs solid 0.3 title 'v(x)', \\\n     " << file
      << " using 1:3 with steps lw 2 notitle\n";
  } else {
    s << "# warning: unrecognized header '" << header << "'\n";
    s << "plot " << file << " using 1:2 every ::1 with lines notitle\n";
  }
  return s.str();
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    std::ostringstream buffer;
    produce(config, buffer);
    if (config.output.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(config.output, std::ios::binary);
      if (!file) throw CliError(kExitConfigError, "cannot write " + config.output);
      file << buffer.str();
    }
    return kExitOk;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const ParseError& e) {
    err << "error: potential file " << e.what() << "\n";
    return kExitConfigError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  RunConfig config;
  try {
    config = parse_args(args);
  } catch (const CliError& e) {
    (e.exit_code() == kExitOk ? out : err) << e.what() << "\n";
    return e.exit_code();
  }
  return run(config, out, err);
}

}  // namespace cantor::cli
