#pragma once
// Run orchestration and file output for the command-line front end: a run
// configuration, the full-grid summary table in the fixed layout
// J,M,2M,x,y,mean,ci_low,ci_high, and CSV/JSON writers. Every number funnels
// through the shortest round-trip formatter, so identical configurations
// reproduce identical bytes regardless of thread count.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "svie/errors.hpp"
#include "svie/format.hpp"
#include "svie/monte_carlo.hpp"
#include "svie/problems.hpp"
#include "svie/solver.hpp"

namespace svie {

inline constexpr const char* library_version = "1.0.0";
inline constexpr int table_format_version = 1;

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numeric_error = 3;
inline constexpr int exit_io_error = 4;

enum class RunMode { stochastic, deterministic };

inline const char* mode_name(RunMode mode) {
  return mode == RunMode::deterministic ? "deterministic" : "stochastic";
}

// One front-end invocation. Empty `output` means standard output; empty
// `grid_out` means no surface file. `threads` is the ensemble worker count
// (0 = one per hardware thread); it never affects the emitted bytes.
struct RunConfig {
  std::string problem;
  int level = 0;
  int paths = 1;
  std::uint64_t seed = 0;
  double confidence = 0.95;
  RunMode mode = RunMode::stochastic;
  std::string output;
  std::string format = "csv";
  std::string grid_out;
  int threads = 1;
};

inline void validate_config(const RunConfig& config) {
  if (config.level < 0) {
    throw std::domain_error("run config: level must be >= 0, got " +
                            std::to_string(config.level));
  }
  if (config.paths < 1) {
    throw std::domain_error("run config: paths must be >= 1, got " +
                            std::to_string(config.paths));
  }
  if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
    throw std::domain_error(
        "run config: confidence must lie strictly in (0, 1), got " +
        std::to_string(config.confidence));
  }
  if (config.format != "csv" && config.format != "json") {
    throw std::domain_error("run config: format must be csv or json, got '" +
                            config.format + "'");
  }
  if (config.threads < 0) {
    throw std::domain_error("run config: threads must be >= 0, got " +
                            std::to_string(config.threads));
  }
}

// Solves the configured problem. Deterministic mode runs one solve against
// the flat driving path (zero increments, so the stochastic term vanishes);
// paths and seed are irrelevant there and the summary reports one exact
// sample with zero-width intervals.
inline McSummary run_summary(const RunConfig& config) {
  validate_config(config);
  const ProblemSpec problem = registry_lookup(config.problem);
  if (config.mode == RunMode::deterministic) {
    const PreparedProblem prep = prepare(problem, config.level);
    const BrownianPath flat = constant_path(prep.min_grid_count());
    const PathSolution sol = solve_prepared(prep, flat);
    McSummary summary;
    summary.mean = sol.g;
    summary.stddev = Grid(sol.g.rows, sol.g.cols);
    summary.ci_low = sol.g;
    summary.ci_high = sol.g;
    summary.level = config.level;
    summary.r_requested = 1;
    summary.r_effective = 1;
    summary.confidence = config.confidence;
    summary.z = confidence_z(config.confidence);
    summary.config.paths = 1;
    summary.config.seed = config.seed;
    summary.config.grid_count = flat.grid_count();
    return summary;
  }
  PathEnsembleConfig paths;
  paths.paths = config.paths;
  paths.seed = config.seed;
  int threads = config.threads;
  if (threads == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    threads = hw == 0 ? 1 : static_cast<int>(hw);
  }
  return run_ensemble(problem, config.level, paths, config.confidence,
                      threads);
}

// Every collocation point, ascending (m, n) with m outer.
inline std::vector<TableRow> full_table(const McSummary& summary) {
  const CollocationGrid grid = collocation_grid(summary.level);
  std::vector<std::pair<double, double>> points;
  points.reserve(static_cast<std::size_t>(grid.size()) * grid.size());
  for (int m = 0; m < grid.size(); ++m) {
    for (int n = 0; n < grid.size(); ++n) {
      points.emplace_back(grid.points[m], grid.points[n]);
    }
  }
  return summary_table(summary, points);
}

inline constexpr const char* table_header = "J,M,2M,x,y,mean,ci_low,ci_high";

inline void write_table_csv(std::ostream& out,
                            const std::vector<TableRow>& rows) {
  out << table_header << '\n';
  for (const TableRow& r : rows) {
    out << r.j << ',' << r.half << ',' << r.size << ','
        << detail::format_double(r.x) << ',' << detail::format_double(r.y)
        << ',' << detail::format_double(r.mean) << ','
        << detail::format_double(r.ci_low) << ','
        << detail::format_double(r.ci_high) << '\n';
  }
}

// Long-format surface file for plotting: one x,y,mean row per collocation
// point, same ordering as the summary table. Always CSV.
inline void write_grid_csv(std::ostream& out, const McSummary& summary) {
  const CollocationGrid grid = collocation_grid(summary.level);
  out << "x,y,mean\n";
  for (int m = 0; m < grid.size(); ++m) {
    for (int n = 0; n < grid.size(); ++n) {
      out << detail::format_double(grid.points[m]) << ','
          << detail::format_double(grid.points[n]) << ','
          << detail::format_double(summary.mean(m, n)) << '\n';
    }
  }
}

namespace detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

}  // namespace detail

// Same rows as the CSV plus a metadata object: configuration echo, format
// and library versions, effective path count, and per-path failures. The
// seed is emitted as a plain integer; consumers must keep 64-bit precision.
inline void write_table_json(std::ostream& out, const RunConfig& config,
                             const McSummary& summary,
                             const std::vector<TableRow>& rows) {
  out << "{\n  \"metadata\": {\n"
      << "    \"problem\": \"" << detail::json_escape(config.problem)
      << "\",\n"
      << "    \"mode\": \"" << mode_name(config.mode) << "\",\n"
      << "    \"level\": " << summary.level << ",\n"
      << "    \"paths\": " << config.paths << ",\n"
      << "    \"seed\": " << summary.config.seed << ",\n"
      << "    \"grid_count\": " << summary.config.grid_count << ",\n"
      << "    \"confidence\": " << detail::format_double(summary.confidence)
      << ",\n"
      << "    \"z\": " << detail::format_double(summary.z) << ",\n"
      << "    \"r_effective\": " << summary.r_effective << ",\n"
      << "    \"versions\": {\"library\": \"" << library_version
      << "\", \"table_format\": " << table_format_version << "},\n"
      << "    \"failures\": [";
  for (std::size_t k = 0; k < summary.failures.size(); ++k) {
    if (k > 0) out << ", ";
    out << "{\"path_index\": " << summary.failures[k].path_index
        << ", \"reason\": \"" << detail::json_escape(summary.failures[k].reason)
        << "\"}";
  }
  out << "]\n  },\n"
      << "  \"table\": {\n"
      << "    \"columns\": [\"J\", \"M\", \"2M\", \"x\", \"y\", \"mean\", "
         "\"ci_low\", \"ci_high\"],\n"
      << "    \"rows\": [\n";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const TableRow& r = rows[k];
    out << "      [" << r.j << ", " << r.half << ", " << r.size << ", "
        << detail::format_double(r.x) << ", " << detail::format_double(r.y)
        << ", " << detail::format_double(r.mean) << ", "
        << detail::format_double(r.ci_low) << ", "
        << detail::format_double(r.ci_high) << ']'
        << (k + 1 < rows.size() ? ",\n" : "\n");
  }
  out << "    ]\n  }\n}\n";
}

// Runs one configuration end to end and reports a process exit code instead
// of throwing: 0 ok, 2 bad configuration, 3 numerical failure (no usable
// path), 4 unwritable output. The summary table goes to `console` when no
// output path is set; notes and error diagnostics go to `diagnostics`.
inline int cli_run(const RunConfig& config, std::ostream& console,
                   std::ostream& diagnostics) {
  McSummary summary;
  try {
    summary = run_summary(config);
  } catch (const std::domain_error& e) {
    diagnostics << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const std::runtime_error& e) {
    diagnostics << "numerical failure: " << e.what() << '\n';
    return exit_numeric_error;
  }
  for (const PathFailure& f : summary.failures) {
    diagnostics << "note: dropped path " << f.path_index << ": " << f.reason
                << '\n';
  }
  const std::vector<TableRow> rows = full_table(summary);

  const auto emit = [&](const std::string& path, const auto& writer) -> int {
    if (path.empty()) {
      writer(console);
      return console.good() ? exit_ok : exit_io_error;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
      diagnostics << "io error: cannot open '" << path << "' for writing\n";
      return exit_io_error;
    }
    writer(file);
    file.flush();
    if (!file.good()) {
      diagnostics << "io error: write to '" << path << "' failed\n";
      return exit_io_error;
    }
    return exit_ok;
  };

  const int table_status = emit(config.output, [&](std::ostream& out) {
    if (config.format == "json") {
      write_table_json(out, config, summary, rows);
    } else {
      write_table_csv(out, rows);
    }
  });
  if (table_status != exit_ok) return table_status;
  if (!config.grid_out.empty()) {
    const int grid_status = emit(
        config.grid_out,
        [&](std::ostream& out) { write_grid_csv(out, summary); });
    if (grid_status != exit_ok) return grid_status;
  }
  return exit_ok;
}

}  // namespace svie
