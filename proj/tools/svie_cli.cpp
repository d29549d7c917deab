// Command-line front end. One subcommand:
//   svie run --problem NAME [--level J] [--paths R] [--seed S]
//            [--confidence C] [--deterministic] [--output FILE]
//            [--format csv|json] [--grid-out FILE]
// Exit codes: 0 ok, 2 bad configuration or flags, 3 numerical failure,
// 4 unwritable output.
#include <iostream>

#include <CLI11.hpp>

#include "svie/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Haar-collocation solver for 2-D stochastic Volterra "
               "integral equations"};
  app.require_subcommand(1);

  svie::RunConfig config;
  bool deterministic = false;
  CLI::App* run = app.add_subcommand(
      "run", "Solve one registered problem and emit the summary table");
  run->add_option("--problem", config.problem,
                  "Registered problem name (unknown names list the registry)")
      ->required();
  run->add_option("--level", config.level,
                  "Resolution level J; the collocation grid is 2^(J+1) "
                  "points per axis");
  run->add_option("--paths", config.paths, "Number of Monte Carlo paths R");
  run->add_option("--seed", config.seed, "Base seed for the path ensemble");
  run->add_option("--confidence", config.confidence,
                  "Two-sided confidence level, strictly between 0 and 1");
  run->add_flag("--deterministic", deterministic,
                "One noise-free solve against the flat driving path; "
                "--paths and --seed are ignored");
  run->add_option("--output", config.output,
                  "Summary table file (default: standard output)");
  run->add_option("--format", config.format, "Summary format: csv or json");
  run->add_option("--grid-out", config.grid_out,
                  "Optional long-format x,y,mean surface file (always CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return svie::exit_config_error;
  }
  if (deterministic) config.mode = svie::RunMode::deterministic;
  return svie::cli_run(config, std::cout, std::cerr);
}
