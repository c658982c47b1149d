#include <iostream>

#include <CLI11.hpp>

#include "nehari/errors.hpp"
#include "nehari_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace nehari::cli;
  CLI::App app{"Nehari-manifold solver for double-homogeneous functionals"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string grid;
  std::string problem;
  std::string out = ".";
  bool no_csv = false;
  bool no_json = false;
  bool no_svg = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--problem", problem, "Problem file")->required();
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_flag("--no-csv", no_csv, "Skip CSV output");
    sub->add_flag("--no-json", no_json, "Skip JSON output");
    sub->add_flag("--no-svg", no_svg, "Skip SVG output");
  };
  auto* thr = app.add_subcommand("thresholds", "lambda_1, mu_*, mu^*, lambda* and conditions");
  common(thr);
  thr->add_flag("--strict", cfg.strict, "Exit 2 when a threshold is a sentinel");

  auto* solve = app.add_subcommand("solve", "Minimize on one Nehari branch");
  common(solve);
  solve->add_option("--lambda", cfg.lambda, "Parameter value")->required();
  solve->add_option("--branch", cfg.branch, "plus or minus")->check(CLI::IsMember({"plus", "minus"}));
  solve->add_option("--mu", cfg.mu, "Restriction level for N^+");

  auto* sweep = app.add_subcommand("sweep", "Branch levels over a lambda grid");
  common(sweep);
  sweep->add_option("--lambda-grid", grid, "a:b:n (default: 20 points inside (mu_*, lambda*))");
  sweep->add_option("--lambda", cfg.lambda, "Single parameter value");
  sweep->add_flag("--strict", cfg.strict, "Exit 2 when a threshold is a sentinel");

  auto* mp = app.add_subcommand("mountain-pass", "Second critical point above lambda*");
  common(mp);
  mp->add_option("--lambda", cfg.lambda, "Parameter value above lambda*")->required();
  mp->add_option("--mu", cfg.mu, "Restriction level");

  auto* verify = app.add_subcommand("verify", "Invariant audits and oracle cross-checks");
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParse;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.problem = problem;
  cfg.out = out;
  cfg.emit_csv = !no_csv;
  cfg.emit_json = !no_json;
  cfg.emit_svg = !no_svg;
  if (!grid.empty()) {
    try {
      cfg.grid = parse_grid(grid);
    } catch (const nehari::ParseError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitParse;
    }
  }
  return run(cfg, std::cerr);
}
