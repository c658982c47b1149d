#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nehari_cli/audit.hpp"
#include "nehari_cli/output.hpp"
#include "nehari_cli/problem_file.hpp"

namespace nehari::cli {

enum ExitCode : int { kExitOk = 0, kExitParse = 1, kExitInfeasible = 2, kExitAudit = 3 };

struct LambdaGrid {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
  std::vector<double> values() const;
};

/// "a:b:n"; throws ParseError.
LambdaGrid parse_grid(const std::string& spec);

struct RunConfig {
  std::filesystem::path problem;
  std::string command;
  std::optional<double> lambda;
  std::optional<LambdaGrid> grid;
  std::string branch = "minus";
  std::optional<double> mu;
  std::filesystem::path out = ".";
  int workers = 1;
  bool strict = false;
  std::uint64_t seed = 1;
  bool emit_csv = true;
  bool emit_json = true;
  bool emit_svg = true;
};

/// Throws ParseError on count < 1, start > stop, unknown branch or workers < 1.
void validate(const RunConfig& cfg);

/// Problem file with the run's seed and worker count applied.
ProblemFile load_problem(const RunConfig& cfg);

struct BranchSweepRecord {
  double lambda = 0.0;
  /// below_mu_star, window, at_lambda_star, above_lambda_star (or no_window).
  std::string region;
  /// Nonemptiness of N^+ / N^- predicted from mu_* and mu^*.
  bool n_plus_nonempty = false;
  bool n_minus_nonempty = false;
  std::optional<Extended> m_plus;
  std::optional<Extended> m_minus;
  std::optional<double> c_plus;
  std::optional<double> c_minus;
  std::optional<double> c_plus_direct;
  std::optional<double> c_minus_direct;
  std::optional<double> c_plus_residual;
  std::optional<double> c_minus_residual;
  std::string c_plus_status;
  std::string c_minus_status;
  /// Formula and direct levels agree on every converged branch.
  std::optional<bool> cross_check_ok;
  std::optional<double> restricted_phi;
  std::optional<bool> restricted_active;
  std::optional<double> d_level;
  std::optional<double> mountain_pass_residual;
  std::optional<bool> probe_ok;
  std::optional<double> probe_last_phi;
  std::optional<double> zero_energy_phi;
  std::vector<std::string> notes;
};

struct SweepResult {
  ThresholdReport thresholds;
  std::optional<double> restriction_level;
  std::vector<BranchSweepRecord> rows;
  /// Largest good lambda - lambda* among rows above lambda*.
  std::optional<double> epsilon;
  /// Rows in (mu_*, lambda*) have strictly decreasing m and c columns.
  bool window_monotone = true;
};

/// Rows are computed on up to `workers` threads and returned in grid order.
SweepResult run_sweep(const ProblemInstance& pi, const ProblemFile& pf, const std::vector<double>& lambdas,
                      int workers);

Json thresholds_json(const ProblemInstance& pi, const ThresholdReport& report);
std::string sweep_csv(const SweepResult& s);
Json sweep_json(const ProblemInstance& pi, const SweepResult& s);
std::string bifurcation_svg(const SweepResult& s);

/// Each command writes its files under cfg.out and a short summary to `log`.
int cmd_thresholds(const RunConfig& cfg, std::ostream& log);
int cmd_solve(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_mountain_pass(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);
/// Wraps the coarse problem in the functional that the coarse audits evaluate.
using CoarseFactory =
    std::function<std::unique_ptr<DoubleHomogeneousFunctional>(const ProblemInstance& coarse)>;
/// cmd_verify with the coarse problem evaluated through `factory` (test doubles).
int cmd_verify_with(const RunConfig& cfg, const CoarseFactory& factory, std::ostream& log);

/// Dispatches on cfg.command and maps exceptions to exit codes.
int run(const RunConfig& cfg, std::ostream& log);

}  // namespace nehari::cli
