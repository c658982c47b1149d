#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nehari/metric.hpp"

namespace nehari {

/// Objective with gradient. Returning nullopt marks x as infeasible, which
/// the line search treats as an infinite barrier.
using Objective = std::function<std::optional<double>(const Vector& x, Vector& grad)>;

/// Custom convergence test on (x, value, gradient); overrides tol_grad when set.
using StopTest = std::function<bool(const Vector& x, double value, const Vector& grad)>;

struct LbfgsOptions {
  int max_iter = 400;
  int memory = 8;
  double armijo_c = 1e-4;
  double step_init = 1.0;
  /// Largest metric length of the first trial step of an iteration.
  double max_step = 0.5;
  /// Stop when the dual gradient norm is at most tol_grad * max(1, |value|). A run
  /// stopped at the value roundoff floor counts as converged within 1e3 tol_grad.
  double tol_grad = 1e-9;
  int max_backtracks = 60;
  /// Value changes below 1e3 eps max(value_scale, |f|) are treated as roundoff.
  double value_scale = 1.0;
  /// Retract onto the unit metric sphere after each step (0-homogeneous objectives).
  bool sphere = false;
  StopTest stop_test;
};

struct LbfgsResult {
  Vector x;
  double value = 0.0;
  Vector grad;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string status;
  std::vector<double> history;
};

/// Limited-memory BFGS preconditioned by the metric (H0 = gamma_k K^{-1})
/// with Armijo backtracking. Values are nonincreasing across accepted steps.
/// Throws Infeasible if x0 itself is infeasible.
LbfgsResult lbfgs_minimize(const Objective& f, Vector x0, const Metric& metric,
                           const LbfgsOptions& opt);

/// Runs fn(0..count-1) on up to `workers` threads. Each index runs exactly once.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

struct MultistartResult {
  std::optional<LbfgsResult> best;
  int best_seed = -1;
  int feasible_seeds = 0;
  /// Final value per seed, nullopt for infeasible seeds.
  std::vector<std::optional<double>> values;
  std::vector<LbfgsResult> runs;
};

/// L-BFGS from every feasible seed; best value wins, ties go to the lower index.
MultistartResult multistart_minimize(const Objective& f, const std::vector<Vector>& seeds,
                                     const Metric& metric, const LbfgsOptions& opt, int workers);

/// Smooth random seeds K^{-1} xi normalized to unit metric length.
std::vector<Vector> random_seeds(const Metric& metric, int count, std::uint64_t rng_seed);

/// A homogeneous scalar function with gradient.
struct ScalarField {
  std::function<double(const Vector& x, Vector* grad)> eval;
  double degree = 1.0;
};

/// ||x||_K^r as a ScalarField.
ScalarField metric_power(const Metric& metric, double r);

enum class ConstraintKind { None, Equality, NonNegative };

/// Constraint on g(x) / ||x||_K^{deg g} / scale: "= 0" or ">= 0".
struct Constraint {
  ConstraintKind kind = ConstraintKind::None;
  ScalarField g;
  double scale = 1.0;
};

struct QuotientProblem {
  ScalarField numerator;
  ScalarField denominator;
  /// Minimize numerator / denominator^power; must be 0-homogeneous.
  double power = 1.0;
  /// Points where this returns false are infeasible (barrier). The denominator
  /// must be positive on the feasible set.
  std::function<bool(const Vector& x)> feasible;
  Constraint constraint;
};

struct QuotientOptions {
  LbfgsOptions lbfgs;
  int workers = 1;
  int max_outer = 40;
  /// Constraint violation accepted at the end of the augmented Lagrangian loop.
  double tol_constraint = 1e-10;
  double penalty_init = 10.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e12;
};

struct QuotientResult {
  bool feasible = false;
  double value = 0.0;
  /// Unit metric length.
  Vector x;
  double grad_norm = 0.0;
  double constraint_value = 0.0;
  double multiplier = 0.0;
  bool converged = false;
  int best_seed = -1;
  int feasible_seeds = 0;
  int iterations = 0;
  std::string status;
};

/// Multistart minimization of a 0-homogeneous quotient on the metric sphere,
/// with an optional equality or inequality constraint handled by an
/// augmented Lagrangian (Rockafellar form for inequalities).
QuotientResult minimize_quotient(const QuotientProblem& prob, const std::vector<Vector>& seeds,
                                 const Metric& metric, const QuotientOptions& opt);

}  // namespace nehari
