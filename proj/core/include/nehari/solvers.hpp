#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nehari/functional.hpp"
#include "nehari/problem.hpp"

namespace nehari {

struct SolverConfig {
  double step_init = 1.0;
  double armijo_c = 1e-4;
  /// Scaled free residual ||grad Phi(u)||_* / (1 + ||u||^{max(p,gamma)-1}).
  double tol_grad = 1e-9;
  double tol_nehari = kNehariTolerance;
  int max_iter = 1000;
  int random_seeds = 16;
  std::uint64_t rng_seed = 1;
  int workers = 1;
  /// A restriction counts as active when its relative margin is below this.
  double restriction_tol = 1e-6;
};

/// Throws InputError on non-positive tolerances or max_iter < 1.
void validate(const SolverConfig& cfg);

enum class SolveBranch { NPlus, NMinus, NZero, RestrictedNPlus };
std::string to_string(SolveBranch b);

struct SolveResult {
  StateVector u;
  double phi = 0.0;
  double grad_norm = 0.0;
  double scaled_grad_norm = 0.0;
  SolveBranch branch = SolveBranch::NMinus;
  bool converged = false;
  int iterations = 0;
  double h = 0.0;
  double f = 0.0;
  /// |H - F| / (|H| + |F| + 1) at u.
  double nehari_residual = 0.0;
  /// Fibering scale applied to the unit-length cone iterate.
  double t = 0.0;
  int best_seed = -1;
  int feasible_seeds = 0;
  std::string status;
  /// Phi at accepted iterates of the winning seed.
  std::vector<double> history;
  std::optional<double> mu;
  /// Relative distance to the restriction boundary (restricted solves only).
  std::optional<double> restriction_margin;
  std::optional<bool> restriction_active;
};

/// ||g||_* / (1 + ||u||_K^{max(p,gamma)-1}).
double scaled_residual(const DoubleHomogeneousFunctional& fn, const Vector& u, const Vector& grad);

/// Structured and random seeds for the cone searches.
std::vector<Vector> solver_seeds(const ProblemInstance& pi, const SolverConfig& cfg,
                                 const Vector* phi1 = nullptr);

/// The nonemptiness statement that applies when a branch search finds no seed.
std::string emptiness_explanation(const Exponents& e, NehariBranch branch);

/// Minimizes Phi_lambda over N^+ or N^- by descent on the cone that projects
/// onto the branch, each iterate mapped through the fibering scale. Throws
/// Infeasible (with emptiness_explanation) when no seed lies in that cone.
SolveResult minimize_on_nehari(const ProblemInstance& pi, double lambda, NehariBranch branch,
                               const SolverConfig& cfg,
                               const std::vector<Vector>* seeds = nullptr);

/// Restriction level for N^+_{lambda,mu}: (mu_* + lambda*)/2 if gamma > p;
/// otherwise F(u)/2 at the N^+ minimizer for lambda = lambda*.
double default_restriction_level(const ProblemInstance& pi, double mu_star, double lambda_star,
                                 const SolverConfig& cfg);

/// Minimizes Phi_lambda over N^+ with H_mu < 0 (gamma > p) or F > mu
/// (gamma < p) enforced as a barrier. Throws Infeasible when no seed
/// satisfies the restriction.
SolveResult minimize_restricted(const ProblemInstance& pi, double lambda, double mu,
                                const SolverConfig& cfg,
                                const std::vector<Vector>* seeds = nullptr);

struct WindowRow {
  double lambda = 0.0;
  std::optional<SolveResult> result;
  bool good = false;
  std::string note;
};

struct WindowScan {
  std::vector<WindowRow> rows;
  /// Last good lambda minus lambda*; empty when even the first step fails.
  std::optional<double> epsilon;
  std::optional<double> last_good_lambda;
};

/// Steps lambda upward from lambda* until the restricted minimizer stops
/// converging, touches the restriction or loses Phi < 0.
WindowScan scan_restricted_window(const ProblemInstance& pi, double lambda_star, double mu,
                                  const SolverConfig& cfg, double step, int max_steps);

struct ProbeOptions {
  /// gamma > p: success once Phi drops below floor.
  double floor = -1e3;
  /// gamma < p: success once Phi falls below zero_fraction times its first value.
  double zero_fraction = 1e-6;
  int max_steps = 40;
  double shrink = 0.5;
  /// First offset s, relative to ||u*||.
  double s0 = 0.5;
};

struct ProbeStep {
  double s = 0.0;
  double h = 0.0;
  double f = 0.0;
  Cone cone = Cone::Mixed;
  std::optional<double> t;
  std::optional<double> phi;
};

struct ProbeResult {
  bool succeeded = false;
  std::string diagnostic;
  Vector direction;
  std::vector<ProbeStep> steps;
  /// Projected Nehari points t(w_s) w_s in step order.
  std::vector<StateVector> states;
  std::optional<double> last_phi;
  /// gamma < p: a direction with H_lambda < 0 < F exists near u*.
  std::optional<bool> mixed_sign_found;
};

/// Offsets u* + s v along a direction with <grad H_{lambda*}(u*), v> < 0 and
/// <grad F(u*), v> < 0, shrinking s, and projects each point onto N_lambda.
ProbeResult probe_unboundedness(const ProblemInstance& pi, double lambda, double lambda_star,
                                const StateVector& u_star, const ProbeOptions& opt = {});

struct MountainPassOptions {
  int images = 33;
  int max_iter = 4000;
  /// Largest metric displacement of an image per iteration, relative to the
  /// initial segment length.
  double max_move = 0.2;
  /// Stop when the largest energy change along the path is below this (relative).
  double tol_path = 1e-10;
  int climb_after = 200;
  bool polish = true;
  double polish_tol = 1e-10;
  int polish_iter = 2000;
  /// Relative |Phi(polished) - d_level| above which the polish is flagged.
  double mismatch_tol = 1e-2;
  int workers = 1;
};

struct PathResult {
  std::vector<StateVector> path;
  std::vector<double> energies;
  double d_level = 0.0;
  int argmax = 0;
  StateVector argmax_state;
  std::optional<SolveResult> refined_critical;
  double phi_low = 0.0;
  double phi_high = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string status;
  /// Second difference of Phi along the path tangent at the polished point.
  std::optional<double> tangent_curvature;
  std::optional<double> distance_to_low;
  std::optional<double> distance_to_zero_energy;
  bool level_mismatch = false;
};

/// String relaxation between u_low and v with a climbing image at the
/// maximum, followed by minimization of ||grad Phi||^2 from the climbing image.
PathResult mountain_pass(const ProblemInstance& pi, double lambda, const StateVector& u_low,
                         const StateVector& v, const MountainPassOptions& opt = {},
                         const StateVector* zero_energy = nullptr);

/// Endpoint v from probe_unboundedness: the first probe state with Phi below Phi(u_low).
/// Throws SolverError when the probe never gets there.
StateVector mountain_pass_endpoint(const ProblemInstance& pi, double lambda, double lambda_star,
                                   const StateVector& u_star, const SolveResult& u_low);

}  // namespace nehari
