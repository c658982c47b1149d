#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nehari/extended.hpp"
#include "nehari/optimize.hpp"
#include "nehari/problem.hpp"

namespace nehari {

struct ThresholdOptions {
  QuotientOptions quotient;
  int random_seeds = 32;
  std::uint64_t rng_seed = 1;
  /// Bisection stops when the bracket is below bisection_tol * (1 + |lambda*|).
  double bisection_tol = 1e-6;
  /// The upper bracket grows geometrically until this distance above lambda_1.
  double bracket_cap = 1e6;
  /// Relative tolerance for (H1) and for gradient non-vanishing in (C1)/(C2).
  double h1_tol = 1e-4;
  double gradient_tol = 1e-6;
  int workers = 1;
};

/// A threshold with its witness (unit metric length unless stated otherwise).
struct ThresholdValue {
  Extended value = Extended::plus_infinity("not computed");
  std::optional<StateVector> witness;
  /// Dual norm of the gradient of the (augmented) objective at the witness.
  double residual = 0.0;
  double constraint_residual = 0.0;
  bool converged = false;
  std::string diagnostic;
};

/// Seeds shared by all threshold searches: the principal eigenfunction (when
/// known), region indicators of the weight and their signed combinations,
/// followed by smooth random fields.
std::vector<Vector> threshold_seeds(const ProblemInstance& pi, const Vector* phi1,
                                    const ThresholdOptions& opt);

/// max over seeds of |F| magnitude / ||x||^gamma; normalizes F constraints.
double f_scale(const ProblemInstance& pi, const std::vector<Vector>& seeds);

/// inf P1 / P2 over P2 > 0.
ThresholdValue compute_lambda1(const ProblemInstance& pi, const ThresholdOptions& opt);
/// inf P1 / P2 over F < 0; +inf when no seed has F < 0 and P2 > 0.
ThresholdValue compute_mu_star(const ProblemInstance& pi, const ThresholdOptions& opt,
                               const Vector* phi1 = nullptr);
/// sup P1 / P2 over F > 0; -inf when F > 0 is infeasible, +inf when unbounded.
ThresholdValue compute_mu_upper_star(const ProblemInstance& pi, const ThresholdOptions& opt,
                                     const Vector* phi1 = nullptr);

/// sigma(lambda) = inf { H_lambda(u) / ||u||^p : F(u) >= 0 }.
ThresholdValue compute_sigma(const ProblemInstance& pi, double lambda, const ThresholdOptions& opt,
                             const std::vector<Vector>& seeds);

struct LambdaStarResult {
  /// Primary value (bisection on the sign of sigma).
  ThresholdValue bisection;
  /// inf P1 / P2 on F = 0 by an equality-constrained augmented Lagrangian.
  ThresholdValue equality;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int bisection_steps = 0;
  const Extended& value() const { return bisection.value; }
};

LambdaStarResult compute_lambda_star(const ProblemInstance& pi, const ThresholdOptions& opt,
                                     const Vector* phi1 = nullptr,
                                     std::optional<double> lambda1 = std::nullopt);

struct MValues {
  /// inf H / F^{p/gamma} over F > 0 and inf H / (-F)^{p/gamma} over F < 0.
  ThresholdValue m_plus;
  ThresholdValue m_minus;
};

/// Witnesses are rescaled to F = +1 and F = -1.
MValues compute_m_pm(const ProblemInstance& pi, double lambda, const ThresholdOptions& opt,
                     const Vector* phi1 = nullptr);

struct CValues {
  std::optional<double> c_plus;
  std::optional<double> c_minus;
};

/// Branch levels from the m-values. Throws InputError on m_plus <= 0 or m_minus >= 0.
CValues c_from_m(const Exponents& e, double m_plus, double m_minus);
/// c^+ from the m-value it depends on (m^- if gamma > p, m^+ if gamma < p).
double c_plus_from_m(const Exponents& e, double m);
double c_minus_from_m(const Exponents& e, double m);

struct ConditionDiagnostics {
  bool h1_holds = false;
  double h1_gap = 0.0;
  bool c1_ok = false;
  double grad_f_norm = 0.0;
  bool c2_ok = false;
  double grad_h_norm = 0.0;
  std::optional<bool> f0_ok;
  std::optional<Extended> lambda1_omega0;
  std::optional<double> int_f_phi1_gamma;
};

struct ApplicationEigenlevels {
  std::map<std::string, Extended> values;
  /// Whether F takes positive values (lambda_1(beta, q) < 1, resp. lambda_1(beta) < 1).
  std::optional<bool> f_takes_positive;
  /// Constant-beta window endpoints, when beta is constant.
  std::optional<double> window_lower;
  std::optional<double> window_upper;
  std::optional<bool> beta_in_window;
};

struct ThresholdReport {
  ThresholdValue lambda1;
  ThresholdValue mu_star;
  ThresholdValue mu_upper_star;
  LambdaStarResult lambda_star;
  std::optional<ConditionDiagnostics> diagnostics;
  std::optional<ApplicationEigenlevels> eigenlevels;
  std::vector<std::string> notes;
};

/// Throws InputError when the report has no lambda* witness.
ConditionDiagnostics check_conditions(const ProblemInstance& pi, const ThresholdReport& report,
                                      const ThresholdOptions& opt);

/// (p,q) and Kirchhoff families only; throws InputError otherwise.
ApplicationEigenlevels compute_application_eigenlevels(const ProblemInstance& pi,
                                                       const ThresholdOptions& opt,
                                                       const Vector* phi1 = nullptr);

/// All thresholds, conditions and (where applicable) eigenlevels.
ThresholdReport compute_thresholds(const ProblemInstance& pi, const ThresholdOptions& opt);

/// Scale t with grad Phi_{lambda*}(t u) = 0 from the multiplier relation
/// grad H = alpha P2 grad F, t = (gamma alpha P2 / p)^{1/(gamma - p)}.
struct ZeroEnergyPoint {
  StateVector u;
  double t = 0.0;
  double lambda = 0.0;
  double alpha = 0.0;
  double phi = 0.0;
  double grad_norm = 0.0;
  double scaled_grad_norm = 0.0;
};
std::optional<ZeroEnergyPoint> zero_energy_point(const ProblemInstance& pi,
                                                 const ThresholdValue& lambda_star_eq);

}  // namespace nehari
