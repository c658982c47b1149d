#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nehari/metric.hpp"

/// Evaluation layer for double-homogeneity functionals
///
///     Phi_lambda = (1/p) (P1 - lambda P2) - (1/gamma) F
///
/// with P1, P2 homogeneous of degree p and F homogeneous of degree gamma.
/// Everything here is a pure function of its inputs.
namespace nehari {

/// Homogeneity degrees: p for P1 and P2, gamma for F.
class Exponents {
 public:
  /// Throws InputError unless p > 1, gamma > 1 and gamma != p.
  Exponents(double p, double gamma);

  double p() const { return p_; }
  double gamma() const { return gamma_; }
  bool superhomogeneous() const { return gamma_ > p_; }
  /// (gamma - p) / (p gamma): the Nehari energy factor.
  double energy_factor() const { return (gamma_ - p_) / (p_ * gamma_); }

 private:
  double p_;
  double gamma_;
};

using MeshId = std::uint64_t;

/// Nodal coefficients over the free degrees of freedom of a mesh.
struct StateVector {
  Vector coeffs;
  MeshId mesh_id = 0;
};

struct EvaluatedTriple {
  double p1 = 0.0;
  double p2 = 0.0;
  double f = 0.0;
};

struct TripleGradient {
  Vector p1;
  Vector p2;
  Vector f;
};

/// A discretized triple (P1, P2, F) with gradients.
///
/// Implementations must be exactly homogeneous in u (up to roundoff) and
/// immutable after construction.
class DoubleHomogeneousFunctional {
 public:
  virtual ~DoubleHomogeneousFunctional() = default;

  virtual const Exponents& exponents() const = 0;
  virtual Eigen::Index dof_count() const = 0;
  virtual MeshId mesh_id() const = 0;
  virtual EvaluatedTriple triple(const Vector& u) const = 0;
  virtual EvaluatedTriple triple(const Vector& u, TripleGradient& grad) const = 0;
  /// Sum of absolute contributions to each component; the scale used for
  /// relative error checks when a component nearly cancels.
  virtual EvaluatedTriple magnitudes(const Vector& u) const;
  /// The declared norm ||u|| for the coercivity bounds.
  virtual double norm(const Vector& u) const = 0;
  /// Solver metric (Sobolev preconditioner).
  virtual const Metric& metric() const = 0;
};

enum class Cone { DPlus, DMinus, DZero, Mixed };
enum class NehariBranch { Plus, Minus, Zero, NotOnNehari };

std::string to_string(Cone c);
std::string to_string(NehariBranch b);

struct FiberingReport {
  double h_lambda = 0.0;
  double f_val = 0.0;
  Cone region = Cone::Mixed;
  std::optional<double> t_scale;
  std::optional<double> phi_dd_at_t;
};

/// Relative Nehari membership band |H - F| <= tol (|H| + |F| + 1).
inline constexpr double kNehariTolerance = 1e-8;

// ---- scalar fibering algebra on (H, F) ------------------------------------

/// phi(t) = t^p/p H - t^gamma/gamma F.
double fibering_value(const Exponents& e, double h, double f, double t);
/// phi'(t) = t^{p-1} H - t^{gamma-1} F.
double fibering_derivative(const Exponents& e, double h, double f, double t);
/// phi''(t) = (p-1) t^{p-2} H - (gamma-1) t^{gamma-2} F.
double fibering_second_derivative(const Exponents& e, double h, double f, double t);
/// t = (H/F)^{1/(gamma-p)}; throws NotInCone when H F <= tol^2.
double fibering_scale(const Exponents& e, double h, double f, double tol = 1e-14);
Cone cone_of(double h, double f, double tol);
NehariBranch classify_values(const Exponents& e, double h, double f, double tol);
/// Branch reached by projecting a point of the given cone onto the Nehari set.
NehariBranch branch_of_cone(const Exponents& e, Cone c);
/// Cone whose projection yields the requested branch (Plus or Minus).
Cone cone_for_branch(const Exponents& e, NehariBranch b);
FiberingReport fibering_report(const Exponents& e, double h, double f, double tol);

// ---- operations on a functional --------------------------------------------

/// Checks dimension, mesh id and finiteness. Throws StructuralError / InputError.
void check_state(const DoubleHomogeneousFunctional& fn, const StateVector& u);

EvaluatedTriple eval_triple(const DoubleHomogeneousFunctional& fn, const StateVector& u);
double eval_phi(const DoubleHomogeneousFunctional& fn, double lambda, const StateVector& u);
StateVector grad_phi(const DoubleHomogeneousFunctional& fn, double lambda, const StateVector& u);
/// Evaluates from a single triple at u, not by rescaling u. Throws on t < 0.
double fibering_value(const DoubleHomogeneousFunctional& fn, double lambda, const StateVector& u,
                      double t);
double fibering_scale(const DoubleHomogeneousFunctional& fn, double lambda, const StateVector& u);
FiberingReport fibering_report(const DoubleHomogeneousFunctional& fn, double lambda,
                               const StateVector& u, double tol = kNehariTolerance);
/// Throws InputError for u = 0.
NehariBranch classify(const DoubleHomogeneousFunctional& fn, double lambda, const StateVector& u,
                      double tol = kNehariTolerance);

struct Projection {
  StateVector u;
  NehariBranch branch;
  double t;
};
Projection project_to_nehari(const DoubleHomogeneousFunctional& fn, double lambda,
                             const StateVector& u);

struct ScaleAudit {
  double t = 1.0;
  double p1_rel = 0.0;
  double p2_rel = 0.0;
  double f_rel = 0.0;
};

struct HomogeneityAudit {
  std::vector<ScaleAudit> scales;
  double euler_p1_rel = 0.0;
  double euler_p2_rel = 0.0;
  double euler_f_rel = 0.0;
  double max_error() const;
  bool passes(double tol = 1e-9) const { return max_error() <= tol; }
};

/// Scaling identities P(tu) = t^deg P(u) and Euler contractions <grad P(u), u> = deg P(u).
HomogeneityAudit audit_homogeneity(const DoubleHomogeneousFunctional& fn, const StateVector& u,
                                   const std::vector<double>& scales);

// ---- unchecked fast paths used by the solvers -----------------------------

struct PhiEval {
  EvaluatedTriple triple;
  double h = 0.0;
  double phi = 0.0;
};
PhiEval phi_at(const DoubleHomogeneousFunctional& fn, double lambda, const Vector& u);
/// Phi_lambda(u) and its gradient.
PhiEval phi_at(const DoubleHomogeneousFunctional& fn, double lambda, const Vector& u,
               Vector& grad);
/// grad H_lambda and grad F at u.
EvaluatedTriple h_and_f_gradients(const DoubleHomogeneousFunctional& fn, double lambda,
                                  const Vector& u, Vector& grad_h, Vector& grad_f);

}  // namespace nehari
