#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nehari/functional.hpp"
#include "nehari/mesh.hpp"
#include "nehari/weight.hpp"

namespace nehari {

enum class Family { IndefiniteDirichlet, IndefiniteNeumann, PQLaplacian, Kirchhoff };

std::string to_string(Family f);

/// Coercivity and boundedness witnesses in the instance norm:
///   P1(u) >= c1 ||u||^p,  P2(u) <= c2 ||u||^p,  |F(u)| <= c3 ||u||^gamma.
struct DeclaredConstants {
  double c1 = 1.0;
  double c2 = 0.0;
  double c3 = 0.0;
};

// ---- assembly kernels on DOF vectors --------------------------------------

/// sum_e |grad u|_e^r |e| with P1 elements. grad (optional) receives d/du.
double assemble_gradient_energy(const Mesh& mesh, const Vector& u, double r,
                                Vector* grad = nullptr);
/// sum_i w_i c_i (u_i^+)^r with lumped weights w_i and nodal coefficients c_i.
double assemble_weighted_positive_part(const Mesh& mesh, const std::vector<double>& nodal_coeff,
                                       const Vector& u, double r, Vector* grad = nullptr);
double assemble_weighted_positive_part(const Mesh& mesh, const WeightSpec& weight, const Vector& u,
                                       double r);
/// sum_i w_i (u_i^-)^r.
double assemble_negative_part(const Mesh& mesh, const Vector& u, double r, Vector* grad = nullptr);

/// One discretized application problem.
///
///   indefinite:  P1 = int |grad u|^p [+ int (u^-)^p, Neumann]
///                P2 = int (u^+)^p,   F = int f (u^+)^gamma
///   (p,q):       P1, P2 as above,   F = -int |grad u|^q + int beta (u^+)^q,  gamma = q
///   Kirchhoff:   P1 = a int |grad u|^2,  P2 = int (u^+)^2,
///                F = -b (int |grad u|^2)^2 + int beta (u^+)^4,  p = 2, gamma = 4
///
/// Immutable after construction.
class ProblemInstance final : public DoubleHomogeneousFunctional {
 public:
  const Exponents& exponents() const override { return exponents_; }
  Eigen::Index dof_count() const override { return mesh_->dof_count(); }
  MeshId mesh_id() const override { return mesh_->id(); }
  EvaluatedTriple triple(const Vector& u) const override;
  EvaluatedTriple triple(const Vector& u, TripleGradient& grad) const override;
  EvaluatedTriple magnitudes(const Vector& u) const override;
  /// Dirichlet: (int |grad u|^p)^{1/p}; Neumann: (int |grad u|^p + |u|^p)^{1/p}.
  double norm(const Vector& u) const override;
  const Metric& metric() const override { return metric_; }

  Family family() const { return family_; }
  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  BoundaryCondition boundary_condition() const { return mesh_->boundary_condition(); }
  const WeightSpec& weight_spec() const { return weight_spec_; }
  const ResolvedWeight& weight() const { return weight_; }
  double q() const { return q_; }
  double a() const { return a_; }
  double b() const { return b_; }
  const DeclaredConstants& constants() const { return constants_; }
  /// Non-fatal construction notes (e.g. gamma above the critical Sobolev exponent).
  const std::vector<std::string>& warnings() const { return warnings_; }
  StateVector state(Vector coeffs) const { return mesh_->state(std::move(coeffs)); }

  friend ProblemInstance instantiate_indefinite(std::shared_ptr<const Mesh> mesh, double p,
                                                double gamma, const WeightSpec& f);
  friend ProblemInstance instantiate_pq(std::shared_ptr<const Mesh> mesh, double p, double q,
                                        const WeightSpec& beta);
  friend ProblemInstance instantiate_kirchhoff(std::shared_ptr<const Mesh> mesh, double a,
                                               double b, const WeightSpec& beta);

 private:
  ProblemInstance(Family family, std::shared_ptr<const Mesh> mesh, Exponents e, WeightSpec w);
  void finish();
  EvaluatedTriple evaluate(const Vector& u, TripleGradient* grad) const;

  Family family_;
  std::shared_ptr<const Mesh> mesh_;
  Exponents exponents_;
  WeightSpec weight_spec_;
  ResolvedWeight weight_;
  std::vector<double> ones_;
  double q_ = 0.0;
  double a_ = 1.0;
  double b_ = 0.0;
  DeclaredConstants constants_;
  Metric metric_;
  std::vector<std::string> warnings_;
};

/// The boundary condition comes from the mesh.
ProblemInstance instantiate_indefinite(std::shared_ptr<const Mesh> mesh, double p, double gamma,
                                       const WeightSpec& f);
/// Requires 1 < q < p; beta >= 0 on Dirichlet meshes.
ProblemInstance instantiate_pq(std::shared_ptr<const Mesh> mesh, double p, double q,
                               const WeightSpec& beta);
/// Requires a > 0, b > 0 and dimension <= 2.
ProblemInstance instantiate_kirchhoff(std::shared_ptr<const Mesh> mesh, double a, double b,
                                      const WeightSpec& beta);

/// sup over nonzero u of max_i |u_i| / ||u|| for the norm with exponent r (a rigorous bound).
double sup_norm_bound(const Mesh& mesh, double r);

}  // namespace nehari
