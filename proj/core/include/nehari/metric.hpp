#pragma once

#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace nehari {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Inner product <a, b>_K = a^T K b for a fixed SPD matrix K.
///
/// Problem instances use the discrete H^1 stiffness (plus lumped mass for
/// Neumann spaces) so that descent directions K^{-1} grad are Sobolev
/// gradients and step sizes do not degrade with mesh refinement. Gradient
/// residuals are measured in the dual norm sqrt(g^T K^{-1} g).
class Metric {
 public:
  /// Euclidean metric on R^n (used by test doubles).
  static Metric identity(Eigen::Index n);
  /// Factors K once; throws InputError if K is not SPD.
  static Metric from_matrix(SparseMatrix k);

  Eigen::Index size() const { return n_; }
  Vector apply(const Vector& u) const;
  Vector solve(const Vector& g) const;
  double inner(const Vector& a, const Vector& b) const;
  double norm(const Vector& u) const;
  double dual_norm(const Vector& g) const;
  bool is_identity() const { return !factor_; }

 private:
  struct Factor;
  Eigen::Index n_ = 0;
  SparseMatrix k_;
  std::shared_ptr<const Factor> factor_;
};

}  // namespace nehari
