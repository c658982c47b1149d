#include "nehari/metric.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

#include "nehari/errors.hpp"

namespace nehari {

struct Metric::Factor {
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
};

Metric Metric::identity(Eigen::Index n) {
  Metric m;
  m.n_ = n;
  return m;
}

Metric Metric::from_matrix(SparseMatrix k) {
  if (k.rows() != k.cols()) {
    throw InputError("metric matrix must be square");
  }
  Metric m;
  m.n_ = k.rows();
  auto factor = std::make_shared<Factor>();
  factor->ldlt.compute(k);
  if (factor->ldlt.info() != Eigen::Success || (factor->ldlt.vectorD().array() <= 0.0).any()) {
    throw InputError("metric matrix is not symmetric positive definite");
  }
  m.k_ = std::move(k);
  m.factor_ = std::move(factor);
  return m;
}

Vector Metric::apply(const Vector& u) const {
  if (!factor_) {
    return u;
  }
  return k_ * u;
}

Vector Metric::solve(const Vector& g) const {
  if (!factor_) {
    return g;
  }
  return factor_->ldlt.solve(g);
}

double Metric::inner(const Vector& a, const Vector& b) const {
  if (!factor_) {
    return a.dot(b);
  }
  return a.dot(k_ * b);
}

double Metric::norm(const Vector& u) const { return std::sqrt(std::max(0.0, inner(u, u))); }

double Metric::dual_norm(const Vector& g) const {
  return std::sqrt(std::max(0.0, g.dot(solve(g))));
}

}  // namespace nehari
