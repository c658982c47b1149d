#pragma once

#include <memory>
#include <random>

#include "nehari/problem.hpp"

namespace nehari::testing {

inline std::shared_ptr<const Mesh> interval(int n, BoundaryCondition bc = BoundaryCondition::Dirichlet,
                                            double length = 1.0) {
  return std::make_shared<const Mesh>(Mesh::interval(n, length, bc));
}

/// f = +1 on (0, 1/2), -2 on (1/2, 1).
inline WeightSpec ind1d_weight() {
  return WeightSpec::piecewise({{Box{0.0, 0.5}, 1.0}}, -2.0);
}

/// The 1D indefinite Dirichlet problem with p = 2, gamma = 4.
inline ProblemInstance ind1d(int n) { return instantiate_indefinite(interval(n), 2.0, 4.0, ind1d_weight()); }

/// (p,q) problem with p = 2, q = 3/2 and beta = 30 on (0, 1/4), 0 elsewhere.
inline ProblemInstance pq1d(int n) {
  return instantiate_pq(interval(n), 2.0, 1.5, WeightSpec::piecewise({{Box{0.0, 0.25}, 30.0}}, 0.0));
}

inline Vector random_state(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = d(rng);
  }
  return v;
}

/// Random state whose entries stay at least `gap` away from zero.
inline Vector random_state_off_kinks(Eigen::Index n, std::mt19937_64& rng, double gap = 0.05) {
  Vector v = random_state(n, rng);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(v[i]) < gap) {
      v[i] = v[i] < 0.0 ? -gap : gap;
    }
  }
  return v;
}

}  // namespace nehari::testing
