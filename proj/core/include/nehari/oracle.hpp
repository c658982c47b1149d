#pragma once

#include <functional>
#include <optional>

#include "nehari/metric.hpp"

namespace nehari {

enum class OracleConstraint { None, Negative, Positive, NonNegative, Zero };

struct OracleSpec {
  /// 0-homogeneous objective; nullopt marks a point as infeasible.
  std::function<std::optional<double>(const Vector& x)> objective;
  /// Constraint function c(x); Zero is resolved by bisection along grid edges where c changes sign.
  std::function<double(const Vector& x)> constraint;
  OracleConstraint kind = OracleConstraint::None;
  /// Points per polar angle; the azimuthal angle gets twice as many.
  int resolution = 120;
};

struct OracleResult {
  bool feasible = false;
  double value = 0.0;
  /// Unit Euclidean length.
  Vector x;
  long long evaluated = 0;
  /// Largest |objective(neighbor) - value| over feasible grid neighbors of the best
  /// point (for Zero: of the grid cell holding the best crossing).
  double neighbor_spread = 0.0;
};

/// Exhaustive scan of the unit sphere of R^n (1 <= n <= 5) on a uniform
/// hyperspherical angle grid.
OracleResult brute_force_oracle(Eigen::Index n, const OracleSpec& spec);

}  // namespace nehari
