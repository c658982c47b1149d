#include "nehari/oracle.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "nehari/errors.hpp"

namespace nehari {

namespace {

constexpr double kPi = std::numbers::pi;

Vector from_angles(const std::vector<double>& th) {
  const auto n = static_cast<Eigen::Index>(th.size()) + 1;
  Vector x(n);
  double s = 1.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    x[i] = s * std::cos(th[static_cast<std::size_t>(i)]);
    s *= std::sin(th[static_cast<std::size_t>(i)]);
  }
  x[n - 1] = s;
  return x;
}

bool admissible(OracleConstraint kind, double c) {
  switch (kind) {
    case OracleConstraint::None:
    case OracleConstraint::Zero:
      return true;
    case OracleConstraint::Negative:
      return c < 0.0;
    case OracleConstraint::Positive:
      return c > 0.0;
    case OracleConstraint::NonNegative:
      return c >= 0.0;
  }
  return false;
}

}  // namespace

OracleResult brute_force_oracle(Eigen::Index n, const OracleSpec& spec) {
  if (n < 1 || n > 5) {
    throw InputError("brute-force oracle supports 1 to 5 degrees of freedom");
  }
  if (spec.resolution < 2) {
    throw InputError("oracle resolution must be at least 2");
  }
  if (spec.kind != OracleConstraint::None && !spec.constraint) {
    throw InputError("oracle constraint kind set without a constraint function");
  }
  OracleResult out;
  auto consider = [&](const Vector& x) {
    ++out.evaluated;
    auto v = spec.objective(x);
    if (v && std::isfinite(*v) && (!out.feasible || *v < out.value)) {
      out.feasible = true;
      out.value = *v;
      out.x = x;
    }
    return v;
  };
  auto point_ok = [&](const Vector& x) {
    return spec.kind == OracleConstraint::None || spec.kind == OracleConstraint::Zero ||
           admissible(spec.kind, spec.constraint(x));
  };

  if (n == 1) {
    for (double s : {1.0, -1.0}) {
      Vector x = Vector::Constant(1, s);
      if (spec.kind == OracleConstraint::Zero) {
        if (spec.constraint(x) == 0.0) {
          consider(x);
        }
      } else if (point_ok(x)) {
        consider(x);
      }
    }
    return out;
  }

  const int r = spec.resolution;
  const auto m = static_cast<std::size_t>(n - 1);
  std::vector<int> counts(m, r);
  counts[m - 1] = 2 * r;
  auto angle = [&](std::size_t k, double idx) {
    return k + 1 == m ? 2.0 * kPi * idx / counts[k] : kPi * (idx + 0.5) / counts[k];
  };
  auto angles_of = [&](const std::vector<int>& idx) {
    std::vector<double> th(m);
    for (std::size_t k = 0; k < m; ++k) {
      th[k] = angle(k, idx[k]);
    }
    return th;
  };

  std::vector<int> idx(m, 0);
  std::vector<int> best_idx;
  bool done = false;
  while (!done) {
    const std::vector<double> th = angles_of(idx);
    const Vector x = from_angles(th);
    if (spec.kind == OracleConstraint::Zero) {
      const double ca = spec.constraint(x);
      for (std::size_t k = 0; k < m; ++k) {
        const bool wrap = k + 1 == m;
        if (!wrap && idx[k] + 1 >= counts[k]) {
          continue;
        }
        std::vector<double> thb = th;
        const double step = angle(k, 1.0) - angle(k, 0.0);
        thb[k] = th[k] + step;
        const double cb = spec.constraint(from_angles(thb));
        if (ca == 0.0) {
          consider(x);
        }
        if (!(ca * cb < 0.0)) {
          continue;
        }
        double lo = 0.0;
        double hi = 1.0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          std::vector<double> tm = th;
          tm[k] = th[k] + mid * step;
          const double cm = spec.constraint(from_angles(tm));
          if ((cm < 0.0) == (ca < 0.0)) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        std::vector<double> tr = th;
        tr[k] = th[k] + 0.5 * (lo + hi) * step;
        const double before = out.feasible ? out.value : 0.0;
        const bool had = out.feasible;
        consider(from_angles(tr));
        if (out.feasible && (!had || out.value < before)) {
          best_idx = idx;
        }
      }
    } else if (point_ok(x)) {
      const double before = out.feasible ? out.value : 0.0;
      const bool had = out.feasible;
      consider(x);
      if (out.feasible && (!had || out.value < before)) {
        best_idx = idx;
      }
    }
    for (std::size_t k = 0;; ++k) {
      if (k == m) {
        done = true;
        break;
      }
      if (++idx[k] < counts[k]) {
        break;
      }
      idx[k] = 0;
    }
  }

  if (!best_idx.empty()) {
    for (std::size_t k = 0; k < m; ++k) {
      for (int d : {-1, 1}) {
        std::vector<int> nb = best_idx;
        nb[k] += d;
        if (k + 1 == m) {
          nb[k] = (nb[k] + counts[k]) % counts[k];
        } else if (nb[k] < 0 || nb[k] >= counts[k]) {
          continue;
        }
        const Vector y = from_angles(angles_of(nb));
        if (!point_ok(y)) {
          continue;
        }
        auto v = spec.objective(y);
        if (v && std::isfinite(*v)) {
          out.neighbor_spread = std::max(out.neighbor_spread, std::abs(*v - out.value));
        }
      }
    }
  }
  return out;
}

}  // namespace nehari
