#include <doctest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "nehari/errors.hpp"
#include "nehari/optimize.hpp"
#include "nehari/oracle.hpp"
#include "nehari/thresholds.hpp"

using namespace nehari;

namespace {

// 0.5 x^T A x - b^T x with A = diag(1, 10, 100).
Objective quadratic() {
  return [](const Vector& x, Vector& g) -> std::optional<double> {
    Vector a(3);
    a << 1.0, 10.0, 100.0;
    Vector b(3);
    b << 1.0, 2.0, 3.0;
    g = a.cwiseProduct(x) - b;
    return 0.5 * x.dot(a.cwiseProduct(x)) - b.dot(x);
  };
}

}  // namespace

TEST_CASE("lbfgs solves a badly scaled quadratic with monotone values") {
  LbfgsOptions opt;
  opt.max_step = 10.0;
  const auto r = lbfgs_minimize(quadratic(), Vector::Zero(3), Metric::identity(3), opt);
  REQUIRE(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.x[1] == doctest::Approx(0.2).epsilon(1e-8));
  CHECK(r.x[2] == doctest::Approx(0.03).epsilon(1e-8));
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    CHECK(r.history[i] <= r.history[i - 1]);
  }
}

TEST_CASE("lbfgs barrier and infeasible start") {
  const Objective barrier = [](const Vector& x, Vector& g) -> std::optional<double> {
    if (x[0] <= 0.0) {
      return std::nullopt;
    }
    g = Vector::Constant(1, 1.0 - 1.0 / x[0]);
    return x[0] - std::log(x[0]);
  };
  Vector x0 = Vector::Constant(1, 5.0);
  const auto r = lbfgs_minimize(barrier, x0, Metric::identity(1), {});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(lbfgs_minimize(barrier, Vector::Constant(1, -1.0), Metric::identity(1), {}),
                  Infeasible);
}

TEST_CASE("parallel_for runs every index once") {
  std::vector<std::atomic<int>> hits(57);
  parallel_for(57, 4, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
  for (auto& h : hits) {
    CHECK(h.load() == 1);
  }
}

TEST_CASE("multistart ties go to the lower seed and workers do not change the result") {
  const Objective even = [](const Vector& x, Vector& g) -> std::optional<double> {
    g = 4.0 * x.array().pow(3).matrix() - 2.0 * x;
    return (x.array().pow(4) - x.array().square()).sum();
  };
  std::vector<Vector> seeds = {Vector::Constant(1, 0.5), Vector::Constant(1, -0.5),
                               Vector::Constant(1, 2.0)};
  const auto one = multistart_minimize(even, seeds, Metric::identity(1), {}, 1);
  const auto four = multistart_minimize(even, seeds, Metric::identity(1), {}, 4);
  REQUIRE(one.best);
  CHECK(one.best_seed == 0);
  CHECK(four.best_seed == 0);
  CHECK(one.best->x[0] == four.best->x[0]);
  CHECK(one.feasible_seeds == 3);
}

TEST_CASE("a constant quotient is stationary everywhere") {
  auto m = testing::interval(6);
  const Metric k = Metric::from_matrix(m->stiffness());
  QuotientProblem q;
  q.numerator = metric_power(k, 2.0);
  q.denominator = metric_power(k, 2.0);
  const auto seeds = random_seeds(k, 3, 9);
  const auto r = minimize_quotient(q, seeds, k, {});
  REQUIRE(r.feasible);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.grad_norm < 1e-12);
}

TEST_CASE("random seeds are reproducible and unit length") {
  auto m = testing::interval(10);
  const Metric k = Metric::from_matrix(m->stiffness());
  const auto a = random_seeds(k, 4, 3);
  const auto b = random_seeds(k, 4, 3);
  const auto c = random_seeds(k, 4, 4);
  REQUIRE(a.size() == 4);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(k.norm(a[i]) == doctest::Approx(1.0));
  }
  CHECK(a[0] != c[0]);
}

TEST_CASE("one-DOF first eigenvalue is exactly 8") {
  const auto pi = testing::ind1d(2);
  const auto r = compute_lambda1(pi, {});
  REQUIRE(r.value.is_finite());
  CHECK(r.value.value() == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("oracle on one DOF sees the two antipodal points") {
  const auto pi = testing::ind1d(2);
  OracleSpec spec;
  spec.objective = [&](const Vector& x) -> std::optional<double> {
    const auto t = pi.triple(x);
    if (t.p2 <= 0.0) {
      return std::nullopt;
    }
    return t.p1 / t.p2;
  };
  const auto r = brute_force_oracle(1, spec);
  REQUIRE(r.feasible);
  CHECK(r.value == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(r.x[0] == doctest::Approx(1.0));
  spec.resolution = 1;
  CHECK_THROWS_AS(brute_force_oracle(1, spec), InputError);
  CHECK_THROWS_AS(brute_force_oracle(6, OracleSpec{spec.objective, {}, OracleConstraint::None, 10}),
                  InputError);
}

TEST_CASE("two-DOF eigenvalue agrees with a 3600-point sphere scan") {
  const auto pi = testing::ind1d(3);
  const auto r = compute_lambda1(pi, {});
  OracleSpec spec;
  spec.resolution = 1800;  // 3600 points on the circle
  spec.objective = [&](const Vector& x) -> std::optional<double> {
    const auto t = pi.triple(x);
    if (t.p2 <= 0.0) {
      return std::nullopt;
    }
    return t.p1 / t.p2;
  };
  const auto o = brute_force_oracle(2, spec);
  REQUIRE(o.feasible);
  CHECK(r.value.value() <= o.value + 1e-12);
  CHECK(o.value - r.value.value() <= std::max(o.neighbor_spread, 1e-9));
}

TEST_CASE("oracle equality constraint bisects grid edges") {
  // inf x0^2 / |x|^2 on x0 = x1 in R^2 is 1/2.
  OracleSpec spec;
  spec.objective = [](const Vector& x) -> std::optional<double> { return x[0] * x[0] / x.squaredNorm(); };
  spec.constraint = [](const Vector& x) { return x[0] - x[1]; };
  spec.kind = OracleConstraint::Zero;
  spec.resolution = 50;
  const auto r = brute_force_oracle(2, spec);
  REQUIRE(r.feasible);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-9));
}
