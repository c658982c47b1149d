#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "nehari/errors.hpp"
#include "nehari/oracle.hpp"
#include "nehari/thresholds.hpp"

using namespace nehari;
using std::numbers::pi;

namespace {

const double kPi2 = pi * pi;

OracleSpec quotient_spec(const ProblemInstance& inst, OracleConstraint kind) {
  OracleSpec s;
  s.kind = kind;
  s.objective = [&inst](const Vector& x) -> std::optional<double> {
    const auto t = inst.triple(x);
    if (t.p2 <= 1e-14) {
      return std::nullopt;
    }
    return t.p1 / t.p2;
  };
  s.constraint = [&inst](const Vector& x) { return inst.triple(x).f; };
  return s;
}

// inf H / |F|^{p/gamma} over sign(F) = sign.
OracleSpec m_spec(const ProblemInstance& inst, double lambda, double sign) {
  OracleSpec s;
  const Exponents e = inst.exponents();
  s.objective = [&inst, lambda, sign, e](const Vector& x) -> std::optional<double> {
    const auto t = inst.triple(x);
    if (sign * t.f <= 1e-14) {
      return std::nullopt;
    }
    return (t.p1 - lambda * t.p2) / std::pow(sign * t.f, e.p() / e.gamma());
  };
  return s;
}

bool within(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

}  // namespace

TEST_CASE("first eigenvalue on the unit and half intervals") {
  const auto unit = testing::ind1d(200);
  const auto r = compute_lambda1(unit, {});
  REQUIRE(r.value.is_finite());
  CHECK(within(r.value.value(), kPi2, 1e-2));
  REQUIRE(r.witness);
  CHECK(r.witness->coeffs.minCoeff() > -1e-10);

  const auto half = instantiate_indefinite(testing::interval(200, BoundaryCondition::Dirichlet, 0.5),
                                           2.0, 4.0, testing::ind1d_weight());
  CHECK(within(compute_lambda1(half, {}).value.value(), 4.0 * kPi2, 1e-2));
}

TEST_CASE("Neumann first eigenvalue is zero with a constant witness") {
  const auto inst = instantiate_indefinite(testing::interval(50, BoundaryCondition::Neumann), 2.0, 4.0,
                                           testing::ind1d_weight());
  const auto r = compute_lambda1(inst, {});
  CHECK(std::abs(r.value.value()) <= 1e-8);
  REQUIRE(r.witness);
  const Vector& w = r.witness->coeffs;
  CHECK((w.array() - w.mean()).abs().maxCoeff() <= 1e-6 * std::abs(w.mean()));
}

TEST_CASE("sentinels for empty sign sets") {
  SUBCASE("f < 0 everywhere gives mu_* = lambda_1") {
    const auto inst = instantiate_indefinite(testing::interval(40), 2.0, 4.0, WeightSpec::constant(-1.0));
    const auto l1 = compute_lambda1(inst, {});
    const auto ms = compute_mu_star(inst, {}, &l1.witness->coeffs);
    CHECK(ms.value.value() == doctest::Approx(l1.value.value()).epsilon(1e-8));
  }
  SUBCASE("beta = 0 makes F > 0 infeasible") {
    const auto inst = instantiate_pq(testing::interval(40), 2.0, 1.5, WeightSpec::constant(0.0));
    const auto mu = compute_mu_upper_star(inst, {});
    CHECK(mu.value.kind() == Extended::Kind::MinusInfinity);
  }
  SUBCASE("f > 0 everywhere leaves F = 0 without P2 > 0") {
    const auto inst = instantiate_indefinite(testing::interval(40), 2.0, 4.0, WeightSpec::constant(1.0));
    const auto ls = compute_lambda_star(inst, {});
    CHECK(ls.value().kind() == Extended::Kind::PlusInfinity);
  }
}

TEST_CASE("c from m") {
  const Exponents sup(2.0, 4.0);
  const Exponents sub(2.0, 1.5);
  CHECK(c_plus_from_m(sup, -1.0) == doctest::Approx(-0.25));
  CHECK(c_minus_from_m(sup, 1.0) == doctest::Approx(0.25));
  CHECK(c_plus_from_m(sub, 1.0) == doctest::Approx(-1.0 / 6.0));
  const auto c = c_from_m(sup, 1.0, -1.0);
  CHECK(*c.c_plus == doctest::Approx(-0.25));
  CHECK(*c.c_minus == doctest::Approx(0.25));
  CHECK_THROWS_AS(c_from_m(sup, -1.0, -1.0), InputError);
  CHECK_THROWS_AS(c_from_m(sup, 1.0, 1.0), InputError);
}

TEST_CASE("coarse thresholds agree with the sphere scan") {
  const auto inst = testing::ind1d(4);
  const ThresholdOptions opt;
  const auto l1 = compute_lambda1(inst, opt);
  const Vector* phi1 = &l1.witness->coeffs;
  const auto ms = compute_mu_star(inst, opt, phi1);
  const auto ls = compute_lambda_star(inst, opt, phi1, l1.value.value());

  const auto o_l1 = brute_force_oracle(3, quotient_spec(inst, OracleConstraint::None));
  const auto o_ms = brute_force_oracle(3, quotient_spec(inst, OracleConstraint::Negative));
  const auto o_ls = brute_force_oracle(3, quotient_spec(inst, OracleConstraint::Zero));
  REQUIRE((o_l1.feasible && o_ms.feasible && o_ls.feasible));
  CHECK(within(l1.value.value(), o_l1.value, 0.05));
  CHECK(within(ms.value.value(), o_ms.value, 0.05));
  CHECK(within(ls.value().value(), o_ls.value, 0.02));
  CHECK(within(ls.equality.value.value(), o_ls.value, 0.02));
  CHECK(ls.value().value() >= l1.value.value());

  const double mus = ms.value.value();
  const double lst = ls.value().value();
  double prev_plus = INFINITY;
  double prev_minus = INFINITY;
  for (double s : {0.25, 0.5, 0.75}) {
    const double lambda = mus + s * (lst - mus);
    const auto m = compute_m_pm(inst, lambda, opt, phi1);
    const auto op = brute_force_oracle(3, m_spec(inst, lambda, 1.0));
    const auto om = brute_force_oracle(3, m_spec(inst, lambda, -1.0));
    CAPTURE(lambda);
    CHECK(within(m.m_plus.value.value(), op.value, 0.05));
    CHECK(within(m.m_minus.value.value(), om.value, 0.05));
    CHECK(m.m_plus.value.value() > 0.0);
    CHECK(m.m_minus.value.value() < 0.0);
    CHECK(m.m_plus.value.value() < prev_plus);
    CHECK(m.m_minus.value.value() < prev_minus);
    prev_plus = m.m_plus.value.value();
    prev_minus = m.m_minus.value.value();
  }
}

TEST_CASE("lambda* by bisection and by the equality constraint, and the zero-energy point") {
  const auto inst = testing::ind1d(30);
  const auto rep = compute_thresholds(inst, {});
  const double lb = rep.lambda_star.bisection.value.value();
  const double le = rep.lambda_star.equality.value.value();
  CHECK(std::abs(lb - le) <= 1e-4 * le);
  CHECK(rep.mu_star.value.value() == doctest::Approx(rep.lambda1.value.value()).epsilon(1e-6));
  CHECK(rep.mu_star.value.value() < lb);
  CHECK(extended_less_equal(rep.lambda_star.value(), rep.mu_upper_star.value));
  REQUIRE(rep.diagnostics);
  CHECK(rep.diagnostics->h1_holds);
  CHECK(rep.diagnostics->c1_ok);
  CHECK(rep.diagnostics->c2_ok);

  const auto z = zero_energy_point(inst, rep.lambda_star.equality);
  REQUIRE(z);
  CHECK(z->scaled_grad_norm <= 1e-5);
  CHECK(std::abs(z->phi) <= 1e-6);
}

TEST_CASE("interior zero set of the weight") {
  const auto inst = instantiate_indefinite(testing::interval(200), 2.0, 4.0,
                                           WeightSpec::piecewise({{Box{0.0, 0.5}, 1.0}}, 0.0));
  const auto rep = compute_thresholds(inst, {});
  REQUIRE(rep.diagnostics);
  REQUIRE(rep.diagnostics->lambda1_omega0);
  CHECK(within(rep.diagnostics->lambda1_omega0->value(), 4.0 * kPi2, 1e-2));
  CHECK_FALSE(rep.diagnostics->c1_ok);
}

TEST_CASE("constant beta eigenlevel for the (p,q) family") {
  const double b0 = 3.0;
  const auto inst = instantiate_pq(testing::interval(60), 2.0, 1.5, WeightSpec::constant(b0));
  const auto ev = compute_application_eigenlevels(inst, {});
  const double lq = ev.values.at("lambda1_q").value();
  const double lbq = ev.values.at("lambda1_beta_q").value();
  CHECK(lbq == doctest::Approx(lq / b0).epsilon(1e-6));
  REQUIRE(ev.f_takes_positive);
  CHECK(*ev.f_takes_positive == (b0 > lq));
  CHECK_THROWS_AS(compute_application_eigenlevels(testing::ind1d(10), {}), InputError);
}

TEST_CASE("Kirchhoff: F takes positive values exactly when beta0 > b mu_1") {
  // Hand assembly on four elements of (0,1): three interior nodes, h = 1/4.
  const double h = 0.25;
  OracleSpec s;
  s.objective = [h](const Vector& x) -> std::optional<double> {
    const double d[4] = {x[0], x[1] - x[0], x[2] - x[1], -x[2]};
    double g = 0.0;
    for (double v : d) {
      g += v * v / h;
    }
    const double q = h * (std::pow(x[0], 4) + std::pow(x[1], 4) + std::pow(x[2], 4));
    return g * g / q;
  };
  const auto o = brute_force_oracle(3, s);
  REQUIRE(o.feasible);
  for (double b : {1.0, 2.0}) {
    for (double ratio : {0.9, 1.1}) {
      CAPTURE(b);
      CAPTURE(ratio);
      const double b0 = ratio * b * o.value;
      const auto inst = instantiate_kirchhoff(testing::interval(4), 1.0, b, WeightSpec::constant(b0));
      const auto ev = compute_application_eigenlevels(inst, {});
      CHECK(within(ev.values.at("mu1").value(), o.value, 0.05));
      REQUIRE(ev.f_takes_positive);
      CHECK(*ev.f_takes_positive == (ratio > 1.0));
      // F at the scan minimizer has the sign of beta0 - b mu_1.
      CHECK((inst.triple(o.x).f > 0.0) == (ratio > 1.0));
    }
  }
}

TEST_CASE("threshold report is bitwise reproducible") {
  const auto inst = testing::ind1d(12);
  ThresholdOptions one;
  ThresholdOptions many;
  many.workers = 4;
  const auto a = compute_thresholds(inst, one);
  const auto b = compute_thresholds(inst, many);
  CHECK(a.lambda1.value == b.lambda1.value);
  CHECK(a.mu_star.value == b.mu_star.value);
  CHECK(a.mu_upper_star.value == b.mu_upper_star.value);
  CHECK(a.lambda_star.value() == b.lambda_star.value());
}
