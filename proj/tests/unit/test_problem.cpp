#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "nehari/errors.hpp"
#include "nehari/problem.hpp"

using namespace nehari;
using nehari::testing::interval;

namespace {

constexpr double kPi = std::numbers::pi;

// Simpson rule on [a, b] with m (even) panels.
template <class F>
double simpson(F&& g, double a, double b, int m) {
  const double h = (b - a) / m;
  double s = g(a) + g(b);
  for (int i = 1; i < m; ++i) {
    s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  }
  return s * h / 3.0;
}

double directional_fd(const DoubleHomogeneousFunctional& fn, double lambda, const Vector& u,
                      const Vector& v, double h) {
  return (phi_at(fn, lambda, u + h * v).phi - phi_at(fn, lambda, u - h * v).phi) / (2.0 * h);
}

}  // namespace

TEST_CASE("interval mesh") {
  const Mesh m = Mesh::interval(2, 1.0, BoundaryCondition::Dirichlet);
  REQUIRE(m.node_count() == 3);
  CHECK(m.nodes()[1].x == doctest::Approx(0.5));
  CHECK(m.elements()[0].measure == doctest::Approx(0.5));
  CHECK(m.dof_count() == 1);
  CHECK(Mesh::interval(4, 1.0, BoundaryCondition::Dirichlet).dof_count() == 3);
  CHECK(Mesh::interval(4, 1.0, BoundaryCondition::Neumann).dof_count() == 5);
  CHECK(Mesh::interval(2, 2.0, BoundaryCondition::Dirichlet).elements()[1].measure ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(Mesh::interval(1, 1.0, BoundaryCondition::Dirichlet), InputError);
  CHECK_THROWS_AS(Mesh::interval(4, 0.0, BoundaryCondition::Dirichlet), InputError);
  CHECK(Mesh::interval(4, 1.0, BoundaryCondition::Dirichlet).id() !=
        Mesh::interval(4, 1.0, BoundaryCondition::Dirichlet).id());
}

TEST_CASE("rectangle mesh") {
  const Mesh m = Mesh::rectangle(3, 2, 1.5, 1.0, BoundaryCondition::Dirichlet);
  CHECK(m.node_count() == 12);
  CHECK(m.element_count() == 12);
  CHECK(m.dof_count() == 2);
  CHECK(m.total_measure() == doctest::Approx(1.5));
  double lumped = 0.0;
  for (double w : m.lumped_weights()) {
    lumped += w;
  }
  CHECK(lumped == doctest::Approx(1.5));
  for (const auto& e : m.elements()) {
    CHECK(e.measure > 0.0);
    // Basis gradients of a triangle sum to zero.
    CHECK(std::abs(e.basis_grad[0].x + e.basis_grad[1].x + e.basis_grad[2].x) < 1e-12);
    CHECK(std::abs(e.basis_grad[0].y + e.basis_grad[1].y + e.basis_grad[2].y) < 1e-12);
  }
  CHECK(Mesh::rectangle(3, 3, 1.0, 1.0, BoundaryCondition::Neumann).dof_count() == 16);
}

TEST_CASE("gradient energy is exact for piecewise linear functions") {
  const Mesh m = Mesh::interval(2, 1.0, BoundaryCondition::Dirichlet);
  Vector hat(1);
  hat << 1.0;
  CHECK(assemble_gradient_energy(m, hat, 2.0) == doctest::Approx(4.0));
  CHECK(assemble_gradient_energy(m, hat, 3.0) == doctest::Approx(8.0));

  const Mesh neu = Mesh::interval(3, 1.0, BoundaryCondition::Neumann);
  CHECK(assemble_gradient_energy(neu, Vector::Constant(4, 2.5), 2.0) == 0.0);
  // u(x) = s x with s = -1.7 on a length-1 mesh.
  const Vector lin = neu.interpolate([](const Point& p) { return -1.7 * p.x; });
  CHECK(assemble_gradient_energy(neu, lin, 2.5) == doctest::Approx(std::pow(1.7, 2.5)));

  // In 2D, u = 2x - y on a Neumann rectangle has |grad u|^2 = 5 everywhere.
  const Mesh sq = Mesh::rectangle(2, 3, 1.0, 2.0, BoundaryCondition::Neumann);
  const Vector plane = sq.interpolate([](const Point& p) { return 2.0 * p.x - p.y; });
  CHECK(assemble_gradient_energy(sq, plane, 2.0) == doctest::Approx(5.0 * 2.0));
  CHECK(assemble_gradient_energy(sq, plane, 3.0) == doctest::Approx(std::pow(5.0, 1.5) * 2.0));
}

TEST_CASE("weighted positive part") {
  const Mesh neu = Mesh::interval(5, 1.0, BoundaryCondition::Neumann);
  CHECK(assemble_weighted_positive_part(neu, WeightSpec::constant(1.0), Vector::Ones(6), 3.0) ==
        doctest::Approx(1.0));
  CHECK(assemble_weighted_positive_part(neu, WeightSpec::constant(1.0), -Vector::Ones(6), 3.0) ==
        0.0);

  // Against a Simpson oracle of f sin^4(pi x).
  const Mesh m = Mesh::interval(200, 1.0, BoundaryCondition::Dirichlet);
  const Vector s = m.interpolate([](const Point& p) { return std::sin(kPi * p.x); });
  const double got = assemble_weighted_positive_part(m, nehari::testing::ind1d_weight(), s, 4.0);
  auto sin4 = [](double x) { return std::pow(std::sin(kPi * x), 4); };
  const double oracle = simpson(sin4, 0.0, 0.5, 2000) - 2.0 * simpson(sin4, 0.5, 1.0, 2000);
  CHECK(got < 0.0);
  CHECK(std::abs(got - oracle) <= 1e-3 * std::abs(oracle));
}

TEST_CASE("weight resolution") {
  const Mesh m = Mesh::interval(4, 1.0, BoundaryCondition::Dirichlet);
  const auto w = resolve_weight(WeightSpec::piecewise({{Box{0.0, 0.25}, 0.0}, {Box{0.25, 0.5}, 3.0}}, -1.0), m);
  CHECK(w.element == std::vector<double>{0.0, 3.0, -1.0, -1.0});
  CHECK(w.omega0 == std::vector<bool>{true, false, false, false});
  CHECK(w.nodal[1] == doctest::Approx(1.5));
  CHECK(w.nodal[2] == doctest::Approx(1.0));
  CHECK(w.measure(m, w.omega0) + w.measure(m, w.omega_plus) + w.measure(m, w.omega_minus) ==
        doctest::Approx(m.total_measure()));
  CHECK_THROWS_AS(WeightSpec::tabulated({1.0, 2.0}).element_values(m), StructuralError);
  CHECK(WeightSpec::tabulated({1.0, 2.0, 3.0, 4.0}).element_values(m)[3] == 4.0);
}

TEST_CASE("hand values on the one-DOF hat") {
  const auto mesh = interval(2);
  const ProblemInstance pi = instantiate_indefinite(mesh, 2.0, 4.0, WeightSpec::constant(1.0));
  const EvaluatedTriple t = eval_triple(pi, pi.state(Vector::Ones(1)));
  CHECK(t.p1 == doctest::Approx(4.0));
  CHECK(t.p2 == doctest::Approx(0.5));
  CHECK(t.f == doctest::Approx(0.5));
  const ProblemInstance flipped =
      instantiate_indefinite(mesh, 2.0, 4.0, WeightSpec::constant(1.0).scaled(-1.0));
  CHECK(eval_triple(flipped, flipped.state(Vector::Ones(1))).f == doctest::Approx(-0.5));
  CHECK_THROWS_AS(instantiate_indefinite(mesh, 2.0, 2.0, WeightSpec::constant(1.0)), InputError);
}

TEST_CASE("family validation") {
  const auto mesh = interval(8);
  CHECK_THROWS_AS(instantiate_pq(mesh, 2.0, 2.5, WeightSpec::constant(1.0)), InputError);
  CHECK_THROWS_AS(instantiate_pq(mesh, 2.0, 1.5, WeightSpec::constant(-1.0)), InputError);
  CHECK_NOTHROW(instantiate_pq(interval(8, BoundaryCondition::Neumann), 2.0, 1.5,
                               WeightSpec::constant(-1.0)));
  CHECK_THROWS_AS(instantiate_kirchhoff(mesh, 0.0, 1.0, WeightSpec::constant(1.0)), InputError);
  CHECK_THROWS_AS(instantiate_kirchhoff(mesh, 1.0, -1.0, WeightSpec::constant(1.0)), InputError);
}

TEST_CASE("(p,q) and Kirchhoff energies") {
  const auto neu = interval(10, BoundaryCondition::Neumann);
  const ProblemInstance pq = instantiate_pq(neu, 2.0, 1.5, WeightSpec::piecewise({{Box{0.0, 0.3}, 2.0}}, -0.5));
  const EvaluatedTriple t = pq.triple(Vector::Ones(11));
  CHECK(t.f == doctest::Approx(0.3 * 2.0 - 0.7 * 0.5));
  CHECK(t.p1 == 0.0);
  CHECK(t.p2 == doctest::Approx(1.0));

  std::mt19937_64 rng(3);
  const auto dir = interval(20);
  const ProblemInstance zero_beta = instantiate_pq(dir, 2.0, 1.5, WeightSpec::constant(0.0));
  const ProblemInstance kir = instantiate_kirchhoff(dir, 1.0, 1.0, WeightSpec::constant(0.0));
  for (int k = 0; k < 20; ++k) {
    const Vector u = nehari::testing::random_state(dir->dof_count(), rng);
    CHECK(zero_beta.triple(u).f < 0.0);
    CHECK(kir.triple(u).f < 0.0);
    const double e2 = assemble_gradient_energy(*dir, u, 2.0);
    CHECK(kir.triple(u).f == doctest::Approx(-e2 * e2));
  }
}

TEST_CASE("homogeneity, Euler identities and gradients for every family") {
  std::mt19937_64 rng(11);
  const auto dir = interval(12);
  const auto neu = interval(12, BoundaryCondition::Neumann);
  const auto sq = std::make_shared<const Mesh>(Mesh::rectangle(4, 3, 1.0, 1.0, BoundaryCondition::Dirichlet));
  const WeightSpec f = nehari::testing::ind1d_weight();
  std::vector<ProblemInstance> family = {
      instantiate_indefinite(dir, 2.0, 4.0, f),
      instantiate_indefinite(neu, 3.0, 1.7, f),
      instantiate_indefinite(sq, 2.5, 3.5, WeightSpec::piecewise({{Box{0.0, 0.5, 0.0, 0.5}, 1.0}}, -1.0)),
      instantiate_pq(dir, 2.0, 1.5, WeightSpec::constant(6.0)),
      instantiate_pq(neu, 3.0, 2.0, f),
      instantiate_kirchhoff(dir, 1.3, 0.7, WeightSpec::constant(2.0)),
      instantiate_kirchhoff(sq, 1.0, 1.0, WeightSpec::constant(40.0)),
  };
  for (const auto& pi : family) {
    CAPTURE(to_string(pi.family()));
    for (int k = 0; k < 10; ++k) {
      const Vector u = nehari::testing::random_state_off_kinks(pi.dof_count(), rng);
      const StateVector s = pi.state(u);
      const HomogeneityAudit a = audit_homogeneity(pi, s, {1.0, 2.0, 0.3, 7.0});
      CHECK(a.passes(1e-12));
      CHECK(pi.triple(u).p2 >= 0.0);

      const Vector v = nehari::testing::random_state(pi.dof_count(), rng);
      Vector g;
      phi_at(pi, 3.0, u, g);
      const double an = g.dot(v);
      const double fd = directional_fd(pi, 3.0, u, v, 1e-5);
      CHECK(std::abs(fd - an) <= 1e-5 * std::max(std::abs(an), 1e-3 * g.norm() * v.norm()));
    }
  }
}

TEST_CASE("declared coercivity and boundedness constants") {
  std::mt19937_64 rng(5);
  const auto dir = interval(30);
  const auto sq = std::make_shared<const Mesh>(Mesh::rectangle(5, 4, 2.0, 1.0, BoundaryCondition::Dirichlet));
  const auto neu = interval(30, BoundaryCondition::Neumann);
  std::vector<ProblemInstance> family = {
      instantiate_indefinite(dir, 2.0, 4.0, nehari::testing::ind1d_weight()),
      instantiate_indefinite(sq, 3.0, 2.0, WeightSpec::constant(-1.5)),
      instantiate_indefinite(neu, 2.0, 3.0, nehari::testing::ind1d_weight()),
      instantiate_pq(dir, 3.0, 1.5, WeightSpec::constant(4.0)),
      instantiate_kirchhoff(dir, 2.0, 0.5, WeightSpec::constant(3.0)),
      instantiate_kirchhoff(sq, 1.0, 1.0, WeightSpec::constant(3.0)),
  };
  for (const auto& pi : family) {
    CAPTURE(to_string(pi.family()));
    const auto& c = pi.constants();
    const double p = pi.exponents().p();
    const double g = pi.exponents().gamma();
    for (int k = 0; k < 50; ++k) {
      Vector u = nehari::testing::random_state(pi.dof_count(), rng);
      if (pi.boundary_condition() == BoundaryCondition::Neumann) {
        u = -u.cwiseAbs();
      }
      const EvaluatedTriple t = pi.triple(u);
      const double nu = pi.norm(u);
      CHECK(t.p1 >= c.c1 * std::pow(nu, p) * (1.0 - 1e-12));
      CHECK(t.p2 <= c.c2 * std::pow(nu, p) * (1.0 + 1e-12));
      CHECK(std::abs(t.f) <= c.c3 * std::pow(nu, g) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("Neumann P1 vanishes along positive constants") {
  const ProblemInstance pi =
      instantiate_indefinite(interval(6, BoundaryCondition::Neumann), 2.0, 4.0, WeightSpec::constant(-1.0));
  CHECK(pi.triple(Vector::Constant(7, 0.8)).p1 == 0.0);
  CHECK(pi.triple(Vector::Constant(7, -0.8)).p1 > 0.0);
  CHECK_FALSE(pi.warnings().empty());
}

TEST_CASE("subdomain mesh") {
  const Mesh m = Mesh::interval(8, 1.0, BoundaryCondition::Dirichlet);
  std::vector<bool> right(8, false);
  for (int e = 4; e < 8; ++e) {
    right[static_cast<std::size_t>(e)] = true;
  }
  const Mesh sub = m.subdomain(right);
  CHECK(sub.element_count() == 4);
  CHECK(sub.dof_count() == 3);
  CHECK(sub.total_measure() == doctest::Approx(0.5));
  CHECK(sub.boundary_condition() == BoundaryCondition::Dirichlet);
  CHECK_THROWS_AS(m.subdomain(std::vector<bool>(8, false)), InputError);
}
