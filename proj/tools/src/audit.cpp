#include "nehari_cli/audit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nehari/errors.hpp"
#include "nehari/optimize.hpp"
#include "nehari/oracle.hpp"

namespace nehari::cli {

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.passed; });
}

std::optional<std::string> AuditReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) {
      return c.name;
    }
  }
  return std::nullopt;
}

namespace {

void add(AuditReport& r, std::string name, double error, double tol, std::string detail = {}) {
  r.checks.push_back({std::move(name), error <= tol, error, tol, std::move(detail)});
}

void skip(AuditReport& r, std::string name, std::string why) {
  r.checks.push_back({std::move(name), true, 0.0, 0.0, "skipped: " + std::move(why)});
}

Vector random_vector(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = d(rng);
    // Keep clear of the kinks of u^+ and u^- so difference quotients are smooth.
    if (std::abs(v[i]) < 0.05) {
      v[i] = v[i] < 0.0 ? -0.05 : 0.05;
    }
  }
  return v;
}

double rel(double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

ScalarField component(const DoubleHomogeneousFunctional& fn, int which, double sign = 1.0) {
  const double deg = which == 2 ? fn.exponents().gamma() : fn.exponents().p();
  return {[&fn, which, sign](const Vector& x, Vector* grad) {
            TripleGradient g;
            const EvaluatedTriple t = grad ? fn.triple(x, g) : fn.triple(x);
            if (grad) {
              *grad = sign * (which == 0 ? g.p1 : which == 1 ? g.p2 : g.f);
            }
            return sign * (which == 0 ? t.p1 : which == 1 ? t.p2 : t.f);
          },
          deg};
}

}  // namespace

EvaluatedTriple reference_triple(const ProblemInstance& pi, const Vector& u) {
  const Mesh& mesh = pi.mesh();
  const Vector v = mesh.expand(u);
  const double p = pi.exponents().p();
  const double g = pi.exponents().gamma();
  const std::size_t nn = mesh.node_count();
  std::vector<double> w(nn, 0.0);
  std::vector<double> cw(nn, 0.0);
  std::vector<double> area(nn, 0.0);
  const auto& coeff = pi.weight().element;
  double grad_p = 0.0;
  double grad_q = 0.0;
  double grad_2 = 0.0;
  const int k = mesh.nodes_per_element();
  for (std::size_t e = 0; e < mesh.element_count(); ++e) {
    const Element& el = mesh.elements()[e];
    Point d;
    for (int a = 0; a < k; ++a) {
      const double ua = v[el.nodes[static_cast<std::size_t>(a)]];
      d.x += ua * el.basis_grad[static_cast<std::size_t>(a)].x;
      d.y += ua * el.basis_grad[static_cast<std::size_t>(a)].y;
    }
    const double s = std::hypot(d.x, d.y);
    grad_p += std::pow(s, p) * el.measure;
    grad_2 += s * s * el.measure;
    if (pi.family() == Family::PQLaplacian) {
      grad_q += std::pow(s, pi.q()) * el.measure;
    }
    for (int a = 0; a < k; ++a) {
      const auto node = static_cast<std::size_t>(el.nodes[static_cast<std::size_t>(a)]);
      w[node] += el.measure / k;
      cw[node] += coeff[e] * el.measure;
      area[node] += el.measure;
    }
  }
  EvaluatedTriple t;
  double pos_p = 0.0;
  double neg_p = 0.0;
  double weighted = 0.0;
  const double r = pi.family() == Family::Kirchhoff ? 4.0 : g;
  for (std::size_t i = 0; i < nn; ++i) {
    const double up = std::max(v[static_cast<Eigen::Index>(i)], 0.0);
    const double um = std::max(-v[static_cast<Eigen::Index>(i)], 0.0);
    pos_p += w[i] * std::pow(up, p);
    neg_p += w[i] * std::pow(um, p);
    weighted += w[i] * (cw[i] / area[i]) * std::pow(up, r);
  }
  switch (pi.family()) {
    case Family::IndefiniteDirichlet:
    case Family::IndefiniteNeumann:
      t.p1 = grad_p + (mesh.boundary_condition() == BoundaryCondition::Neumann ? neg_p : 0.0);
      t.p2 = pos_p;
      t.f = weighted;
      break;
    case Family::PQLaplacian:
      t.p1 = grad_p + (mesh.boundary_condition() == BoundaryCondition::Neumann ? neg_p : 0.0);
      t.p2 = pos_p;
      t.f = -grad_q + weighted;
      break;
    case Family::Kirchhoff:
      t.p1 = pi.a() * grad_2;
      t.p2 = pos_p;
      t.f = -pi.b() * grad_2 * grad_2 + weighted;
      break;
  }
  return t;
}

void audit_functional(const DoubleHomogeneousFunctional& fn, const std::string& label,
                      const AuditOptions& opt, AuditReport& report) {
  std::mt19937_64 rng(opt.seed);
  const Eigen::Index n = fn.dof_count();
  double worst_h = 0.0;
  double worst_g = 0.0;
  for (int s = 0; s < opt.random_states; ++s) {
    const Vector u = random_vector(n, rng);
    const StateVector st{u, fn.mesh_id()};
    worst_h = std::max(worst_h, audit_homogeneity(fn, st, {0.5, 2.0, 3.0}).max_error());

    const Vector dir = random_vector(n, rng);
    TripleGradient g;
    fn.triple(u, g);
    const double h = 1e-6 * std::max(1.0, u.norm()) / dir.norm();
    const EvaluatedTriple a = fn.triple(u + h * dir);
    const EvaluatedTriple b = fn.triple(u - h * dir);
    const double fd[3] = {(a.p1 - b.p1) / (2 * h), (a.p2 - b.p2) / (2 * h), (a.f - b.f) / (2 * h)};
    const double an[3] = {g.p1.dot(dir), g.p2.dot(dir), g.f.dot(dir)};
    const double sc[3] = {g.p1.norm() * dir.norm(), g.p2.norm() * dir.norm(), g.f.norm() * dir.norm()};
    for (int c = 0; c < 3; ++c) {
      worst_g = std::max(worst_g, rel(fd[c], an[c], std::max(sc[c], 1e-12)));
    }
  }
  add(report, label + ": homogeneity and Euler identities", worst_h, opt.homogeneity_tol,
      std::to_string(opt.random_states) + " random states");
  add(report, label + ": gradient against central differences", worst_g, opt.gradient_tol);
}

void audit_branches(const ProblemInstance& pi, const ThresholdReport& th, const SolverConfig& cfg,
                    const AuditOptions& opt, AuditReport& report) {
  const auto ms = th.mu_star.value.as_optional();
  const auto ls = th.lambda_star.value().as_optional();
  if (!ms || !ls || !(*ms < *ls)) {
    skip(report, "branch identities", "the window (mu_*, lambda*) is empty or unbounded");
    skip(report, "formula versus direct levels", "the window (mu_*, lambda*) is empty or unbounded");
    return;
  }
  const Exponents& e = pi.exponents();
  const Vector* phi1 = th.lambda1.witness ? &th.lambda1.witness->coeffs : nullptr;
  ThresholdOptions topt;
  topt.workers = opt.workers;
  double worst_identity = 0.0;
  double worst_cross = 0.0;
  int sign_failures = 0;
  int unconverged = 0;
  std::string detail;
  for (double s : {0.25, 0.5, 0.75}) {
    const double lambda = *ms + s * (*ls - *ms);
    const MValues m = compute_m_pm(pi, lambda, topt, phi1);
    for (NehariBranch b : {NehariBranch::Plus, NehariBranch::Minus}) {
      SolveResult r;
      try {
        r = minimize_on_nehari(pi, lambda, b, cfg);
      } catch (const Infeasible& ex) {
        ++unconverged;
        detail += "lambda " + std::to_string(lambda) + ": " + ex.what() + "; ";
        continue;
      }
      if (!r.converged) {
        ++unconverged;
        detail += "lambda " + std::to_string(lambda) + " " + to_string(r.branch) + ": " + r.status + "; ";
        continue;
      }
      const EvaluatedTriple t = pi.triple(r.u.coeffs);
      const EvaluatedTriple mag = pi.magnitudes(r.u.coeffs);
      const double h = t.p1 - lambda * t.p2;
      worst_identity = std::max(worst_identity, rel(h, t.f, mag.p1 + std::abs(lambda) * mag.p2 + mag.f));
      worst_identity = std::max(worst_identity, rel(r.phi, e.energy_factor() * h, std::abs(e.energy_factor() * h)));
      const bool minus = b == NehariBranch::Minus;
      if (minus ? !(r.phi > 0.0) : !(r.phi < 0.0)) {
        ++sign_failures;
      }
      // c^+ from m^- (gamma > p) or m^+ (gamma < p); c^- from the other.
      const bool use_minus_m = minus != e.superhomogeneous();
      const ThresholdValue& mv = use_minus_m ? m.m_minus : m.m_plus;
      if (!mv.value.is_finite()) {
        continue;
      }
      try {
        const double c = minus ? c_minus_from_m(e, mv.value.value()) : c_plus_from_m(e, mv.value.value());
        worst_cross = std::max(worst_cross, std::abs(c - r.phi) / (1.0 + std::abs(c)));
      } catch (const InputError& ex) {
        detail += std::string("formula: ") + ex.what() + "; ";
        worst_cross = INFINITY;
      }
    }
  }
  add(report, "branch identities", unconverged > 0 ? INFINITY : worst_identity, opt.identity_tol,
      unconverged > 0 ? detail : std::string("6 branch minimizers"));
  add(report, "energy sign law", static_cast<double>(sign_failures), 0.0);
  add(report, "formula versus direct levels", worst_cross, opt.cross_check_tol, detail);
}

void audit_oracle(const DoubleHomogeneousFunctional& under_test, const ProblemInstance& reference,
                  const AuditOptions& opt, AuditReport& report) {
  const Eigen::Index n = under_test.dof_count();
  if (n > 5 || n != reference.dof_count()) {
    skip(report, "oracle", "needs the same coarse problem with at most five DOFs");
    return;
  }
  const int resolution = n <= 1 ? 2 : n == 2 ? 1000 : n == 3 ? 120 : n == 4 ? 60 : 24;
  const Metric& k = under_test.metric();
  std::vector<Vector> seeds = random_seeds(k, 32, opt.seed);
  seeds.insert(seeds.begin(), Vector::Ones(n) / k.norm(Vector::Ones(n)));
  for (Eigen::Index i = 0; i < n; ++i) {
    seeds.push_back(Vector::Unit(n, i));
  }
  QuotientOptions qo;
  qo.workers = opt.workers;

  double fscale = 0.0;
  for (const Vector& s : seeds) {
    fscale = std::max(fscale, std::abs(under_test.triple(s).f) / std::pow(k.norm(s), under_test.exponents().gamma()));
  }
  fscale = fscale > 0.0 ? fscale : 1.0;

  struct Case {
    std::string name;
    OracleConstraint kind;
  };
  for (const Case& c : {Case{"lambda_1", OracleConstraint::None}, Case{"mu_*", OracleConstraint::Negative},
                        Case{"lambda*", OracleConstraint::Zero}}) {
    OracleSpec spec;
    spec.resolution = resolution;
    spec.kind = c.kind;
    spec.objective = [&reference](const Vector& x) -> std::optional<double> {
      const EvaluatedTriple t = reference_triple(reference, x);
      if (t.p2 <= 1e-14 * std::max(1.0, t.p1)) {
        return std::nullopt;
      }
      return t.p1 / t.p2;
    };
    spec.constraint = [&reference](const Vector& x) { return reference_triple(reference, x).f; };
    const OracleResult o = brute_force_oracle(n, spec);

    QuotientProblem qp;
    qp.numerator = component(under_test, 0);
    qp.denominator = component(under_test, 1);
    if (c.kind == OracleConstraint::None) {
      qp.feasible = [&under_test](const Vector& x) { return under_test.triple(x).p2 > 0.0; };
    } else if (c.kind == OracleConstraint::Negative) {
      qp.feasible = [&under_test](const Vector& x) {
        const EvaluatedTriple t = under_test.triple(x);
        return t.p2 > 0.0 && t.f < 0.0;
      };
    } else {
      qp.feasible = [&under_test](const Vector& x) { return under_test.triple(x).p2 > 0.0; };
      qp.constraint = {ConstraintKind::Equality, component(under_test, 2), fscale};
    }
    std::vector<Vector> usable;
    for (const Vector& s : seeds) {
      if (qp.feasible(s)) {
        usable.push_back(s);
      }
    }
    const QuotientResult q = usable.empty() ? QuotientResult{} : minimize_quotient(qp, usable, k, qo);
    const std::string name = "oracle " + c.name;
    if (!o.feasible && !q.feasible) {
      add(report, name, 0.0, opt.oracle_tol, "both report an empty feasible set");
    } else if (o.feasible != q.feasible) {
      add(report, name, INFINITY, opt.oracle_tol,
          o.feasible ? "descent found no feasible point" : "sphere scan found no feasible point");
    } else {
      // The scan value is attained on the grid, so descent must not exceed it; it may
      // undercut it by the tolerance or by the grid's own resolution, whichever is larger.
      const double scale = std::max(std::abs(o.value), 1e-300);
      const double worse = std::max(0.0, q.value - o.value) / scale;
      const double lower = std::max(0.0, o.value - q.value - o.neighbor_spread) / scale;
      add(report, name, std::max(worse, lower), opt.oracle_tol,
          "descent " + std::to_string(q.value) + ", scan " + std::to_string(o.value) + ", grid spread " +
              std::to_string(o.neighbor_spread));
      const EvaluatedTriple t = reference_triple(reference, q.x);
      const double mismatch = std::abs(t.p1 - q.value * t.p2) / (std::abs(t.p1) + std::abs(q.value) * t.p2 + 1e-300);
      add(report, name + " reference value", t.p1 == 0.0 && q.value == 0.0 ? 0.0 : mismatch, opt.identity_tol,
          "quotient of the reference assembly at the descent minimizer");
    }
  }
}

AuditReport run_audits(const ProblemInstance& full, const DoubleHomogeneousFunctional& coarse_under_test,
                       const ProblemInstance& coarse_reference, const SolverConfig& cfg,
                       const ThresholdOptions& topt, const AuditOptions& opt) {
  AuditReport report;
  audit_functional(full, "problem", opt, report);
  audit_functional(coarse_under_test, "coarse problem", opt, report);
  const ThresholdReport th = compute_thresholds(full, topt);
  audit_branches(full, th, cfg, opt, report);
  audit_oracle(coarse_under_test, coarse_reference, opt, report);
  return report;
}

}  // namespace nehari::cli
