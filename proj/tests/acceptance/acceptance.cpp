// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/oracle.hpp"
#include "nehari/problem.hpp"
#include "nehari/solvers.hpp"
#include "nehari/thresholds.hpp"
#include "nehari_cli/audit.hpp"
#include "nehari_cli/commands.hpp"
#include "nehari_cli/problem_file.hpp"

using namespace nehari;

namespace {

const std::filesystem::path kSource = NEHARI_SOURCE_DIR;
constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::shared_ptr<const Mesh> interval(int n, BoundaryCondition bc = BoundaryCondition::Dirichlet, double length = 1.0) {
  return std::make_shared<const Mesh>(Mesh::interval(n, length, bc));
}

WeightSpec ind_weight() { return WeightSpec::piecewise({{Box{0.0, 0.5}, 1.0}}, -2.0); }
ProblemInstance ind1d(int n) { return instantiate_indefinite(interval(n), 2.0, 4.0, ind_weight()); }
ProblemInstance pq1d(int n) {
  return instantiate_pq(interval(n), 2.0, 1.5, WeightSpec::piecewise({{Box{0.0, 0.25}, 30.0}}, 0.0));
}

struct Levels {
  ThresholdReport report;
  double mu_star = 0.0;
  double lambda_star = 0.0;
};

Levels levels(const ProblemInstance& pi) {
  ThresholdOptions opt;
  opt.workers = workers();
  Levels l{compute_thresholds(pi, opt)};
  l.mu_star = l.report.mu_star.value.value();
  l.lambda_star = l.report.lambda_star.value().value();
  return l;
}

/// Converged Nehari states collected from the other criteria, checked in criterion 3.
struct Collected {
  std::string label;
  const ProblemInstance* pi;
  double lambda;
  SolveResult r;
};
std::vector<Collected> g_solutions;

void collect(const std::string& label, const ProblemInstance& pi, double lambda, const SolveResult& r) {
  if (r.converged) {
    g_solutions.push_back({label, &pi, lambda, r});
  }
}

// ---- 1 ----------------------------------------------------------------------

Outcome homogeneity_suite() {
  Outcome o;
  const std::vector<std::pair<std::string, ProblemInstance>> fams = {
      {"indefinite dirichlet", ind1d(40)},
      {"indefinite neumann", instantiate_indefinite(interval(40, BoundaryCondition::Neumann), 2.0, 4.0, ind_weight())},
      {"indefinite p=3 gamma=1.5", instantiate_indefinite(interval(40), 3.0, 1.5, ind_weight())},
      {"pq dirichlet", pq1d(40)},
      {"pq neumann", instantiate_pq(interval(40, BoundaryCondition::Neumann), 2.5, 1.5,
                                    WeightSpec::piecewise({{Box{0.0, 0.3}, 5.0}}, -1.0))},
      {"kirchhoff", instantiate_kirchhoff(interval(40), 1.0, 1.0, WeightSpec::constant(64.0))},
      {"indefinite square",
       instantiate_indefinite(std::make_shared<const Mesh>(Mesh::rectangle(6, 6, 1.0, 1.0, BoundaryCondition::Dirichlet)),
                              2.0, 4.0, WeightSpec::piecewise({{Box{0.0, 0.5, 0.0, 1.0}, 1.0}}, -2.0))},
  };
  cli::AuditOptions opt;
  opt.random_states = 100;
  double worst_component = 0.0;
  for (const auto& [name, pi] : fams) {
    cli::AuditReport rep;
    cli::audit_functional(pi, name, opt, rep);
    for (const auto& c : rep.checks) {
      o.require(c.passed, c.name + " error " + fmt("%.3g", c.error));
    }
    // Every gradient component against a central difference.
    std::mt19937_64 rng(11);
    std::normal_distribution<double> d;
    const Eigen::Index n = pi.dof_count();
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      Vector u(n);
      for (auto& x : u) {
        x = d(rng);
      }
      TripleGradient g;
      pi.triple(u, g);
      const double scale[3] = {g.p1.lpNorm<Eigen::Infinity>(), g.p2.lpNorm<Eigen::Infinity>(),
                               g.f.lpNorm<Eigen::Infinity>()};
      for (Eigen::Index i = 0; i < n; ++i) {
        const double h = 1e-6 * std::max(1.0, std::abs(u[i]));
        Vector a = u;
        Vector b = u;
        a[i] += h;
        b[i] -= h;
        const EvaluatedTriple ta = pi.triple(a);
        const EvaluatedTriple tb = pi.triple(b);
        const double fd[3] = {(ta.p1 - tb.p1) / (2 * h), (ta.p2 - tb.p2) / (2 * h), (ta.f - tb.f) / (2 * h)};
        const double an[3] = {g.p1[i], g.p2[i], g.f[i]};
        for (int c = 0; c < 3; ++c) {
          worst = std::max(worst, std::abs(fd[c] - an[c]) / std::max(scale[c], 1e-12));
        }
      }
    }
    o.require(worst <= 1e-5, name + " componentwise gradient error " + fmt("%.3g", worst));
    worst_component = std::max(worst_component, worst);
  }
  o.note(std::to_string(fams.size()) + " families x 100 states, componentwise gradient error " +
         fmt("%.2g", worst_component));
  return o;
}

// ---- 2 ----------------------------------------------------------------------

Outcome eigenvalues() {
  Outcome o;
  ThresholdOptions opt;
  opt.workers = workers();
  const double unit = compute_lambda1(ind1d(200), opt).value.value();
  const double half =
      compute_lambda1(instantiate_indefinite(interval(200, BoundaryCondition::Dirichlet, 0.5), 2.0, 4.0, ind_weight()), opt)
          .value.value();
  const auto neu = compute_lambda1(
      instantiate_indefinite(interval(200, BoundaryCondition::Neumann), 2.0, 4.0, ind_weight()), opt);
  o.require(std::abs(unit - kPi2) <= 0.01 * kPi2, "unit interval " + fmt("%.9g", unit));
  o.require(std::abs(half - 4.0 * kPi2) <= 0.01 * 4.0 * kPi2, "half interval " + fmt("%.9g", half));
  o.require(neu.value.is_finite() && std::abs(neu.value.value()) <= 1e-8, "neumann lambda_1 not 0");
  bool constant = false;
  if (neu.witness) {
    const Vector& w = neu.witness->coeffs;
    constant = (w.array() - w.mean()).abs().maxCoeff() <= 1e-6 * std::abs(w.mean());
  }
  o.require(constant, "neumann witness not constant");
  o.note("lambda_1 = " + fmt("%.6f", unit) + ", " + fmt("%.6f", half) + ", neumann " +
         fmt("%.2g", neu.value.is_finite() ? neu.value.value() : NAN));
  return o;
}

// ---- 3 ----------------------------------------------------------------------

Outcome identities() {
  Outcome o;
  // A few more families on top of the states gathered by the other criteria.
  static const ProblemInstance kir = instantiate_kirchhoff(interval(60), 1.0, 1.0, WeightSpec::constant(64.0));
  static const ProblemInstance neu =
      instantiate_indefinite(interval(60, BoundaryCondition::Neumann), 2.0, 4.0, ind_weight());
  static const ProblemInstance sq = instantiate_indefinite(
      std::make_shared<const Mesh>(Mesh::rectangle(10, 10, 1.0, 1.0, BoundaryCondition::Dirichlet)), 2.0, 4.0,
      WeightSpec::piecewise({{Box{0.0, 0.5, 0.0, 1.0}, 1.0}}, -2.0));
  const SolverConfig cfg;
  for (const auto& [label, pi] : {std::pair<std::string, const ProblemInstance*>{"kirchhoff", &kir},
                                  {"neumann", &neu}, {"square", &sq}}) {
    const Levels l = levels(*pi);
    const double lambda = 0.5 * (l.mu_star + l.lambda_star);
    for (NehariBranch b : {NehariBranch::Plus, NehariBranch::Minus}) {
      try {
        const SolveResult r = minimize_on_nehari(*pi, lambda, b, cfg);
        o.require(r.converged, label + " " + to_string(b) + " " + r.status);
        collect(label + " " + to_string(b), *pi, lambda, r);
      } catch (const std::exception& ex) {
        o.require(false, label + " " + to_string(b) + ": " + ex.what());
      }
    }
  }
  double worst_hf = 0.0;
  double worst_energy = 0.0;
  for (const auto& s : g_solutions) {
    const EvaluatedTriple t = s.pi->triple(s.r.u.coeffs);
    const EvaluatedTriple mag = s.pi->magnitudes(s.r.u.coeffs);
    const double h = t.p1 - s.lambda * t.p2;
    const double hf = std::abs(h - t.f) / (mag.p1 + std::abs(s.lambda) * mag.p2 + mag.f);
    const double expected = s.pi->exponents().energy_factor() * h;
    const double en = std::abs(s.r.phi - expected) / std::abs(expected);
    worst_hf = std::max(worst_hf, hf);
    worst_energy = std::max(worst_energy, en);
    o.require(hf <= 1e-8, s.label + " |H-F| " + fmt("%.3g", hf));
    o.require(en <= 1e-8, s.label + " energy " + fmt("%.3g", en));
  }
  o.require(g_solutions.size() >= 10, "too few converged states");
  o.note(std::to_string(g_solutions.size()) + " states, max |H-F| " + fmt("%.2g", worst_hf) + ", max energy " +
         fmt("%.2g", worst_energy));
  return o;
}

// ---- 4 ----------------------------------------------------------------------

Outcome decreasing_fibering() {
  Outcome o;
  const cli::ProblemFile pf = cli::parse_problem_file(kSource / "problems/ind1d.txt");
  const ProblemInstance pi = cli::instantiate(pf);
  const Levels l = levels(pi);
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) {
    grid.push_back(l.mu_star + (l.lambda_star - l.mu_star) * k / 21.0);
  }
  const cli::SweepResult s = cli::run_sweep(pi, pf, grid, workers());
  std::vector<double> mp;
  std::vector<double> mm;
  double worst_cross = 0.0;
  int converged_rows = 0;
  for (const auto& r : s.rows) {
    const bool have = r.m_plus && r.m_plus->is_finite() && r.m_minus && r.m_minus->is_finite();
    o.require(have, "m values missing at " + fmt("%.6g", r.lambda));
    if (!have) {
      return o;
    }
    mp.push_back(r.m_plus->value());
    mm.push_back(r.m_minus->value());
    o.require(mp.back() > 0.0 && mm.back() < 0.0, "m signs at " + fmt("%.6g", r.lambda));
    if (r.c_plus && r.c_plus_direct && r.c_minus && r.c_minus_direct) {
      ++converged_rows;
      const double ep = std::abs(*r.c_plus - *r.c_plus_direct) / std::abs(*r.c_plus);
      const double em = std::abs(*r.c_minus - *r.c_minus_direct) / std::abs(*r.c_minus);
      worst_cross = std::max({worst_cross, ep, em});
    }
  }
  for (std::size_t k = 1; k < mp.size(); ++k) {
    o.require(mp[k] < mp[k - 1] && mm[k] < mm[k - 1], "not decreasing at row " + std::to_string(k));
  }
  double worst_concavity = 0.0;
  for (std::size_t k = 1; k + 1 < mp.size(); ++k) {
    worst_concavity = std::max(worst_concavity, 0.5 * (mp[k - 1] + mp[k + 1]) - mp[k]);
    worst_concavity = std::max(worst_concavity, 0.5 * (mm[k - 1] + mm[k + 1]) - mm[k]);
  }
  o.require(worst_concavity <= 1e-6, "midpoint concavity violated by " + fmt("%.3g", worst_concavity));
  o.require(converged_rows == 20, std::to_string(converged_rows) + "/20 rows with both branches converged");
  o.require(worst_cross <= 1e-3, "formula versus direct " + fmt("%.3g", worst_cross));
  o.note("20 rows, max formula/direct " + fmt("%.2g", worst_cross) + ", concavity slack " + fmt("%.2g", worst_concavity));
  return o;
}

// ---- 5 ----------------------------------------------------------------------

Outcome regime_check() {
  Outcome o;
  static const ProblemInstance ind = ind1d(100);
  static const ProblemInstance pq = pq1d(100);
  const SolverConfig cfg;
  for (const auto& [label, pi] : {std::pair<std::string, const ProblemInstance*>{"ind1d", &ind}, {"pq", &pq}}) {
    const Levels l = levels(*pi);
    const double lambda = 0.5 * (l.mu_star + l.lambda_star);
    try {
      const SolveResult minus = minimize_on_nehari(*pi, lambda, NehariBranch::Minus, cfg);
      const SolveResult plus = minimize_on_nehari(*pi, lambda, NehariBranch::Plus, cfg);
      o.require(minus.converged && plus.converged, label + " branch not converged");
      o.require(minus.phi > 0.0 && plus.phi < 0.0, label + " energy signs");
      collect(label + " N-", *pi, lambda, minus);
      collect(label + " N+", *pi, lambda, plus);
      o.note(label + " " + fmt("%.6g", minus.phi) + " > 0 > " + fmt("%.6g", plus.phi));
    } catch (const std::exception& ex) {
      o.require(false, label + ": " + ex.what());
    }
    // Below mu_*: N^+ is empty when gamma > p, N^- when gamma < p.
    const bool sup = pi->exponents().superhomogeneous();
    const NehariBranch empty = sup ? NehariBranch::Plus : NehariBranch::Minus;
    const NehariBranch other = sup ? NehariBranch::Minus : NehariBranch::Plus;
    const std::string expected = emptiness_explanation(pi->exponents(), empty);
    try {
      minimize_on_nehari(*pi, l.mu_star - 1.0, empty, cfg);
      o.require(false, label + " branch below mu_* was not reported infeasible");
    } catch (const Infeasible& ex) {
      o.require(std::string(ex.what()) == expected, label + " message '" + ex.what() + "'");
    }
    try {
      const SolveResult r = minimize_on_nehari(*pi, l.mu_star - 1.0, other, cfg);
      o.require(r.converged && r.phi > 0.0 == (other == NehariBranch::Minus), label + " feasible branch below mu_*");
      collect(label + " below mu_*", *pi, l.mu_star - 1.0, r);
    } catch (const std::exception& ex) {
      o.require(false, label + " feasible branch below mu_*: " + ex.what());
    }
  }
  return o;
}

// ---- 6 ----------------------------------------------------------------------

Outcome lambda_star_checks() {
  Outcome o;
  static const ProblemInstance pi = ind1d(100);
  const Levels l = levels(pi);
  const double lb = l.report.lambda_star.bisection.value.value();
  const double le = l.report.lambda_star.equality.value.value();
  const double rel = std::abs(lb - le) / le;
  o.require(rel <= 1e-4, "bisection " + fmt("%.9g", lb) + " vs equality " + fmt("%.9g", le));
  const auto z = zero_energy_point(pi, l.report.lambda_star.equality);
  o.require(z.has_value(), "no zero-energy point");
  if (z) {
    o.require(z->scaled_grad_norm <= 1e-5, "zero-energy gradient " + fmt("%.3g", z->scaled_grad_norm));
    o.require(std::abs(z->phi) <= 1e-6, "zero-energy value " + fmt("%.3g", z->phi));
  }
  const SolverConfig cfg;
  const double mu = default_restriction_level(pi, l.mu_star, l.lambda_star, cfg);
  const SolveResult r = minimize_restricted(pi, l.lambda_star, mu, cfg);
  o.require(r.converged && r.phi < 0.0, "restricted minimum at lambda* " + fmt("%.6g", r.phi) + " " + r.status);
  collect("restricted at lambda*", pi, l.lambda_star, r);
  o.note("lambda* " + fmt("%.9g", lb) + " (rel diff " + fmt("%.2g", rel) + "), restricted " + fmt("%.6g", r.phi) +
         (z ? ", zero-energy grad " + fmt("%.2g", z->scaled_grad_norm) : std::string()));
  return o;
}

// ---- 7 ----------------------------------------------------------------------

Outcome window_and_mountain_pass() {
  Outcome o;
  static const ProblemInstance pi = ind1d(100);
  const Levels l = levels(pi);
  const SolverConfig cfg;
  const double mu = default_restriction_level(pi, l.mu_star, l.lambda_star, cfg);
  const WindowScan w = scan_restricted_window(pi, l.lambda_star, mu, cfg, 0.02, 20);
  o.require(w.epsilon && *w.epsilon > 0.0, "empty window above lambda*");
  if (!o.passed) {
    return o;
  }
  const double lambda = l.lambda_star + 0.5 * *w.epsilon;
  const SolveResult low = minimize_restricted(pi, lambda, mu, cfg);
  o.require(low.converged && low.restriction_active && !*low.restriction_active && low.phi < 0.0,
            "restricted minimizer at lambda*+eps/2: " + low.status);
  collect("restricted in window", pi, lambda, low);
  const auto z = zero_energy_point(pi, l.report.lambda_star.equality);
  const StateVector v = mountain_pass_endpoint(pi, lambda, l.lambda_star, *l.report.lambda_star.equality.witness, low);
  MountainPassOptions mo;
  mo.workers = workers();
  const PathResult path = mountain_pass(pi, lambda, low.u, v, mo, z ? &z->u : nullptr);
  o.require(path.d_level > low.phi, "d_level " + fmt("%.9g", path.d_level) + " not above " + fmt("%.9g", low.phi));
  o.require(path.refined_critical.has_value(), "no polished critical point");
  if (path.refined_critical) {
    o.require(path.refined_critical->scaled_grad_norm <= 1e-4,
              "polished gradient " + fmt("%.3g", path.refined_critical->scaled_grad_norm));
    collect("mountain pass", pi, lambda, *path.refined_critical);
  }
  o.note("empirical eps " + fmt("%.4g", *w.epsilon) + "; at lambda " + fmt("%.6g", lambda) + " d " +
         fmt("%.6g", path.d_level) + " > c " + fmt("%.6g", low.phi) +
         (path.refined_critical ? ", polished grad " + fmt("%.2g", path.refined_critical->scaled_grad_norm)
                                : std::string()));
  return o;
}

// ---- 8 ----------------------------------------------------------------------

OracleSpec reference_spec(const ProblemInstance& pi, std::function<std::optional<double>(const EvaluatedTriple&)> obj,
                          OracleConstraint kind) {
  OracleSpec s;
  s.kind = kind;
  s.objective = [&pi, obj](const Vector& x) { return obj(cli::reference_triple(pi, x)); };
  s.constraint = [&pi](const Vector& x) { return cli::reference_triple(pi, x).f; };
  return s;
}

Outcome oracle_equivalence() {
  Outcome o;
  static const ProblemInstance pi = ind1d(4);
  ThresholdOptions opt;
  const auto l1 = compute_lambda1(pi, opt);
  const Vector* phi1 = &l1.witness->coeffs;
  const double ms = compute_mu_star(pi, opt, phi1).value.value();
  const double ls = compute_lambda_star(pi, opt, phi1, l1.value.value()).value().value();
  auto quotient = [](const EvaluatedTriple& t) -> std::optional<double> {
    return t.p2 > 1e-14 ? std::optional<double>(t.p1 / t.p2) : std::nullopt;
  };
  const auto o_ms = brute_force_oracle(3, reference_spec(pi, quotient, OracleConstraint::Negative));
  const auto o_ls = brute_force_oracle(3, reference_spec(pi, quotient, OracleConstraint::Zero));
  double worst = 0.0;
  auto compare = [&](const std::string& what, double got, const OracleResult& ref) {
    const double rel = std::abs(got - ref.value) / std::abs(ref.value);
    worst = std::max(worst, rel);
    o.require(ref.feasible && rel <= 0.05, what + " " + fmt("%.6g", got) + " vs scan " + fmt("%.6g", ref.value));
  };
  compare("mu_*", ms, o_ms);
  compare("lambda*", ls, o_ls);
  for (double s : {0.25, 0.5, 0.75}) {
    const double lambda = ms + s * (ls - ms);
    const MValues m = compute_m_pm(pi, lambda, opt, phi1);
    for (double sign : {1.0, -1.0}) {
      auto obj = [lambda, sign](const EvaluatedTriple& t) -> std::optional<double> {
        if (sign * t.f <= 1e-14) {
          return std::nullopt;
        }
        return (t.p1 - lambda * t.p2) / std::pow(sign * t.f, 0.5);
      };
      const auto ref = brute_force_oracle(3, reference_spec(pi, obj, OracleConstraint::None));
      const ThresholdValue& v = sign > 0 ? m.m_plus : m.m_minus;
      o.require(v.value.is_finite(), "m not finite");
      if (v.value.is_finite()) {
        compare(std::string(sign > 0 ? "m+" : "m-") + " at " + fmt("%.6g", lambda), v.value.value(), ref);
      }
    }
  }
  o.note("8 quantities, max relative gap " + fmt("%.2g", worst));
  return o;
}

// ---- 9 ----------------------------------------------------------------------

Outcome probes() {
  Outcome o;
  static const ProblemInstance ind = ind1d(100);
  static const ProblemInstance pq = pq1d(100);
  for (const auto& [label, pi] : {std::pair<std::string, const ProblemInstance*>{"ind1d", &ind}, {"pq", &pq}}) {
    const Levels l = levels(*pi);
    const StateVector& w = *l.report.lambda_star.equality.witness;
    const ProbeResult above = probe_unboundedness(*pi, l.lambda_star + 0.1, l.lambda_star, w);
    o.require(above.succeeded, label + " probe above lambda* failed: " + above.diagnostic);
    if (pi->exponents().superhomogeneous()) {
      o.require(above.last_phi && *above.last_phi < -1e3, label + " energy did not drop below -1e3");
      if (above.last_phi) {
        o.note(label + " reaches " + fmt("%.3g", *above.last_phi));
      }
    } else if (above.states.size() >= 2) {
      const double first = phi_at(*pi, l.lambda_star + 0.1, above.states.front().coeffs).phi;
      const double last = phi_at(*pi, l.lambda_star + 0.1, above.states.back().coeffs).phi;
      o.require(first > 0.0 && last > 0.0 && last <= 1e-6 * first, label + " N- energies did not decay to 0+");
      o.note(label + " N- energy " + fmt("%.3g", first) + " -> " + fmt("%.3g", last));
    } else {
      o.require(false, label + " probe produced too few states");
    }
    const ProbeResult below = probe_unboundedness(*pi, l.lambda_star - 0.1, l.lambda_star, w);
    o.require(!below.succeeded, label + " probe succeeded below lambda*");
  }
  return o;
}

// ---- 10 ---------------------------------------------------------------------

Outcome determinism() {
  Outcome o;
  const auto root = std::filesystem::temp_directory_path() / "nehari_acceptance_determinism";
  std::filesystem::remove_all(root);
  auto read = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::ostringstream log;
  for (const char* run : {"a", "b"}) {
    cli::RunConfig cfg;
    cfg.command = "sweep";
    cfg.problem = (kSource / "problems/ind1d.txt").string();
    cfg.grid = cli::parse_grid("9.5:10.5:6");
    cfg.out = root / run;
    cfg.seed = 7;
    cfg.workers = std::string(run) == "a" ? 1 : workers();
    o.require(cli::run(cfg, log) == cli::kExitOk, std::string("sweep run ") + run + " failed");
  }
  for (const char* f : {"sweep.csv", "sweep.json", "thresholds.json", "bifurcation.svg"}) {
    const std::string a = read(root / "a" / f);
    o.require(!a.empty() && a == read(root / "b" / f), std::string(f) + " differs");
  }
  o.note("sweep.csv, sweep.json, thresholds.json, bifurcation.svg identical");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  Outcome (*run)();
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "homogeneity and Euler identities", 10.0, homogeneity_suite},
      {2, "eigenvalue sanity", 30.0, eigenvalues},
      {5, "two solutions in (mu_*, lambda*) and emptiness below mu_*", 0.0, regime_check},
      {6, "lambda* agreement, zero-energy point, restricted minimum", 0.0, lambda_star_checks},
      {7, "window above lambda* and mountain pass", 0.0, window_and_mountain_pass},
      {3, "Nehari identities on converged states", 0.0, identities},
      {4, "m and c levels over 20 points in (mu_*, lambda*)", 300.0, decreasing_fibering},
      {8, "coarse oracle equivalence", 120.0, oracle_equivalence},
      {9, "unboundedness probes", 0.0, probes},
      {10, "byte-identical sweep output", 0.0, determinism},
  };
  struct Line {
    int id;
    std::string text;
    bool passed;
  };
  std::vector<Line> lines;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& ex) {
      o.require(false, std::string("exception: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0.0) {
      o.require(secs < c.limit_s, "runtime " + fmt("%.1f", secs) + " s over " + fmt("%.0f", c.limit_s) + " s");
    }
    char head[160];
    std::snprintf(head, sizeof head, "criterion %2d %s: %s (%.1f s)", c.id, o.passed ? "PASS" : "FAIL", c.name, secs);
    lines.push_back({c.id, std::string(head) + "\n    " + o.detail, o.passed});
    std::fprintf(stderr, "%s\n", lines.back().text.c_str());
  }
  std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.id < b.id; });
  int failed = 0;
  std::printf("\n");
  for (const auto& l : lines) {
    std::printf("%s\n", l.text.c_str());
    failed += l.passed ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(lines.size()) - failed, lines.size());
  return failed;
}
