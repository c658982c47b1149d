#include "nehari/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "nehari/errors.hpp"
#include "nehari/optimize.hpp"
#include "nehari/thresholds.hpp"

namespace nehari {

namespace {

struct ConePoint {
  double h = 0.0;
  double f = 0.0;
  double t = 0.0;
};

std::optional<ConePoint> cone_point(const Exponents& e, double h, double f, Cone cone) {
  const bool inside = cone == Cone::DPlus ? (h > 0.0 && f > 0.0) : (h < 0.0 && f < 0.0);
  if (!inside) {
    return std::nullopt;
  }
  const double t = std::pow(h / f, 1.0 / (e.gamma() - e.p()));
  if (!(t > 0.0) || !std::isfinite(t)) {
    return std::nullopt;
  }
  return ConePoint{h, f, t};
}

// Extra feasibility test on the cone point (w, its triple, its scale t).
using Restriction = std::function<bool(const EvaluatedTriple& tr, double t)>;

// J(w) = Phi(t(w) w) with grad J(w) = t grad Phi(t w); 0-homogeneous in w.
Objective fibered_objective(const ProblemInstance& pi, double lambda, Cone cone,
                            Restriction restriction) {
  return [&pi, lambda, cone, restriction = std::move(restriction)](
             const Vector& w, Vector& grad) -> std::optional<double> {
    const Exponents& e = pi.exponents();
    Vector gh;
    Vector gf;
    const EvaluatedTriple tr = h_and_f_gradients(pi, lambda, w, gh, gf);
    const auto cp = cone_point(e, tr.p1 - lambda * tr.p2, tr.f, cone);
    if (!cp || (restriction && !restriction(tr, cp->t))) {
      return std::nullopt;
    }
    const double tp = std::pow(cp->t, e.p());
    const double tg = std::pow(cp->t, e.gamma());
    grad = (tp / e.p()) * gh - (tg / e.gamma()) * gf;
    return e.energy_factor() * tp * cp->h;
  };
}

StopTest free_residual_stop(const ProblemInstance& pi, double lambda, double tol) {
  return [&pi, lambda, tol](const Vector& w, double, const Vector& g) {
    const EvaluatedTriple tr = pi.triple(w);
    const double h = tr.p1 - lambda * tr.p2;
    const Exponents& e = pi.exponents();
    const double t = std::pow(h / tr.f, 1.0 / (e.gamma() - e.p()));
    const double nw = pi.metric().norm(w);
    if (!(t > 0.0) || !std::isfinite(t)) {
      return false;
    }
    const double m = std::max(e.p(), e.gamma());
    return pi.metric().dual_norm(g) / t / (1.0 + std::pow(t * nw, m - 1.0)) <= tol;
  };
}

LbfgsOptions lbfgs_options(const SolverConfig& cfg) {
  LbfgsOptions lo;
  lo.max_iter = cfg.max_iter;
  lo.armijo_c = cfg.armijo_c;
  lo.step_init = cfg.step_init;
  lo.sphere = true;
  return lo;
}

SolveBranch solve_branch(NehariBranch b) {
  switch (b) {
    case NehariBranch::Plus:
      return SolveBranch::NPlus;
    case NehariBranch::Minus:
      return SolveBranch::NMinus;
    default:
      return SolveBranch::NZero;
  }
}

// Phi > 0 on N^- and Phi < 0 on N^+ in both regimes.
bool sign_law_holds(NehariBranch b, double phi) {
  return b == NehariBranch::Minus ? phi > 0.0 : phi < 0.0;
}

SolveResult assemble_result(const ProblemInstance& pi, double lambda, const LbfgsResult& run,
                            NehariBranch expected, const SolverConfig& cfg) {
  const Exponents& e = pi.exponents();
  SolveResult r;
  const EvaluatedTriple tw = pi.triple(run.x);
  r.t = std::pow((tw.p1 - lambda * tw.p2) / tw.f, 1.0 / (e.gamma() - e.p()));
  const Vector u = r.t * run.x;
  Vector grad;
  const PhiEval pe = phi_at(pi, lambda, u, grad);
  r.u = pi.state(u);
  r.phi = pe.phi;
  r.h = pe.h;
  r.f = pe.triple.f;
  r.grad_norm = pi.metric().dual_norm(grad);
  r.scaled_grad_norm = scaled_residual(pi, u, grad);
  r.nehari_residual = std::abs(r.h - r.f) / (std::abs(r.h) + std::abs(r.f) + 1.0);
  r.iterations = run.iterations;
  r.history = run.history;
  const NehariBranch got = classify_values(e, r.h, r.f, cfg.tol_nehari);
  r.branch = solve_branch(got);
  // At the value roundoff floor the energy is resolved to machine precision;
  // the residual is then accepted within 1e3 tol_grad.
  const bool floor = run.status == "roundoff floor";
  const bool critical = r.scaled_grad_norm <= (floor ? 1e3 : 1.0) * cfg.tol_grad;
  const bool on_branch = got == expected && r.nehari_residual <= cfg.tol_nehari;
  const bool signs = sign_law_holds(expected, r.phi);
  r.converged = critical && on_branch && signs;
  if (r.converged) {
    r.status = floor ? "converged at roundoff floor" : "converged";
  } else if (!on_branch) {
    r.status = "iterate left the branch (" + to_string(got) + ")";
  } else if (!signs) {
    r.status = "energy sign contradicts the branch";
  } else {
    r.status = run.status;
  }
  return r;
}

MultistartResult run_cone_search(const ProblemInstance& pi, double lambda, Cone cone,
                                 Restriction restriction, const SolverConfig& cfg,
                                 const std::vector<Vector>& seeds) {
  const Objective j = fibered_objective(pi, lambda, cone, std::move(restriction));
  LbfgsOptions lo = lbfgs_options(cfg);
  lo.stop_test = free_residual_stop(pi, lambda, cfg.tol_grad);
  return multistart_minimize(j, seeds, pi.metric(), lo, cfg.workers);
}

}  // namespace

void validate(const SolverConfig& cfg) {
  if (!(cfg.step_init > 0.0) || !(cfg.armijo_c > 0.0 && cfg.armijo_c < 1.0) ||
      !(cfg.tol_grad > 0.0) || !(cfg.tol_nehari > 0.0) || !(cfg.restriction_tol > 0.0)) {
    throw InputError("solver tolerances and steps must be positive (armijo_c in (0,1))");
  }
  if (cfg.max_iter < 1) {
    throw InputError("max_iter must be at least 1");
  }
  if (cfg.random_seeds < 0 || cfg.workers < 1) {
    throw InputError("random_seeds must be >= 0 and workers >= 1");
  }
}

std::string to_string(SolveBranch b) {
  switch (b) {
    case SolveBranch::NPlus:
      return "N+";
    case SolveBranch::NMinus:
      return "N-";
    case SolveBranch::NZero:
      return "N0";
    case SolveBranch::RestrictedNPlus:
      return "N+(restricted)";
  }
  return "?";
}

double scaled_residual(const DoubleHomogeneousFunctional& fn, const Vector& u, const Vector& grad) {
  const Exponents& e = fn.exponents();
  const double m = std::max(e.p(), e.gamma());
  return fn.metric().dual_norm(grad) / (1.0 + std::pow(fn.metric().norm(u), m - 1.0));
}

std::vector<Vector> solver_seeds(const ProblemInstance& pi, const SolverConfig& cfg,
                                 const Vector* phi1) {
  ThresholdOptions to;
  to.random_seeds = cfg.random_seeds;
  to.rng_seed = cfg.rng_seed;
  std::vector<Vector> seeds = threshold_seeds(pi, phi1, to);
  if (!phi1) {
    const ThresholdValue l1 = compute_lambda1(pi, to);
    if (l1.witness) {
      seeds.insert(seeds.begin() + 1, l1.witness->coeffs);
    }
  }
  return seeds;
}

std::string emptiness_explanation(const Exponents& e, NehariBranch branch) {
  const bool plus = branch == NehariBranch::Plus;
  if (e.superhomogeneous()) {
    return plus ? "N_lambda^+ != {} if, and only if, lambda > mu_*"
                : "N_lambda^- != {} if, and only if, lambda < mu^*";
  }
  return plus ? "N_lambda^+ != {} if, and only if, lambda < mu^*"
              : "N_lambda^- != {} if, and only if, lambda > mu_*";
}

SolveResult minimize_on_nehari(const ProblemInstance& pi, double lambda, NehariBranch branch,
                               const SolverConfig& cfg, const std::vector<Vector>* seeds) {
  validate(cfg);
  if (branch != NehariBranch::Plus && branch != NehariBranch::Minus) {
    throw InputError("minimize_on_nehari takes the + or - branch");
  }
  const Exponents& e = pi.exponents();
  const std::vector<Vector> own = seeds ? std::vector<Vector>{} : solver_seeds(pi, cfg);
  const std::vector<Vector>& s = seeds ? *seeds : own;
  const MultistartResult ms =
      run_cone_search(pi, lambda, cone_for_branch(e, branch), nullptr, cfg, s);
  if (!ms.best) {
    throw Infeasible(emptiness_explanation(e, branch));
  }
  SolveResult r = assemble_result(pi, lambda, *ms.best, branch, cfg);
  r.best_seed = ms.best_seed;
  r.feasible_seeds = ms.feasible_seeds;
  return r;
}

double default_restriction_level(const ProblemInstance& pi, double mu_star, double lambda_star,
                                 const SolverConfig& cfg) {
  if (pi.exponents().superhomogeneous()) {
    if (!std::isfinite(mu_star) || !std::isfinite(lambda_star)) {
      throw InputError("default mu needs finite mu_* and lambda*");
    }
    return 0.5 * (mu_star + lambda_star);
  }
  const SolveResult at_star = minimize_on_nehari(pi, lambda_star, NehariBranch::Plus, cfg);
  return 0.5 * at_star.f;
}

SolveResult minimize_restricted(const ProblemInstance& pi, double lambda, double mu,
                                const SolverConfig& cfg, const std::vector<Vector>* seeds) {
  validate(cfg);
  const Exponents& e = pi.exponents();
  const bool sup = e.superhomogeneous();
  if (sup && !(mu < lambda)) {
    throw InputError("the restriction H_mu < 0 needs mu < lambda");
  }
  if (!sup && !(mu > 0.0)) {
    throw InputError("the restriction F > mu needs mu > 0");
  }
  const double g = e.gamma();
  // Relative margin: -H_mu / (P1 + mu P2) for gamma > p, (F(u) - mu) / mu otherwise.
  auto margin = [sup, mu, g](const EvaluatedTriple& tr, double t) {
    if (sup) {
      return -(tr.p1 - mu * tr.p2) / (tr.p1 + std::abs(mu) * tr.p2);
    }
    return (std::pow(t, g) * tr.f - mu) / mu;
  };
  Restriction restriction = [margin](const EvaluatedTriple& tr, double t) {
    return margin(tr, t) > 0.0;
  };
  std::vector<Vector> own;
  if (!seeds) {
    own = solver_seeds(pi, cfg);
    if (!sup) {
      // The F > mu region is reached from the unrestricted N^+ minimizer.
      try {
        const SolveResult plain = minimize_on_nehari(pi, lambda, NehariBranch::Plus, cfg, &own);
        own.insert(own.begin(), plain.u.coeffs);
      } catch (const Infeasible&) {
      }
    }
  }
  const std::vector<Vector>& s = seeds ? *seeds : own;
  const MultistartResult ms = run_cone_search(
      pi, lambda, cone_for_branch(e, NehariBranch::Plus), restriction, cfg, s);
  if (!ms.best) {
    throw Infeasible(sup ? "no seed in N_lambda^+ with H_mu < 0" : "no seed in N_lambda^+ with F > mu");
  }
  SolveResult r = assemble_result(pi, lambda, *ms.best, NehariBranch::Plus, cfg);
  r.best_seed = ms.best_seed;
  r.feasible_seeds = ms.feasible_seeds;
  r.mu = mu;
  const EvaluatedTriple tw = pi.triple(ms.best->x);
  r.restriction_margin = margin(tw, r.t);
  r.restriction_active = *r.restriction_margin <= cfg.restriction_tol;
  if (r.branch == SolveBranch::NPlus) {
    r.branch = SolveBranch::RestrictedNPlus;
  }
  if (*r.restriction_active && r.converged) {
    r.status = "restriction active";
  }
  return r;
}

WindowScan scan_restricted_window(const ProblemInstance& pi, double lambda_star, double mu,
                                  const SolverConfig& cfg, double step, int max_steps) {
  if (!(step > 0.0) || max_steps < 1) {
    throw InputError("window scan needs step > 0 and max_steps >= 1");
  }
  WindowScan scan;
  std::vector<Vector> seeds = solver_seeds(pi, cfg);
  if (!pi.exponents().superhomogeneous()) {
    try {
      const SolveResult at_star = minimize_on_nehari(pi, lambda_star, NehariBranch::Plus, cfg, &seeds);
      seeds.insert(seeds.begin(), at_star.u.coeffs);
    } catch (const Infeasible&) {
    }
  }
  for (int k = 0; k <= max_steps; ++k) {
    WindowRow row;
    row.lambda = lambda_star + k * step;
    try {
      SolveResult r = minimize_restricted(pi, row.lambda, mu, cfg, &seeds);
      row.good = r.converged && !r.restriction_active.value_or(true) && r.phi < 0.0;
      row.note = r.status;
      if (row.good) {
        seeds.insert(seeds.begin(), r.u.coeffs / pi.metric().norm(r.u.coeffs));
      }
      row.result = std::move(r);
    } catch (const Infeasible& ex) {
      row.note = ex.what();
    }
    const bool good = row.good;
    const double lam = row.lambda;
    scan.rows.push_back(std::move(row));
    if (!good) {
      break;
    }
    if (k > 0) {
      scan.last_good_lambda = lam;
      scan.epsilon = lam - lambda_star;
    }
  }
  return scan;
}

ProbeResult probe_unboundedness(const ProblemInstance& pi, double lambda, double lambda_star,
                                const StateVector& u_star, const ProbeOptions& opt) {
  check_state(pi, u_star);
  if (!(opt.shrink > 0.0 && opt.shrink < 1.0) || !(opt.s0 > 0.0) || opt.max_steps < 1) {
    throw InputError("probe needs 0 < shrink < 1, s0 > 0 and max_steps >= 1");
  }
  const Exponents& e = pi.exponents();
  const Metric& k = pi.metric();
  ProbeResult out;
  Vector u = u_star.coeffs;
  // Pull u onto F = 0 along the Riesz representative of grad F.
  for (int it = 0; it < 5; ++it) {
    Vector gh;
    Vector gf;
    const EvaluatedTriple tr = h_and_f_gradients(pi, lambda_star, u, gh, gf);
    const Vector d = k.solve(gf);
    const double dd = gf.dot(d);
    if (!(dd > 0.0)) {
      break;
    }
    u -= (tr.f / dd) * d;
  }
  Vector gh;
  Vector gf;
  h_and_f_gradients(pi, lambda_star, u, gh, gf);
  const Vector ah = k.solve(gh);
  const Vector af = k.solve(gf);
  const double nh = std::sqrt(std::max(gh.dot(ah), 0.0));
  const double nf = std::sqrt(std::max(gf.dot(af), 0.0));
  const EvaluatedTriple mag = pi.magnitudes(u);
  const double nu = k.norm(u);
  const double tiny = 1e-10;
  if (nf <= tiny * e.gamma() * mag.f / nu) {
    out.diagnostic = "grad F(u*) vanishes: (C1) fails, no probe direction";
    return out;
  }
  if (nh <= tiny * e.p() * (mag.p1 + std::abs(lambda_star) * mag.p2) / nu) {
    out.diagnostic = "grad H_lambda*(u*) vanishes: (C2) fails, no probe direction";
    return out;
  }
  const Vector eh = ah / nh;
  const Vector ef = af / nf;
  std::optional<Vector> v;
  for (const Vector& cand : {Vector(-(eh + ef)), Vector(-ef), Vector(-eh)}) {
    if (gh.dot(cand) < 0.0 && gf.dot(cand) < 0.0) {
      v = cand;
      break;
    }
  }
  if (!e.superhomogeneous()) {
    bool mixed = false;
    for (const Vector& cand : {Vector(ef - eh), Vector(ef), Vector(-eh)}) {
      mixed = mixed || (gh.dot(cand) < 0.0 && gf.dot(cand) > 0.0);
    }
    out.mixed_sign_found = mixed;
  }
  if (!v) {
    out.diagnostic = "no direction lowers both H_lambda* and F at u*";
    return out;
  }
  *v *= nu / k.norm(*v);
  out.direction = *v;

  // Consecutive points in D^- (projected to N^+ for gamma > p, N^- for gamma < p).
  std::vector<double> run;
  std::vector<double> best_run;
  double s = opt.s0;
  for (int step = 0; step < opt.max_steps; ++step, s *= opt.shrink) {
    const Vector w = u + s * *v;
    const EvaluatedTriple tr = pi.triple(w);
    ProbeStep ps;
    ps.s = s;
    ps.h = tr.p1 - lambda * tr.p2;
    ps.f = tr.f;
    const double scale = pi.magnitudes(w).f + 1e-300;
    ps.cone = cone_of(ps.h / (mag.p1 + std::abs(lambda) * mag.p2 + 1e-300), ps.f / scale, 0.0);
    if (const auto cp = cone_point(e, ps.h, ps.f, Cone::DMinus)) {
      ps.t = cp->t;
      ps.phi = e.energy_factor() * std::pow(cp->t, e.p()) * cp->h;
      out.states.push_back(pi.state(cp->t * w));
      run.push_back(*ps.phi);
      out.last_phi = ps.phi;
    } else {
      if (run.size() > best_run.size()) {
        best_run = run;
      }
      run.clear();
    }
    out.steps.push_back(ps);
  }
  if (run.size() > best_run.size()) {
    best_run = run;
  }

  if (best_run.empty()) {
    out.diagnostic = "H_lambda stays positive where F <= 0 near u*: no Nehari points along the ray";
    return out;
  }
  if (e.superhomogeneous()) {
    const double lowest = *std::min_element(best_run.begin(), best_run.end());
    out.succeeded = lowest < opt.floor;
    out.diagnostic = out.succeeded ? "Phi fell below the floor"
                                   : "Phi stayed above the floor (lowest " + std::to_string(lowest) + ")";
  } else {
    const bool positive = std::all_of(best_run.begin(), best_run.end(), [](double x) { return x > 0.0; });
    out.succeeded = positive && best_run.back() <= opt.zero_fraction * best_run.front();
    out.diagnostic = out.succeeded ? "N^- energies decay to 0 from above"
                                   : "N^- energies do not decay to 0";
  }
  return out;
}

StateVector mountain_pass_endpoint(const ProblemInstance& pi, double lambda, double lambda_star,
                                   const StateVector& u_star, const SolveResult& u_low) {
  ProbeOptions po;
  po.floor = u_low.phi;
  const ProbeResult pr = probe_unboundedness(pi, lambda, lambda_star, u_star, po);
  std::size_t k = 0;
  for (const ProbeStep& st : pr.steps) {
    if (!st.phi) {
      continue;
    }
    if (*st.phi < u_low.phi) {
      return pr.states[k];
    }
    ++k;
  }
  throw SolverError("probe found no state below Phi(u_low): " + pr.diagnostic);
}

namespace {

// Equal metric-arclength redistribution of a polyline with fixed endpoints.
void reparametrize(std::vector<Vector>& x, const Metric& k, int keep) {
  const std::size_t m = x.size();
  std::vector<double> len(m, 0.0);
  for (std::size_t i = 1; i < m; ++i) {
    len[i] = len[i - 1] + k.norm(x[i] - x[i - 1]);
  }
  const double total = len.back();
  if (!(total > 0.0)) {
    return;
  }
  std::vector<Vector> y = x;
  std::size_t seg = 1;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    if (static_cast<int>(i) == keep) {
      continue;
    }
    const double target = total * static_cast<double>(i) / static_cast<double>(m - 1);
    while (seg + 1 < m && len[seg] < target) {
      ++seg;
    }
    const double a = len[seg - 1];
    const double b = len[seg];
    const double w = b > a ? (target - a) / (b - a) : 0.0;
    y[i] = (1.0 - w) * x[seg - 1] + w * x[seg];
  }
  x = std::move(y);
}

}  // namespace

PathResult mountain_pass(const ProblemInstance& pi, double lambda, const StateVector& u_low,
                         const StateVector& v, const MountainPassOptions& opt,
                         const StateVector* zero_energy) {
  check_state(pi, u_low);
  check_state(pi, v);
  if (opt.images < 3 || opt.max_iter < 1 || !(opt.max_move > 0.0)) {
    throw InputError("mountain pass needs >= 3 images, max_iter >= 1 and max_move > 0");
  }
  const Metric& k = pi.metric();
  const auto m = static_cast<std::size_t>(opt.images);
  std::vector<Vector> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(m - 1);
    x[i] = (1.0 - s) * u_low.coeffs + s * v.coeffs;
  }
  const double seg0 = k.norm(v.coeffs - u_low.coeffs) / static_cast<double>(m - 1);
  if (!(seg0 > 0.0)) {
    throw InputError("mountain pass endpoints coincide");
  }
  const double dmax = opt.max_move * seg0;
  const double h = 0.5;

  std::vector<double> energy(m);
  auto energies = [&] {
    parallel_for(static_cast<int>(m), opt.workers, [&](int i) {
      energy[static_cast<std::size_t>(i)] = phi_at(pi, lambda, x[static_cast<std::size_t>(i)]).phi;
    });
  };
  auto argmax = [&] {
    return static_cast<int>(std::max_element(energy.begin(), energy.end()) - energy.begin());
  };
  energies();
  PathResult out;
  out.phi_low = energy.front();
  out.phi_high = energy.back();
  out.status = "max iterations";

  // Descend every interior image, the climbing image along the reflected
  // gradient; everything else is redistributed by arclength.
  int climb = -1;
  for (int it = 0; it < opt.max_iter; ++it) {
    const std::vector<double> before = energy;
    if (it >= opt.climb_after) {
      climb = argmax();
      if (climb == 0 || climb + 1 == static_cast<int>(m)) {
        climb = -1;
      }
    }
    std::vector<Vector> next = x;
    parallel_for(static_cast<int>(m) - 2, opt.workers, [&](int j) {
      const auto i = static_cast<std::size_t>(j + 1);
      Vector g;
      phi_at(pi, lambda, x[i], g);
      Vector d = k.solve(g);
      if (static_cast<int>(i) == climb) {
        Vector tau = x[i + 1] - x[i - 1];
        const double tn = k.norm(tau);
        if (tn > 0.0) {
          tau /= tn;
          d -= 2.0 * k.inner(d, tau) * tau;
        }
      }
      double step = h;
      const double dn = k.norm(d);
      if (step * dn > dmax) {
        step = dmax / dn;
      }
      next[i] = x[i] - step * d;
    });
    x = std::move(next);
    reparametrize(x, k, climb);
    energies();
    out.iterations = it + 1;
    double change = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      change = std::max(change, std::abs(energy[i] - before[i]));
      scale = std::max(scale, std::abs(energy[i]));
    }
    if (climb >= 0 && change <= opt.tol_path * scale) {
      out.converged = true;
      out.status = "converged";
      break;
    }
  }

  out.argmax = argmax();
  out.d_level = energy[static_cast<std::size_t>(out.argmax)];
  out.energies = energy;
  for (const Vector& xi : x) {
    out.path.push_back(pi.state(xi));
  }
  out.argmax_state = out.path[static_cast<std::size_t>(out.argmax)];
  if (out.argmax == 0 || out.argmax + 1 == static_cast<int>(m)) {
    out.converged = false;
    out.status = "path collapse: the maximum sits at an endpoint";
    return out;
  }
  out.distance_to_low = k.norm(out.argmax_state.coeffs - u_low.coeffs);
  if (zero_energy) {
    out.distance_to_zero_energy = k.norm(out.argmax_state.coeffs - zero_energy->coeffs);
  }
  if (!opt.polish) {
    return out;
  }

  // Minimize G = ||grad Phi||_*^2 / 2 with finite-difference Hessian products.
  const Exponents& e = pi.exponents();
  const double mexp = std::max(e.p(), e.gamma());
  Objective gfun = [&pi, &k, lambda](const Vector& y, Vector& grad) -> std::optional<double> {
    Vector g;
    phi_at(pi, lambda, y, g);
    const Vector d = k.solve(g);
    const double val = 0.5 * g.dot(d);
    const double dn = k.norm(d);
    if (!(dn > 0.0)) {
      grad = Vector::Zero(y.size());
      return val;
    }
    const double eps = 1e-6 * std::max(1.0, k.norm(y)) / dn;
    Vector gp;
    Vector gm;
    phi_at(pi, lambda, y + eps * d, gp);
    phi_at(pi, lambda, y - eps * d, gm);
    grad = (gp - gm) / (2.0 * eps);
    return val;
  };
  LbfgsOptions lo;
  lo.max_iter = opt.polish_iter;
  lo.value_scale = 0.0;
  lo.max_step = 0.05;
  lo.stop_test = [&k, mexp, tol = opt.polish_tol](const Vector& y, double val, const Vector&) {
    return std::sqrt(2.0 * std::max(val, 0.0)) / (1.0 + std::pow(k.norm(y), mexp - 1.0)) <= tol;
  };
  const LbfgsResult pr = lbfgs_minimize(gfun, out.argmax_state.coeffs, k, lo);

  SolveResult rc;
  Vector grad;
  const PhiEval pe = phi_at(pi, lambda, pr.x, grad);
  rc.u = pi.state(pr.x);
  rc.phi = pe.phi;
  rc.h = pe.h;
  rc.f = pe.triple.f;
  rc.grad_norm = k.dual_norm(grad);
  rc.scaled_grad_norm = scaled_residual(pi, pr.x, grad);
  rc.nehari_residual = std::abs(rc.h - rc.f) / (std::abs(rc.h) + std::abs(rc.f) + 1.0);
  rc.branch = solve_branch(classify_values(e, rc.h, rc.f, 1e-6));
  rc.iterations = pr.iterations;
  rc.history = pr.history;
  rc.converged = pr.converged;
  rc.status = pr.status;
  rc.t = 1.0;

  const auto ia = static_cast<std::size_t>(out.argmax);
  Vector tau = x[ia + 1] - x[ia - 1];
  tau /= k.norm(tau);
  const double eps = 1e-4 * std::max(1.0, k.norm(pr.x));
  out.tangent_curvature = (phi_at(pi, lambda, pr.x + eps * tau).phi - 2.0 * pe.phi +
                           phi_at(pi, lambda, pr.x - eps * tau).phi) /
                          (eps * eps);
  out.level_mismatch = std::abs(rc.phi - out.d_level) >
                       opt.mismatch_tol * std::max(std::abs(out.d_level), 1e-300);
  out.distance_to_low = k.norm(pr.x - u_low.coeffs);
  if (zero_energy) {
    out.distance_to_zero_energy = k.norm(pr.x - zero_energy->coeffs);
  }
  out.refined_critical = std::move(rc);
  return out;
}

}  // namespace nehari
