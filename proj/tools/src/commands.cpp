#include "nehari_cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include "nehari/errors.hpp"
#include "nehari/optimize.hpp"
#include "nehari_cli/svg.hpp"

namespace nehari::cli {

std::vector<double> LambdaGrid::values() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    v.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  }
  return v;
}

LambdaGrid parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    parts.push_back(item);
  }
  if (parts.size() != 3) {
    throw ParseError("--lambda-grid expects a:b:n, got '" + spec + "'");
  }
  LambdaGrid g;
  auto real = [&](const std::string& s, double& out) {
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
      throw ParseError("bad number '" + s + "' in --lambda-grid");
    }
  };
  real(parts[0], g.start);
  real(parts[1], g.stop);
  const auto r = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), g.count);
  if (r.ec != std::errc() || r.ptr != parts[2].data() + parts[2].size()) {
    throw ParseError("bad count '" + parts[2] + "' in --lambda-grid");
  }
  if (g.count < 1 || g.start > g.stop) {
    throw ParseError("--lambda-grid needs count >= 1 and start <= stop");
  }
  return g;
}

void validate(const RunConfig& cfg) {
  if (cfg.grid && (cfg.grid->count < 1 || cfg.grid->start > cfg.grid->stop)) {
    throw ParseError("lambda grid needs count >= 1 and start <= stop");
  }
  if (cfg.branch != "plus" && cfg.branch != "minus") {
    throw ParseError("--branch must be plus or minus");
  }
  if (cfg.workers < 1) {
    throw ParseError("--workers must be at least 1");
  }
  if (cfg.problem.empty()) {
    throw ParseError("--problem is required");
  }
}

ProblemFile load_problem(const RunConfig& cfg) {
  ProblemFile pf = parse_problem_file(cfg.problem);
  pf.solver.rng_seed = cfg.seed;
  pf.thresholds.rng_seed = cfg.seed;
  pf.thresholds.workers = cfg.workers;
  pf.solver.workers = 1;
  validate(pf.solver);
  return pf;
}

namespace {

Json threshold_value_json(const ThresholdValue& t) {
  Json j;
  j["value"] = to_json(t.value);
  j["converged"] = t.converged;
  j["residual"] = t.residual;
  j["constraint_residual"] = t.constraint_residual;
  j["diagnostic"] = t.diagnostic;
  return j;
}

std::string region_of(double lambda, std::optional<double> ms, std::optional<double> ls) {
  if (ls && std::abs(lambda - *ls) <= 1e-9 * (1.0 + std::abs(*ls))) {
    return "at_lambda_star";
  }
  if (ls && lambda > *ls) {
    return "above_lambda_star";
  }
  if (ms && lambda <= *ms) {
    return "below_mu_star";
  }
  if (ms && ls) {
    return "window";
  }
  return "no_window";
}

bool above(double lambda, const Extended& x) {
  return x.kind() == Extended::Kind::MinusInfinity || (x.is_finite() && lambda > x.value());
}

bool below(double lambda, const Extended& x) {
  return x.kind() == Extended::Kind::PlusInfinity || (x.is_finite() && lambda < x.value());
}

Json state_summary(const SolveResult& r) {
  Json j;
  j["branch"] = to_string(r.branch);
  j["phi"] = r.phi;
  j["converged"] = r.converged;
  j["status"] = r.status;
  j["iterations"] = r.iterations;
  j["h"] = r.h;
  j["f"] = r.f;
  j["grad_norm"] = r.grad_norm;
  j["scaled_grad_norm"] = r.scaled_grad_norm;
  j["nehari_residual"] = r.nehari_residual;
  j["t"] = r.t;
  j["best_seed"] = r.best_seed;
  j["feasible_seeds"] = r.feasible_seeds;
  j["min_nodal_value"] = r.u.coeffs.size() ? r.u.coeffs.minCoeff() : 0.0;
  if (r.mu) {
    j["mu"] = *r.mu;
  }
  if (r.restriction_margin) {
    j["restriction_margin"] = *r.restriction_margin;
    j["restriction_active"] = *r.restriction_active;
  }
  return j;
}

std::string solution_csv(const ProblemInstance& pi, const Vector& u) {
  const Mesh& mesh = pi.mesh();
  const Vector v = mesh.expand(u);
  std::string s = mesh.dimension() == 1 ? "x,u\n" : "x,y,u\n";
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    const Point& p = mesh.nodes()[i];
    s += csv_number(p.x) + ",";
    if (mesh.dimension() == 2) {
      s += csv_number(p.y) + ",";
    }
    s += csv_number(v[static_cast<Eigen::Index>(i)]) + "\n";
  }
  return s;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) {
    s += (s.empty() ? "" : "; ") + x;
  }
  return s;
}

bool any_sentinel(const ThresholdReport& r) {
  return !r.lambda1.value.is_finite() || !r.mu_star.value.is_finite() || !r.mu_upper_star.value.is_finite() ||
         !r.lambda_star.value().is_finite();
}

void write_outputs(const RunConfig& cfg, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(cfg.out);
  write_text(cfg.out / name, text);
}

struct Context {
  ProblemFile pf;
  ProblemInstance pi;
  ThresholdReport th;
};

Context prepare(const RunConfig& cfg) {
  validate(cfg);
  ProblemFile pf = load_problem(cfg);
  ProblemInstance pi = instantiate(pf);
  ThresholdReport th = compute_thresholds(pi, pf.thresholds);
  return {std::move(pf), std::move(pi), std::move(th)};
}

}  // namespace

Json thresholds_json(const ProblemInstance& pi, const ThresholdReport& r) {
  Json j;
  Json prob;
  prob["family"] = to_string(pi.family());
  prob["boundary"] = to_string(pi.boundary_condition());
  prob["dimension"] = pi.mesh().dimension();
  prob["dofs"] = static_cast<long long>(pi.dof_count());
  prob["p"] = pi.exponents().p();
  prob["gamma"] = pi.exponents().gamma();
  prob["weight"] = pi.weight_spec().describe();
  prob["warnings"] = pi.warnings();
  j["problem"] = prob;
  j["lambda1"] = threshold_value_json(r.lambda1);
  j["mu_star"] = threshold_value_json(r.mu_star);
  j["mu_upper_star"] = threshold_value_json(r.mu_upper_star);
  Json ls;
  ls["value"] = to_json(r.lambda_star.value());
  ls["bisection"] = threshold_value_json(r.lambda_star.bisection);
  ls["equality"] = threshold_value_json(r.lambda_star.equality);
  ls["bracket"] = Json::array({r.lambda_star.bracket_lo, r.lambda_star.bracket_hi});
  ls["bisection_steps"] = r.lambda_star.bisection_steps;
  j["lambda_star"] = ls;
  if (r.diagnostics) {
    const auto& d = *r.diagnostics;
    Json c;
    c["h1_holds"] = d.h1_holds;
    c["h1_gap"] = d.h1_gap;
    c["c1_ok"] = d.c1_ok;
    c["grad_f_norm"] = d.grad_f_norm;
    c["c2_ok"] = d.c2_ok;
    c["grad_h_norm"] = d.grad_h_norm;
    c["f0_ok"] = d.f0_ok ? Json(*d.f0_ok) : Json(nullptr);
    c["lambda1_omega0"] = d.lambda1_omega0 ? to_json(*d.lambda1_omega0) : Json(nullptr);
    c["int_f_phi1_gamma"] = to_json(d.int_f_phi1_gamma);
    j["conditions"] = c;
  } else {
    j["conditions"] = nullptr;
  }
  if (r.eigenlevels) {
    Json e;
    for (const auto& [k, v] : r.eigenlevels->values) {
      e[k] = to_json(v);
    }
    e["f_takes_positive"] = r.eigenlevels->f_takes_positive ? Json(*r.eigenlevels->f_takes_positive) : Json(nullptr);
    e["window_lower"] = to_json(r.eigenlevels->window_lower);
    e["window_upper"] = to_json(r.eigenlevels->window_upper);
    e["beta_in_window"] =
        r.eigenlevels->beta_in_window ? Json(*r.eigenlevels->beta_in_window) : Json(nullptr);
    j["eigenlevels"] = e;
  } else {
    j["eigenlevels"] = nullptr;
  }
  if (const auto z = zero_energy_point(pi, r.lambda_star.equality)) {
    Json zj;
    zj["lambda"] = z->lambda;
    zj["t"] = z->t;
    zj["phi"] = z->phi;
    zj["grad_norm"] = z->grad_norm;
    zj["scaled_grad_norm"] = z->scaled_grad_norm;
    j["zero_energy_point"] = zj;
  } else {
    j["zero_energy_point"] = nullptr;
  }
  j["notes"] = r.notes;
  return j;
}

SweepResult run_sweep(const ProblemInstance& pi, const ProblemFile& pf, const std::vector<double>& lambdas,
                      int workers) {
  SweepResult out;
  ThresholdOptions topt = pf.thresholds;
  topt.workers = workers;
  out.thresholds = compute_thresholds(pi, topt);
  topt.workers = 1;
  const ThresholdReport& th = out.thresholds;
  const Exponents& e = pi.exponents();
  const auto ms = th.mu_star.value.as_optional();
  const auto ls = th.lambda_star.value().as_optional();
  const Vector* phi1 = th.lambda1.witness ? &th.lambda1.witness->coeffs : nullptr;
  const SolverConfig& cfg = pf.solver;

  std::string restriction_note;
  if (ms && ls) {
    try {
      out.restriction_level = default_restriction_level(pi, *ms, *ls, cfg);
    } catch (const std::exception& ex) {
      restriction_note = std::string("no restriction level: ") + ex.what();
    }
  }
  std::optional<ZeroEnergyPoint> zero;
  if (ls) {
    zero = zero_energy_point(pi, th.lambda_star.equality);
  }

  out.rows.resize(lambdas.size());
  parallel_for(static_cast<int>(lambdas.size()), workers, [&](int k) {
    BranchSweepRecord& rec = out.rows[static_cast<std::size_t>(k)];
    const double lambda = lambdas[static_cast<std::size_t>(k)];
    rec.lambda = lambda;
    rec.region = region_of(lambda, ms, ls);
    if (e.superhomogeneous()) {
      rec.n_plus_nonempty = above(lambda, th.mu_star.value);
      rec.n_minus_nonempty = below(lambda, th.mu_upper_star.value);
    } else {
      rec.n_plus_nonempty = below(lambda, th.mu_upper_star.value);
      rec.n_minus_nonempty = above(lambda, th.mu_star.value);
    }

    try {
      const MValues m = compute_m_pm(pi, lambda, topt, phi1);
      rec.m_plus = m.m_plus.value;
      rec.m_minus = m.m_minus.value;
      // c^+ depends on m^- when gamma > p and on m^+ when gamma < p.
      const Extended& for_plus = e.superhomogeneous() ? m.m_minus.value : m.m_plus.value;
      const Extended& for_minus = e.superhomogeneous() ? m.m_plus.value : m.m_minus.value;
      if (for_plus.is_finite()) {
        try {
          rec.c_plus = c_plus_from_m(e, for_plus.value());
        } catch (const InputError& ex) {
          rec.notes.push_back(std::string("c+ formula: ") + ex.what());
        }
      }
      if (for_minus.is_finite()) {
        try {
          rec.c_minus = c_minus_from_m(e, for_minus.value());
        } catch (const InputError& ex) {
          rec.notes.push_back(std::string("c- formula: ") + ex.what());
        }
      }
    } catch (const std::exception& ex) {
      rec.notes.push_back(std::string("m values: ") + ex.what());
    }

    const bool beyond = rec.region == "above_lambda_star";
    for (NehariBranch b : {NehariBranch::Plus, NehariBranch::Minus}) {
      const bool plus = b == NehariBranch::Plus;
      std::string& status = plus ? rec.c_plus_status : rec.c_minus_status;
      if (beyond) {
        status = "not attained above lambda*";
        continue;
      }
      try {
        const SolveResult r = minimize_on_nehari(pi, lambda, b, cfg);
        status = r.status;
        (plus ? rec.c_plus_residual : rec.c_minus_residual) = r.scaled_grad_norm;
        if (r.converged) {
          (plus ? rec.c_plus_direct : rec.c_minus_direct) = r.phi;
        }
      } catch (const Infeasible& ex) {
        status = std::string("infeasible: ") + ex.what();
      } catch (const std::exception& ex) {
        status = std::string("failed: ") + ex.what();
      }
    }
    auto agree = [](const std::optional<double>& c, const std::optional<double>& d) {
      return std::abs(*c - *d) <= 1e-3 * (1.0 + std::abs(*c));
    };
    if ((rec.c_plus && rec.c_plus_direct) || (rec.c_minus && rec.c_minus_direct)) {
      bool ok = true;
      if (rec.c_plus && rec.c_plus_direct) {
        ok = ok && agree(rec.c_plus, rec.c_plus_direct);
      }
      if (rec.c_minus && rec.c_minus_direct) {
        ok = ok && agree(rec.c_minus, rec.c_minus_direct);
      }
      rec.cross_check_ok = ok;
      if (!ok) {
        rec.notes.push_back("formula and direct levels disagree");
      }
    }

    if (rec.region == "at_lambda_star" && zero) {
      rec.zero_energy_phi = zero->phi;
    }
    if (beyond && out.restriction_level) {
      try {
        const SolveResult low = minimize_restricted(pi, lambda, *out.restriction_level, cfg);
        rec.restricted_phi = low.phi;
        rec.restricted_active = low.restriction_active;
        const bool good = low.converged && low.restriction_active && !*low.restriction_active && low.phi < 0.0;
        if (!good) {
          rec.notes.push_back("restricted minimizer: " + low.status);
        }
        if (good && th.lambda_star.equality.witness) {
          const StateVector v = mountain_pass_endpoint(pi, lambda, *ls, *th.lambda_star.equality.witness, low);
          const PathResult path =
              mountain_pass(pi, lambda, low.u, v, {}, zero ? &zero->u : nullptr);
          rec.d_level = path.d_level;
          if (path.refined_critical) {
            rec.mountain_pass_residual = path.refined_critical->scaled_grad_norm;
          }
          if (!path.converged) {
            rec.notes.push_back("mountain pass: " + path.status);
          }
        }
      } catch (const std::exception& ex) {
        rec.notes.push_back(std::string("restricted/mountain pass: ") + ex.what());
      }
    } else if (beyond && !restriction_note.empty()) {
      rec.notes.push_back(restriction_note);
    }
    if (beyond && th.lambda_star.equality.witness) {
      try {
        const ProbeResult pr = probe_unboundedness(pi, lambda, *ls, *th.lambda_star.equality.witness);
        rec.probe_ok = pr.succeeded;
        rec.probe_last_phi = pr.last_phi;
      } catch (const std::exception& ex) {
        rec.notes.push_back(std::string("probe: ") + ex.what());
      }
    }
  });

  if (ls) {
    for (const auto& rec : out.rows) {
      if (rec.region != "above_lambda_star") {
        continue;
      }
      const bool good = rec.restricted_phi && *rec.restricted_phi < 0.0 && rec.restricted_active &&
                        !*rec.restricted_active;
      if (!good) {
        break;
      }
      out.epsilon = rec.lambda - *ls;
    }
  }
  auto decreasing = [](const std::optional<double>& a, const std::optional<double>& b) {
    return !a || !b || *b < *a;
  };
  const BranchSweepRecord* prev = nullptr;
  for (const auto& rec : out.rows) {
    if (rec.region != "window") {
      continue;
    }
    if (prev) {
      auto mv = [](const std::optional<Extended>& x) { return x ? x->as_optional() : std::nullopt; };
      out.window_monotone = out.window_monotone && decreasing(mv(prev->m_plus), mv(rec.m_plus)) &&
                            decreasing(mv(prev->m_minus), mv(rec.m_minus)) &&
                            decreasing(prev->c_plus, rec.c_plus) && decreasing(prev->c_minus, rec.c_minus);
    }
    prev = &rec;
  }
  return out;
}

std::string sweep_csv(const SweepResult& s) {
  std::string out =
      "lambda,region,n_plus_nonempty,n_minus_nonempty,m_plus,m_minus,c_plus,c_minus,c_plus_direct,"
      "c_minus_direct,c_plus_residual,c_minus_residual,cross_check_ok,restricted_phi,restricted_active,"
      "d_level,mountain_pass_residual,probe_ok,probe_last_phi,zero_energy_phi,c_plus_status,c_minus_status,"
      "notes\n";
  auto flag = [](const std::optional<bool>& b) { return b ? std::string(*b ? "1" : "0") : std::string(); };
  auto ext = [](const std::optional<Extended>& x) { return x ? csv_number(*x) : std::string(); };
  for (const auto& r : s.rows) {
    out += csv_number(r.lambda) + "," + r.region + "," + (r.n_plus_nonempty ? "1" : "0") + "," +
           (r.n_minus_nonempty ? "1" : "0") + "," + ext(r.m_plus) + "," + ext(r.m_minus) + "," +
           csv_number(r.c_plus) + "," + csv_number(r.c_minus) + "," + csv_number(r.c_plus_direct) + "," +
           csv_number(r.c_minus_direct) + "," + csv_number(r.c_plus_residual) + "," +
           csv_number(r.c_minus_residual) + "," + flag(r.cross_check_ok) + "," + csv_number(r.restricted_phi) +
           "," + flag(r.restricted_active) + "," + csv_number(r.d_level) + "," +
           csv_number(r.mountain_pass_residual) + "," + flag(r.probe_ok) + "," + csv_number(r.probe_last_phi) +
           "," + csv_number(r.zero_energy_phi) + "," + csv_field(r.c_plus_status) + "," +
           csv_field(r.c_minus_status) + "," + csv_field(join(r.notes)) + "\n";
  }
  return out;
}

Json sweep_json(const ProblemInstance& pi, const SweepResult& s) {
  Json j;
  j["thresholds"] = thresholds_json(pi, s.thresholds);
  j["restriction_level"] = to_json(s.restriction_level);
  j["epsilon"] = to_json(s.epsilon);
  j["window_monotone"] = s.window_monotone;
  Json rows = Json::array();
  for (const auto& r : s.rows) {
    Json x;
    x["lambda"] = r.lambda;
    x["region"] = r.region;
    x["n_plus_nonempty"] = r.n_plus_nonempty;
    x["n_minus_nonempty"] = r.n_minus_nonempty;
    x["m_plus"] = r.m_plus ? to_json(*r.m_plus) : Json(nullptr);
    x["m_minus"] = r.m_minus ? to_json(*r.m_minus) : Json(nullptr);
    x["c_plus"] = to_json(r.c_plus);
    x["c_minus"] = to_json(r.c_minus);
    x["c_plus_direct"] = to_json(r.c_plus_direct);
    x["c_minus_direct"] = to_json(r.c_minus_direct);
    x["c_plus_residual"] = to_json(r.c_plus_residual);
    x["c_minus_residual"] = to_json(r.c_minus_residual);
    x["c_plus_status"] = r.c_plus_status;
    x["c_minus_status"] = r.c_minus_status;
    x["cross_check_ok"] = r.cross_check_ok ? Json(*r.cross_check_ok) : Json(nullptr);
    x["restricted_phi"] = to_json(r.restricted_phi);
    x["restricted_active"] = r.restricted_active ? Json(*r.restricted_active) : Json(nullptr);
    x["d_level"] = to_json(r.d_level);
    x["mountain_pass_residual"] = to_json(r.mountain_pass_residual);
    x["probe_ok"] = r.probe_ok ? Json(*r.probe_ok) : Json(nullptr);
    x["probe_last_phi"] = to_json(r.probe_last_phi);
    x["zero_energy_phi"] = to_json(r.zero_energy_phi);
    x["notes"] = r.notes;
    rows.push_back(std::move(x));
  }
  j["rows"] = std::move(rows);
  return j;
}

std::string bifurcation_svg(const SweepResult& s) {
  PlotSpec spec;
  spec.title = "Branch levels";
  spec.x_label = "lambda";
  spec.y_label = "energy";
  Series cp{"c+ (m formula)", "#1f4e9c", {}, {}};
  Series cm{"c- (m formula)", "#b8322a", {}, {}};
  Series dp{"c+ direct", "#1f4e9c", {}, {}, true};
  Series dm{"c- direct", "#b8322a", {}, {}, true};
  Series rp{"restricted min", "#2a8a3e", {}, {}, true};
  Series dl{"mountain pass", "#8a5a00", {}, {}, true};
  for (const auto& r : s.rows) {
    for (Series* se : {&cp, &cm, &dp, &dm, &rp, &dl}) {
      se->x.push_back(r.lambda);
    }
    cp.y.push_back(r.c_plus);
    cm.y.push_back(r.c_minus);
    dp.y.push_back(r.c_plus_direct);
    dm.y.push_back(r.c_minus_direct);
    rp.y.push_back(r.restricted_phi);
    dl.y.push_back(r.d_level);
  }
  spec.series = {cp, cm, dp, dm, rp, dl};
  const auto& th = s.thresholds;
  if (auto v = th.lambda1.value.as_optional()) {
    spec.markers.push_back({"lambda_1", *v, "#777777"});
  }
  if (auto v = th.mu_star.value.as_optional()) {
    spec.markers.push_back({"mu_*", *v, "#444444"});
  }
  if (auto v = th.lambda_star.value().as_optional()) {
    spec.markers.push_back({"lambda*", *v, "#000000"});
    if (s.epsilon) {
      spec.markers.push_back({"lambda*+eps", *v + *s.epsilon, "#2a8a3e"});
    }
  }
  return line_plot(spec);
}

int cmd_thresholds(const RunConfig& cfg, std::ostream& log) {
  const Context c = prepare(cfg);
  write_outputs(cfg, "thresholds.json", dump_json(thresholds_json(c.pi, c.th)));
  log << "lambda_1 = " << csv_number(c.th.lambda1.value) << "\n"
      << "mu_*     = " << csv_number(c.th.mu_star.value) << "\n"
      << "mu^*     = " << csv_number(c.th.mu_upper_star.value) << "\n"
      << "lambda*  = " << csv_number(c.th.lambda_star.value()) << "\n";
  if (cfg.strict && any_sentinel(c.th)) {
    log << "sentinel threshold under --strict\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.lambda) {
    throw ParseError("solve needs --lambda");
  }
  validate(cfg);
  const ProblemFile pf = load_problem(cfg);
  const ProblemInstance pi = instantiate(pf);
  const double lambda = *cfg.lambda;
  SolveResult r;
  std::string tag = cfg.branch;
  try {
    if (cfg.mu) {
      if (cfg.branch != "plus") {
        throw ParseError("--mu restricts N^+; use --branch plus");
      }
      r = minimize_restricted(pi, lambda, *cfg.mu, pf.solver);
      tag = "restricted";
    } else {
      r = minimize_on_nehari(pi, lambda, cfg.branch == "plus" ? NehariBranch::Plus : NehariBranch::Minus,
                             pf.solver);
    }
  } catch (const Infeasible& ex) {
    log << ex.what() << "\n";
    return kExitInfeasible;
  }
  const std::string stem = "solution_" + lambda_tag(lambda) + "_" + tag;
  Json j = state_summary(r);
  j["lambda"] = lambda;
  if (cfg.emit_csv) {
    write_outputs(cfg, stem + ".csv", solution_csv(pi, r.u.coeffs));
  }
  if (cfg.emit_json) {
    write_outputs(cfg, stem + ".json", dump_json(j));
  }
  if (cfg.emit_svg) {
    write_outputs(cfg, stem + ".svg", profile_svg(pi, r.u.coeffs, "lambda = " + lambda_tag(lambda) + ", " + tag));
  }
  log << to_string(r.branch) << " phi = " << csv_number(r.phi) << " (" << r.status << ")\n";
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  validate(cfg);
  const ProblemFile pf = load_problem(cfg);
  const ProblemInstance pi = instantiate(pf);
  std::vector<double> lambdas;
  if (cfg.grid) {
    lambdas = cfg.grid->values();
  } else if (cfg.lambda) {
    lambdas = {*cfg.lambda};
  }
  if (lambdas.empty()) {
    // Default: 20 interior points of (mu_*, lambda*).
    const ThresholdReport th = compute_thresholds(pi, pf.thresholds);
    const auto ms = th.mu_star.value.as_optional();
    const auto ls = th.lambda_star.value().as_optional();
    if (!ms || !ls || !(*ms < *ls)) {
      throw ParseError("no --lambda-grid given and (mu_*, lambda*) is not a bounded interval");
    }
    for (int k = 1; k <= 20; ++k) {
      lambdas.push_back(*ms + (*ls - *ms) * k / 21.0);
    }
  }
  const SweepResult s = run_sweep(pi, pf, lambdas, cfg.workers);
  write_outputs(cfg, "thresholds.json", dump_json(thresholds_json(pi, s.thresholds)));
  if (cfg.emit_csv) {
    write_outputs(cfg, "sweep.csv", sweep_csv(s));
  }
  if (cfg.emit_json) {
    write_outputs(cfg, "sweep.json", dump_json(sweep_json(pi, s)));
  }
  if (cfg.emit_svg) {
    write_outputs(cfg, "bifurcation.svg", bifurcation_svg(s));
  }
  log << s.rows.size() << " rows; window monotone: " << (s.window_monotone ? "yes" : "no")
      << "; epsilon: " << (s.epsilon ? csv_number(*s.epsilon) : std::string("n/a")) << "\n";
  if (cfg.strict && any_sentinel(s.thresholds)) {
    log << "sentinel threshold under --strict\n";
    return kExitInfeasible;
  }
  return kExitOk;
}

int cmd_mountain_pass(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.lambda) {
    throw ParseError("mountain-pass needs --lambda");
  }
  const Context c = prepare(cfg);
  const auto ms = c.th.mu_star.value.as_optional();
  const auto ls = c.th.lambda_star.value().as_optional();
  const double lambda = *cfg.lambda;
  if (!ms || !ls || !c.th.lambda_star.equality.witness) {
    log << "mountain pass needs finite mu_* and lambda* with a witness\n";
    return kExitInfeasible;
  }
  if (!(lambda > *ls)) {
    log << "mountain pass needs lambda > lambda* = " << csv_number(*ls) << "\n";
    return kExitInfeasible;
  }
  const double mu = cfg.mu ? *cfg.mu : default_restriction_level(c.pi, *ms, *ls, c.pf.solver);
  SolveResult low;
  try {
    low = minimize_restricted(c.pi, lambda, mu, c.pf.solver);
  } catch (const Infeasible& ex) {
    log << ex.what() << "\n";
    return kExitInfeasible;
  }
  const auto zero = zero_energy_point(c.pi, c.th.lambda_star.equality);
  const StateVector v = mountain_pass_endpoint(c.pi, lambda, *ls, *c.th.lambda_star.equality.witness, low);
  MountainPassOptions mo;
  mo.workers = cfg.workers;
  const PathResult path = mountain_pass(c.pi, lambda, low.u, v, mo, zero ? &zero->u : nullptr);

  Json j;
  j["lambda"] = lambda;
  j["mu"] = mu;
  j["low"] = state_summary(low);
  j["d_level"] = path.d_level;
  j["phi_low"] = path.phi_low;
  j["phi_high"] = path.phi_high;
  j["argmax"] = path.argmax;
  j["converged"] = path.converged;
  j["iterations"] = path.iterations;
  j["status"] = path.status;
  j["energies"] = path.energies;
  j["refined_critical"] = path.refined_critical ? state_summary(*path.refined_critical) : Json(nullptr);
  j["tangent_curvature"] = to_json(path.tangent_curvature);
  j["distance_to_low"] = to_json(path.distance_to_low);
  j["distance_to_zero_energy"] = to_json(path.distance_to_zero_energy);
  j["level_mismatch"] = path.level_mismatch;
  const std::string stem = "mountain_pass_" + lambda_tag(lambda);
  if (cfg.emit_json) {
    write_outputs(cfg, stem + ".json", dump_json(j));
  }
  const Vector& crit = path.refined_critical ? path.refined_critical->u.coeffs : path.argmax_state.coeffs;
  if (cfg.emit_csv) {
    write_outputs(cfg, stem + ".csv", solution_csv(c.pi, crit));
  }
  if (cfg.emit_svg) {
    write_outputs(cfg, stem + ".svg", profile_svg(c.pi, crit, "mountain pass, lambda = " + lambda_tag(lambda)));
  }
  log << "d_level = " << csv_number(path.d_level) << " > Phi(u_low) = " << csv_number(low.phi) << " ("
      << path.status << ")\n";
  return kExitOk;
}

int cmd_verify_with(const RunConfig& cfg, const CoarseFactory& factory, std::ostream& log) {
  validate(cfg);
  const ProblemFile pf = load_problem(cfg);
  const ProblemInstance pi = instantiate(pf);
  const ProblemInstance coarse = instantiate_coarse(pf);
  std::unique_ptr<DoubleHomogeneousFunctional> wrapped;
  if (factory) {
    wrapped = factory(coarse);
  }
  AuditOptions opt;
  opt.seed = cfg.seed;
  opt.workers = cfg.workers;
  const AuditReport rep =
      run_audits(pi, wrapped ? *wrapped : static_cast<const DoubleHomogeneousFunctional&>(coarse), coarse,
                 pf.solver, pf.thresholds, opt);
  Json j;
  j["passed"] = rep.passed();
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    Json x;
    x["name"] = c.name;
    x["passed"] = c.passed;
    x["error"] = std::isfinite(c.error) ? Json(c.error) : Json("inf");
    x["tolerance"] = c.tolerance;
    x["detail"] = c.detail;
    checks.push_back(std::move(x));
    log << (c.passed ? "PASS " : "FAIL ") << c.name << "\n";
  }
  j["checks"] = std::move(checks);
  write_outputs(cfg, "audit.json", dump_json(j));
  if (const auto f = rep.first_failure()) {
    log << "audit failed: " << *f << "\n";
    return kExitAudit;
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) { return cmd_verify_with(cfg, nullptr, log); }

int run(const RunConfig& cfg, std::ostream& log) {
  try {
    if (cfg.command == "thresholds") {
      return cmd_thresholds(cfg, log);
    }
    if (cfg.command == "solve") {
      return cmd_solve(cfg, log);
    }
    if (cfg.command == "sweep") {
      return cmd_sweep(cfg, log);
    }
    if (cfg.command == "mountain-pass") {
      return cmd_mountain_pass(cfg, log);
    }
    if (cfg.command == "verify") {
      return cmd_verify(cfg, log);
    }
    throw ParseError("unknown command '" + cfg.command + "'");
  } catch (const ParseError& ex) {
    log << "error: " << ex.what() << "\n";
    return kExitParse;
  } catch (const InputError& ex) {
    log << "error: " << ex.what() << "\n";
    return kExitParse;
  } catch (const Infeasible& ex) {
    log << ex.what() << "\n";
    return kExitInfeasible;
  } catch (const SolverError& ex) {
    log << "solver: " << ex.what() << "\n";
    return kExitInfeasible;
  }
}

}  // namespace nehari::cli
