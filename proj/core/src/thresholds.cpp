#include "nehari/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nehari/errors.hpp"

namespace nehari {

namespace {

ScalarField p1_field(const ProblemInstance& pi) {
  return {[&pi](const Vector& x, Vector* grad) {
            if (!grad) {
              return pi.triple(x).p1;
            }
            TripleGradient g;
            const double v = pi.triple(x, g).p1;
            *grad = std::move(g.p1);
            return v;
          },
          pi.exponents().p()};
}

ScalarField p2_field(const ProblemInstance& pi) {
  return {[&pi](const Vector& x, Vector* grad) {
            if (!grad) {
              return pi.triple(x).p2;
            }
            TripleGradient g;
            const double v = pi.triple(x, g).p2;
            *grad = std::move(g.p2);
            return v;
          },
          pi.exponents().p()};
}

ScalarField f_field(const ProblemInstance& pi, double sign = 1.0) {
  return {[&pi, sign](const Vector& x, Vector* grad) {
            if (!grad) {
              return sign * pi.triple(x).f;
            }
            TripleGradient g;
            const double v = pi.triple(x, g).f;
            *grad = sign * g.f;
            return sign * v;
          },
          pi.exponents().gamma()};
}

ScalarField h_field(const ProblemInstance& pi, double lambda) {
  return {[&pi, lambda](const Vector& x, Vector* grad) {
            if (!grad) {
              const EvaluatedTriple t = pi.triple(x);
              return t.p1 - lambda * t.p2;
            }
            TripleGradient g;
            const EvaluatedTriple t = pi.triple(x, g);
            *grad = g.p1 - lambda * g.p2;
            return t.p1 - lambda * t.p2;
          },
          pi.exponents().p()};
}

ScalarField gradient_energy_field(const Mesh& mesh, double r, double power = 1.0, double scale = 1.0) {
  return {[&mesh, r, power, scale](const Vector& x, Vector* grad) {
            const double e = assemble_gradient_energy(mesh, x, r, grad);
            if (power == 1.0) {
              if (grad) {
                *grad *= scale;
              }
              return scale * e;
            }
            if (grad) {
              *grad *= scale * power * std::pow(e, power - 1.0);
            }
            return scale * std::pow(e, power);
          },
          r * power};
}

ScalarField positive_part_field(const Mesh& mesh, std::vector<double> coeff, double r) {
  return {[&mesh, coeff = std::move(coeff), r](const Vector& x, Vector* grad) {
            return assemble_weighted_positive_part(mesh, coeff, x, r, grad);
          },
          r};
}

ThresholdValue from_quotient(const ProblemInstance& pi, const QuotientResult& q) {
  ThresholdValue tv;
  if (!q.feasible) {
    tv.value = Extended::plus_infinity(q.status);
    tv.diagnostic = q.status;
    return tv;
  }
  tv.value = Extended::finite(q.value);
  tv.witness = pi.state(q.x);
  tv.residual = q.grad_norm;
  tv.constraint_residual = q.constraint_value;
  tv.converged = q.converged;
  tv.diagnostic = q.status;
  return tv;
}

struct SignCensus {
  bool positive = false;
  bool negative = false;
  bool zero = false;
};

// Signs of F over seeds with P2 > 0.
SignCensus census(const ProblemInstance& pi, const std::vector<Vector>& seeds, double fs) {
  SignCensus c;
  const double g = pi.exponents().gamma();
  for (const Vector& s : seeds) {
    const EvaluatedTriple t = pi.triple(s);
    if (!(t.p2 > 0.0)) {
      continue;
    }
    const double fn = t.f / std::pow(pi.metric().norm(s), g) / fs;
    if (fn > 1e-12) {
      c.positive = true;
    } else if (fn < -1e-12) {
      c.negative = true;
    } else {
      c.zero = true;
    }
  }
  return c;
}

Vector bubble(const ProblemInstance& pi) {
  const Mesh& m = pi.mesh();
  if (m.boundary_condition() == BoundaryCondition::Neumann) {
    return Vector::Ones(m.dof_count());
  }
  const double w = m.width();
  const double h = m.height();
  const int dim = m.dimension();
  return m.interpolate([&](const Point& p) {
    const double sx = std::sin(std::numbers::pi * p.x / w);
    return dim == 1 ? sx : sx * std::sin(std::numbers::pi * p.y / h);
  });
}

Vector nodal_mask(const ProblemInstance& pi, int sign) {
  const Mesh& m = pi.mesh();
  const auto& nodal = pi.weight().nodal;
  const auto& dn = m.dof_nodes();
  Vector v(m.dof_count());
  for (std::size_t k = 0; k < dn.size(); ++k) {
    const double c = nodal[static_cast<std::size_t>(dn[k])];
    const bool hit = sign > 0   ? c > kWeightZeroTolerance
                     : sign < 0 ? c < -kWeightZeroTolerance
                                : std::abs(c) <= kWeightZeroTolerance;
    v[static_cast<Eigen::Index>(k)] = hit ? 1.0 : 0.0;
  }
  return v;
}

std::optional<double> scaled_f(const ProblemInstance& pi, const Vector& x, double fs) {
  const double n = pi.metric().norm(x);
  if (!(n > 0.0)) {
    return std::nullopt;
  }
  return pi.triple(x).f / std::pow(n, pi.exponents().gamma()) / fs;
}

}  // namespace

std::vector<Vector> threshold_seeds(const ProblemInstance& pi, const Vector* phi1,
                                    const ThresholdOptions& opt) {
  std::vector<Vector> out;
  auto push = [&](Vector v) {
    if (v.allFinite() && v.norm() > 0.0) {
      out.push_back(std::move(v));
    }
  };
  const Vector b = bubble(pi);
  push(b);
  if (phi1) {
    push(*phi1);
  }
  const Vector plus = nodal_mask(pi, 1);
  const Vector minus = nodal_mask(pi, -1);
  const Vector zero = nodal_mask(pi, 0);
  for (const Vector* mask : {&plus, &minus, &zero}) {
    if (mask->sum() > 0.0 && mask->sum() < static_cast<double>(mask->size())) {
      push(b.cwiseProduct(*mask));
    }
  }
  const Vector& base = phi1 ? *phi1 : b;
  for (double s : {0.5, 0.25, 0.1, -0.5, -1.0}) {
    push(base.cwiseProduct(plus + s * minus + 0.5 * zero));
    push(base.cwiseProduct(s * plus + minus + 0.5 * zero));
  }
  push(-b);
  // Directions extremizing F on the metric sphere expose thin sign sets.
  const std::vector<Vector> structured = out;
  QuotientOptions qo = opt.quotient;
  qo.lbfgs.max_iter = 200;
  for (double sign : {1.0, -1.0}) {
    QuotientProblem qp;
    qp.numerator = f_field(pi, -sign);
    qp.denominator = metric_power(pi.metric(), pi.exponents().gamma());
    const QuotientResult q = minimize_quotient(qp, structured, pi.metric(), qo);
    if (q.feasible) {
      push(q.x);
    }
  }
  for (auto& r : random_seeds(pi.metric(), opt.random_seeds, opt.rng_seed)) {
    push(std::move(r));
  }
  return out;
}

double f_scale(const ProblemInstance& pi, const std::vector<Vector>& seeds) {
  double best = 0.0;
  const double g = pi.exponents().gamma();
  for (const Vector& s : seeds) {
    const double n = pi.metric().norm(s);
    if (n > 0.0) {
      best = std::max(best, pi.magnitudes(s).f / std::pow(n, g));
    }
  }
  return best > 0.0 ? best : 1.0;
}

ThresholdValue compute_lambda1(const ProblemInstance& pi, const ThresholdOptions& opt) {
  QuotientProblem qp;
  qp.numerator = p1_field(pi);
  qp.denominator = p2_field(pi);
  const auto seeds = threshold_seeds(pi, nullptr, opt);
  QuotientOptions qo = opt.quotient;
  qo.workers = opt.workers;
  ThresholdValue tv = from_quotient(pi, minimize_quotient(qp, seeds, pi.metric(), qo));
  if (!tv.value.is_finite()) {
    tv.value = Extended::plus_infinity("P2 vanishes on every seed");
  }
  return tv;
}

ThresholdValue compute_mu_star(const ProblemInstance& pi, const ThresholdOptions& opt,
                               const Vector* phi1) {
  const auto seeds = threshold_seeds(pi, phi1, opt);
  const double fs = f_scale(pi, seeds);
  if (!census(pi, seeds, fs).negative) {
    ThresholdValue tv;
    tv.value = Extended::plus_infinity("no state with F < 0 and P2 > 0 was found");
    tv.diagnostic = tv.value.reason();
    return tv;
  }
  QuotientProblem qp;
  qp.numerator = p1_field(pi);
  qp.denominator = p2_field(pi);
  qp.constraint = {ConstraintKind::NonNegative, f_field(pi, -1.0), fs};
  QuotientOptions qo = opt.quotient;
  qo.workers = opt.workers;
  return from_quotient(pi, minimize_quotient(qp, seeds, pi.metric(), qo));
}

ThresholdValue compute_mu_upper_star(const ProblemInstance& pi, const ThresholdOptions& opt,
                                     const Vector* phi1) {
  const auto seeds = threshold_seeds(pi, phi1, opt);
  const double fs = f_scale(pi, seeds);
  ThresholdValue tv;
  if (!census(pi, seeds, fs).positive) {
    tv.value = Extended::minus_infinity("no state with F > 0 and P2 > 0 was found");
    tv.diagnostic = tv.value.reason();
    return tv;
  }
  // sup P1/P2 = 1 / inf P2/P1 on the open set F > 0.
  QuotientProblem qp;
  qp.numerator = p2_field(pi);
  qp.denominator = p1_field(pi);
  qp.feasible = [&pi](const Vector& x) {
    const EvaluatedTriple t = pi.triple(x);
    return t.f > 0.0 && t.p2 > 0.0;
  };
  QuotientOptions qo = opt.quotient;
  qo.workers = opt.workers;
  const QuotientResult q = minimize_quotient(qp, seeds, pi.metric(), qo);
  if (!q.feasible) {
    tv.value = Extended::minus_infinity("F > 0 infeasible");
    return tv;
  }
  double reference = 0.0;
  for (const Vector& s : seeds) {
    const EvaluatedTriple t = pi.triple(s);
    if (t.f > 0.0 && t.p1 > 0.0) {
      reference = std::max(reference, t.p2 / t.p1);
    }
  }
  tv.witness = pi.state(q.x);
  tv.residual = q.grad_norm;
  if (q.value <= 1e-8 * reference) {
    tv.value = Extended::plus_infinity("P1/P2 is unbounded above on F > 0");
    tv.converged = true;
    tv.diagnostic = "inf P2/P1 = " + std::to_string(q.value) + " relative to seed scale " +
                    std::to_string(reference);
    return tv;
  }
  tv.value = Extended::finite(1.0 / q.value);
  tv.converged = q.converged;
  tv.diagnostic = q.status;
  return tv;
}

ThresholdValue compute_sigma(const ProblemInstance& pi, double lambda, const ThresholdOptions& opt,
                             const std::vector<Vector>& seeds) {
  QuotientProblem qp;
  qp.numerator = h_field(pi, lambda);
  qp.denominator = metric_power(pi.metric(), pi.exponents().p());
  qp.constraint = {ConstraintKind::NonNegative, f_field(pi), f_scale(pi, seeds)};
  QuotientOptions qo = opt.quotient;
  qo.workers = opt.workers;
  return from_quotient(pi, minimize_quotient(qp, seeds, pi.metric(), qo));
}

LambdaStarResult compute_lambda_star(const ProblemInstance& pi, const ThresholdOptions& opt,
                                     const Vector* phi1, std::optional<double> lambda1) {
  LambdaStarResult out;
  std::vector<Vector> seeds = threshold_seeds(pi, phi1, opt);
  const double fs = f_scale(pi, seeds);
  const SignCensus c = census(pi, seeds, fs);
  if (!(c.zero || (c.positive && c.negative))) {
    const std::string why = "F = 0 with P2 > 0 is infeasible (F keeps one strict sign)";
    out.bisection.value = Extended::plus_infinity(why);
    out.bisection.diagnostic = why;
    out.equality.value = Extended::plus_infinity(why);
    out.equality.diagnostic = why;
    return out;
  }
  double lam1 = 0.0;
  if (lambda1) {
    lam1 = *lambda1;
  } else {
    const ThresholdValue l1 = compute_lambda1(pi, opt);
    lam1 = l1.value.is_finite() ? l1.value.value() : 0.0;
  }

  // Bracket: sigma(lambda_1) >= 0 by definition of lambda_1.
  double lo = lam1;
  double delta = 0.25 * std::max(1.0, std::abs(lam1));
  double hi = lo + delta;
  std::optional<ThresholdValue> neg;
  std::vector<Vector> warm;
  auto sigma = [&](double lambda) {
    std::vector<Vector> s = warm;
    s.insert(s.end(), seeds.begin(), seeds.end());
    ++out.bisection_steps;
    return compute_sigma(pi, lambda, opt, s);
  };
  while (true) {
    ThresholdValue s = sigma(hi);
    if (s.value.is_finite() && s.value.value() < 0.0) {
      neg = s;
      warm = {s.witness->coeffs};
      break;
    }
    lo = hi;
    delta *= 2.0;
    if (delta > opt.bracket_cap) {
      const std::string why = "sigma(lambda) stayed nonnegative up to lambda_1 + " +
                              std::to_string(opt.bracket_cap);
      out.bisection.value = Extended::plus_infinity(why);
      out.bisection.diagnostic = why;
      out.bracket_lo = lo;
      out.bracket_hi = hi;
      break;
    }
    hi = lam1 + delta;
  }

  if (neg) {
    while (hi - lo > opt.bisection_tol * (1.0 + std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      ThresholdValue s = sigma(mid);
      if (s.value.is_finite() && s.value.value() < 0.0) {
        hi = mid;
        neg = s;
        warm = {s.witness->coeffs};
      } else {
        lo = mid;
      }
    }
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    out.bisection = *neg;
    out.bisection.value = Extended::finite(0.5 * (lo + hi));
    out.bisection.diagnostic = "bracket width " + std::to_string(hi - lo);
  }

  // Independent cross-check on the equality-constrained set.
  QuotientProblem qp;
  qp.numerator = p1_field(pi);
  qp.denominator = p2_field(pi);
  qp.constraint = {ConstraintKind::Equality, f_field(pi), fs};
  QuotientOptions qo = opt.quotient;
  qo.workers = opt.workers;
  std::vector<Vector> eq_seeds = warm;
  eq_seeds.insert(eq_seeds.end(), seeds.begin(), seeds.end());
  out.equality = from_quotient(pi, minimize_quotient(qp, eq_seeds, pi.metric(), qo));
  return out;
}

MValues compute_m_pm(const ProblemInstance& pi, double lambda, const ThresholdOptions& opt,
                     const Vector* phi1) {
  const auto seeds = threshold_seeds(pi, phi1, opt);
  const double fs = f_scale(pi, seeds);
  const double p = pi.exponents().p();
  const double g = pi.exponents().gamma();
  QuotientOptions qo = opt.quotient;
  qo.workers = opt.workers;

  auto one = [&](double sign) {
    ThresholdValue tv;
    QuotientProblem qp;
    qp.numerator = h_field(pi, lambda);
    qp.denominator = f_field(pi, sign);
    qp.power = p / g;
    qp.feasible = [&pi, sign](const Vector& x) { return sign * pi.triple(x).f > 0.0; };
    const QuotientResult q = minimize_quotient(qp, seeds, pi.metric(), qo);
    if (!q.feasible) {
      tv.value = Extended::plus_infinity(sign > 0 ? "F > 0 infeasible" : "F < 0 infeasible");
      tv.diagnostic = tv.value.reason();
      return tv;
    }
    tv = from_quotient(pi, q);
    // A negative quotient driven onto F = 0 is unbounded below.
    const auto fn = scaled_f(pi, q.x, fs);
    if (q.value < 0.0 && fn && std::abs(*fn) < 1e-6) {
      tv.value = Extended::minus_infinity("H < 0 on the boundary F = 0: unbounded below");
      tv.diagnostic = tv.value.reason();
      return tv;
    }
    const double fv = std::abs(pi.triple(q.x).f);
    tv.witness = pi.state(q.x / std::pow(fv, 1.0 / g));
    return tv;
  };
  return {one(1.0), one(-1.0)};
}

double c_plus_from_m(const Exponents& e, double m) {
  const double p = e.p();
  const double g = e.gamma();
  const double k = g / (g - p);
  if (e.superhomogeneous()) {
    if (!(m < 0.0)) {
      throw InputError("c+ needs m- < 0 when gamma > p");
    }
    return (p - g) / (p * g) * std::pow(-m, k);
  }
  if (!(m > 0.0)) {
    throw InputError("c+ needs m+ > 0 when gamma < p");
  }
  return (g - p) / (p * g) * std::pow(m, k);
}

double c_minus_from_m(const Exponents& e, double m) {
  const double p = e.p();
  const double g = e.gamma();
  const double k = g / (g - p);
  if (e.superhomogeneous()) {
    if (!(m > 0.0)) {
      throw InputError("c- needs m+ > 0 when gamma > p");
    }
    return (g - p) / (p * g) * std::pow(m, k);
  }
  if (!(m < 0.0)) {
    throw InputError("c- needs m- < 0 when gamma < p");
  }
  return (p - g) / (p * g) * std::pow(-m, k);
}

CValues c_from_m(const Exponents& e, double m_plus, double m_minus) {
  if (!(m_plus > 0.0) || !(m_minus < 0.0)) {
    throw InputError("c_from_m needs m+ > 0 > m-");
  }
  if (e.superhomogeneous()) {
    return {c_plus_from_m(e, m_minus), c_minus_from_m(e, m_plus)};
  }
  return {c_plus_from_m(e, m_plus), c_minus_from_m(e, m_minus)};
}

ConditionDiagnostics check_conditions(const ProblemInstance& pi, const ThresholdReport& report,
                                      const ThresholdOptions& opt) {
  const ThresholdValue& eq = report.lambda_star.equality;
  const ThresholdValue& bis = report.lambda_star.bisection;
  const ThresholdValue& src = eq.witness ? eq : bis;
  if (!src.witness || !bis.value.is_finite()) {
    throw InputError("condition checks need a finite lambda* with a witness");
  }
  ConditionDiagnostics d;
  const double lam = bis.value.value();
  if (eq.value.is_finite()) {
    d.h1_gap = std::abs(eq.value.value() - lam);
    d.h1_holds = d.h1_gap <= opt.h1_tol * (1.0 + std::abs(lam));
  }
  const Vector& u = src.witness->coeffs;
  const Metric& k = pi.metric();
  const double p = pi.exponents().p();
  const double g = pi.exponents().gamma();
  Vector gh;
  Vector gf;
  h_and_f_gradients(pi, lam, u, gh, gf);
  d.grad_f_norm = k.dual_norm(gf);
  d.grad_h_norm = k.dual_norm(gh);
  // Scale-aware cutoffs: gradients of degree-r terms scale like ||u||^{r-1}.
  const double nu = pi.norm(u);
  const double f_ref = std::pow(nu, g - 1.0);
  const double h_ref = std::pow(nu, p - 1.0);
  d.c1_ok = d.grad_f_norm > opt.gradient_tol * f_ref;
  d.c2_ok = d.grad_h_norm > opt.gradient_tol * h_ref;

  const bool indefinite =
      pi.family() == Family::IndefiniteDirichlet || pi.family() == Family::IndefiniteNeumann;
  if (indefinite && report.lambda1.witness) {
    Vector phi = report.lambda1.witness->coeffs;
    phi /= phi.cwiseAbs().maxCoeff();
    d.int_f_phi1_gamma = pi.triple(phi).f;
  }
  if (indefinite && pi.weight().has_zero_set()) {
    const Mesh sub = pi.mesh().subdomain(pi.weight().omega0);
    if (sub.dof_count() == 0) {
      d.lambda1_omega0 = Extended::plus_infinity("int(Omega^0) has no interior nodes");
    } else {
      const ProblemInstance inner = instantiate_indefinite(
          std::make_shared<const Mesh>(sub), p, g, WeightSpec::constant(0.0));
      d.lambda1_omega0 = compute_lambda1(inner, opt).value;
    }
    d.f0_ok = !d.lambda1_omega0->is_finite() || lam < d.lambda1_omega0->value();
  }
  return d;
}

ApplicationEigenlevels compute_application_eigenlevels(const ProblemInstance& pi,
                                                       const ThresholdOptions& opt,
                                                       const Vector* phi1) {
  if (pi.family() != Family::PQLaplacian && pi.family() != Family::Kirchhoff) {
    throw InputError("application eigenlevels exist for the (p,q) and Kirchhoff families only");
  }
  ApplicationEigenlevels out;
  const Mesh& mesh = pi.mesh();
  const auto seeds = threshold_seeds(pi, phi1, opt);
  QuotientOptions qo = opt.quotient;
  qo.workers = opt.workers;
  auto solve = [&](ScalarField num, ScalarField den, const std::string& empty) {
    QuotientProblem qp;
    qp.numerator = std::move(num);
    qp.denominator = std::move(den);
    const QuotientResult q = minimize_quotient(qp, seeds, pi.metric(), qo);
    return q.feasible ? Extended::finite(q.value) : Extended::plus_infinity(empty);
  };
  Vector phi;
  if (phi1) {
    phi = *phi1;
  } else {
    const ThresholdValue l1 = compute_lambda1(pi, opt);
    if (l1.witness) {
      phi = l1.witness->coeffs;
    }
  }
  const std::vector<double> ones(mesh.node_count(), 1.0);
  const bool constant_beta = pi.weight_spec().is_constant();
  const double beta0 = pi.weight().element.front();

  if (pi.family() == Family::PQLaplacian) {
    const double q = pi.q();
    const Extended lbq = solve(gradient_energy_field(mesh, q),
                               positive_part_field(mesh, pi.weight().nodal, q),
                               "beta vanishes on every seed");
    const Extended lq = solve(gradient_energy_field(mesh, q), positive_part_field(mesh, ones, q),
                              "no seed with positive part");
    out.values.emplace("lambda1_beta_q", lbq);
    out.values.emplace("lambda1_q", lq);
    out.f_takes_positive = lbq.is_finite() && lbq.value() < 1.0;
    if (phi.size() > 0) {
      const Vector ph = phi.cwiseMax(0.0);
      const double bs = assemble_gradient_energy(mesh, ph, q) /
                        assemble_weighted_positive_part(mesh, ones, ph, q);
      out.values.emplace("beta_star", Extended::finite(bs));
      if (constant_beta && lq.is_finite()) {
        out.window_lower = lq.value();
        out.window_upper = bs;
        out.beta_in_window = beta0 > lq.value() && beta0 < bs;
      }
    }
  } else {
    const double b = pi.b();
    const Extended mu1 = solve(gradient_energy_field(mesh, 2.0, 2.0),
                               positive_part_field(mesh, ones, 4.0), "no seed with positive part");
    const Extended lb = solve(gradient_energy_field(mesh, 2.0, 2.0, b),
                              positive_part_field(mesh, pi.weight().nodal, 4.0),
                              "beta vanishes on every seed");
    out.values.emplace("mu1", mu1);
    out.values.emplace("lambda1_beta", lb);
    out.f_takes_positive = lb.is_finite() && lb.value() < 1.0;
    if (phi.size() > 0) {
      const Vector ph = phi.cwiseMax(0.0);
      const double e2 = assemble_gradient_energy(mesh, ph, 2.0);
      const double bs = b * e2 * e2 / assemble_weighted_positive_part(mesh, ones, ph, 4.0);
      out.values.emplace("beta_star", Extended::finite(bs));
      if (constant_beta && mu1.is_finite()) {
        out.window_lower = b * mu1.value();
        out.window_upper = bs;
        out.beta_in_window = beta0 > b * mu1.value() && beta0 < bs;
      }
    }
  }
  return out;
}

ThresholdReport compute_thresholds(const ProblemInstance& pi, const ThresholdOptions& opt) {
  ThresholdReport r;
  r.lambda1 = compute_lambda1(pi, opt);
  const Vector* phi1 = r.lambda1.witness ? &r.lambda1.witness->coeffs : nullptr;
  r.mu_star = compute_mu_star(pi, opt, phi1);
  r.mu_upper_star = compute_mu_upper_star(pi, opt, phi1);
  r.lambda_star = compute_lambda_star(pi, opt, phi1, r.lambda1.value.as_optional());
  for (const ThresholdValue* tv : {&r.lambda1, &r.mu_star, &r.mu_upper_star, &r.lambda_star.bisection}) {
    if (!tv->value.is_finite()) {
      r.notes.push_back(tv->value.reason());
    }
  }
  if (r.lambda_star.value().is_finite() &&
      (r.lambda_star.equality.witness || r.lambda_star.bisection.witness)) {
    r.diagnostics = check_conditions(pi, r, opt);
  }
  if (pi.family() == Family::PQLaplacian || pi.family() == Family::Kirchhoff) {
    r.eigenlevels = compute_application_eigenlevels(pi, opt, phi1);
  }
  return r;
}

std::optional<ZeroEnergyPoint> zero_energy_point(const ProblemInstance& pi,
                                                 const ThresholdValue& lambda_star_eq) {
  if (!lambda_star_eq.witness || !lambda_star_eq.value.is_finite()) {
    return std::nullopt;
  }
  const Vector& u = lambda_star_eq.witness->coeffs;
  const Metric& k = pi.metric();
  const double p = pi.exponents().p();
  const double g = pi.exponents().gamma();
  const EvaluatedTriple t0 = pi.triple(u);
  ZeroEnergyPoint z;
  z.lambda = t0.p1 / t0.p2;
  Vector gh;
  Vector gf;
  const EvaluatedTriple t = h_and_f_gradients(pi, z.lambda, u, gh, gf);
  const Vector kf = k.solve(gf);
  const double ff = gf.dot(kf);
  if (!(ff > 0.0)) {
    return std::nullopt;
  }
  z.alpha = gh.dot(kf) / (t.p2 * ff);
  const double base = g * z.alpha * t.p2 / p;
  if (!(base > 0.0)) {
    return std::nullopt;
  }
  z.t = std::pow(base, 1.0 / (g - p));
  z.u = pi.state(z.t * u);
  Vector grad;
  z.phi = phi_at(pi, z.lambda, z.u.coeffs, grad).phi;
  z.grad_norm = k.dual_norm(grad);
  z.scaled_grad_norm = z.grad_norm / (1.0 + std::pow(k.norm(z.u.coeffs), std::max(p, g) - 1.0));
  return z;
}

}  // namespace nehari
