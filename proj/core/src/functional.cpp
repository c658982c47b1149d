#include "nehari/functional.hpp"

#include <algorithm>
#include <cmath>

#include "nehari/errors.hpp"

namespace nehari {

Exponents::Exponents(double p, double gamma) : p_(p), gamma_(gamma) {
  if (!std::isfinite(p) || !std::isfinite(gamma)) {
    throw InputError("exponents must be finite");
  }
  if (p <= 1.0 || gamma <= 1.0) {
    throw InputError("exponents require p > 1 and gamma > 1");
  }
  if (gamma == p) {
    throw InputError("exponents require gamma != p");
  }
}

EvaluatedTriple DoubleHomogeneousFunctional::magnitudes(const Vector& u) const {
  const EvaluatedTriple t = triple(u);
  return {std::abs(t.p1), std::abs(t.p2), std::abs(t.f)};
}

std::string to_string(Cone c) {
  switch (c) {
    case Cone::DPlus:
      return "D+";
    case Cone::DMinus:
      return "D-";
    case Cone::DZero:
      return "D0";
    case Cone::Mixed:
      return "mixed";
  }
  return "mixed";
}

std::string to_string(NehariBranch b) {
  switch (b) {
    case NehariBranch::Plus:
      return "N+";
    case NehariBranch::Minus:
      return "N-";
    case NehariBranch::Zero:
      return "N0";
    case NehariBranch::NotOnNehari:
      return "not-on-nehari";
  }
  return "not-on-nehari";
}

double fibering_value(const Exponents& e, double h, double f, double t) {
  if (!(t >= 0.0)) {
    throw InputError("fibering map is defined for t >= 0");
  }
  if (t == 0.0) {
    return 0.0;
  }
  return std::pow(t, e.p()) / e.p() * h - std::pow(t, e.gamma()) / e.gamma() * f;
}

double fibering_derivative(const Exponents& e, double h, double f, double t) {
  return std::pow(t, e.p() - 1.0) * h - std::pow(t, e.gamma() - 1.0) * f;
}

double fibering_second_derivative(const Exponents& e, double h, double f, double t) {
  return (e.p() - 1.0) * std::pow(t, e.p() - 2.0) * h -
         (e.gamma() - 1.0) * std::pow(t, e.gamma() - 2.0) * f;
}

double fibering_scale(const Exponents& e, double h, double f, double tol) {
  if (!(h * f > tol * tol)) {
    throw NotInCone("H_lambda(u) F(u) <= 0: no positive fibering critical point");
  }
  return std::pow(h / f, 1.0 / (e.gamma() - e.p()));
}

Cone cone_of(double h, double f, double tol) {
  if (h > tol && f > tol) {
    return Cone::DPlus;
  }
  if (h < -tol && f < -tol) {
    return Cone::DMinus;
  }
  if (std::abs(h) <= tol && std::abs(f) <= tol) {
    return Cone::DZero;
  }
  return Cone::Mixed;
}

NehariBranch classify_values(const Exponents& e, double h, double f, double tol) {
  if (std::abs(h) <= tol && std::abs(f) <= tol) {
    return NehariBranch::Zero;
  }
  if (std::abs(h - f) > tol * (std::abs(h) + std::abs(f) + 1.0)) {
    return NehariBranch::NotOnNehari;
  }
  // On the Nehari set phi''(1) = (p-1)H - (gamma-1)F = (p-gamma)H.
  const double dd = (e.p() - e.gamma()) * h;
  return dd > 0.0 ? NehariBranch::Plus : NehariBranch::Minus;
}

NehariBranch branch_of_cone(const Exponents& e, Cone c) {
  if (c == Cone::DPlus) {
    return e.superhomogeneous() ? NehariBranch::Minus : NehariBranch::Plus;
  }
  if (c == Cone::DMinus) {
    return e.superhomogeneous() ? NehariBranch::Plus : NehariBranch::Minus;
  }
  if (c == Cone::DZero) {
    return NehariBranch::Zero;
  }
  return NehariBranch::NotOnNehari;
}

Cone cone_for_branch(const Exponents& e, NehariBranch b) {
  if (b == NehariBranch::Plus) {
    return e.superhomogeneous() ? Cone::DMinus : Cone::DPlus;
  }
  if (b == NehariBranch::Minus) {
    return e.superhomogeneous() ? Cone::DPlus : Cone::DMinus;
  }
  throw InputError("only the N+ and N- branches come from a cone");
}

FiberingReport fibering_report(const Exponents& e, double h, double f, double tol) {
  FiberingReport r;
  r.h_lambda = h;
  r.f_val = f;
  r.region = cone_of(h, f, tol);
  if (r.region == Cone::DPlus || r.region == Cone::DMinus) {
    const double t = std::pow(h / f, 1.0 / (e.gamma() - e.p()));
    r.t_scale = t;
    r.phi_dd_at_t = fibering_second_derivative(e, h, f, t);
  }
  return r;
}

void check_state(const DoubleHomogeneousFunctional& fn, const StateVector& u) {
  if (u.coeffs.size() != fn.dof_count()) {
    throw StructuralError("state has " + std::to_string(u.coeffs.size()) +
                          " coefficients, problem expects " + std::to_string(fn.dof_count()));
  }
  if (u.mesh_id != fn.mesh_id()) {
    throw StructuralError("state belongs to a different mesh");
  }
  if (!u.coeffs.allFinite()) {
    throw InputError("state has non-finite entries");
  }
}

EvaluatedTriple eval_triple(const DoubleHomogeneousFunctional& fn, const StateVector& u) {
  check_state(fn, u);
  return fn.triple(u.coeffs);
}

PhiEval phi_at(const DoubleHomogeneousFunctional& fn, double lambda, const Vector& u) {
  const auto& e = fn.exponents();
  PhiEval out;
  out.triple = fn.triple(u);
  out.h = out.triple.p1 - lambda * out.triple.p2;
  out.phi = out.h / e.p() - out.triple.f / e.gamma();
  return out;
}

PhiEval phi_at(const DoubleHomogeneousFunctional& fn, double lambda, const Vector& u,
               Vector& grad) {
  const auto& e = fn.exponents();
  TripleGradient g;
  PhiEval out;
  out.triple = fn.triple(u, g);
  out.h = out.triple.p1 - lambda * out.triple.p2;
  out.phi = out.h / e.p() - out.triple.f / e.gamma();
  grad = (g.p1 - lambda * g.p2) / e.p() - g.f / e.gamma();
  return out;
}

EvaluatedTriple h_and_f_gradients(const DoubleHomogeneousFunctional& fn, double lambda,
                                  const Vector& u, Vector& grad_h, Vector& grad_f) {
  TripleGradient g;
  const EvaluatedTriple t = fn.triple(u, g);
  grad_h = g.p1 - lambda * g.p2;
  grad_f = std::move(g.f);
  return t;
}

double eval_phi(const DoubleHomogeneousFunctional& fn, double lambda, const StateVector& u) {
  check_state(fn, u);
  return phi_at(fn, lambda, u.coeffs).phi;
}

StateVector grad_phi(const DoubleHomogeneousFunctional& fn, double lambda, const StateVector& u) {
  check_state(fn, u);
  Vector g;
  phi_at(fn, lambda, u.coeffs, g);
  return {std::move(g), u.mesh_id};
}

double fibering_value(const DoubleHomogeneousFunctional& fn, double lambda, const StateVector& u,
                      double t) {
  if (!(t >= 0.0)) {
    throw InputError("fibering map is defined for t >= 0");
  }
  check_state(fn, u);
  const PhiEval pe = phi_at(fn, lambda, u.coeffs);
  return fibering_value(fn.exponents(), pe.h, pe.triple.f, t);
}

double fibering_scale(const DoubleHomogeneousFunctional& fn, double lambda, const StateVector& u) {
  check_state(fn, u);
  const PhiEval pe = phi_at(fn, lambda, u.coeffs);
  return fibering_scale(fn.exponents(), pe.h, pe.triple.f);
}

FiberingReport fibering_report(const DoubleHomogeneousFunctional& fn, double lambda,
                               const StateVector& u, double tol) {
  check_state(fn, u);
  const PhiEval pe = phi_at(fn, lambda, u.coeffs);
  return fibering_report(fn.exponents(), pe.h, pe.triple.f, tol);
}

NehariBranch classify(const DoubleHomogeneousFunctional& fn, double lambda, const StateVector& u,
                      double tol) {
  check_state(fn, u);
  if (u.coeffs.isZero(0.0)) {
    throw InputError("the Nehari set excludes u = 0");
  }
  const PhiEval pe = phi_at(fn, lambda, u.coeffs);
  return classify_values(fn.exponents(), pe.h, pe.triple.f, tol);
}

Projection project_to_nehari(const DoubleHomogeneousFunctional& fn, double lambda,
                             const StateVector& u) {
  check_state(fn, u);
  const auto& e = fn.exponents();
  const PhiEval pe = phi_at(fn, lambda, u.coeffs);
  const double t = fibering_scale(e, pe.h, pe.triple.f);
  const Cone c = pe.h > 0.0 ? Cone::DPlus : Cone::DMinus;
  return {StateVector{t * u.coeffs, u.mesh_id}, branch_of_cone(e, c), t};
}

double HomogeneityAudit::max_error() const {
  double m = std::max({euler_p1_rel, euler_p2_rel, euler_f_rel});
  for (const auto& s : scales) {
    m = std::max({m, s.p1_rel, s.p2_rel, s.f_rel});
  }
  return m;
}

namespace {

double rel_error(double a, double b, double scale) {
  const double d = std::abs(a - b);
  if (d == 0.0) {
    return 0.0;
  }
  return scale > 0.0 ? d / scale : d;
}

}  // namespace

HomogeneityAudit audit_homogeneity(const DoubleHomogeneousFunctional& fn, const StateVector& u,
                                   const std::vector<double>& scales) {
  check_state(fn, u);
  if (u.coeffs.isZero(0.0)) {
    throw InputError("homogeneity audit needs u != 0");
  }
  const auto& e = fn.exponents();
  TripleGradient g;
  const EvaluatedTriple base = fn.triple(u.coeffs, g);
  const EvaluatedTriple mag = fn.magnitudes(u.coeffs);

  HomogeneityAudit audit;
  for (double t : scales) {
    if (!(t > 0.0)) {
      throw InputError("audit scales must be positive");
    }
    ScaleAudit s;
    s.t = t;
    if (t != 1.0) {
      const EvaluatedTriple scaled = fn.triple(t * u.coeffs);
      const double tp = std::pow(t, e.p());
      const double tg = std::pow(t, e.gamma());
      s.p1_rel = rel_error(scaled.p1 / tp, base.p1, mag.p1);
      s.p2_rel = rel_error(scaled.p2 / tp, base.p2, mag.p2);
      s.f_rel = rel_error(scaled.f / tg, base.f, mag.f);
    }
    audit.scales.push_back(s);
  }
  audit.euler_p1_rel = rel_error(g.p1.dot(u.coeffs), e.p() * base.p1, e.p() * mag.p1);
  audit.euler_p2_rel = rel_error(g.p2.dot(u.coeffs), e.p() * base.p2, e.p() * mag.p2);
  audit.euler_f_rel = rel_error(g.f.dot(u.coeffs), e.gamma() * base.f, e.gamma() * mag.f);
  return audit;
}

}  // namespace nehari
