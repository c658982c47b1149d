#include "nehari/problem.hpp"

#include <algorithm>
#include <cmath>

#include "nehari/errors.hpp"

namespace nehari {

std::string to_string(Family f) {
  switch (f) {
    case Family::IndefiniteDirichlet:
      return "indefinite-dirichlet";
    case Family::IndefiniteNeumann:
      return "indefinite-neumann";
    case Family::PQLaplacian:
      return "pq-laplacian";
    case Family::Kirchhoff:
      return "kirchhoff";
  }
  return "unknown";
}

namespace {

void check_dofs(const Mesh& mesh, const Vector& u) {
  if (u.size() != mesh.dof_count()) {
    throw StructuralError("vector has " + std::to_string(u.size()) + " entries, mesh has " +
                          std::to_string(mesh.dof_count()) + " DOFs");
  }
}

void scatter_to_dofs(const Mesh& mesh, const Vector& nodal, Vector& out) {
  const auto& dn = mesh.dof_nodes();
  out.resize(static_cast<Eigen::Index>(dn.size()));
  for (std::size_t k = 0; k < dn.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = nodal[dn[k]];
  }
}

}  // namespace

double assemble_gradient_energy(const Mesh& mesh, const Vector& u, double r, Vector* grad) {
  check_dofs(mesh, u);
  const Vector nodal = mesh.expand(u);
  Vector g_nodal;
  if (grad) {
    g_nodal = Vector::Zero(nodal.size());
  }
  const int k = mesh.nodes_per_element();
  double total = 0.0;
  for (const Element& e : mesh.elements()) {
    double gx = 0.0;
    double gy = 0.0;
    for (int a = 0; a < k; ++a) {
      const double ua = nodal[e.nodes[static_cast<std::size_t>(a)]];
      gx += ua * e.basis_grad[static_cast<std::size_t>(a)].x;
      gy += ua * e.basis_grad[static_cast<std::size_t>(a)].y;
    }
    const double s2 = gx * gx + gy * gy;
    if (s2 == 0.0) {
      continue;
    }
    total += e.measure * std::pow(s2, 0.5 * r);
    if (grad) {
      const double coef = r * e.measure * std::pow(s2, 0.5 * r - 1.0);
      for (int a = 0; a < k; ++a) {
        const Point& b = e.basis_grad[static_cast<std::size_t>(a)];
        g_nodal[e.nodes[static_cast<std::size_t>(a)]] += coef * (gx * b.x + gy * b.y);
      }
    }
  }
  if (grad) {
    scatter_to_dofs(mesh, g_nodal, *grad);
  }
  return total;
}

double assemble_weighted_positive_part(const Mesh& mesh, const std::vector<double>& nodal_coeff,
                                       const Vector& u, double r, Vector* grad) {
  check_dofs(mesh, u);
  if (nodal_coeff.size() != mesh.node_count()) {
    throw StructuralError("nodal weight does not match the mesh");
  }
  const auto& dn = mesh.dof_nodes();
  const auto& w = mesh.lumped_weights();
  if (grad) {
    grad->setZero(u.size());
  }
  double total = 0.0;
  for (std::size_t k = 0; k < dn.size(); ++k) {
    const double v = u[static_cast<Eigen::Index>(k)];
    if (v <= 0.0) {
      continue;
    }
    const auto node = static_cast<std::size_t>(dn[k]);
    const double c = w[node] * nodal_coeff[node];
    const double vr1 = std::pow(v, r - 1.0);
    total += c * vr1 * v;
    if (grad) {
      (*grad)[static_cast<Eigen::Index>(k)] = r * c * vr1;
    }
  }
  return total;
}

double assemble_weighted_positive_part(const Mesh& mesh, const WeightSpec& weight, const Vector& u,
                                       double r) {
  return assemble_weighted_positive_part(mesh, resolve_weight(weight, mesh).nodal, u, r);
}

double assemble_negative_part(const Mesh& mesh, const Vector& u, double r, Vector* grad) {
  check_dofs(mesh, u);
  const auto& dn = mesh.dof_nodes();
  const auto& w = mesh.lumped_weights();
  if (grad) {
    grad->setZero(u.size());
  }
  double total = 0.0;
  for (std::size_t k = 0; k < dn.size(); ++k) {
    const double v = u[static_cast<Eigen::Index>(k)];
    if (v >= 0.0) {
      continue;
    }
    const double c = w[static_cast<std::size_t>(dn[k])];
    const double vr1 = std::pow(-v, r - 1.0);
    total += c * vr1 * (-v);
    if (grad) {
      (*grad)[static_cast<Eigen::Index>(k)] = -r * c * vr1;
    }
  }
  return total;
}

double sup_norm_bound(const Mesh& mesh, double r) {
  if (mesh.boundary_condition() == BoundaryCondition::Neumann) {
    const auto& w = mesh.lumped_weights();
    return std::pow(*std::min_element(w.begin(), w.end()), -1.0 / r);
  }
  if (mesh.dimension() == 1) {
    return std::pow(mesh.width(), (r - 1.0) / r);
  }
  // Along a mesh line the tangential derivative is bounded by the gradient of
  // the adjacent triangles, each of area h_x h_y / 2.
  const double span = std::max(mesh.width(), mesh.height());
  return std::pow(2.0 / mesh.min_spacing(), 1.0 / r) * std::pow(span, (r - 1.0) / r);
}

ProblemInstance::ProblemInstance(Family family, std::shared_ptr<const Mesh> mesh, Exponents e,
                                 WeightSpec w)
    : family_(family), mesh_(std::move(mesh)), exponents_(e), weight_spec_(std::move(w)) {
  if (!mesh_) {
    throw InputError("problem needs a mesh");
  }
  if (mesh_->dof_count() == 0) {
    throw InputError("mesh has no degrees of freedom");
  }
  weight_ = resolve_weight(weight_spec_, *mesh_);
  ones_.assign(mesh_->node_count(), 1.0);
}

void ProblemInstance::finish() {
  SparseMatrix k = mesh_->stiffness();
  if (mesh_->boundary_condition() == BoundaryCondition::Neumann) {
    k += mesh_->lumped_mass();
  }
  metric_ = Metric::from_matrix(std::move(k));

  const double p = exponents_.p();
  const double g = exponents_.gamma();
  const double omega = mesh_->total_measure();
  const double m = sup_norm_bound(*mesh_, p);
  const double wmax = weight_.max_abs();
  constants_.c1 = family_ == Family::Kirchhoff ? a_ : 1.0;
  constants_.c2 = omega * std::pow(m, p);
  switch (family_) {
    case Family::IndefiniteDirichlet:
    case Family::IndefiniteNeumann:
      constants_.c3 = wmax * omega * std::pow(m, g);
      break;
    case Family::PQLaplacian:
      constants_.c3 = std::pow(omega, 1.0 - q_ / p) + wmax * omega * std::pow(m, q_);
      break;
    case Family::Kirchhoff:
      constants_.c3 = b_ + wmax * omega * std::pow(m, 4.0);
      break;
  }

  const double n = mesh_->dimension();
  if (p < n) {
    const double p_crit = n * p / (n - p);
    if (g >= p_crit) {
      warnings_.push_back("gamma is not below the critical exponent p* = " +
                          std::to_string(p_crit));
    }
  }
  if (mesh_->boundary_condition() == BoundaryCondition::Neumann) {
    warnings_.push_back(
        "Neumann space: P1 >= c1 ||u||^p fails along nonnegative constants; c1 holds on u <= 0");
  }
}

EvaluatedTriple ProblemInstance::evaluate(const Vector& u, TripleGradient* grad) const {
  check_dofs(*mesh_, u);
  const double p = exponents_.p();
  const double g = exponents_.gamma();
  const bool neumann = mesh_->boundary_condition() == BoundaryCondition::Neumann;
  Vector* gp1 = grad ? &grad->p1 : nullptr;
  Vector* gp2 = grad ? &grad->p2 : nullptr;
  Vector* gf = grad ? &grad->f : nullptr;
  Vector tmp;
  Vector* gtmp = grad ? &tmp : nullptr;

  EvaluatedTriple t;
  if (family_ == Family::Kirchhoff) {
    const double e2 = assemble_gradient_energy(*mesh_, u, 2.0, gp1);
    t.p1 = a_ * e2;
    t.p2 = assemble_weighted_positive_part(*mesh_, ones_, u, 2.0, gp2);
    const double beta4 = assemble_weighted_positive_part(*mesh_, weight_.nodal, u, 4.0, gf);
    t.f = beta4 - b_ * e2 * e2;
    if (grad) {
      // d/du (e2^2) = 2 e2 grad e2, and grad->p1 holds grad e2 before scaling.
      *gf -= (2.0 * b_ * e2) * (*gp1);
      *gp1 *= a_;
    }
    return t;
  }

  t.p1 = assemble_gradient_energy(*mesh_, u, p, gp1);
  if (neumann) {
    t.p1 += assemble_negative_part(*mesh_, u, p, gtmp);
    if (grad) {
      *gp1 += tmp;
    }
  }
  t.p2 = assemble_weighted_positive_part(*mesh_, ones_, u, p, gp2);
  if (family_ == Family::PQLaplacian) {
    const double beta_q = assemble_weighted_positive_part(*mesh_, weight_.nodal, u, q_, gf);
    const double grad_q = assemble_gradient_energy(*mesh_, u, q_, gtmp);
    t.f = beta_q - grad_q;
    if (grad) {
      *gf -= tmp;
    }
  } else {
    t.f = assemble_weighted_positive_part(*mesh_, weight_.nodal, u, g, gf);
  }
  return t;
}

EvaluatedTriple ProblemInstance::triple(const Vector& u) const { return evaluate(u, nullptr); }

EvaluatedTriple ProblemInstance::triple(const Vector& u, TripleGradient& grad) const {
  return evaluate(u, &grad);
}

EvaluatedTriple ProblemInstance::magnitudes(const Vector& u) const {
  EvaluatedTriple t = evaluate(u, nullptr);
  std::vector<double> abs_w(weight_.nodal.size());
  std::transform(weight_.nodal.begin(), weight_.nodal.end(), abs_w.begin(),
                 [](double v) { return std::abs(v); });
  const double g = family_ == Family::PQLaplacian ? q_ : exponents_.gamma();
  double f = assemble_weighted_positive_part(*mesh_, abs_w, u, g);
  if (family_ == Family::PQLaplacian) {
    f += assemble_gradient_energy(*mesh_, u, q_);
  } else if (family_ == Family::Kirchhoff) {
    const double e2 = assemble_gradient_energy(*mesh_, u, 2.0);
    f += b_ * e2 * e2;
  }
  return {t.p1, t.p2, f};
}

double ProblemInstance::norm(const Vector& u) const {
  const double p = exponents_.p();
  double s = assemble_gradient_energy(*mesh_, u, p);
  if (mesh_->boundary_condition() == BoundaryCondition::Neumann) {
    const auto& dn = mesh_->dof_nodes();
    const auto& w = mesh_->lumped_weights();
    for (std::size_t k = 0; k < dn.size(); ++k) {
      s += w[static_cast<std::size_t>(dn[k])] * std::pow(std::abs(u[static_cast<Eigen::Index>(k)]), p);
    }
  }
  return std::pow(s, 1.0 / p);
}

ProblemInstance instantiate_indefinite(std::shared_ptr<const Mesh> mesh, double p, double gamma,
                                       const WeightSpec& f) {
  if (!mesh) {
    throw InputError("problem needs a mesh");
  }
  const Family fam = mesh->boundary_condition() == BoundaryCondition::Dirichlet
                         ? Family::IndefiniteDirichlet
                         : Family::IndefiniteNeumann;
  ProblemInstance pi(fam, std::move(mesh), Exponents(p, gamma), f);
  pi.finish();
  return pi;
}

ProblemInstance instantiate_pq(std::shared_ptr<const Mesh> mesh, double p, double q,
                               const WeightSpec& beta) {
  if (!(q > 1.0) || !(q < p)) {
    throw InputError("the (p,q) family requires 1 < q < p");
  }
  ProblemInstance pi(Family::PQLaplacian, std::move(mesh), Exponents(p, q), beta);
  if (pi.boundary_condition() == BoundaryCondition::Dirichlet && pi.weight_.min_value() < 0.0) {
    throw InputError("beta must be nonnegative for the Dirichlet (p,q) problem");
  }
  pi.q_ = q;
  pi.finish();
  return pi;
}

ProblemInstance instantiate_kirchhoff(std::shared_ptr<const Mesh> mesh, double a, double b,
                                      const WeightSpec& beta) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw InputError("the Kirchhoff family requires a > 0 and b > 0");
  }
  ProblemInstance pi(Family::Kirchhoff, std::move(mesh), Exponents(2.0, 4.0), beta);
  pi.a_ = a;
  pi.b_ = b;
  pi.finish();
  return pi;
}

}  // namespace nehari
