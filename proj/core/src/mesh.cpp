#include "nehari/mesh.hpp"

#include <atomic>
#include <cmath>
#include <map>

#include "nehari/errors.hpp"

namespace nehari {

namespace {

MeshId next_mesh_id() {
  static std::atomic<MeshId> counter{1};
  return counter.fetch_add(1);
}

Element make_segment(const std::vector<Point>& nodes, int a, int b) {
  Element e;
  e.nodes = {a, b, -1};
  const double h = nodes[static_cast<std::size_t>(b)].x - nodes[static_cast<std::size_t>(a)].x;
  e.measure = std::abs(h);
  e.basis_grad[0] = {-1.0 / h, 0.0};
  e.basis_grad[1] = {1.0 / h, 0.0};
  e.centroid = {0.5 * (nodes[static_cast<std::size_t>(a)].x + nodes[static_cast<std::size_t>(b)].x),
                0.0};
  return e;
}

Element make_triangle(const std::vector<Point>& nodes, int a, int b, int c) {
  Element e;
  e.nodes = {a, b, c};
  const Point& pa = nodes[static_cast<std::size_t>(a)];
  const Point& pb = nodes[static_cast<std::size_t>(b)];
  const Point& pc = nodes[static_cast<std::size_t>(c)];
  const double det = (pb.x - pa.x) * (pc.y - pa.y) - (pc.x - pa.x) * (pb.y - pa.y);
  e.measure = 0.5 * std::abs(det);
  const std::array<const Point*, 3> p = {&pa, &pb, &pc};
  for (int i = 0; i < 3; ++i) {
    const Point& pj = *p[static_cast<std::size_t>((i + 1) % 3)];
    const Point& pk = *p[static_cast<std::size_t>((i + 2) % 3)];
    e.basis_grad[static_cast<std::size_t>(i)] = {(pj.y - pk.y) / det, (pk.x - pj.x) / det};
  }
  e.centroid = {(pa.x + pb.x + pc.x) / 3.0, (pa.y + pb.y + pc.y) / 3.0};
  return e;
}

}  // namespace

std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

Mesh Mesh::interval(int n, double length, BoundaryCondition bc) {
  if (n < 2) {
    throw InputError("interval mesh needs n >= 2 elements");
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw InputError("interval length must be positive");
  }
  Mesh m;
  m.dimension_ = 1;
  m.bc_ = bc;
  m.width_ = length;
  m.min_spacing_ = length / n;
  m.nodes_.resize(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    m.nodes_[static_cast<std::size_t>(i)] = {length * i / n, 0.0};
  }
  for (int i = 0; i < n; ++i) {
    m.elements_.push_back(make_segment(m.nodes_, i, i + 1));
  }
  std::vector<bool> constrained(m.nodes_.size(), false);
  if (bc == BoundaryCondition::Dirichlet) {
    constrained.front() = true;
    constrained.back() = true;
  }
  m.finalize(constrained);
  return m;
}

Mesh Mesh::rectangle(int nx, int ny, double width, double height, BoundaryCondition bc) {
  if (nx < 2 || ny < 2) {
    throw InputError("rectangle mesh needs at least 2 cells per direction");
  }
  if (!(width > 0.0) || !(height > 0.0)) {
    throw InputError("rectangle extents must be positive");
  }
  Mesh m;
  m.dimension_ = 2;
  m.bc_ = bc;
  m.width_ = width;
  m.height_ = height;
  m.min_spacing_ = std::min(width / nx, height / ny);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      m.nodes_.push_back({width * i / nx, height * j / ny});
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      m.elements_.push_back(make_triangle(m.nodes_, id(i, j), id(i + 1, j), id(i + 1, j + 1)));
      m.elements_.push_back(make_triangle(m.nodes_, id(i, j), id(i + 1, j + 1), id(i, j + 1)));
    }
  }
  std::vector<bool> constrained(m.nodes_.size(), false);
  if (bc == BoundaryCondition::Dirichlet) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        if (i == 0 || j == 0 || i == nx || j == ny) {
          constrained[static_cast<std::size_t>(id(i, j))] = true;
        }
      }
    }
  }
  m.finalize(constrained);
  return m;
}

void Mesh::finalize(const std::vector<bool>& constrained) {
  id_ = next_mesh_id();
  dof_of_node_.assign(nodes_.size(), -1);
  dof_nodes_.clear();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!constrained[i]) {
      dof_of_node_[i] = static_cast<int>(dof_nodes_.size());
      dof_nodes_.push_back(static_cast<int>(i));
    }
  }
  lumped_.assign(nodes_.size(), 0.0);
  total_measure_ = 0.0;
  const int k = nodes_per_element();
  for (const Element& e : elements_) {
    if (!(e.measure > 0.0)) {
      throw StructuralError("mesh element with non-positive measure");
    }
    total_measure_ += e.measure;
    for (int a = 0; a < k; ++a) {
      lumped_[static_cast<std::size_t>(e.nodes[static_cast<std::size_t>(a)])] += e.measure / k;
    }
  }
}

Mesh Mesh::subdomain(const std::vector<bool>& element_mask) const {
  if (element_mask.size() != elements_.size()) {
    throw StructuralError("element mask size does not match the mesh");
  }
  const int k = nodes_per_element();
  // Outer boundary: nodes of the original domain's boundary (geometric test).
  auto on_outer_boundary = [this](const Point& pt) {
    const double eps = 1e-12 * std::max(width_, 1.0);
    if (dimension_ == 1) {
      return std::abs(pt.x) < eps || std::abs(pt.x - width_) < eps;
    }
    return std::abs(pt.x) < eps || std::abs(pt.y) < eps || std::abs(pt.x - width_) < eps ||
           std::abs(pt.y - height_) < eps;
  };
  std::vector<bool> touches_outside(nodes_.size(), false);
  std::vector<bool> used(nodes_.size(), false);
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    for (int a = 0; a < k; ++a) {
      const auto node = static_cast<std::size_t>(elements_[e].nodes[static_cast<std::size_t>(a)]);
      (element_mask[e] ? used : touches_outside)[node] = true;
    }
  }
  Mesh m;
  m.dimension_ = dimension_;
  m.bc_ = BoundaryCondition::Dirichlet;
  m.width_ = width_;
  m.height_ = height_;
  m.min_spacing_ = min_spacing_;
  std::map<int, int> renumber;
  std::vector<bool> constrained;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (used[i]) {
      renumber[static_cast<int>(i)] = static_cast<int>(m.nodes_.size());
      m.nodes_.push_back(nodes_[i]);
      constrained.push_back(touches_outside[i] || on_outer_boundary(nodes_[i]));
    }
  }
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    if (!element_mask[e]) {
      continue;
    }
    Element el = elements_[e];
    for (int a = 0; a < k; ++a) {
      el.nodes[static_cast<std::size_t>(a)] = renumber.at(el.nodes[static_cast<std::size_t>(a)]);
    }
    m.elements_.push_back(el);
  }
  if (m.elements_.empty()) {
    throw InputError("subdomain selects no elements");
  }
  m.finalize(constrained);
  return m;
}

Vector Mesh::expand(const Vector& dofs) const {
  if (dofs.size() != dof_count()) {
    throw StructuralError("DOF vector size does not match the mesh");
  }
  Vector full = Vector::Zero(static_cast<Eigen::Index>(nodes_.size()));
  for (std::size_t k = 0; k < dof_nodes_.size(); ++k) {
    full[dof_nodes_[k]] = dofs[static_cast<Eigen::Index>(k)];
  }
  return full;
}

SparseMatrix Mesh::stiffness() const {
  std::vector<Eigen::Triplet<double>> trip;
  const int k = nodes_per_element();
  for (const Element& e : elements_) {
    for (int a = 0; a < k; ++a) {
      const int da = dof_of_node_[static_cast<std::size_t>(e.nodes[static_cast<std::size_t>(a)])];
      if (da < 0) {
        continue;
      }
      for (int b = 0; b < k; ++b) {
        const int db = dof_of_node_[static_cast<std::size_t>(e.nodes[static_cast<std::size_t>(b)])];
        if (db < 0) {
          continue;
        }
        const Point& ga = e.basis_grad[static_cast<std::size_t>(a)];
        const Point& gb = e.basis_grad[static_cast<std::size_t>(b)];
        trip.emplace_back(da, db, e.measure * (ga.x * gb.x + ga.y * gb.y));
      }
    }
  }
  SparseMatrix s(dof_count(), dof_count());
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

SparseMatrix Mesh::lumped_mass() const {
  SparseMatrix m(dof_count(), dof_count());
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t k = 0; k < dof_nodes_.size(); ++k) {
    trip.emplace_back(static_cast<int>(k), static_cast<int>(k),
                      lumped_[static_cast<std::size_t>(dof_nodes_[k])]);
  }
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace nehari
