#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "nehari/functional.hpp"

namespace nehari {

enum class BoundaryCondition { Dirichlet, Neumann };

std::string to_string(BoundaryCondition bc);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Piecewise-linear element: segment (2 nodes) in 1D, triangle (3 nodes) in 2D.
struct Element {
  std::array<int, 3> nodes{};
  /// Constant gradients of the nodal basis functions on this element.
  std::array<Point, 3> basis_grad{};
  double measure = 0.0;
  Point centroid;
};

/// Conforming P1 mesh of an interval or a structured rectangle.
///
/// Dirichlet meshes constrain all boundary nodes to zero; the free nodes are
/// the degrees of freedom. Every mesh receives a process-unique id so states
/// can be matched to the mesh they were built on.
class Mesh {
 public:
  /// n >= 2 uniform elements on [0, length].
  static Mesh interval(int n, double length, BoundaryCondition bc);
  /// nx x ny cells on [0, width] x [0, height], each split along its diagonal.
  static Mesh rectangle(int nx, int ny, double width, double height, BoundaryCondition bc);

  /// Mesh made of the selected elements with zero Dirichlet data on the
  /// boundary of their union (used for eigenvalues of int(Omega^0)).
  Mesh subdomain(const std::vector<bool>& element_mask) const;

  MeshId id() const { return id_; }
  int dimension() const { return dimension_; }
  int nodes_per_element() const { return dimension_ + 1; }
  BoundaryCondition boundary_condition() const { return bc_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t element_count() const { return elements_.size(); }
  Eigen::Index dof_count() const { return static_cast<Eigen::Index>(dof_nodes_.size()); }
  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<Element>& elements() const { return elements_; }
  /// -1 for constrained nodes.
  const std::vector<int>& dof_of_node() const { return dof_of_node_; }
  const std::vector<int>& dof_nodes() const { return dof_nodes_; }
  /// Lumped (vertex) quadrature weights: sum over adjacent elements of measure / nodes.
  const std::vector<double>& lumped_weights() const { return lumped_; }
  double total_measure() const { return total_measure_; }
  /// Smallest element diameter proxy: interval spacing or min(hx, hy).
  double min_spacing() const { return min_spacing_; }
  /// Bounding box extents.
  double width() const { return width_; }
  double height() const { return height_; }

  /// Nodal values with zeros at constrained nodes.
  Vector expand(const Vector& dofs) const;
  /// Vector of DOF values sampled from a nodal function.
  template <class F>
  Vector interpolate(F&& fn) const {
    Vector u(dof_count());
    for (std::size_t k = 0; k < dof_nodes_.size(); ++k) {
      const Point& pt = nodes_[static_cast<std::size_t>(dof_nodes_[k])];
      u[static_cast<Eigen::Index>(k)] = fn(pt);
    }
    return u;
  }
  StateVector state(Vector coeffs) const { return {std::move(coeffs), id_}; }

  /// Discrete stiffness matrix on the DOFs (Laplacian, p = 2).
  SparseMatrix stiffness() const;
  /// Lumped mass matrix on the DOFs.
  SparseMatrix lumped_mass() const;

 private:
  Mesh() = default;
  void finalize(const std::vector<bool>& constrained);

  MeshId id_ = 0;
  int dimension_ = 1;
  BoundaryCondition bc_ = BoundaryCondition::Dirichlet;
  std::vector<Point> nodes_;
  std::vector<Element> elements_;
  std::vector<int> dof_of_node_;
  std::vector<int> dof_nodes_;
  std::vector<double> lumped_;
  double total_measure_ = 0.0;
  double min_spacing_ = 0.0;
  double width_ = 0.0;
  double height_ = 0.0;
};

}  // namespace nehari
