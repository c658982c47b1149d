#pragma once

#include <string>
#include <variant>
#include <vector>

#include "nehari/mesh.hpp"

namespace nehari {

/// Axis-aligned box [x0, x1] x [y0, y1]; the y-extent is ignored on 1D meshes.
struct Box {
  double x0 = 0.0;
  double x1 = 0.0;
  double y0 = -1e300;
  double y1 = 1e300;
  bool contains(const Point& p, int dimension) const;
};

struct RegionValue {
  Box box;
  double value = 0.0;
};

/// Coefficient function (f or beta) given per element.
///
/// Piecewise weights are resolved by element centroid: the first region that
/// contains the centroid wins, otherwise the default value applies.
class WeightSpec {
 public:
  struct Constant {
    double value;
  };
  struct Piecewise {
    std::vector<RegionValue> regions;
    double default_value;
  };
  struct Tabulated {
    std::vector<double> values;
  };

  static WeightSpec constant(double value);
  static WeightSpec piecewise(std::vector<RegionValue> regions, double default_value);
  static WeightSpec tabulated(std::vector<double> per_element);

  /// One value per element; throws StructuralError on a tabulated size mismatch.
  std::vector<double> element_values(const Mesh& mesh) const;
  /// The weight multiplied by s (s = -1 flips the sign of F).
  WeightSpec scaled(double s) const;
  bool is_constant() const { return std::holds_alternative<Constant>(data_); }
  std::string describe() const;

 private:
  explicit WeightSpec(std::variant<Constant, Piecewise, Tabulated> d) : data_(std::move(d)) {}
  std::variant<Constant, Piecewise, Tabulated> data_;
};

/// Weight resolved onto a mesh.
struct ResolvedWeight {
  std::vector<double> element;
  /// Measure-weighted average over the elements adjacent to each node.
  std::vector<double> nodal;
  std::vector<bool> omega0;
  std::vector<bool> omega_plus;
  std::vector<bool> omega_minus;

  double max_abs() const;
  double min_value() const;
  double max_value() const;
  double measure(const Mesh& mesh, const std::vector<bool>& mask) const;
  bool has_zero_set() const;
};

inline constexpr double kWeightZeroTolerance = 1e-14;

ResolvedWeight resolve_weight(const WeightSpec& spec, const Mesh& mesh);

}  // namespace nehari
