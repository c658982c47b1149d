#include "nehari/weight.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nehari/errors.hpp"

namespace nehari {

bool Box::contains(const Point& p, int dimension) const {
  const bool in_x = p.x >= x0 && p.x <= x1;
  if (dimension == 1) {
    return in_x;
  }
  return in_x && p.y >= y0 && p.y <= y1;
}

WeightSpec WeightSpec::constant(double value) {
  if (!std::isfinite(value)) {
    throw InputError("weight value must be finite");
  }
  return WeightSpec(Constant{value});
}

WeightSpec WeightSpec::piecewise(std::vector<RegionValue> regions, double default_value) {
  if (!std::isfinite(default_value)) {
    throw InputError("weight default must be finite");
  }
  for (const auto& r : regions) {
    if (!std::isfinite(r.value)) {
      throw InputError("weight region value must be finite");
    }
    if (!(r.box.x0 <= r.box.x1) || !(r.box.y0 <= r.box.y1)) {
      throw InputError("weight region box is empty");
    }
  }
  return WeightSpec(Piecewise{std::move(regions), default_value});
}

WeightSpec WeightSpec::tabulated(std::vector<double> per_element) {
  for (double v : per_element) {
    if (!std::isfinite(v)) {
      throw InputError("tabulated weight must be finite");
    }
  }
  return WeightSpec(Tabulated{std::move(per_element)});
}

std::vector<double> WeightSpec::element_values(const Mesh& mesh) const {
  const auto& els = mesh.elements();
  std::vector<double> out(els.size());
  if (const auto* c = std::get_if<Constant>(&data_)) {
    std::fill(out.begin(), out.end(), c->value);
  } else if (const auto* pw = std::get_if<Piecewise>(&data_)) {
    for (std::size_t e = 0; e < els.size(); ++e) {
      out[e] = pw->default_value;
      for (const auto& r : pw->regions) {
        if (r.box.contains(els[e].centroid, mesh.dimension())) {
          out[e] = r.value;
          break;
        }
      }
    }
  } else {
    const auto& t = std::get<Tabulated>(data_);
    if (t.values.size() != els.size()) {
      throw StructuralError("tabulated weight has " + std::to_string(t.values.size()) +
                            " values for " + std::to_string(els.size()) + " elements");
    }
    out = t.values;
  }
  return out;
}

WeightSpec WeightSpec::scaled(double s) const {
  if (const auto* c = std::get_if<Constant>(&data_)) {
    return constant(s * c->value);
  }
  if (const auto* pw = std::get_if<Piecewise>(&data_)) {
    auto regions = pw->regions;
    for (auto& r : regions) {
      r.value *= s;
    }
    return piecewise(std::move(regions), s * pw->default_value);
  }
  auto values = std::get<Tabulated>(data_).values;
  for (double& v : values) {
    v *= s;
  }
  return tabulated(std::move(values));
}

std::string WeightSpec::describe() const {
  std::ostringstream os;
  if (const auto* c = std::get_if<Constant>(&data_)) {
    os << "constant " << c->value;
  } else if (const auto* pw = std::get_if<Piecewise>(&data_)) {
    os << "piecewise, " << pw->regions.size() << " regions, default " << pw->default_value;
  } else {
    os << "tabulated, " << std::get<Tabulated>(data_).values.size() << " values";
  }
  return os.str();
}

double ResolvedWeight::max_abs() const {
  double m = 0.0;
  for (double v : element) {
    m = std::max(m, std::abs(v));
  }
  return m;
}

double ResolvedWeight::min_value() const { return *std::min_element(element.begin(), element.end()); }

double ResolvedWeight::max_value() const { return *std::max_element(element.begin(), element.end()); }

double ResolvedWeight::measure(const Mesh& mesh, const std::vector<bool>& mask) const {
  double s = 0.0;
  for (std::size_t e = 0; e < mask.size(); ++e) {
    if (mask[e]) {
      s += mesh.elements()[e].measure;
    }
  }
  return s;
}

bool ResolvedWeight::has_zero_set() const {
  return std::any_of(omega0.begin(), omega0.end(), [](bool b) { return b; });
}

ResolvedWeight resolve_weight(const WeightSpec& spec, const Mesh& mesh) {
  ResolvedWeight w;
  w.element = spec.element_values(mesh);
  const auto& els = mesh.elements();
  const std::size_t ne = els.size();
  w.omega0.assign(ne, false);
  w.omega_plus.assign(ne, false);
  w.omega_minus.assign(ne, false);
  for (std::size_t e = 0; e < ne; ++e) {
    const double v = w.element[e];
    if (std::abs(v) <= kWeightZeroTolerance) {
      w.omega0[e] = true;
    } else if (v > 0.0) {
      w.omega_plus[e] = true;
    } else {
      w.omega_minus[e] = true;
    }
  }
  std::vector<double> num(mesh.node_count(), 0.0);
  std::vector<double> den(mesh.node_count(), 0.0);
  const int k = mesh.nodes_per_element();
  for (std::size_t e = 0; e < ne; ++e) {
    for (int a = 0; a < k; ++a) {
      const auto node = static_cast<std::size_t>(els[e].nodes[static_cast<std::size_t>(a)]);
      num[node] += els[e].measure * w.element[e];
      den[node] += els[e].measure;
    }
  }
  w.nodal.resize(mesh.node_count());
  for (std::size_t i = 0; i < w.nodal.size(); ++i) {
    w.nodal[i] = den[i] > 0.0 ? num[i] / den[i] : 0.0;
  }
  return w;
}

}  // namespace nehari
