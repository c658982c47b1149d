#include "nehari_cli/problem_file.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "nehari/errors.hpp"

namespace nehari::cli {
namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
  throw ParseError(source + ":" + std::to_string(line) + ": " + what);
}

double to_real(const std::string& s, const std::string& source, int line) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    fail(source, line, "expected a number, got '" + s + "'");
  }
  return v;
}

int to_int(const std::string& s, const std::string& source, int line) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) {
    fail(source, line, "expected an integer, got '" + s + "'");
  }
  return v;
}

std::vector<double> to_reals(const std::string& s, const std::string& source, int line) {
  std::istringstream in(s);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    out.push_back(to_real(tok, source, line));
  }
  return out;
}

void apply_override(ProblemFile& pf, const std::string& key, const std::string& value, int line) {
  const std::string& src = pf.source;
  SolverConfig& s = pf.solver;
  ThresholdOptions& t = pf.thresholds;
  const std::map<std::string, double*> reals = {
      {"solver.tol_grad", &s.tol_grad},
      {"solver.tol_nehari", &s.tol_nehari},
      {"solver.restriction_tol", &s.restriction_tol},
      {"solver.armijo_c", &s.armijo_c},
      {"solver.step_init", &s.step_init},
      {"thresholds.bisection_tol", &t.bisection_tol},
      {"thresholds.bracket_cap", &t.bracket_cap},
      {"thresholds.h1_tol", &t.h1_tol},
      {"thresholds.gradient_tol", &t.gradient_tol},
      {"thresholds.tol_grad", &t.quotient.lbfgs.tol_grad},
  };
  const std::map<std::string, int*> ints = {
      {"solver.max_iter", &s.max_iter},
      {"solver.random_seeds", &s.random_seeds},
      {"thresholds.random_seeds", &t.random_seeds},
      {"thresholds.max_iter", &t.quotient.lbfgs.max_iter},
  };
  if (auto it = reals.find(key); it != reals.end()) {
    *it->second = to_real(value, src, line);
  } else if (auto jt = ints.find(key); jt != ints.end()) {
    *jt->second = to_int(value, src, line);
  } else {
    fail(src, line, "unknown key '" + key + "'");
  }
}

}  // namespace

ProblemFile parse_problem_text(const std::string& text, const std::string& source) {
  ProblemFile pf;
  pf.source = source;
  std::optional<double> constant;
  std::optional<double> fallback;
  std::vector<RegionValue> regions;
  std::map<std::string, int> seen;

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    const std::string body = trim(raw);
    if (body.empty()) {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      fail(source, line, "expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) {
      fail(source, line, "empty key or value");
    }
    if (key != "weight.region" && seen[key]++ > 0) {
      fail(source, line, "duplicate key '" + key + "'");
    }

    if (key == "family") {
      if (value != "indefinite" && value != "pq" && value != "kirchhoff") {
        fail(source, line, "unknown family '" + value + "'");
      }
      pf.family = value;
    } else if (key == "domain") {
      if (value != "interval" && value != "rectangle") {
        fail(source, line, "unknown domain '" + value + "'");
      }
      pf.domain = value;
    } else if (key == "boundary") {
      if (value != "dirichlet" && value != "neumann") {
        fail(source, line, "unknown boundary '" + value + "'");
      }
      pf.boundary = value;
    } else if (key == "n") {
      pf.n = to_int(value, source, line);
    } else if (key == "nx") {
      pf.nx = to_int(value, source, line);
    } else if (key == "ny") {
      pf.ny = to_int(value, source, line);
    } else if (key == "length") {
      pf.length = to_real(value, source, line);
    } else if (key == "width") {
      pf.width = to_real(value, source, line);
    } else if (key == "height") {
      pf.height = to_real(value, source, line);
    } else if (key == "p") {
      pf.p = to_real(value, source, line);
    } else if (key == "gamma") {
      pf.gamma = to_real(value, source, line);
    } else if (key == "q") {
      pf.q = to_real(value, source, line);
    } else if (key == "a") {
      pf.a = to_real(value, source, line);
    } else if (key == "b") {
      pf.b = to_real(value, source, line);
    } else if (key == "weight") {
      constant = to_real(value, source, line);
    } else if (key == "weight.default") {
      fallback = to_real(value, source, line);
    } else if (key == "weight.region") {
      const auto v = to_reals(value, source, line);
      if (v.size() == 3) {
        regions.push_back({Box{v[0], v[1]}, v[2]});
      } else if (v.size() == 5) {
        regions.push_back({Box{v[0], v[1], v[2], v[3]}, v[4]});
      } else {
        fail(source, line, "weight.region takes 'x0 x1 value' or 'x0 x1 y0 y1 value'");
      }
    } else {
      apply_override(pf, key, value, line);
    }
  }

  if (pf.family.empty()) {
    fail(source, line, "missing 'family'");
  }
  if (pf.domain == "interval" && pf.n <= 0) {
    fail(source, line, "interval domain needs n >= 2");
  }
  if (pf.domain == "rectangle" && (pf.nx <= 0 || pf.ny <= 0)) {
    fail(source, line, "rectangle domain needs nx and ny");
  }
  if (pf.family == "indefinite" && !pf.gamma) {
    fail(source, line, "indefinite family needs 'gamma'");
  }
  if (pf.family == "pq" && !pf.q) {
    fail(source, line, "pq family needs 'q'");
  }
  if (constant && (fallback || !regions.empty())) {
    fail(source, line, "'weight' excludes 'weight.default' and 'weight.region'");
  }
  if (constant) {
    pf.weight = WeightSpec::constant(*constant);
  } else if (!regions.empty() || fallback) {
    pf.weight = WeightSpec::piecewise(std::move(regions), fallback.value_or(0.0));
  }
  return pf;
}

ProblemFile parse_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot read problem file " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem_text(ss.str(), path.string());
}

namespace {

ProblemInstance build(const ProblemFile& pf, std::shared_ptr<const Mesh> mesh) {
  if (pf.family == "indefinite") {
    return instantiate_indefinite(std::move(mesh), pf.p, *pf.gamma, pf.weight);
  }
  if (pf.family == "pq") {
    return instantiate_pq(std::move(mesh), pf.p, *pf.q, pf.weight);
  }
  return instantiate_kirchhoff(std::move(mesh), pf.a, pf.b, pf.weight);
}

BoundaryCondition bc_of(const ProblemFile& pf) {
  return pf.boundary == "neumann" ? BoundaryCondition::Neumann : BoundaryCondition::Dirichlet;
}

}  // namespace

ProblemInstance instantiate(const ProblemFile& pf) {
  const BoundaryCondition bc = bc_of(pf);
  auto mesh = pf.domain == "interval"
                  ? std::make_shared<const Mesh>(Mesh::interval(pf.n, pf.length, bc))
                  : std::make_shared<const Mesh>(Mesh::rectangle(pf.nx, pf.ny, pf.width, pf.height, bc));
  return build(pf, std::move(mesh));
}

ProblemInstance instantiate_coarse(const ProblemFile& pf) {
  const BoundaryCondition bc = bc_of(pf);
  const bool neumann = bc == BoundaryCondition::Neumann;
  // Dirichlet interval n = 4 has 3 DOFs; Neumann n = 4 has 5. Rectangles: 3x3
  // cells leave 4 interior nodes, 1x1 Neumann cells keep 4 corners.
  auto mesh = pf.domain == "interval"
                  ? std::make_shared<const Mesh>(Mesh::interval(4, pf.length, bc))
                  : std::make_shared<const Mesh>(neumann ? Mesh::rectangle(1, 1, pf.width, pf.height, bc)
                                                         : Mesh::rectangle(3, 3, pf.width, pf.height, bc));
  return build(pf, std::move(mesh));
}

}  // namespace nehari::cli
