#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "nehari/problem.hpp"
#include "nehari/solvers.hpp"
#include "nehari/thresholds.hpp"

namespace nehari::cli {

/// Parsed problem definition.
///
/// Schema (one `key = value` per line, `#` starts a comment):
///
///   family    = indefinite | pq | kirchhoff
///   domain    = interval | rectangle            (default interval)
///   boundary  = dirichlet | neumann             (default dirichlet)
///   n         = <int>                           interval elements
///   length    = <real>                          (default 1)
///   nx, ny    = <int>; width, height = <real>   rectangle cells and extents
///   p         = <real>                          indefinite and pq (kirchhoff: 2)
///   gamma     = <real>                          indefinite
///   q         = <real>                          pq
///   a, b      = <real>                          kirchhoff
///   weight    = <real>                          constant f or beta
///   weight.default = <real>                     value outside the regions
///   weight.region  = x0 x1 value | x0 x1 y0 y1 value   (repeatable, first match wins)
///   solver.<field>, thresholds.<field>          numeric overrides, see apply_override
struct ProblemFile {
  std::string source;
  std::string family;
  std::string domain = "interval";
  std::string boundary = "dirichlet";
  int n = 0;
  int nx = 0;
  int ny = 0;
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;
  double p = 2.0;
  std::optional<double> gamma;
  std::optional<double> q;
  double a = 1.0;
  double b = 1.0;
  WeightSpec weight = WeightSpec::constant(0.0);
  SolverConfig solver;
  ThresholdOptions thresholds;
};

/// Throws ParseError with the line number on malformed input.
ProblemFile parse_problem_text(const std::string& text, const std::string& source = "<text>");
ProblemFile parse_problem_file(const std::filesystem::path& path);

/// Builds the mesh and instance; family validation errors surface as InputError.
ProblemInstance instantiate(const ProblemFile& pf);
/// Same problem on the coarsest mesh with at most five degrees of freedom.
ProblemInstance instantiate_coarse(const ProblemFile& pf);

}  // namespace nehari::cli
