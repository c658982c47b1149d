#pragma once

#include <stdexcept>
#include <string>

namespace nehari {

/// Bad user-supplied value: non-finite entries, forbidden exponents, negative scales.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shape mismatch between a state and the mesh/problem it is evaluated on.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when a fibering scale is requested for u with H_lambda(u) F(u) <= 0.
class NotInCone : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A requested set (Nehari branch, constraint region) has no feasible point.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse / configuration errors from problem files and the command line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nehari
