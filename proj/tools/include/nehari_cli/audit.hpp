#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nehari/functional.hpp"
#include "nehari/problem.hpp"
#include "nehari/solvers.hpp"
#include "nehari/thresholds.hpp"

namespace nehari::cli {

struct AuditCheck {
  std::string name;
  bool passed = false;
  /// Measured error (or value) and the tolerance it was held to.
  double error = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  bool passed() const;
  /// Name of the first failing check.
  std::optional<std::string> first_failure() const;
};

struct AuditOptions {
  int random_states = 100;
  std::uint64_t seed = 1;
  double homogeneity_tol = 1e-9;
  double gradient_tol = 1e-5;
  double identity_tol = 1e-8;
  double cross_check_tol = 1e-3;
  /// Relative agreement between descent and the sphere scan on the coarse problem,
  /// widened below the scan value by the scan's grid spread.
  double oracle_tol = 0.05;
  int workers = 1;
};

/// (P1, P2, F) assembled from the mesh and weight data by a separate code path:
/// per-element gradients, vertex quadrature rebuilt from element measures.
EvaluatedTriple reference_triple(const ProblemInstance& pi, const Vector& u);

/// Homogeneity, Euler and finite-difference audits of one functional.
void audit_functional(const DoubleHomogeneousFunctional& fn, const std::string& label,
                      const AuditOptions& opt, AuditReport& report);

/// Branch minimizers at three lambda values in (mu_*, lambda*): Nehari
/// identities, sign law and formula-versus-direct levels.
void audit_branches(const ProblemInstance& pi, const ThresholdReport& thresholds,
                    const SolverConfig& cfg, const AuditOptions& opt, AuditReport& report);

/// lambda_1, mu_* and lambda* by descent on `under_test` against the sphere
/// scan of the reference assembly of `reference` (at most five DOFs).
void audit_oracle(const DoubleHomogeneousFunctional& under_test, const ProblemInstance& reference,
                  const AuditOptions& opt, AuditReport& report);

/// All of the above; the coarse problem is evaluated through `coarse_under_test`.
AuditReport run_audits(const ProblemInstance& full, const DoubleHomogeneousFunctional& coarse_under_test,
                       const ProblemInstance& coarse_reference, const SolverConfig& cfg,
                       const ThresholdOptions& topt, const AuditOptions& opt);

}  // namespace nehari::cli
