#pragma once

#include <Eigen/Core>
#include <vector>

#include "varwidth/interval.hpp"

namespace varwidth {

// Configuration for the constrained b-function solve. The objective is
//   J(b) = (1-w) * len(0) + w * ( max_psi len(psi) + 1e-3 * E_g[len] )
// where len(psi) is the expected length of C* at psi and g = N(0,
// spread_scale^2) supplies a small diffuse tie-break that selects the
// shortest-on-average solution among those attaining the same maximum.
// Coverage >= 1 - alpha is enforced on the (mirrored) constraint grid.
struct SolverConfig {
  double w = 0.1;
  double alpha = 0.05;
  double q = 6.0;
  int knot_count = 81;
  Eigen::VectorXd psi_constraint_grid;  // nonnegative nodes; mirrored internally
  double spread_scale = 4.0;
  int max_iterations = 80;      // outer augmented-Lagrangian iterations
  double constraint_tol = 1e-6; // final allowed coverage shortfall on the grid
  double lipschitz_L = 5.0;
  // Slopes of e are kept >= -1 + slope_floor. Without a real floor the
  // optimizer drives b'(x) toward 0, b^{-1} turns near-vertical, and coverage
  // can dip arbitrarily fast between any finite set of constraint nodes.
  double slope_floor = 0.25;

  void validate() const;
};

// Constraint grid [0, q + 4] at the given spacing.
Eigen::VectorXd default_constraint_grid(double q, double spacing = 0.05);
SolverConfig make_solver_config(double w, double alpha);

struct SolveLogRow {
  int iter;
  double objective;
  double max_violation;
};

struct SolveResult {
  BFunction bf;
  std::vector<SolveLogRow> log;
  int densify_rounds = 0;
  double final_violation = 0.0;
};

// Constrained minimization over the knot values of e (augmented Lagrangian
// outer loop, Gauss-Newton inner steps). Throws on non-convergence.
SolveResult solve_b(const SolverConfig& cfg);

struct CoverageAudit {
  double min_coverage;
  double argmin_psi;
  double threshold;
  bool pass;
};

// Minimum coverage over +-fine_grid with pass/fail at 1 - alpha - 1e-3.
CoverageAudit audit_coverage(const BFunction& bf, double alpha,
                             const Eigen::VectorXd& fine_grid);

}  // namespace varwidth
