#pragma once

#include <Eigen/Core>
#include <vector>

#include "varwidth/estimators.hpp"
#include "varwidth/interval.hpp"

namespace varwidth {

struct ContainmentReport {
  EstimatorKind kind;
  double tau;
  bool contained;   // margin >= 0
  double worst_x;   // location of the maximal violation / tightest slack
  double margin;    // min over x of min(b(x) - est(x), est(x) + b(-x))
};

// Decides whether -b(-x) <= psi_hat(x) <= b(x) for every real x, by a dense
// grid, exact one-sided limits at the estimator breakpoints, and closed-form
// tail analysis where both the estimator and b are affine (or, for the
// adaptive LASSO, where the gap has a monotone closed form).
ContainmentReport check_containment(const BFunction& bf,
                                    const EstimatorSpec& spec,
                                    double grid_spacing = 1e-3);

// Supremum of tau preserving containment, by bisection over [1e-6, 10].
// Margins along the bisection trace are checked to be non-increasing in tau.
double tau_max(const BFunction& bf, EstimatorKind kind, double scad_a,
               double tol);

struct ProfileRow {
  double x;
  double lower;
  double estimate;
  double upper;
};

// Rows (x, -b(-x), psi_hat(x), b(x)) for plotting estimator-vs-interval.
std::vector<ProfileRow> figure_profile(const BFunction& bf,
                                       const EstimatorSpec& spec,
                                       const Eigen::VectorXd& x_grid);

}  // namespace varwidth
