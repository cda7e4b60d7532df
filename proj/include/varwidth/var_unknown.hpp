#pragma once

#include <Eigen/Core>
#include <vector>

#include "varwidth/interval.hpp"

namespace varwidth {

// Distribution of R = Sigma_hat/sigma for sample size n; (n-1) R^2 is
// chi-squared with n-1 degrees of freedom. The support is truncated where the
// tail mass drops below 1e-12 so quadrature runs on a certified finite range.
struct RDistribution {
  long long n = 2;
  double r_lo = 0.0;
  double r_hi = 0.0;
  double mean = 0.0;  // E(R), closed form

  double density(double r) const;
  double cdf(double r) const;
};

RDistribution make_r_distribution(long long n);

// Everything needed to evaluate the unknown-variance interval
// D* = [-R b(-X/R), R b(X/R)]: sample size, the b-function, and R's law.
// sigma never enters; all functionals depend on psi alone.
struct UnknownVarContext {
  long long n = 2;
  BFunction bf;
  RDistribution r_dist;
  double t_quantile = 0.0;  // t(n-1) for 1 - alpha, used by efficiency
};

// Validates E(R^2) = 1 within 1e-7 by quadrature before returning.
UnknownVarContext make_unknown_context(long long n, BFunction bf);

// P_psi(psi in D*): the conditional-on-R coverage mirrors coverage_known,
//   Phi(-r b^{-1}(-psi/r) - psi) - Phi(r b^{-1}(psi/r) - psi),
// integrated against f_R.
double coverage_unknown(const UnknownVarContext& ctx, double psi,
                        const QuadratureConfig& cfg = {});

// E_psi(length of D*) = 2 z E(R)
//   + int_0^inf int_{-q}^{q} (e(x)+e(-x)) phi(r x - psi) dx r^2 f_R(r) dr,
// nested quadrature with the inner x-integral over the pair-knot segments.
double expected_length_unknown(const UnknownVarContext& ctx, double psi,
                               const QuadratureConfig& cfg = {});

// Relative efficiency (E_psi(length of D*) / (2 t(n-1) E(R)))^2.
EfficiencyCurve efficiency_unknown(const UnknownVarContext& ctx,
                                   const Eigen::VectorXd& psi_grid,
                                   const QuadratureConfig& cfg = {});

struct Theorem2Row {
  long long n;
  double sup_coverage_diff;
  double sup_length_diff;
};

// For each n: sup_psi |coverage_known - coverage_unknown| and
// sup_psi |len_known/(2z) - len_unknown/(2 t(n-1) E(R))| over +-psi_grid.
std::vector<Theorem2Row> theorem2_diagnostics(const BFunction& bf,
                                              const std::vector<long long>& n_list,
                                              const Eigen::VectorXd& psi_grid,
                                              const QuadratureConfig& cfg = {});

}  // namespace varwidth
