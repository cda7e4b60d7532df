#pragma once

#include <vector>

#include "varwidth/numerics.hpp"

namespace varwidth {

// Consistent-model-selection tuning schedule eta_n = n^(-gamma) with
// 0 < gamma < 1/2, so eta_n -> 0 while sqrt(n) eta_n -> infinity.
struct Theorem1Schedule {
  std::vector<long long> n_values;
  double gamma = 0.25;
  double alpha = 0.05;

  void validate() const;
  double eta(long long n) const;
};

// Exact P(|X_n| > R sqrt(n) eta) with X_n ~ N(sqrt(n) eta / 2, 1) independent
// of R, by quadrature of the normal two-tail probability against f_R.
// Dimensionless; sigma cancels throughout this module.
double prob_a_complement(long long n, double eta,
                         const QuadratureConfig& cfg = {});

// Computable lower bound on the expected-length ratio of any interval that
// contains the estimator and covers at level 1 - alpha:
//   max(0, 1 - alpha - P(A_n^c)) * sqrt(n) eta / (4 t(n-1) E(R)).
double theorem1_lower_bound(long long n, double eta, double alpha,
                            const QuadratureConfig& cfg = {});

struct Theorem1Row {
  long long n;
  double eta;
  double sqrt_n_eta;
  double p_a_complement;
  double lower_bound;
};

std::vector<Theorem1Row> theorem1_table(const Theorem1Schedule& schedule,
                                        const QuadratureConfig& cfg = {});

}  // namespace varwidth
