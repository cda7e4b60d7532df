#pragma once

#include <string>
#include <string_view>

namespace varwidth {

enum class EstimatorKind { Hard, Lasso, AdaptiveLasso, Scad };

EstimatorKind estimator_kind_from_string(std::string_view name);
std::string to_string(EstimatorKind kind);

// Thresholding estimator in scaled coordinates: kind plus scaled tuning
// tau = sqrt(n) * eta_n, and the SCAD constant a.
struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::Hard;
  double tau = 1.0;
  double scad_a = 3.7;

  void validate() const;
};

// Known-variance estimate psi_hat(x) for X = (sqrt(n)/sigma) * Ybar.
double psi_hat(const EstimatorSpec& spec, double x);

// Unknown-variance form: identical to psi_hat with threshold tau replaced by
// r * tau throughout (r = Sigma_hat/sigma).
double psi_tilde(const EstimatorSpec& spec, double x, double r);

// Back to original coordinates: theta = (sigma/sqrt(n)) * psi.
double theta_from_psi(double psi_value, long long n, double sigma);

}  // namespace varwidth
