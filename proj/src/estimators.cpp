#include "varwidth/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace varwidth {

namespace {

double sign(double x) {
  if (x > 0.0) return 1.0;
  if (x < 0.0) return -1.0;
  return 0.0;
}

}  // namespace

EstimatorKind estimator_kind_from_string(std::string_view name) {
  if (name == "hard") return EstimatorKind::Hard;
  if (name == "lasso") return EstimatorKind::Lasso;
  if (name == "adaptive") return EstimatorKind::AdaptiveLasso;
  if (name == "scad") return EstimatorKind::Scad;
  throw std::invalid_argument("unknown estimator kind: " + std::string(name));
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Hard: return "hard";
    case EstimatorKind::Lasso: return "lasso";
    case EstimatorKind::AdaptiveLasso: return "adaptive";
    case EstimatorKind::Scad: return "scad";
  }
  return "?";
}

void EstimatorSpec::validate() const {
  if (!(tau > 0.0)) throw std::domain_error("EstimatorSpec: tau must be > 0");
  if (kind == EstimatorKind::Scad && !(scad_a > 2.0)) {
    throw std::domain_error("EstimatorSpec: SCAD requires a > 2");
  }
}

double psi_hat(const EstimatorSpec& spec, double x) {
  double t = spec.tau;
  double ax = std::fabs(x);
  switch (spec.kind) {
    case EstimatorKind::Hard:
      return ax <= t ? 0.0 : x;
    case EstimatorKind::Lasso:
      return sign(x) * std::max(ax - t, 0.0);
    case EstimatorKind::AdaptiveLasso:
      return ax <= t ? 0.0 : x - t * t / x;
    case EstimatorKind::Scad: {
      double a = spec.scad_a;
      if (ax <= 2.0 * t) return sign(x) * std::max(ax - t, 0.0);
      if (ax <= a * t) return ((a - 1.0) * x - sign(x) * a * t) / (a - 2.0);
      return x;
    }
  }
  return 0.0;
}

double psi_tilde(const EstimatorSpec& spec, double x, double r) {
  if (!(r > 0.0)) throw std::domain_error("psi_tilde: r must be > 0");
  EstimatorSpec scaled = spec;
  scaled.tau = r * spec.tau;
  return psi_hat(scaled, x);
}

double theta_from_psi(double psi_value, long long n, double sigma) {
  if (n < 1) throw std::domain_error("theta_from_psi: n must be >= 1");
  if (!(sigma > 0.0)) throw std::domain_error("theta_from_psi: sigma must be > 0");
  return sigma / std::sqrt(static_cast<double>(n)) * psi_value;
}

}  // namespace varwidth
