#include "varwidth/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "varwidth/var_unknown.hpp"

namespace varwidth {

void Theorem1Schedule::validate() const {
  if (n_values.empty()) {
    throw std::invalid_argument("Theorem1Schedule: empty n list");
  }
  if (!(gamma > 0.0) || !(gamma < 0.5)) {
    throw std::invalid_argument("Theorem1Schedule: gamma must lie in (0, 1/2)");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("Theorem1Schedule: alpha must lie in (0, 1)");
  }
  for (size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 2 || (i > 0 && n_values[i] <= n_values[i - 1])) {
      throw std::invalid_argument(
          "Theorem1Schedule: n_values must be increasing and >= 2");
    }
  }
  // eta -> 0 and sqrt(n) eta -> infinity, checked at the endpoints.
  long long n0 = n_values.front(), n1 = n_values.back();
  if (n_values.size() > 1) {
    if (!(eta(n1) < eta(n0)) ||
        !(std::sqrt(static_cast<double>(n1)) * eta(n1) >
          std::sqrt(static_cast<double>(n0)) * eta(n0))) {
      throw std::invalid_argument(
          "Theorem1Schedule: schedule violates the consistent-tuning limits");
    }
  }
}

double Theorem1Schedule::eta(long long n) const {
  return std::pow(static_cast<double>(n), -gamma);
}

double prob_a_complement(long long n, double eta, const QuadratureConfig& cfg) {
  if (n < 2) throw std::domain_error("prob_a_complement: n must be >= 2");
  if (!(eta > 0.0)) throw std::domain_error("prob_a_complement: eta must be > 0");
  double tau = std::sqrt(static_cast<double>(n)) * eta;
  double mean = 0.5 * tau;
  RDistribution rd = make_r_distribution(n);
  auto f = [&](double r) {
    double two_tail = std_normal_upper_tail(r * tau - mean) +
                      std_normal_cdf(-r * tau - mean);
    return two_tail * rd.density(r);
  };
  double p = integrate(f, rd.r_lo, rd.r_hi, cfg);
  return std::clamp(p, 0.0, 1.0);
}

double theorem1_lower_bound(long long n, double eta, double alpha,
                            const QuadratureConfig& cfg) {
  double slack = 1.0 - alpha - prob_a_complement(n, eta, cfg);
  if (slack <= 0.0) return 0.0;
  double tau = std::sqrt(static_cast<double>(n)) * eta;
  double t = student_t_quantile(n - 1, 1.0 - alpha / 2.0);
  return slack * tau / (4.0 * t * chi_scaled_mean(n));
}

std::vector<Theorem1Row> theorem1_table(const Theorem1Schedule& schedule,
                                        const QuadratureConfig& cfg) {
  schedule.validate();
  std::vector<Theorem1Row> rows;
  rows.reserve(schedule.n_values.size());
  for (long long n : schedule.n_values) {
    double eta = schedule.eta(n);
    double p = prob_a_complement(n, eta, cfg);
    double bound = theorem1_lower_bound(n, eta, schedule.alpha, cfg);
    rows.push_back(
        {n, eta, std::sqrt(static_cast<double>(n)) * eta, p, bound});
  }
  return rows;
}

}  // namespace varwidth
