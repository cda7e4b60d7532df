#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace varwidth {

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;

  void validate() const;
};

// Thrown when adaptive quadrature exhausts its subdivision budget; the best
// running estimate is still available.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate)
      : std::runtime_error(what), best_(best_estimate) {}
  double best_estimate() const { return best_; }

 private:
  double best_;
};

double std_normal_pdf(double x);
double std_normal_cdf(double x);
// Upper tail P(Z > x), accurate for large x where 1 - cdf would cancel.
double std_normal_upper_tail(double x);
double std_normal_quantile(double p);

double student_t_cdf(double t, long long m);
double student_t_quantile(long long m, double p);

// Regularized incomplete beta I_x(a, b) via Lentz continued fractions.
double regularized_incomplete_beta(double a, double b, double x);
// Regularized lower incomplete gamma P(a, x).
double regularized_lower_gamma(double a, double x);

// Density / CDF / mean of R = Sigma_hat/sigma where (n-1) R^2 ~ chi^2_{n-1}.
double chi_scaled_density(long long n, double r);
double chi_scaled_cdf(long long n, double r);
double chi_scaled_mean(long long n);

// Adaptive Gauss-Kronrod (G7,K15) quadrature of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg);

// Bisection for increasing g with g(lo) <= 0 <= g(hi); final bracket width <= tol.
double find_root_monotone(const std::function<double(double)>& g, double lo,
                          double hi, double tol);

// Closed form of int_{x0}^{x1} L(x) phi(scale*x - shift) dx for the linear
// interpolant L with L(x0)=v0, L(x1)=v1 and phi the standard normal density.
double gauss_linear_segment(double x0, double x1, double v0, double v1,
                            double scale, double shift);

}  // namespace varwidth
