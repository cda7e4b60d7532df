#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "varwidth/numerics.hpp"

using namespace varwidth;

namespace {
constexpr double kZ975 = 1.9599639845400545;  // Phi^{-1}(0.975), erf oracle
}

TEST_CASE("standard normal cdf matches reference points") {
  CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std_normal_cdf(40.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std_normal_cdf(-40.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::fabs(std_normal_cdf(1.959964) - 0.975) < 1e-6);
}

TEST_CASE("cdf symmetry and monotonicity on [-8, 8]") {
  double prev = -1.0;
  for (int i = 0; i <= 1600; ++i) {
    double x = -8.0 + i * 0.01;
    double c = std_normal_cdf(x);
    CHECK(std::fabs(std_normal_cdf(-x) - (1.0 - c)) < 1e-14);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("normal quantile values and round trips") {
  CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(std::fabs(std_normal_quantile(0.975) - kZ975) < 1e-5);
  CHECK(std::fabs(std_normal_quantile(0.025) + kZ975) < 1e-5);
  for (double p : {1e-10, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-6}) {
    CHECK(std::fabs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-10);
  }
  CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(-0.5), std::domain_error);
}

TEST_CASE("student t quantiles") {
  // Cauchy quartile is tan(pi/4) = 1.
  CHECK(std::fabs(student_t_quantile(1, 0.75) - 1.0) < 1e-9);
  // Frozen from an incomplete-beta inversion oracle (mpmath/scipy).
  CHECK(std::fabs(student_t_quantile(9, 0.975) - 2.2621571628540993) < 1e-4);
  // Converges to the normal quantile.
  CHECK(std::fabs(student_t_quantile(1000000, 0.975) - kZ975) < 1e-3);
  CHECK_THROWS_AS(student_t_quantile(0, 0.5), std::domain_error);
  CHECK_THROWS_AS(student_t_quantile(5, 1.5), std::domain_error);
}

TEST_CASE("student t round trips") {
  for (long long m : {1LL, 2LL, 5LL, 9LL, 30LL, 200LL, 10000LL}) {
    for (double p : {0.6, 0.75, 0.9, 0.975, 0.999, 0.1, 0.025}) {
      double t = student_t_quantile(m, p);
      CHECK(std::fabs(student_t_cdf(t, m) - p) <= 1e-9);
    }
  }
}

TEST_CASE("chi scaled density normalizes and matches moments") {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-12;
  cfg.rel_tol = 1e-12;
  double mass = integrate([](double r) { return chi_scaled_density(10, r); },
                          1e-8, 6.0, cfg);
  CHECK(std::fabs(mass - 1.0) < 1e-8);
  double second = integrate(
      [](double r) { return r * r * chi_scaled_density(10, r); }, 1e-8, 6.0,
      cfg);
  CHECK(std::fabs(second - 1.0) < 1e-8);
  // E(R) for n = 10 is sqrt(2/9) Gamma(5)/Gamma(4.5); log-gamma oracle value.
  double mean = integrate(
      [](double r) { return r * chi_scaled_density(10, r); }, 1e-8, 6.0, cfg);
  CHECK(std::fabs(mean - 0.9726592741215882) < 1e-8);
  CHECK(std::fabs(chi_scaled_mean(10) - 0.9726592741215882) < 1e-12);
  CHECK_THROWS_AS(chi_scaled_density(1, 0.5), std::domain_error);
}

TEST_CASE("E(R^2) identity across sample sizes") {
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-12;
  cfg.rel_tol = 1e-12;
  for (long long n : {2LL, 5LL, 10LL, 50LL, 200LL}) {
    double hi = 12.0 / std::sqrt(static_cast<double>(n - 1)) + 3.0;
    double second = integrate(
        [n](double r) { return r * r * chi_scaled_density(n, r); }, 1e-10, hi,
        cfg);
    CHECK(std::fabs(second - 1.0) < 1e-7);
  }
}

TEST_CASE("integrate reference values") {
  QuadratureConfig cfg;
  double one = integrate([](double x) { return std_normal_pdf(x); }, -8.0, 8.0,
                         cfg);
  CHECK(std::fabs(one - 1.0) < 1e-10);
  CHECK(std::fabs(integrate([](double) { return 1.0; }, 0.0, 2.0, cfg) - 2.0) <
        1e-13);
  cfg.abs_tol = 1e-14;
  cfg.rel_tol = 1e-14;
  double third = integrate([](double x) { return x * x; }, 0.0, 1.0, cfg);
  CHECK(std::fabs(third - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("integrate is deterministic and reports non-convergence") {
  QuadratureConfig cfg;
  auto f = [](double x) { return std::sin(40.0 * x) * std::exp(-x * x); };
  double a = integrate(f, -4.0, 4.0, cfg);
  double b = integrate(f, -4.0, 4.0, cfg);
  CHECK(a == b);

  QuadratureConfig tight;
  tight.abs_tol = 1e-15;
  tight.rel_tol = 1e-15;
  tight.max_subdivisions = 3;
  bool threw = false;
  try {
    integrate([](double x) { return std::sin(500.0 * x); }, 0.0, 20.0, tight);
  } catch (const ConvergenceError& e) {
    threw = true;
    CHECK(std::isfinite(e.best_estimate()));
  }
  CHECK(threw);
  QuadratureConfig bad;
  bad.abs_tol = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("find_root_monotone") {
  QuadratureConfig cfg;
  CHECK(std::fabs(find_root_monotone([](double x) { return x - 1.0; }, 0.0,
                                     2.0, 1e-12) -
                  1.0) < 1e-11);
  CHECK(std::fabs(find_root_monotone([](double x) { return x * x * x - 8.0; },
                                     0.0, 3.0, 1e-10) -
                  2.0) < 1e-9);
  // Inverting b_std(x) = x + z at 2.5: algebraic oracle 2.5 - z.
  double x = find_root_monotone(
      [](double t) { return (t + 1.959964) - 2.5; }, 0.0, 2.0, 1e-10);
  CHECK(std::fabs(x - 0.540036) < 1e-9);
  CHECK_THROWS_AS(
      find_root_monotone([](double t) { return t + 10.0; }, 0.0, 1.0, 1e-8),
      std::domain_error);
}

TEST_CASE("gauss_linear_segment matches brute-force quadrature") {
  auto brute = [](double x0, double x1, double v0, double v1, double scale,
                  double shift) {
    return oracle::simpson(
        [&](double x) {
          double t = (x - x0) / (x1 - x0);
          return (v0 + t * (v1 - v0)) *
                 oracle::normal_pdf(scale * x - shift);
        },
        x0, x1, 20000);
  };
  struct Case {
    double x0, x1, v0, v1, scale, shift;
  } cases[] = {{-1.0, 2.0, 0.3, -0.7, 1.0, 0.0},
               {0.5, 0.65, -0.2, -0.25, 1.0, 3.0},
               {-2.0, 0.0, 0.0, 1.0, 0.7, -1.2},
               {1.0, 4.0, 1.0, 1.0, 2.5, 2.0}};
  for (const auto& c : cases) {
    double exact =
        gauss_linear_segment(c.x0, c.x1, c.v0, c.v1, c.scale, c.shift);
    CHECK(std::fabs(exact - brute(c.x0, c.x1, c.v0, c.v1, c.scale, c.shift)) <
          1e-10);
  }
}
