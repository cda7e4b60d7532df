#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oracles.hpp"
#include "varwidth/interval.hpp"

using namespace varwidth;

namespace {

constexpr double kZ975 = 1.9599639845400545;

// Single interior knot: q = 2, e(0) = -0.3, linear to zero at +-2.
BFunction single_knot_bf() {
  Eigen::VectorXd knots(3), e(3);
  knots << -2.0, 0.0, 2.0;
  e << 0.0, -0.3, 0.0;
  return make_b_function(0.05, 1.0, 2.0, 1.0, knots, e);
}

// Asymmetric example used by reflection / coverage checks.
BFunction wavy_bf() {
  Eigen::VectorXd knots(9), e(9);
  knots << -4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0;
  e << 0.0, 0.35, 0.1, -0.22, -0.3, -0.05, 0.3, 0.2, 0.0;
  return make_b_function(0.05, 1.0, 4.0, 1.0, knots, e);
}

BFunction reflect(const BFunction& bf) {
  Eigen::VectorXd knots = -bf.knots.reverse();
  Eigen::VectorXd e = bf.e_values.reverse();
  return make_b_function(bf.alpha, bf.w, bf.q, bf.lipschitz_L, knots, e);
}

// Coverage by predicate bisection plus Simpson quadrature of phi over the
// acceptance region; independent of inverse_b and of the Phi-difference
// derivation inside coverage_known.
double coverage_indicator_oracle(const BFunction& bf, double psi) {
  auto inside = [&](double x) {
    return -eval_b(bf, -x) <= psi && psi <= eval_b(bf, x);
  };
  double lo = psi - 12.0, hi = psi + 12.0;
  REQUIRE(!inside(lo));
  REQUIRE(!inside(hi));
  REQUIRE(inside(psi));
  double left = oracle::bisect_flip(inside, lo, psi, 1e-13);
  double right = oracle::bisect_flip(inside, psi, hi, 1e-13);
  return oracle::simpson(
      [&](double x) { return oracle::normal_pdf(x - psi); }, left, right,
      200000);
}

}  // namespace

TEST_CASE("standard_b is the fixed-width interval") {
  BFunction bf = standard_b(0.05);
  CHECK(std::fabs(eval_b(bf, 0.0) - kZ975) < 1e-5);
  for (double x : {-7.0, -2.5, 0.0, 1.0, 3.3, 9.0}) {
    CHECK(std::fabs((eval_b(bf, x) - eval_b(bf, -x)) - 2.0 * x) < 1e-12);
    CHECK(std::fabs(inverse_b(bf, x) - (x - bf.z)) < 1e-12);
  }
  for (double psi : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, -3.0}) {
    CHECK(std::fabs(coverage_known(bf, psi) - 0.95) < 1e-8);
  }
}

TEST_CASE("eval_b on the single-knot excess") {
  BFunction bf = single_knot_bf();
  CHECK(std::fabs(eval_b(bf, 1.0) - (1.0 + bf.z - 0.15)) < 1e-12);
  CHECK(eval_b(bf, 7.0) == 7.0 + bf.z);
  CHECK(eval_b(bf, bf.q + 5.0) == bf.q + 5.0 + bf.z);
  CHECK(std::fabs(inverse_b(bf, 1.0 + bf.z - 0.15) - 1.0) < 1e-9);
}

TEST_CASE("inverse_b round trips") {
  for (const BFunction& bf : {single_knot_bf(), wavy_bf(), standard_b(0.1)}) {
    for (int i = 0; i < 1000; ++i) {
      double x = -9.0 + 18.0 * i / 999.0;
      double y = eval_b(bf, x);
      CHECK(std::fabs(inverse_b(bf, y) - x) < 1e-9);
      CHECK(std::fabs(eval_b(bf, inverse_b(bf, y)) - y) < 1e-10);
    }
  }
}

TEST_CASE("interval validity on a dense grid") {
  for (const BFunction& bf : {single_knot_bf(), wavy_bf()}) {
    for (int i = 0; i <= 4000; ++i) {
      double x = -10.0 + 20.0 * i / 4000.0;
      CHECK(eval_b(bf, x) >= -eval_b(bf, -x) - 1e-12);
    }
  }
}

TEST_CASE("coverage matches the indicator-quadrature oracle") {
  for (const BFunction& bf : {single_knot_bf(), wavy_bf()}) {
    for (double psi : {0.0, 0.7, 1.5, 3.0, -2.2}) {
      CHECK(std::fabs(coverage_known(bf, psi) -
                      coverage_indicator_oracle(bf, psi)) < 1e-7);
    }
  }
}

TEST_CASE("coverage matches Monte Carlo containment frequency") {
  BFunction bf = single_knot_bf();
  oracle::NormalRng rng(20240817);
  const long long n = 10000000;
  for (double psi : {0.0, 1.0}) {
    long long hits = 0;
    for (long long i = 0; i < n; ++i) {
      double x = psi + rng.normal();
      if (-eval_b(bf, -x) <= psi && psi <= eval_b(bf, x)) ++hits;
    }
    double est = static_cast<double>(hits) / n;
    double exact = coverage_known(bf, psi);
    double se = std::sqrt(exact * (1.0 - exact) / n);
    CHECK(std::fabs(est - exact) < 4.0 * se);
  }
}

TEST_CASE("coverage symmetry for symmetric excess") {
  BFunction bf = single_knot_bf();
  for (double psi : {0.3, 1.1, 2.6, 5.0}) {
    CHECK(std::fabs(coverage_known(bf, psi) - coverage_known(bf, -psi)) <
          1e-12);
  }
}

TEST_CASE("expected length: standard and far-field limits") {
  BFunction std_bf = standard_b(0.05);
  QuadratureConfig cfg;
  CHECK(expected_length_known(std_bf, 0.7, cfg) == 2.0 * std_bf.z);
  BFunction bf = single_knot_bf();
  for (double psi : {bf.q + 9.0, -(bf.q + 11.0)}) {
    CHECK(std::fabs(expected_length_known(bf, psi, cfg) - 2.0 * bf.z) < 1e-12);
  }
}

TEST_CASE("expected length matches brute-force quadrature") {
  BFunction bf = single_knot_bf();
  QuadratureConfig cfg;
  // 2z + 2 int e phi at psi = 0, trapezoid with 10^6 points; the kink at 0
  // lies on a grid node so the trapezoid error is O(h^2).
  auto integrand = [&](double x) {
    return (eval_e(bf, x) + eval_e(bf, -x)) * oracle::normal_pdf(x);
  };
  double brute = 2.0 * bf.z + oracle::trapezoid(integrand, -2.0, 2.0, 1000000);
  CHECK(std::fabs(expected_length_known(bf, 0.0, cfg) - brute) < 1e-8);

  // Quadrature route agrees with the closed-form route everywhere.
  for (const BFunction& b2 : {bf, wavy_bf()}) {
    for (double psi : {0.0, 0.4, 1.7, 3.0, 6.5, -2.1}) {
      CHECK(std::fabs(expected_length_known(b2, psi, cfg) -
                      expected_length_known_exact(b2, psi)) < 1e-9);
    }
  }
}

TEST_CASE("efficiency curve properties") {
  BFunction std_bf = standard_b(0.05);
  Eigen::VectorXd grid(5);
  grid << -4.0, -1.0, 0.0, 2.0, 6.0;
  for (const auto& rec : efficiency_known(std_bf, grid)) {
    CHECK(std::fabs(rec.efficiency - 1.0) < 1e-10);
    double ratio = rec.expected_length / (2.0 * std_bf.z);
    CHECK(std::fabs(rec.efficiency - ratio * ratio) < 1e-14);
  }

  BFunction bf = wavy_bf();
  Eigen::VectorXd far(2);
  far << bf.q + 9.0, -(bf.q + 9.5);
  for (const auto& rec : efficiency_known(bf, far)) {
    CHECK(std::fabs(rec.efficiency - 1.0) < 1e-10);
  }

  // Reflecting e reflects the curve.
  BFunction mirrored = reflect(bf);
  Eigen::VectorXd pts(4);
  pts << 0.0, 0.8, 2.2, 4.4;
  auto curve = efficiency_known(bf, pts);
  auto curve_m = efficiency_known(mirrored, -pts);
  for (size_t i = 0; i < curve.size(); ++i) {
    CHECK(std::fabs(curve[i].efficiency - curve_m[i].efficiency) < 1e-12);
  }
}

TEST_CASE("json round trip preserves bytes and values") {
  BFunction bf = wavy_bf();
  std::string text = b_function_to_json(bf);
  BFunction back = b_function_from_json(text);
  CHECK(b_function_to_json(back) == text);
  CHECK(back.alpha == bf.alpha);
  CHECK(back.knots == bf.knots);
  CHECK(back.e_values == bf.e_values);

  auto path = std::filesystem::temp_directory_path() / "vw_test_bfun.json";
  save_b_function(bf, path.string());
  BFunction loaded = load_b_function(path.string());
  CHECK(loaded.e_values == bf.e_values);
  std::filesystem::remove(path);
}

TEST_CASE("invariant violations are rejected") {
  Eigen::VectorXd knots(3), e(3);
  knots << -2.0, 0.0, 2.0;

  // Excess not vanishing at the support edge.
  e << 0.1, 0.0, 0.0;
  CHECK_THROWS_AS(make_b_function(0.05, 1.0, 2.0, 1.0, knots, e),
                  std::invalid_argument);

  // Slope below -1: b not strictly increasing.
  e << 0.0, -2.5, 0.0;
  CHECK_THROWS_AS(make_b_function(0.05, 1.0, 2.0, 5.0, knots, e),
                  std::invalid_argument);

  // Lipschitz bound exceeded.
  e << 0.0, 1.8, 0.0;
  CHECK_THROWS_AS(make_b_function(0.05, 1.0, 2.0, 0.5, knots, e),
                  std::invalid_argument);

  // Interval validity: e(0) = -2z - 0.1 makes b(0) + b(0) < 0. Use a wide
  // grid so the slope constraints do not trigger first.
  double z = standard_b(0.05).z;
  Eigen::VectorXd knots2(3), e2(3);
  knots2 << -8.0, 0.0, 8.0;
  e2 << 0.0, -2.0 * z - 0.1, 0.0;
  CHECK_THROWS_AS(make_b_function(0.05, 1.0, 8.0, 5.0, knots2, e2),
                  std::invalid_argument);

  // Unsorted knots.
  Eigen::VectorXd bad_knots(3);
  bad_knots << -2.0, 2.0, 0.0;
  Eigen::VectorXd zeros = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(make_b_function(0.05, 1.0, 2.0, 1.0, bad_knots, zeros),
                  std::invalid_argument);

  // Knots not spanning [-q, q].
  Eigen::VectorXd short_knots(3);
  short_knots << -1.5, 0.0, 2.0;
  CHECK_THROWS_AS(make_b_function(0.05, 1.0, 2.0, 1.0, short_knots, zeros),
                  std::invalid_argument);

  // Malformed JSON document.
  CHECK_THROWS(b_function_from_json("{\"alpha\": 0.05}"));
}
