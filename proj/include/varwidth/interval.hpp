#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "varwidth/numerics.hpp"

namespace varwidth {

// Interval family C* = [-b(-X), b(X)] with b(x) = x + z + e(x), where the
// excess e is piecewise linear on a knot grid spanning [-q, q] and zero
// outside. Immutable after construction; all derived members are caches.
struct BFunction {
  double alpha = 0.05;       // miscoverage level
  double w = 1.0;            // solver weight that produced this b (provenance)
  double q = 6.0;            // excess support half-width
  double lipschitz_L = 5.0;  // bound on |e'| recorded with the artifact
  Eigen::VectorXd knots;     // strictly increasing, knots[0] = -q, knots[last] = q
  Eigen::VectorXd e_values;  // e at each knot; zero at both ends

  // Derived.
  double z = 0.0;               // normal quantile for 1 - alpha
  Eigen::VectorXd b_knots;      // b at each knot
  Eigen::VectorXd pair_knots;   // merged grid of knots and -knots
  Eigen::VectorXd pair_values;  // s(x) = e(x) + e(-x) at pair_knots
};

// Validates every invariant (support, slopes, strict increase of b, interval
// validity) and fills the derived caches. Throws std::invalid_argument.
BFunction make_b_function(double alpha, double w, double q, double lipschitz_L,
                          Eigen::VectorXd knots, Eigen::VectorXd e_values);

// The standard interval [X - z, X + z] expressed as a b-function (e == 0).
BFunction standard_b(double alpha);

double eval_e(const BFunction& bf, double x);
double eval_b(const BFunction& bf, double x);

// Unique x with b(x) = y; closed form outside the knot range, exact
// per-segment linear inversion inside.
double inverse_b(const BFunction& bf, double y);

// P_psi(psi in C*) for X ~ N(psi, 1). Since b is strictly increasing,
// psi <= b(X) iff X >= b^{-1}(psi) and psi >= -b(-X) iff X <= -b^{-1}(-psi),
// so the coverage is Phi(-b^{-1}(-psi) - psi) - Phi(b^{-1}(psi) - psi).
double coverage_known(const BFunction& bf, double psi);

// E_psi(length of C*) = 2z + int_{-q}^{q} (e(x) + e(-x)) phi(x - psi) dx,
// by adaptive quadrature over the pair-knot segments.
double expected_length_known(const BFunction& bf, double psi,
                             const QuadratureConfig& cfg = {});

// Same quantity through the closed-form linear-times-Gaussian segment
// integrals; used as the solver's fast path and as a cross-check route.
double expected_length_known_exact(const BFunction& bf, double psi);

// int (e(x) + e(-x)) phi(scale*x - shift) dx, closed form over the pair grid.
double excess_pair_integral_exact(const BFunction& bf, double scale,
                                  double shift);

struct EfficiencyRecord {
  double psi;
  double coverage;
  double expected_length;
  double efficiency;
};
using EfficiencyCurve = std::vector<EfficiencyRecord>;

// Relative efficiency e(psi) = (E_psi(length)/2z)^2 along a psi grid.
EfficiencyCurve efficiency_known(const BFunction& bf,
                                 const Eigen::VectorXd& psi_grid,
                                 const QuadratureConfig& cfg = {});

// JSON artifact: {"alpha", "w", "q", "lipschitz_L", "knots", "e_values"}.
// Loading re-validates all invariants.
std::string b_function_to_json(const BFunction& bf);
BFunction b_function_from_json(const std::string& text);
void save_b_function(const BFunction& bf, const std::string& path);
BFunction load_b_function(const std::string& path);

}  // namespace varwidth
