#include "varwidth/containment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace varwidth {

namespace {

double outermost_breakpoint(const EstimatorSpec& spec) {
  return spec.kind == EstimatorKind::Scad ? spec.scad_a * spec.tau : spec.tau;
}

struct Candidate {
  double x;
  double slack;
};

void consider(Candidate& best, double x, double slack) {
  if (slack < best.slack) best = {x, slack};
}

// Both slack functions at x for a given estimate value.
void consider_estimate(const BFunction& bf, double x, double est,
                       Candidate& best) {
  consider(best, x, eval_b(bf, x) - est);
  consider(best, x, est + eval_b(bf, -x));
}

}  // namespace

ContainmentReport check_containment(const BFunction& bf,
                                    const EstimatorSpec& spec,
                                    double grid_spacing) {
  spec.validate();
  if (!(grid_spacing > 0.0)) {
    throw std::domain_error("check_containment: grid_spacing must be > 0");
  }
  double far = std::max(outermost_breakpoint(spec), bf.q);
  double reach = far + bf.z + 2.0;
  Candidate best{0.0, std::numeric_limits<double>::infinity()};

  long long steps = static_cast<long long>(std::ceil(2.0 * reach / grid_spacing));
  for (long long i = 0; i <= steps; ++i) {
    double x = -reach + 2.0 * reach * static_cast<double>(i) /
                            static_cast<double>(steps);
    consider_estimate(bf, x, psi_hat(spec, x), best);
  }

  // Breakpoints exactly, with the one-sided limit of the discontinuous hard
  // rule approached from outside the zero region.
  std::vector<double> breaks = {spec.tau, 2.0 * spec.tau,
                                spec.scad_a * spec.tau, bf.q};
  for (double b : breaks) {
    for (double sgn : {1.0, -1.0}) {
      double x = sgn * b;
      consider_estimate(bf, x, psi_hat(spec, x), best);
      if (spec.kind == EstimatorKind::Hard && b == spec.tau) {
        consider_estimate(bf, x, x, best);  // limit from |x| > tau
      }
    }
  }

  // Tail region |x| > max(far, q): e vanishes, so b(x) = x + z and
  // b(-x) = -x + z on both sides. Infima over the open tails:
  //   hard/scad: estimate = x, both slacks equal z;
  //   lasso: estimate = x -/+ tau, slacks z + tau and z - tau;
  //   adaptive: slacks z +/- tau^2/x, the lower one increasing in x.
  double tail_slack;
  switch (spec.kind) {
    case EstimatorKind::Hard:
    case EstimatorKind::Scad:
      tail_slack = bf.z;
      break;
    case EstimatorKind::Lasso:
      tail_slack = bf.z - spec.tau;
      break;
    case EstimatorKind::AdaptiveLasso:
      tail_slack = bf.z - spec.tau * spec.tau / far;
      break;
  }
  consider(best, far, tail_slack);

  ContainmentReport report;
  report.kind = spec.kind;
  report.tau = spec.tau;
  report.margin = best.slack;
  report.worst_x = best.x;
  report.contained = best.slack >= 0.0;
  return report;
}

double tau_max(const BFunction& bf, EstimatorKind kind, double scad_a,
               double tol) {
  if (!(tol > 0.0)) throw std::domain_error("tau_max: tol must be > 0");
  auto margin_at = [&](double tau) {
    EstimatorSpec spec{kind, tau, scad_a};
    return check_containment(bf, spec).margin;
  };
  double lo = 1e-6, hi = 10.0;
  double margin_lo = margin_at(lo);
  if (margin_lo < 0.0) {
    throw std::runtime_error(
        "tau_max: containment fails even at tau = 1e-6; interval and "
        "estimator are incompatible");
  }
  double margin_hi = margin_at(hi);
  if (margin_hi >= 0.0) {
    throw std::runtime_error(
        "tau_max: containment still holds at the bisection ceiling tau = 10");
  }
  std::vector<std::pair<double, double>> trace = {{lo, margin_lo},
                                                  {hi, margin_hi}};
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    double m = margin_at(mid);
    trace.emplace_back(mid, m);
    if (m >= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::sort(trace.begin(), trace.end());
  for (size_t i = 0; i + 1 < trace.size(); ++i) {
    if (trace[i + 1].second > trace[i].second + 1e-9) {
      std::ostringstream msg;
      msg << "tau_max: containment margin increased with tau ("
          << trace[i].first << " -> " << trace[i + 1].first
          << "); monotonicity assumption violated";
      throw std::runtime_error(msg.str());
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<ProfileRow> figure_profile(const BFunction& bf,
                                       const EstimatorSpec& spec,
                                       const Eigen::VectorXd& x_grid) {
  spec.validate();
  std::vector<ProfileRow> rows;
  rows.reserve(x_grid.size());
  for (int i = 0; i < x_grid.size(); ++i) {
    double x = x_grid[i];
    rows.push_back({x, -eval_b(bf, -x), psi_hat(spec, x), eval_b(bf, x)});
  }
  return rows;
}

}  // namespace varwidth
