#include "varwidth/var_unknown.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace varwidth {

namespace {

constexpr double kTailMass = 1e-12;

double conditional_coverage(const BFunction& bf, double psi, double r) {
  double lower = r * inverse_b(bf, psi / r);
  double upper = -r * inverse_b(bf, -psi / r);
  return std_normal_cdf(upper - psi) - std_normal_cdf(lower - psi);
}

}  // namespace

double RDistribution::density(double r) const { return chi_scaled_density(n, r); }

double RDistribution::cdf(double r) const { return chi_scaled_cdf(n, r); }

RDistribution make_r_distribution(long long n) {
  if (n < 2) throw std::domain_error("make_r_distribution: n must be >= 2");
  RDistribution d;
  d.n = n;
  d.mean = chi_scaled_mean(n);
  auto cdf = [n](double r) { return chi_scaled_cdf(n, r); };
  d.r_lo = find_root_monotone(
      [&](double r) { return cdf(r) - kTailMass; }, 1e-12, 1.0, 1e-12);
  double hi = 2.0;
  while (cdf(hi) < 1.0 - kTailMass) hi *= 2.0;
  d.r_hi = find_root_monotone(
      [&](double r) { return cdf(r) - (1.0 - kTailMass); }, 1.0, hi, 1e-12);
  return d;
}

UnknownVarContext make_unknown_context(long long n, BFunction bf) {
  UnknownVarContext ctx;
  ctx.n = n;
  ctx.r_dist = make_r_distribution(n);
  ctx.t_quantile = student_t_quantile(n - 1, 1.0 - bf.alpha / 2.0);
  QuadratureConfig cfg;
  cfg.abs_tol = 1e-10;
  cfg.rel_tol = 1e-12;
  double second_moment = integrate(
      [&](double r) { return r * r * ctx.r_dist.density(r); }, ctx.r_dist.r_lo,
      ctx.r_dist.r_hi, cfg);
  if (std::fabs(second_moment - 1.0) > 1e-7) {
    throw std::runtime_error(
        "make_unknown_context: E(R^2) = 1 identity violated by quadrature");
  }
  ctx.bf = std::move(bf);
  return ctx;
}

double coverage_unknown(const UnknownVarContext& ctx, double psi,
                        const QuadratureConfig& cfg) {
  auto f = [&](double r) {
    return conditional_coverage(ctx.bf, psi, r) * ctx.r_dist.density(r);
  };
  return integrate(f, ctx.r_dist.r_lo, ctx.r_dist.r_hi, cfg);
}

double expected_length_unknown(const UnknownVarContext& ctx, double psi,
                               const QuadratureConfig& cfg) {
  const BFunction& bf = ctx.bf;
  const auto& xs = bf.pair_knots;
  const auto& ss = bf.pair_values;
  int nseg = static_cast<int>(xs.size()) - 1;
  QuadratureConfig inner_cfg = cfg;
  inner_cfg.abs_tol = cfg.abs_tol / std::max(1, nseg);

  auto inner = [&](double r) {
    // int_{-q}^{q} (e(x)+e(-x)) phi(r x - psi) dx for fixed r.
    double total = 0.0;
    for (int i = 0; i < nseg; ++i) {
      double s0 = ss[i], s1 = ss[i + 1];
      if (s0 == 0.0 && s1 == 0.0) continue;
      double x0 = xs[i], x1 = xs[i + 1];
      auto f = [&](double x) {
        double t = (x - x0) / (x1 - x0);
        return (s0 + t * (s1 - s0)) * std_normal_pdf(r * x - psi);
      };
      total += integrate(f, x0, x1, inner_cfg);
    }
    return total;
  };
  auto outer = [&](double r) {
    return inner(r) * r * r * ctx.r_dist.density(r);
  };
  double correction =
      integrate(outer, ctx.r_dist.r_lo, ctx.r_dist.r_hi, cfg);
  return 2.0 * bf.z * ctx.r_dist.mean + correction;
}

EfficiencyCurve efficiency_unknown(const UnknownVarContext& ctx,
                                   const Eigen::VectorXd& psi_grid,
                                   const QuadratureConfig& cfg) {
  double denom = 2.0 * ctx.t_quantile * ctx.r_dist.mean;
  EfficiencyCurve curve;
  curve.reserve(psi_grid.size());
  for (int i = 0; i < psi_grid.size(); ++i) {
    double psi = psi_grid[i];
    double len = expected_length_unknown(ctx, psi, cfg);
    double ratio = len / denom;
    curve.push_back({psi, coverage_unknown(ctx, psi, cfg), len, ratio * ratio});
  }
  return curve;
}

std::vector<Theorem2Row> theorem2_diagnostics(const BFunction& bf,
                                              const std::vector<long long>& n_list,
                                              const Eigen::VectorXd& psi_grid,
                                              const QuadratureConfig& cfg) {
  if (psi_grid.size() == 0) {
    throw std::invalid_argument("theorem2_diagnostics: empty psi grid");
  }
  std::vector<long long> ns = n_list;
  std::sort(ns.begin(), ns.end());
  std::vector<Theorem2Row> rows;
  for (long long n : ns) {
    UnknownVarContext ctx = make_unknown_context(n, bf);
    double denom = 2.0 * ctx.t_quantile * ctx.r_dist.mean;
    double sup_cov = 0.0, sup_len = 0.0;
    for (int i = 0; i < psi_grid.size(); ++i) {
      for (double sign : {1.0, -1.0}) {
        double psi = sign * psi_grid[i];
        double dc = std::fabs(coverage_known(bf, psi) -
                              coverage_unknown(ctx, psi, cfg));
        double dl = std::fabs(
            expected_length_known(bf, psi, cfg) / (2.0 * bf.z) -
            expected_length_unknown(ctx, psi, cfg) / denom);
        sup_cov = std::max(sup_cov, dc);
        sup_len = std::max(sup_len, dl);
        if (psi_grid[i] == 0.0) break;
      }
    }
    rows.push_back({n, sup_cov, sup_len});
  }
  return rows;
}

}  // namespace varwidth
