#include "varwidth/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace varwidth {

namespace {

constexpr double kTieBreak = 1e-3;     // weight of the diffuse average term
constexpr double kSlopeMargin = 1e-6;  // kept inside the BFunction tolerances

// Working view of the optimization problem. Variables are
//   x = [e_1 .. e_{K-2}, M]  (e_0 = e_{K-1} = 0 pinned, M = max length - 2z).
struct Workspace {
  double alpha, z, q, big_l;
  Eigen::VectorXd knots;          // K
  int np;                         // K - 2 interior knots
  int nv;                         // np + 1
  Eigen::VectorXd cvec;           // objective gradient
  double obj_const;               // constant part of the objective
  Eigen::MatrixXd lin_rows;       // linear constraints  lin_rows * x <= lin_rhs
  Eigen::VectorXd lin_rhs;
  std::vector<double> cov_psis;   // mirrored coverage grid
  double w;

  int n_cov() const { return static_cast<int>(cov_psis.size()); }
  int n_con() const { return n_cov() + static_cast<int>(lin_rows.rows()); }
};

double hat_value(const Eigen::VectorXd& knots, int j, double x) {
  double left = (j > 0) ? knots[j - 1] : knots[j];
  double right = (j + 1 < knots.size()) ? knots[j + 1] : knots[j];
  if (x <= left || x >= right) {
    return (x == knots[j]) ? 1.0 : 0.0;
  }
  if (x <= knots[j]) return (x - left) / (knots[j] - left);
  return (right - x) / (right - knots[j]);
}

// Row of coefficients such that int (e(x)+e(-x)) * mult * phi(scale*x - 0) dx
// equals row . p for interior knot values p.
Eigen::VectorXd pair_integral_row(const Eigen::VectorXd& knots, double psi,
                                  double scale, double mult) {
  int K = static_cast<int>(knots.size());
  Eigen::VectorXd row = Eigen::VectorXd::Zero(K - 2);
  for (int seg = 0; seg + 1 < K; ++seg) {
    double x0 = knots[seg], x1 = knots[seg + 1];
    // e(x) contribution of knots seg and seg+1; e(-x) contribution mirrors
    // onto knots K-1-seg and K-2-seg.
    struct Part {
      int idx;
      double v0, v1;
    } parts[4] = {{seg, 1.0, 0.0},
                  {seg + 1, 0.0, 1.0},
                  {K - 1 - seg, 1.0, 0.0},
                  {K - 2 - seg, 0.0, 1.0}};
    for (const auto& part : parts) {
      if (part.idx <= 0 || part.idx >= K - 1) continue;
      row[part.idx - 1] +=
          mult * gauss_linear_segment(x0, x1, part.v0, part.v1, scale, psi);
    }
  }
  return row;
}

struct CoverageEval {
  double coverage;
  Eigen::VectorXd grad;  // d coverage / d p
};

CoverageEval coverage_with_grad(const Workspace& ws, const Eigen::VectorXd& p,
                                double psi, double z) {
  const auto& kn = ws.knots;
  int K = static_cast<int>(kn.size());
  Eigen::VectorXd ev(K);
  ev[0] = 0.0;
  ev.segment(1, ws.np) = p;
  ev[K - 1] = 0.0;
  Eigen::VectorXd bk = kn.array() + z + ev.array();

  auto invert = [&](double y) -> std::pair<double, int> {
    if (y <= bk[0] || y >= bk[K - 1]) return {y - z, -1};
    const double* begin = bk.data();
    int i = static_cast<int>(std::upper_bound(begin, begin + K, y) - begin) - 1;
    i = std::clamp(i, 0, K - 2);
    double t = (y - bk[i]) / (bk[i + 1] - bk[i]);
    return {kn[i] + t * (kn[i + 1] - kn[i]), i};
  };

  auto [lower, sl] = invert(psi);
  auto [ml, su] = invert(-psi);
  double upper = -ml;
  CoverageEval out;
  out.coverage = std_normal_cdf(upper - psi) - std_normal_cdf(lower - psi);
  out.grad = Eigen::VectorXd::Zero(ws.np);
  double pdf_u = std_normal_pdf(upper - psi);
  double pdf_l = std_normal_pdf(lower - psi);
  if (su >= 0) {
    double bp = 1.0 + (ev[su + 1] - ev[su]) / (kn[su + 1] - kn[su]);
    for (int j = su; j <= su + 1; ++j) {
      if (j >= 1 && j <= K - 2) {
        out.grad[j - 1] += pdf_u * hat_value(kn, j, -upper) / bp;
      }
    }
  }
  if (sl >= 0) {
    double bp = 1.0 + (ev[sl + 1] - ev[sl]) / (kn[sl + 1] - kn[sl]);
    for (int j = sl; j <= sl + 1; ++j) {
      if (j >= 1 && j <= K - 2) {
        out.grad[j - 1] += pdf_l * hat_value(kn, j, lower) / bp;
      }
    }
  }
  return out;
}

// All inequality constraints g(x) <= 0 with Jacobian. Coverage rows first.
void eval_constraints(const Workspace& ws, const Eigen::VectorXd& x,
                      Eigen::VectorXd& g, Eigen::MatrixXd& jac) {
  int nc = ws.n_con();
  g.resize(nc);
  jac.setZero(nc, ws.nv);
  Eigen::VectorXd p = x.head(ws.np);
  for (int i = 0; i < ws.n_cov(); ++i) {
    CoverageEval ce = coverage_with_grad(ws, p, ws.cov_psis[i], ws.z);
    g[i] = (1.0 - ws.alpha) - ce.coverage;
    jac.row(i).head(ws.np) = -ce.grad.transpose();
  }
  int off = ws.n_cov();
  g.tail(nc - off) = ws.lin_rows * x - ws.lin_rhs;
  jac.bottomRows(nc - off) = ws.lin_rows;
}

Workspace build_workspace(const SolverConfig& cfg,
                          const std::vector<double>& extra_cov_psis) {
  Workspace ws;
  ws.alpha = cfg.alpha;
  ws.z = std_normal_quantile(1.0 - cfg.alpha / 2.0);
  ws.q = cfg.q;
  ws.w = cfg.w;
  ws.big_l = cfg.lipschitz_L;
  int K = cfg.knot_count;
  ws.knots = Eigen::VectorXd::LinSpaced(K, -cfg.q, cfg.q);
  ws.np = K - 2;
  ws.nv = ws.np + 1;

  // Objective: (1-w) len(0) + w (2z + M) + w * kTieBreak * E_{N(0,s^2)}[len].
  Eigen::VectorXd a0 = pair_integral_row(ws.knots, 0.0, 1.0, 1.0);
  double s = cfg.spread_scale;
  double sd = std::sqrt(1.0 + s * s);
  // int len(psi) N(psi; 0, s^2) dpsi - 2z = int s(x) * N(x; 0, 1 + s^2) dx.
  Eigen::VectorXd dif = pair_integral_row(ws.knots, 0.0, 1.0 / sd, 1.0 / sd);
  ws.cvec = Eigen::VectorXd::Zero(ws.nv);
  ws.cvec.head(ws.np) =
      (1.0 - cfg.w) * a0 + cfg.w * kTieBreak * dif;
  ws.cvec[ws.np] = cfg.w;
  ws.obj_const = (1.0 - cfg.w) * 2.0 * ws.z + cfg.w * 2.0 * ws.z +
                 cfg.w * kTieBreak * 2.0 * ws.z;

  // Coverage grid: mirror the nonnegative nodes, plus any densify extras.
  std::set<double> cov_set;
  for (int i = 0; i < cfg.psi_constraint_grid.size(); ++i) {
    double v = cfg.psi_constraint_grid[i];
    cov_set.insert(v);
    cov_set.insert(-v);
  }
  for (double v : extra_cov_psis) {
    cov_set.insert(v);
    cov_set.insert(-v);
  }
  ws.cov_psis.assign(cov_set.begin(), cov_set.end());

  // Linear rows: slope bounds, strict-increase margin, interval validity,
  // epigraph rows for the max-length variable.
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (int seg = 0; seg + 1 < K; ++seg) {
    double h = ws.knots[seg + 1] - ws.knots[seg];
    Eigen::VectorXd r = Eigen::VectorXd::Zero(ws.nv);
    if (seg + 1 <= ws.np) r[seg + 1 - 1] += 1.0;
    if (seg >= 1) r[seg - 1] -= 1.0;
    rows.push_back(r);
    rhs.push_back((ws.big_l - kSlopeMargin) * h);
    rows.push_back(-r);
    rhs.push_back((1.0 - cfg.slope_floor) * h);
  }
  for (int i = 1; i <= ws.np; ++i) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(ws.nv);
    r[i - 1] -= 1.0;
    int mirror = K - 1 - i;
    if (mirror >= 1 && mirror <= ws.np) r[mirror - 1] -= 1.0;
    rows.push_back(r);
    rhs.push_back(2.0 * ws.z - kSlopeMargin);
  }
  double epi_spacing = 0.1;
  for (double psi = 0.0; psi <= cfg.q + 4.0 + 1e-12; psi += epi_spacing) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(ws.nv);
    r.head(ws.np) = pair_integral_row(ws.knots, psi, 1.0, 1.0);
    r[ws.np] = -1.0;
    rows.push_back(r);
    rhs.push_back(0.0);
  }
  ws.lin_rows.resize(rows.size(), ws.nv);
  ws.lin_rhs.resize(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    ws.lin_rows.row(i) = rows[i].transpose();
    ws.lin_rhs[i] = rhs[i];
  }
  return ws;
}

struct AlOutcome {
  Eigen::VectorXd x;
  double violation;
  std::vector<SolveLogRow> log;
  bool converged;
};

AlOutcome augmented_lagrangian(const Workspace& ws, int max_outer,
                               double target_violation) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(ws.nv);
  int nc = ws.n_con();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(nc);
  double mu = 1000.0;
  double prev_v = std::numeric_limits<double>::infinity();
  Eigen::VectorXd g;
  Eigen::MatrixXd jac;
  AlOutcome out;
  out.converged = false;

  auto al_value = [&](const Eigen::VectorXd& xx) {
    Eigen::VectorXd gg;
    Eigen::MatrixXd jj;
    eval_constraints(ws, xx, gg, jj);
    double f = ws.cvec.dot(xx);
    for (int i = 0; i < nc; ++i) {
      double t = lambda[i] / mu + gg[i];
      if (t > 0.0) f += 0.5 * mu * (t * t - (lambda[i] / mu) * (lambda[i] / mu));
    }
    return f;
  };

  for (int outer = 0; outer < max_outer; ++outer) {
    // Inner: Levenberg-Marquardt damped Gauss-Newton on the AL function.
    // Rejected trials raise the damping and recompute the direction, which
    // copes with the piecewise-C1 kinks of the coverage constraints.
    double damping = 1e-8;
    for (int inner = 0; inner < 200; ++inner) {
      eval_constraints(ws, x, g, jac);
      Eigen::VectorXd t = lambda / mu + g;
      Eigen::VectorXd grad = ws.cvec;
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(ws.nv, ws.nv);
      for (int i = 0; i < nc; ++i) {
        if (t[i] > 0.0) {
          grad += mu * t[i] * jac.row(i).transpose();
          H.selfadjointView<Eigen::Lower>().rankUpdate(jac.row(i).transpose(),
                                                       mu);
        }
      }
      if (grad.lpNorm<Eigen::Infinity>() < 1e-9 * std::max(1.0, mu * 1e-6)) {
        break;
      }
      double f0 = ws.cvec.dot(x);
      for (int i = 0; i < nc; ++i) {
        if (t[i] > 0.0) {
          f0 += 0.5 * mu * (t[i] * t[i] - (lambda[i] / mu) * (lambda[i] / mu));
        }
      }
      Eigen::MatrixXd Hfull = Eigen::MatrixXd(H.selfadjointView<Eigen::Lower>());
      double diag_scale = Hfull.diagonal().maxCoeff() + 1.0;
      bool accepted = false;
      for (int trial = 0; trial < 40; ++trial) {
        Eigen::MatrixXd Hd = Hfull;
        Hd.diagonal().array() += damping * diag_scale;
        Eigen::VectorXd d = Hd.ldlt().solve(-grad);
        double slope = grad.dot(d);
        if (slope < 0.0) {
          Eigen::VectorXd xn = x + d;
          double f1 = al_value(xn);
          if (f1 <= f0 + 1e-4 * slope) {
            x = xn;
            damping = std::max(damping / 3.0, 1e-12);
            accepted = true;
            break;
          }
          if (std::fabs(slope) < 1e-16 * (1.0 + std::fabs(f0))) break;
        }
        damping *= 10.0;
      }
      if (!accepted) break;
    }

    eval_constraints(ws, x, g, jac);
    double vmax = 0.0;
    for (int i = 0; i < nc; ++i) vmax = std::max(vmax, g[i]);
    double objective = ws.obj_const + ws.cvec.dot(x);
    out.log.push_back({outer, objective, vmax});
    for (int i = 0; i < nc; ++i) {
      lambda[i] = std::max(0.0, lambda[i] + mu * g[i]);
    }
    if (vmax <= target_violation) {
      out.x = x;
      out.violation = vmax;
      out.converged = true;
      return out;
    }
    if (vmax > 0.5 * prev_v && mu < 1e9) mu *= 10.0;
    prev_v = std::max(vmax, 1e-300);
  }
  eval_constraints(ws, x, g, jac);
  out.x = x;
  out.violation = g.maxCoeff();
  return out;
}

BFunction bfunction_from_solution(const SolverConfig& cfg, const Workspace& ws,
                                  const Eigen::VectorXd& x) {
  int K = cfg.knot_count;
  Eigen::VectorXd e(K);
  e[0] = 0.0;
  e.segment(1, ws.np) = x.head(ws.np);
  e[K - 1] = 0.0;
  return make_b_function(cfg.alpha, cfg.w, cfg.q, cfg.lipschitz_L, ws.knots, e);
}

}  // namespace

void SolverConfig::validate() const {
  if (!(w >= 0.0) || !(w <= 1.0)) {
    throw std::invalid_argument("SolverConfig: w must lie in [0, 1]");
  }
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("SolverConfig: alpha must lie in (0, 1)");
  }
  if (!(q > 0.0)) throw std::invalid_argument("SolverConfig: q must be > 0");
  if (knot_count < 3) {
    throw std::invalid_argument("SolverConfig: knot_count must be >= 3");
  }
  if (!(spread_scale > 0.0)) {
    throw std::invalid_argument("SolverConfig: spread_scale must be > 0");
  }
  if (max_iterations < 1 || !(constraint_tol >= 0.0)) {
    throw std::invalid_argument("SolverConfig: bad iteration/tolerance limits");
  }
  if (!(lipschitz_L > 0.0)) {
    throw std::invalid_argument("SolverConfig: lipschitz_L must be > 0");
  }
  if (!(slope_floor > 0.0) || !(slope_floor < 1.0)) {
    throw std::invalid_argument("SolverConfig: slope_floor must lie in (0, 1)");
  }
  if (psi_constraint_grid.size() < 2) {
    throw std::invalid_argument("SolverConfig: psi_constraint_grid missing");
  }
  if (psi_constraint_grid[0] > 1e-12 ||
      psi_constraint_grid[psi_constraint_grid.size() - 1] < q + 4.0 - 1e-9) {
    throw std::invalid_argument(
        "SolverConfig: psi_constraint_grid must cover [0, q + 4]");
  }
  for (int i = 0; i + 1 < psi_constraint_grid.size(); ++i) {
    if (psi_constraint_grid[i + 1] - psi_constraint_grid[i] > 0.1 + 1e-12) {
      throw std::invalid_argument(
          "SolverConfig: psi_constraint_grid spacing must be <= 0.1");
    }
  }
}

Eigen::VectorXd default_constraint_grid(double q, double spacing) {
  int n = static_cast<int>(std::ceil((q + 4.0) / spacing)) + 1;
  return Eigen::VectorXd::LinSpaced(n, 0.0, (n - 1) * spacing);
}

SolverConfig make_solver_config(double w, double alpha) {
  SolverConfig cfg;
  cfg.w = w;
  cfg.alpha = alpha;
  cfg.psi_constraint_grid = default_constraint_grid(cfg.q);
  return cfg;
}

SolveResult solve_b(const SolverConfig& cfg) {
  cfg.validate();
  double target = std::min(1e-8, cfg.constraint_tol);
  std::vector<double> extras;
  SolveResult result;
  SolverConfig work = cfg;
  for (int round = 0; round < 3; ++round) {
    Workspace ws = build_workspace(work, extras);
    AlOutcome al = augmented_lagrangian(ws, work.max_iterations, target);
    if (!al.converged) {
      std::ostringstream msg;
      msg << "solve_b: augmented Lagrangian did not reach violation "
          << target << " within " << work.max_iterations
          << " outer iterations (final " << al.violation << ")";
      throw std::runtime_error(msg.str());
    }
    result.bf = bfunction_from_solution(work, ws, al.x);
    result.log = std::move(al.log);
    result.densify_rounds = round;
    result.final_violation = al.violation;

    // Between-node safeguard: audit on a 2x finer grid; on failure halve the
    // constraint spacing, pin the violating locations, and re-solve.
    double spacing = 0.05;
    for (int i = 0; i + 1 < work.psi_constraint_grid.size(); ++i) {
      spacing = std::min(spacing, work.psi_constraint_grid[i + 1] -
                                      work.psi_constraint_grid[i]);
    }
    double audit_spacing = 0.5 * spacing;
    int n_audit = static_cast<int>(std::ceil((work.q + 9.0) / audit_spacing)) + 1;
    Eigen::VectorXd fine =
        Eigen::VectorXd::LinSpaced(n_audit, 0.0, (n_audit - 1) * audit_spacing);
    CoverageAudit audit = audit_coverage(result.bf, work.alpha, fine);
    if (const char* trace = std::getenv("VW_SOLVER_TRACE")) {
      if (*trace) {
        std::fprintf(stderr,
                     "[solve_b] round %d: violation %.3e, audit min %.8f at "
                     "psi %.4f (threshold %.8f)\n",
                     round, al.violation, audit.min_coverage, audit.argmin_psi,
                     audit.threshold);
      }
    }
    if (audit.pass) return result;
    for (int i = 0; i < fine.size(); ++i) {
      for (double sign : {1.0, -1.0}) {
        double psi = sign * fine[i];
        if (coverage_known(result.bf, psi) < 1.0 - work.alpha - 1e-4) {
          extras.push_back(std::fabs(psi));
        }
        if (fine[i] == 0.0) break;
      }
    }
    int n_old = static_cast<int>(work.psi_constraint_grid.size());
    Eigen::VectorXd denser(2 * n_old - 1);
    for (int i = 0; i < n_old; ++i) {
      denser[2 * i] = work.psi_constraint_grid[i];
      if (i + 1 < n_old) {
        denser[2 * i + 1] =
            0.5 * (work.psi_constraint_grid[i] + work.psi_constraint_grid[i + 1]);
      }
    }
    work.psi_constraint_grid = denser;
  }
  throw std::runtime_error(
      "solve_b: coverage audit still failing after 3 densification rounds");
}

CoverageAudit audit_coverage(const BFunction& bf, double alpha,
                             const Eigen::VectorXd& fine_grid) {
  if (fine_grid.size() == 0) {
    throw std::invalid_argument("audit_coverage: empty grid");
  }
  CoverageAudit audit;
  audit.min_coverage = std::numeric_limits<double>::infinity();
  audit.argmin_psi = 0.0;
  for (int i = 0; i < fine_grid.size(); ++i) {
    for (double sign : {1.0, -1.0}) {
      double psi = sign * fine_grid[i];
      double c = coverage_known(bf, psi);
      if (c < audit.min_coverage) {
        audit.min_coverage = c;
        audit.argmin_psi = psi;
      }
      if (fine_grid[i] == 0.0) break;
    }
  }
  audit.threshold = 1.0 - alpha - 1e-3;
  audit.pass = audit.min_coverage >= audit.threshold;
  return audit;
}

}  // namespace varwidth
