#include "varwidth/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "varwidth/asymptotics.hpp"
#include "varwidth/containment.hpp"
#include "varwidth/estimators.hpp"
#include "varwidth/interval.hpp"
#include "varwidth/io.hpp"
#include "varwidth/rng.hpp"
#include "varwidth/solver.hpp"
#include "varwidth/var_unknown.hpp"

namespace varwidth {

namespace {

std::string resolve_out(const std::string& path) {
  const char* base = std::getenv("VARWIDTH_OUT_DIR");
  if (base == nullptr || *base == '\0') return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base) / p).string();
}

using ConfigItems = std::vector<std::pair<std::string, std::string>>;

void finish(ArtifactWriter& writer, const std::string& command,
            const ConfigItems& items, const std::string& primary_out) {
  writer.write_manifest(primary_out + ".manifest.json", command, items);
}

Eigen::VectorXd linspace_step(double lo, double hi, double step) {
  int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + i * step;
  return v;
}

BFunction load_bfun_arg(const std::string& arg, double alpha_for_standard) {
  if (arg == "standard") return standard_b(alpha_for_standard);
  return load_b_function(arg);
}

std::string efficiency_csv(const EfficiencyCurve& curve) {
  std::string csv = "psi,coverage,length,efficiency\n";
  for (const auto& rec : curve) {
    csv += format_double(rec.psi) + "," + format_double(rec.coverage) + "," +
           format_double(rec.expected_length) + "," +
           format_double(rec.efficiency) + "\n";
  }
  return csv;
}

struct CommonArgs {
  std::string bfun = "standard";
  double alpha = 0.05;
};

int run_parsed(CLI::App& app);

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Variable-width confidence intervals containing thresholding "
               "estimators: solver, coverage/efficiency curves, containment "
               "analysis, and asymptotic diagnostics"};
  app.require_subcommand(1);
  app.set_config("--config")->description(
      "key-value config file; flags override file values");

  // ---- solve-b ----------------------------------------------------------
  auto* solve = app.add_subcommand(
      "solve-b", "solve for the b-function at a given (alpha, w)");
  struct {
    double w = 0.1, alpha = 0.05, q = 6.0, spread = 4.0;
    int knots = 81, max_iter = 80;
    double grid_step = 0.05, constraint_tol = 1e-6, lipschitz = 5.0;
    std::string out = "bfun.json", log = "";
  } sb;
  solve->add_option("--w", sb.w, "objective weight in [0, 1]");
  solve->add_option("--alpha", sb.alpha, "miscoverage level");
  solve->add_option("--q", sb.q, "excess support half-width");
  solve->add_option("--knots", sb.knots, "knot count over [-q, q]");
  solve->add_option("--spread-scale", sb.spread, "diffuse weight scale");
  solve->add_option("--grid-step", sb.grid_step,
                    "coverage constraint grid spacing (<= 0.1)");
  solve->add_option("--max-iterations", sb.max_iter, "outer iteration cap");
  solve->add_option("--constraint-tol", sb.constraint_tol,
                    "allowed coverage shortfall on the grid");
  solve->add_option("--lipschitz", sb.lipschitz, "bound on |e'|");
  solve->add_option("--out", sb.out, "output b-function JSON path");
  solve->add_option("--log", sb.log, "solve log CSV path (default <out>.log.csv)");

  // ---- efficiency-curve --------------------------------------------------
  auto* eff = app.add_subcommand("efficiency-curve",
                                 "coverage/length/efficiency along a psi grid");
  struct {
    std::string bfun = "standard";
    double alpha = 0.05, psi_max = 8.0, step = 0.05;
    std::string out = "efficiency.csv";
  } ec;
  eff->add_option("--bfun", ec.bfun, "b-function JSON path or 'standard'");
  eff->add_option("--alpha", ec.alpha, "alpha for --bfun standard");
  eff->add_option("--psi-max", ec.psi_max, "grid end (symmetric around 0)");
  eff->add_option("--step", ec.step, "grid spacing");
  eff->add_option("--out", ec.out, "output CSV path");

  // ---- coverage-audit ----------------------------------------------------
  auto* audit = app.add_subcommand("coverage-audit",
                                   "minimum coverage over a fine psi grid");
  struct {
    std::string bfun = "standard";
    double alpha = 0.05, spacing = 0.02, psi_max = -1.0;
    long long mc_draws = 0;
    unsigned long long seed = 1;
    std::string out = "audit.json";
  } ca;
  audit->add_option("--bfun", ca.bfun, "b-function JSON path or 'standard'");
  audit->add_option("--alpha", ca.alpha, "alpha for --bfun standard");
  audit->add_option("--spacing", ca.spacing, "grid spacing (<= 0.02)");
  audit->add_option("--psi-max", ca.psi_max, "grid end (default q + 9)");
  audit->add_option("--mc-draws", ca.mc_draws,
                    "optional Monte Carlo cross-check draws at the argmin");
  audit->add_option("--seed", ca.seed, "Monte Carlo seed");
  audit->add_option("--out", ca.out, "output JSON report path");

  // ---- tau-max -----------------------------------------------------------
  auto* tmax = app.add_subcommand(
      "tau-max", "maximal tuning parameter preserving containment");
  struct {
    std::string bfun = "standard", kind = "all";
    double alpha = 0.05, scad_a = 3.7, tol = 1e-5;
    std::string out = "tau_max.csv";
  } tm;
  tmax->add_option("--bfun", tm.bfun, "b-function JSON path or 'standard'");
  tmax->add_option("--alpha", tm.alpha, "alpha for --bfun standard");
  tmax->add_option("--kind", tm.kind, "hard|lasso|adaptive|scad|all");
  tmax->add_option("--scad-a", tm.scad_a, "SCAD constant a (> 2)");
  tmax->add_option("--tol", tm.tol, "bisection bracket width");
  tmax->add_option("--out", tm.out, "output CSV path");

  // ---- figure-profile ----------------------------------------------------
  auto* prof = app.add_subcommand(
      "figure-profile", "estimator and interval endpoints as functions of x");
  struct {
    std::string bfun = "standard", kind = "hard";
    double alpha = 0.05, tau = 1.96, scad_a = 3.7, x_max = 8.0, step = 0.01;
    std::string out = "profile.csv";
  } fp;
  prof->add_option("--bfun", fp.bfun, "b-function JSON path or 'standard'");
  prof->add_option("--alpha", fp.alpha, "alpha for --bfun standard");
  prof->add_option("--kind", fp.kind, "hard|lasso|adaptive|scad");
  prof->add_option("--tau", fp.tau, "scaled tuning parameter");
  prof->add_option("--scad-a", fp.scad_a, "SCAD constant a (> 2)");
  prof->add_option("--x-max", fp.x_max, "grid end (symmetric around 0)");
  prof->add_option("--step", fp.step, "grid spacing");
  prof->add_option("--out", fp.out, "output CSV path");

  // ---- theorem1 ----------------------------------------------------------
  auto* th1 = app.add_subcommand(
      "theorem1", "expected-length-ratio lower bounds under consistent tuning");
  struct {
    double gamma = 0.25, alpha = 0.05;
    std::vector<long long> n_values;
    std::string out = "theorem1.csv";
  } t1;
  th1->add_option("--gamma", t1.gamma, "eta_n = n^(-gamma), 0 < gamma < 1/2");
  th1->add_option("--alpha", t1.alpha, "miscoverage level");
  th1->add_option("--n", t1.n_values, "sample sizes (default decades 1e2..1e8)");
  th1->add_option("--out", t1.out, "output CSV path");

  // ---- theorem2 ----------------------------------------------------------
  auto* th2 = app.add_subcommand(
      "theorem2", "known- vs unknown-variance sup differences per sample size");
  struct {
    std::string bfun = "standard";
    double alpha = 0.05, psi_max = -1.0, step = 0.1;
    std::vector<long long> n_values;
    std::string out = "theorem2.csv";
  } t2;
  th2->add_option("--bfun", t2.bfun, "b-function JSON path or 'standard'");
  th2->add_option("--alpha", t2.alpha, "alpha for --bfun standard");
  th2->add_option("--psi-max", t2.psi_max, "grid end (default q + 9)");
  th2->add_option("--step", t2.step, "grid spacing");
  th2->add_option("--n", t2.n_values, "sample sizes (default 10 50 200)");
  th2->add_option("--out", t2.out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) {
      SolverConfig cfg;
      cfg.w = sb.w;
      cfg.alpha = sb.alpha;
      cfg.q = sb.q;
      cfg.knot_count = sb.knots;
      cfg.psi_constraint_grid = default_constraint_grid(sb.q, sb.grid_step);
      cfg.spread_scale = sb.spread;
      cfg.max_iterations = sb.max_iter;
      cfg.constraint_tol = sb.constraint_tol;
      cfg.lipschitz_L = sb.lipschitz;
      SolveResult res = solve_b(cfg);
      std::string out = resolve_out(sb.out);
      std::string log_path =
          resolve_out(sb.log.empty() ? sb.out + ".log.csv" : sb.log);
      ArtifactWriter writer;
      writer.write(out, b_function_to_json(res.bf));
      std::string log_csv = "iter,objective,max_violation\n";
      for (const auto& row : res.log) {
        log_csv += std::to_string(row.iter) + "," +
                   format_double(row.objective) + "," +
                   format_double(row.max_violation) + "\n";
      }
      writer.write(log_path, log_csv);
      finish(writer, "solve-b",
             {{"w", format_double(sb.w)},
              {"alpha", format_double(sb.alpha)},
              {"q", format_double(sb.q)},
              {"knots", std::to_string(sb.knots)},
              {"spread_scale", format_double(sb.spread)},
              {"grid_step", format_double(sb.grid_step)},
              {"max_iterations", std::to_string(sb.max_iter)},
              {"constraint_tol", format_double(sb.constraint_tol)},
              {"lipschitz", format_double(sb.lipschitz)},
              {"out", out},
              {"log", log_path}},
             out);
      std::cout << "wrote " << out << " (densify rounds "
                << res.densify_rounds << ", final violation "
                << format_double(res.final_violation) << ")\n";
    } else if (eff->parsed()) {
      BFunction bf = load_bfun_arg(ec.bfun, ec.alpha);
      Eigen::VectorXd grid = linspace_step(-ec.psi_max, ec.psi_max, ec.step);
      EfficiencyCurve curve = efficiency_known(bf, grid);
      std::string out = resolve_out(ec.out);
      ArtifactWriter writer;
      writer.write(out, efficiency_csv(curve));
      finish(writer, "efficiency-curve",
             {{"bfun", ec.bfun},
              {"alpha", format_double(ec.alpha)},
              {"psi_max", format_double(ec.psi_max)},
              {"step", format_double(ec.step)},
              {"out", out}},
             out);
      std::cout << "wrote " << out << "\n";
    } else if (audit->parsed()) {
      BFunction bf = load_bfun_arg(ca.bfun, ca.alpha);
      double psi_max = ca.psi_max > 0.0 ? ca.psi_max : bf.q + 9.0;
      Eigen::VectorXd grid = linspace_step(0.0, psi_max, ca.spacing);
      CoverageAudit result = audit_coverage(bf, bf.alpha, grid);
      nlohmann::ordered_json j;
      j["min_coverage"] = result.min_coverage;
      j["argmin_psi"] = result.argmin_psi;
      j["threshold"] = result.threshold;
      j["pass"] = result.pass;
      if (ca.mc_draws > 0) {
        GaussianRng rng(ca.seed);
        double psi = result.argmin_psi;
        long long hits = 0;
        for (long long i = 0; i < ca.mc_draws; ++i) {
          double x = psi + rng.normal();
          if (-eval_b(bf, -x) <= psi && psi <= eval_b(bf, x)) ++hits;
        }
        double est = static_cast<double>(hits) / ca.mc_draws;
        j["mc"] = {{"draws", ca.mc_draws},
                   {"seed", ca.seed},
                   {"estimate", est},
                   {"stderr", std::sqrt(est * (1.0 - est) / ca.mc_draws)}};
      }
      std::string out = resolve_out(ca.out);
      ArtifactWriter writer;
      writer.write(out, j.dump(2) + "\n");
      finish(writer, "coverage-audit",
             {{"bfun", ca.bfun},
              {"alpha", format_double(bf.alpha)},
              {"spacing", format_double(ca.spacing)},
              {"psi_max", format_double(psi_max)},
              {"mc_draws", std::to_string(ca.mc_draws)},
              {"seed", std::to_string(ca.seed)},
              {"out", out}},
             out);
      std::cout << (result.pass ? "PASS" : "FAIL") << " min coverage "
                << format_double(result.min_coverage) << " at psi "
                << format_double(result.argmin_psi) << "\n";
      if (!result.pass) return 3;
    } else if (tmax->parsed()) {
      BFunction bf = load_bfun_arg(tm.bfun, tm.alpha);
      std::vector<EstimatorKind> kinds;
      if (tm.kind == "all") {
        kinds = {EstimatorKind::Hard, EstimatorKind::Lasso,
                 EstimatorKind::AdaptiveLasso, EstimatorKind::Scad};
      } else {
        kinds = {estimator_kind_from_string(tm.kind)};
      }
      std::string csv = "kind,tau_max,abs_diff_from_z,matches_z\n";
      for (EstimatorKind kind : kinds) {
        double value = tau_max(bf, kind, tm.scad_a, tm.tol);
        double diff = std::fabs(value - bf.z);
        csv += to_string(kind) + "," + format_double(value) + "," +
               format_double(diff) + "," + (diff <= 1e-3 ? "1" : "0") + "\n";
        std::cout << to_string(kind) << " tau_max = " << format_double(value)
                  << (diff <= 1e-3 ? " (= z within 1e-3)" : "") << "\n";
      }
      std::string out = resolve_out(tm.out);
      ArtifactWriter writer;
      writer.write(out, csv);
      finish(writer, "tau-max",
             {{"bfun", tm.bfun},
              {"kind", tm.kind},
              {"scad_a", format_double(tm.scad_a)},
              {"tol", format_double(tm.tol)},
              {"out", out}},
             out);
    } else if (prof->parsed()) {
      BFunction bf = load_bfun_arg(fp.bfun, fp.alpha);
      EstimatorSpec spec{estimator_kind_from_string(fp.kind), fp.tau,
                         fp.scad_a};
      Eigen::VectorXd grid = linspace_step(-fp.x_max, fp.x_max, fp.step);
      std::string csv = "x,lower,estimate,upper\n";
      for (const ProfileRow& row : figure_profile(bf, spec, grid)) {
        csv += format_double(row.x) + "," + format_double(row.lower) + "," +
               format_double(row.estimate) + "," + format_double(row.upper) +
               "\n";
      }
      std::string out = resolve_out(fp.out);
      ArtifactWriter writer;
      writer.write(out, csv);
      finish(writer, "figure-profile",
             {{"bfun", fp.bfun},
              {"kind", fp.kind},
              {"tau", format_double(fp.tau)},
              {"scad_a", format_double(fp.scad_a)},
              {"x_max", format_double(fp.x_max)},
              {"step", format_double(fp.step)},
              {"out", out}},
             out);
      std::cout << "wrote " << out << "\n";
    } else if (th1->parsed()) {
      Theorem1Schedule schedule;
      schedule.gamma = t1.gamma;
      schedule.alpha = t1.alpha;
      schedule.n_values = t1.n_values;
      if (schedule.n_values.empty()) {
        for (long long n = 100; n <= 100000000; n *= 10) {
          schedule.n_values.push_back(n);
        }
      }
      std::string csv = "n,eta,sqrt_n_eta,p_a_complement,lower_bound\n";
      for (const Theorem1Row& row : theorem1_table(schedule)) {
        csv += std::to_string(row.n) + "," + format_double(row.eta) + "," +
               format_double(row.sqrt_n_eta) + "," +
               format_double(row.p_a_complement) + "," +
               format_double(row.lower_bound) + "\n";
      }
      std::string out = resolve_out(t1.out);
      ArtifactWriter writer;
      writer.write(out, csv);
      finish(writer, "theorem1",
             {{"gamma", format_double(t1.gamma)},
              {"alpha", format_double(t1.alpha)},
              {"n_count", std::to_string(schedule.n_values.size())},
              {"out", out}},
             out);
      std::cout << "wrote " << out << "\n";
    } else if (th2->parsed()) {
      BFunction bf = load_bfun_arg(t2.bfun, t2.alpha);
      std::vector<long long> ns = t2.n_values;
      if (ns.empty()) ns = {10, 50, 200};
      double psi_max = t2.psi_max > 0.0 ? t2.psi_max : bf.q + 9.0;
      Eigen::VectorXd grid = linspace_step(0.0, psi_max, t2.step);
      std::string csv = "n,sup_coverage_diff,sup_length_diff\n";
      for (const Theorem2Row& row : theorem2_diagnostics(bf, ns, grid)) {
        csv += std::to_string(row.n) + "," +
               format_double(row.sup_coverage_diff) + "," +
               format_double(row.sup_length_diff) + "\n";
      }
      std::string out = resolve_out(t2.out);
      ArtifactWriter writer;
      writer.write(out, csv);
      std::string n_list;
      for (long long n : ns) n_list += (n_list.empty() ? "" : " ") + std::to_string(n);
      finish(writer, "theorem2",
             {{"bfun", t2.bfun},
              {"n", n_list},
              {"psi_max", format_double(psi_max)},
              {"step", format_double(t2.step)},
              {"out", out}},
             out);
      std::cout << "wrote " << out << "\n";
    }
  } catch (const ConvergenceError& e) {
    nlohmann::json err = {{"error", {{"type", "convergence"},
                                     {"message", e.what()},
                                     {"best_estimate", e.best_estimate()}}}};
    std::cerr << err.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    nlohmann::json err = {
        {"error", {{"type", "numeric"}, {"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace varwidth
