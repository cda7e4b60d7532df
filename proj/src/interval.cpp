#include "varwidth/interval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace varwidth {

namespace {

// Gaussian factor below ~1e-16 outside this window; integrals are clipped.
constexpr double kGaussReach = 8.3;

int segment_index(const Eigen::VectorXd& grid, double x) {
  // Largest i with grid[i] <= x, clamped to a valid segment start.
  const double* begin = grid.data();
  const double* end = begin + grid.size();
  int i = static_cast<int>(std::upper_bound(begin, end, x) - begin) - 1;
  return std::clamp(i, 0, static_cast<int>(grid.size()) - 2);
}

double interp(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, double x) {
  int i = segment_index(xs, x);
  double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + t * (ys[i + 1] - ys[i]);
}

}  // namespace

BFunction make_b_function(double alpha, double w, double q, double lipschitz_L,
                          Eigen::VectorXd knots, Eigen::VectorXd e_values) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw std::invalid_argument("BFunction: alpha must lie in (0, 1)");
  }
  if (!(q > 0.0)) throw std::invalid_argument("BFunction: q must be > 0");
  if (!(lipschitz_L > 0.0)) {
    throw std::invalid_argument("BFunction: lipschitz_L must be > 0");
  }
  if (knots.size() < 2 || knots.size() != e_values.size()) {
    throw std::invalid_argument("BFunction: need >= 2 knots matching e_values");
  }
  double tol_q = 1e-9 * (1.0 + q);
  if (std::fabs(knots[0] + q) > tol_q ||
      std::fabs(knots[knots.size() - 1] - q) > tol_q) {
    throw std::invalid_argument("BFunction: knots must span [-q, q]");
  }
  for (int i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i] < knots[i + 1])) {
      throw std::invalid_argument("BFunction: knots must be strictly increasing");
    }
  }
  if (std::fabs(e_values[0]) > 1e-12 ||
      std::fabs(e_values[e_values.size() - 1]) > 1e-12) {
    throw std::invalid_argument("BFunction: e must vanish at +-q");
  }
  e_values[0] = 0.0;
  e_values[e_values.size() - 1] = 0.0;
  for (int i = 0; i + 1 < knots.size(); ++i) {
    double slope = (e_values[i + 1] - e_values[i]) / (knots[i + 1] - knots[i]);
    if (std::fabs(slope) > lipschitz_L + 1e-12) {
      throw std::invalid_argument("BFunction: |e'| exceeds lipschitz_L");
    }
    if (!(slope >= -1.0 + 1e-9)) {
      throw std::invalid_argument("BFunction: b must be strictly increasing "
                                  "(segment slope of e below -1 + 1e-9)");
    }
  }

  BFunction bf;
  bf.alpha = alpha;
  bf.w = w;
  bf.q = q;
  bf.lipschitz_L = lipschitz_L;
  bf.knots = std::move(knots);
  bf.e_values = std::move(e_values);
  bf.z = std_normal_quantile(1.0 - alpha / 2.0);
  bf.b_knots = bf.knots.array() + bf.z + bf.e_values.array();

  // Merged grid of knots and mirrored knots; s(x) = e(x) + e(-x) is piecewise
  // linear exactly on it.
  std::vector<double> merged(bf.knots.data(), bf.knots.data() + bf.knots.size());
  for (int i = 0; i < bf.knots.size(); ++i) merged.push_back(-bf.knots[i]);
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  bf.pair_knots = Eigen::Map<Eigen::VectorXd>(merged.data(), merged.size());
  bf.pair_values.resize(bf.pair_knots.size());
  for (int i = 0; i < bf.pair_knots.size(); ++i) {
    double x = bf.pair_knots[i];
    bf.pair_values[i] = eval_e(bf, x) + eval_e(bf, -x);
  }
  for (int i = 0; i < bf.pair_values.size(); ++i) {
    if (bf.pair_values[i] < -2.0 * bf.z - 1e-9) {
      throw std::invalid_argument(
          "BFunction: interval validity b(x) + b(-x) >= 0 violated");
    }
  }
  return bf;
}

BFunction standard_b(double alpha) {
  Eigen::VectorXd knots(2), e(2);
  knots << -6.0, 6.0;
  e << 0.0, 0.0;
  return make_b_function(alpha, 1.0, 6.0, 1.0, knots, e);
}

double eval_e(const BFunction& bf, double x) {
  if (x <= bf.knots[0] || x >= bf.knots[bf.knots.size() - 1]) return 0.0;
  return interp(bf.knots, bf.e_values, x);
}

double eval_b(const BFunction& bf, double x) { return x + bf.z + eval_e(bf, x); }

double inverse_b(const BFunction& bf, double y) {
  if (y <= bf.b_knots[0] || y >= bf.b_knots[bf.b_knots.size() - 1]) {
    return y - bf.z;
  }
  int i = segment_index(bf.b_knots, y);
  double t = (y - bf.b_knots[i]) / (bf.b_knots[i + 1] - bf.b_knots[i]);
  return bf.knots[i] + t * (bf.knots[i + 1] - bf.knots[i]);
}

double coverage_known(const BFunction& bf, double psi) {
  double lower = inverse_b(bf, psi);
  double upper = -inverse_b(bf, -psi);
  return std_normal_cdf(upper - psi) - std_normal_cdf(lower - psi);
}

double expected_length_known(const BFunction& bf, double psi,
                             const QuadratureConfig& cfg) {
  double lo = std::max(-bf.q, psi - kGaussReach);
  double hi = std::min(bf.q, psi + kGaussReach);
  if (!(lo < hi)) return 2.0 * bf.z;
  const auto& xs = bf.pair_knots;
  const auto& ss = bf.pair_values;
  int nseg = static_cast<int>(xs.size()) - 1;
  QuadratureConfig seg_cfg = cfg;
  seg_cfg.abs_tol = cfg.abs_tol / nseg;
  double total = 0.0;
  auto f = [&](double x) { return interp(xs, ss, x) * std_normal_pdf(x - psi); };
  for (int i = 0; i < nseg; ++i) {
    double a = std::max(xs[i], lo);
    double b = std::min(xs[i + 1], hi);
    if (a < b) total += integrate(f, a, b, seg_cfg);
  }
  return 2.0 * bf.z + total;
}

double excess_pair_integral_exact(const BFunction& bf, double scale,
                                  double shift) {
  const auto& xs = bf.pair_knots;
  const auto& ss = bf.pair_values;
  double total = 0.0;
  for (int i = 0; i + 1 < xs.size(); ++i) {
    total += gauss_linear_segment(xs[i], xs[i + 1], ss[i], ss[i + 1], scale,
                                  shift);
  }
  return total;
}

double expected_length_known_exact(const BFunction& bf, double psi) {
  return 2.0 * bf.z + excess_pair_integral_exact(bf, 1.0, psi);
}

EfficiencyCurve efficiency_known(const BFunction& bf,
                                 const Eigen::VectorXd& psi_grid,
                                 const QuadratureConfig& cfg) {
  if (psi_grid.size() == 0) {
    throw std::invalid_argument("efficiency_known: psi_grid must be nonempty");
  }
  EfficiencyCurve curve;
  curve.reserve(psi_grid.size());
  for (int i = 0; i < psi_grid.size(); ++i) {
    double psi = psi_grid[i];
    double len = expected_length_known(bf, psi, cfg);
    double ratio = len / (2.0 * bf.z);
    curve.push_back({psi, coverage_known(bf, psi), len, ratio * ratio});
  }
  return curve;
}

std::string b_function_to_json(const BFunction& bf) {
  nlohmann::json j;
  j["alpha"] = bf.alpha;
  j["w"] = bf.w;
  j["q"] = bf.q;
  j["lipschitz_L"] = bf.lipschitz_L;
  j["knots"] = std::vector<double>(bf.knots.data(),
                                   bf.knots.data() + bf.knots.size());
  j["e_values"] = std::vector<double>(bf.e_values.data(),
                                      bf.e_values.data() + bf.e_values.size());
  return j.dump(2) + "\n";
}

BFunction b_function_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  auto knots_v = j.at("knots").get<std::vector<double>>();
  auto e_v = j.at("e_values").get<std::vector<double>>();
  Eigen::VectorXd knots = Eigen::Map<Eigen::VectorXd>(knots_v.data(), knots_v.size());
  Eigen::VectorXd e = Eigen::Map<Eigen::VectorXd>(e_v.data(), e_v.size());
  return make_b_function(j.at("alpha").get<double>(), j.at("w").get<double>(),
                         j.at("q").get<double>(),
                         j.at("lipschitz_L").get<double>(), std::move(knots),
                         std::move(e));
}

void save_b_function(const BFunction& bf, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << b_function_to_json(bf);
}

BFunction load_b_function(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return b_function_from_json(ss.str());
}

}  // namespace varwidth
