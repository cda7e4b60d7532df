#include "varwidth/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace varwidth {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Modified Lentz evaluation of the textbook continued fraction for I_x(a,b).
double beta_continued_fraction(double a, double b, double x) {
  const double tiny = 1e-300;
  const double eps = 1e-16;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int mm = 1; mm <= 200000; ++mm) {
    double m = mm;
    double aa = m * (b - m) * x / ((qam + 2.0 * m) * (a + 2.0 * m));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + 2.0 * m) * (qap + 2.0 * m));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

// I_x(a,b) with the logs of x and 1-x supplied, so callers with x near 1 can
// keep full precision in the exponent.
double reg_inc_beta_logx(double a, double b, double x, double log_x,
                         double log_1mx) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double front = std::exp(a * log_x + b * log_1mx - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double lower_gamma_series(double a, double x) {
  double sum = 1.0 / a, del = sum, ap = a;
  for (int i = 0; i < 500000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double upper_gamma_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500000; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// G7/K15 nodes and weights (positive half), QUADPACK dqk15.
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct GkResult {
  double estimate;
  double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b);
  double hl = 0.5 * (b - a);
  double fc = f(c);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::fabs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    double dx = hl * kXgk[j];
    fv1[j] = f(c - dx);
    fv2[j] = f(c + dx);
    double fsum = fv1[j] + fv2[j];
    resk += kWgk[j] * fsum;
    resabs += kWgk[j] * (std::fabs(fv1[j]) + std::fabs(fv2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }
  double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] *
              (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
  }
  resasc *= std::fabs(hl);
  resabs *= std::fabs(hl);
  double err = std::fabs((resk - resg) * hl);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  double round = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
  if (round > err) err = round;
  return {resk * hl, err};
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1) {
    throw std::invalid_argument("QuadratureConfig: tolerances must be positive "
                                "and max_subdivisions >= 1");
  }
}

double std_normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double std_normal_upper_tail(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double std_normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("std_normal_quantile: p must lie in (0, 1)");
  }
  // Acklam's rational approximation, then one Halley step against erfc.
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double cc[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double u = std::sqrt(-2.0 * std::log(p));
    x = (((((cc[0] * u + cc[1]) * u + cc[2]) * u + cc[3]) * u + cc[4]) * u +
         cc[5]) /
        ((((dd[0] * u + dd[1]) * u + dd[2]) * u + dd[3]) * u + 1.0);
  } else if (p > 1.0 - plow) {
    double u = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((cc[0] * u + cc[1]) * u + cc[2]) * u + cc[3]) * u + cc[4]) * u +
          cc[5]) /
        ((((dd[0] * u + dd[1]) * u + dd[2]) * u + dd[3]) * u + 1.0);
  } else {
    double u = p - 0.5, t = u * u;
    x = (((((a[0] * t + a[1]) * t + a[2]) * t + a[3]) * t + a[4]) * t + a[5]) *
        u /
        (((((b[0] * t + b[1]) * t + b[2]) * t + b[3]) * t + b[4]) * t + 1.0);
  }
  double pdf = std_normal_pdf(x);
  if (pdf > 0.0) {
    double e = std_normal_cdf(x) - p;
    double u = e / pdf;
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || std::isnan(x)) {
    throw std::domain_error("regularized_incomplete_beta: need a, b > 0");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return reg_inc_beta_logx(a, b, x, std::log(x), std::log1p(-x));
}

double student_t_cdf(double t, long long m) {
  if (m < 1) throw std::domain_error("student_t_cdf: m must be >= 1");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  double v = static_cast<double>(m);
  double t2 = t * t;
  double x = v / (t2 + v);
  double log_x = std::log1p(-t2 / (t2 + v));
  double log_1mx = std::log(t2 / (t2 + v));
  double ib = (t2 == 0.0)
                  ? 1.0
                  : reg_inc_beta_logx(0.5 * v, 0.5, x, log_x, log_1mx);
  return (t >= 0.0) ? 1.0 - 0.5 * ib : 0.5 * ib;
}

double student_t_quantile(long long m, double p) {
  if (m < 1) throw std::domain_error("student_t_quantile: m must be >= 1");
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("student_t_quantile: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(m, 1.0 - p);
  if (m > 1000000) {
    // Cornish-Fisher expansion about the normal quantile; the incomplete-beta
    // route needs O(sqrt(m)) continued-fraction terms out here.
    double z = std_normal_quantile(p);
    double v = static_cast<double>(m);
    double z3 = z * z * z, z5 = z3 * z * z, z7 = z5 * z * z;
    return z + (z3 + z) / (4.0 * v) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * v * v) +
           (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / (384.0 * v * v * v);
  }
  double hi = 1.0;
  while (student_t_cdf(hi, m) < p) {
    hi *= 2.0;
    if (hi > 1e12) break;
  }
  double t = find_root_monotone(
      [m, p](double x) { return student_t_cdf(x, m) - p; }, 0.0, hi, 1e-10);
  // Two Newton polish steps with the t density.
  double v = static_cast<double>(m);
  double log_norm = std::lgamma(0.5 * (v + 1.0)) - std::lgamma(0.5 * v) -
                    0.5 * std::log(v * M_PI);
  for (int it = 0; it < 2; ++it) {
    double pdf = std::exp(log_norm - 0.5 * (v + 1.0) * std::log1p(t * t / v));
    if (pdf <= 0.0) break;
    t -= (student_t_cdf(t, m) - p) / pdf;
  }
  return t;
}

double regularized_lower_gamma(double a, double x) {
  if (!(a > 0.0) || x < 0.0) {
    throw std::domain_error("regularized_lower_gamma: need a > 0, x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return lower_gamma_series(a, x);
  return 1.0 - upper_gamma_cf(a, x);
}

double chi_scaled_density(long long n, double r) {
  if (n < 2) throw std::domain_error("chi_scaled_density: n must be >= 2");
  if (r <= 0.0) return 0.0;
  double k = static_cast<double>(n - 1);
  double log_f = std::log(2.0) + 0.5 * k * std::log(0.5 * k) -
                 std::lgamma(0.5 * k) + (k - 1.0) * std::log(r) -
                 0.5 * k * r * r;
  return std::exp(log_f);
}

double chi_scaled_cdf(long long n, double r) {
  if (n < 2) throw std::domain_error("chi_scaled_cdf: n must be >= 2");
  if (r <= 0.0) return 0.0;
  double k = static_cast<double>(n - 1);
  return regularized_lower_gamma(0.5 * k, 0.5 * k * r * r);
}

double chi_scaled_mean(long long n) {
  if (n < 2) throw std::domain_error("chi_scaled_mean: n must be >= 2");
  double k = static_cast<double>(n - 1);
  if (k >= 1e6) {
    // Gamma-ratio asymptotics keep full precision where lgamma differences
    // would lose ~k*eps absolute error.
    return 1.0 - 1.0 / (4.0 * k) + 1.0 / (32.0 * k * k) +
           5.0 / (128.0 * k * k * k);
  }
  return std::sqrt(2.0 / k) *
         std::exp(std::lgamma(0.5 * (k + 1.0)) - std::lgamma(0.5 * k));
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg) {
  cfg.validate();
  if (!(a <= b)) throw std::domain_error("integrate: need a <= b");
  if (a == b) return 0.0;

  struct Segment {
    double a, b, tol;
  };
  GkResult whole = gk15(f, a, b);
  double tol0 = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(whole.estimate));
  if (whole.error <= tol0) return whole.estimate;

  std::vector<Segment> pending;
  pending.push_back({a, b, tol0});
  double accepted = 0.0;
  int splits = 0;
  while (!pending.empty()) {
    Segment s = pending.back();
    pending.pop_back();
    GkResult r = gk15(f, s.a, s.b);
    double width = s.b - s.a;
    if (r.error <= s.tol || width <= 1e-14 * (std::fabs(s.a) + std::fabs(s.b) + 1.0)) {
      accepted += r.estimate;
      continue;
    }
    if (++splits > cfg.max_subdivisions) {
      double best = accepted + r.estimate;
      for (const Segment& q : pending) best += gk15(f, q.a, q.b).estimate;
      throw ConvergenceError(
          "integrate: subdivision budget exhausted", best);
    }
    double mid = 0.5 * (s.a + s.b);
    pending.push_back({mid, s.b, 0.5 * s.tol});
    pending.push_back({s.a, mid, 0.5 * s.tol});
  }
  return accepted;
}

double find_root_monotone(const std::function<double(double)>& g, double lo,
                          double hi, double tol) {
  if (!(lo <= hi) || !(tol > 0.0)) {
    throw std::domain_error("find_root_monotone: bad bracket or tolerance");
  }
  double glo = g(lo), ghi = g(hi);
  if (glo > 0.0 || ghi < 0.0) {
    throw std::domain_error("find_root_monotone: g(lo) <= 0 <= g(hi) required");
  }
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  for (int it = 0; it < 200 && (hi - lo) > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double gm = g(mid);
    if (gm == 0.0) return mid;
    if (gm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double gauss_linear_segment(double x0, double x1, double v0, double v1,
                            double scale, double shift) {
  if (!(scale > 0.0)) {
    throw std::domain_error("gauss_linear_segment: scale must be positive");
  }
  if (x0 == x1) return 0.0;
  double slope = (v1 - v0) / (x1 - x0);
  double a0 = v0 - slope * x0;  // L(x) = a0 + slope * x
  double u0 = scale * x0 - shift;
  double u1 = scale * x1 - shift;
  double cdf_diff = std_normal_cdf(u1) - std_normal_cdf(u0);
  double pdf_diff = std_normal_pdf(u0) - std_normal_pdf(u1);
  return ((a0 + slope * shift / scale) * cdf_diff +
          (slope / scale) * pdf_diff) /
         scale;
}

}  // namespace varwidth
