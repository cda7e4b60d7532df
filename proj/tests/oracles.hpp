// Independent test oracles: brute-force quadrature, a self-contained normal
// RNG, and gamma sampling. Everything here is deliberately decoupled from the
// library's own integration and special-function paths.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

namespace oracle {

inline double normal_pdf(double x) {
  return 0.3989422804014327 * std::exp(-0.5 * x * x);
}

// Composite trapezoid rule with n+1 nodes.
inline double trapezoid(const std::function<double(double)>& f, double a,
                        double b, int n) {
  double h = (b - a) / n;
  double sum = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) sum += f(a + i * h);
  return sum * h;
}

// Composite Simpson rule; n must be even.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n) {
  double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// Box-Muller normals from raw mt19937_64 bits (no std distributions).
class NormalRng {
 public:
  explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return (engine_() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Marsaglia-Tsang gamma(shape, 1) sampler, shape >= 1.
  double gamma(double shape) {
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // R = Sigma_hat/sigma for sample size n: (n-1) R^2 ~ chi^2_{n-1}.
  double chi_scaled(long long n) {
    double k = static_cast<double>(n - 1);
    double w = 2.0 * gamma(0.5 * k);  // chi^2_k
    return std::sqrt(w / k);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Root of a monotone predicate flip: assumes pred(a) != pred(b); bisects the
// flip location to width eps using only predicate evaluations.
inline double bisect_flip(const std::function<bool(double)>& pred, double a,
                          double b, double eps) {
  bool pa = pred(a);
  while (b - a > eps) {
    double mid = 0.5 * (a + b);
    if (pred(mid) == pa) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace oracle
