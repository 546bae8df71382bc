#include "vru/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "vru/error.hpp"

namespace vru {

namespace {

constexpr double kSeriesLimit = 2.5;
constexpr double kTiny = 1e-300;

double erf_series(double x) noexcept {
  // erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (2n+1)!!
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= 2.0 * x2 / (2.0 * n + 1.0);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x2) * sum;
}

// x + (1/2)/(x + 1/(x + (3/2)/(x + ...))), modified Lentz.
double erfc_fraction(double x) noexcept {
  double f = x;
  double c = x;
  double d = 0.0;
  for (int n = 1; n < 5000; ++n) {
    const double a = 0.5 * n;
    d = x + a * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = x + a / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return f;
}

// log erfc(x) for x >= kSeriesLimit.
double log_erfc_upper(double x) noexcept {
  return -x * x - std::log(std::sqrt(std::numbers::pi) * erfc_fraction(x));
}

double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 20000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 3e-16) return h;
  }
  throw NonConvergenceError("incomplete beta continued fraction", {h});
}

}  // namespace

double erf(double x) noexcept {
  if (std::isnan(x)) return x;
  const double ax = std::abs(x);
  double r;
  if (ax < kSeriesLimit) {
    r = erf_series(ax);
  } else if (ax > 27.0) {
    r = 1.0;
  } else {
    r = 1.0 - std::exp(log_erfc_upper(ax));
  }
  return x < 0 ? -r : r;
}

double erfc(double x) noexcept {
  if (std::isnan(x)) return x;
  if (x < 0) return 2.0 - erfc(-x);
  if (x < kSeriesLimit) return 1.0 - erf_series(x);
  if (x > 27.3) return 0.0;
  return std::exp(log_erfc_upper(x));
}

double normal_pdf(double z) noexcept {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) noexcept {
  return 0.5 * erfc(-z / std::numbers::sqrt2);
}

double log_normal_cdf(double z) noexcept {
  const double u = -z / std::numbers::sqrt2;
  if (u >= kSeriesLimit) return std::log(0.5) + log_erfc_upper(u);
  return std::log(0.5 * erfc(u));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  }
  if (p > 0.5) return -normal_quantile(1.0 - p);
  // Lower half: bracketed Newton on log Phi, which is close to linear in the
  // tail and keeps the iteration well scaled.
  double lo = -40.0;
  double hi = 0.0;
  const double target = std::log(p);
  double x = -1.0;
  for (int it = 0; it < 200; ++it) {
    const double f = log_normal_cdf(x) - target;
    if (f > 0) hi = x; else lo = x;
    if (std::abs(f) < 1e-15) break;
    const double slope = std::exp(std::log(normal_pdf(x)) - log_normal_cdf(x));
    double next = x - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) < 1e-15 * (1.0 + std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

double logistic(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p / (1.0 - p)); }

double log_beta(double a, double b) noexcept {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double beta_log_density(double x, double a, double b) noexcept {
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
}

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) {
    throw std::domain_error("incomplete_beta: a and b must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_fraction(b, a, 1.0 - x) / b;
}

}  // namespace vru
