#include "cape/special_functions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cape/errors.hpp"
#include "cape/optimize.hpp"

namespace cape {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kCfEps = 1e-16;
constexpr int kCfMaxIter = 100000;

// Continued fraction for I_x(a, b); converges quickly for x < (a+1)/(a+b+2).
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kCfMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kCfEps) return h;
  }
  return h;
}

// ln of x^a (1-x)^b / B(a, b)
double log_beta_prefactor(double x, double a, double b) {
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
         b * std::log1p(-x);
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw DomainError("incomplete beta requires positive shape parameters");
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError("incomplete beta requires x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = log_beta_prefactor(x, a, b);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(front) * beta_continued_fraction(x, a, b) / a;
  return 1.0 - std::exp(front) * beta_continued_fraction(1.0 - x, b, a) / b;
}

double beta_quantile(double p, double v, double w) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("beta quantile requires p in [0, 1]");
  if (!(v > 0.0) || !(w > 0.0))
    throw DomainError("beta quantile requires positive shape parameters");
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const auto f = [&](double x) { return regularized_incomplete_beta(x, v, w) - p; };
  return optimize::find_root(f, 0.0, 1.0).x;
}

double binomial_cdf(long long k, long long n, double p) {
  if (k < 0) return 0.0;
  if (k >= n) return 1.0;
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  // P(X <= k) = I_{1-p}(n - k, k + 1)
  return regularized_incomplete_beta(1.0 - p, static_cast<double>(n - k),
                                     static_cast<double>(k + 1));
}

double binomial_log_pmf(long long k, long long n, double p) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  if (k < 0 || k > n) return neg_inf;
  if (p <= 0.0) return k == 0 ? 0.0 : neg_inf;
  if (p >= 1.0) return k == n ? 0.0 : neg_inf;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  return std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0) +
         kd * std::log(p) + (nd - kd) * std::log1p(-p);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("normal quantile requires p in [0, 1]");
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (p == 0.5) return 0.0;
  // Work in the lower tail where the CDF has full relative precision.
  const double tail = p < 0.5 ? p : 1.0 - p;
  const auto f = [&](double z) { return normal_cdf(z) - tail; };
  const double z = optimize::find_root(f, -40.0, 0.0).x;
  return p < 0.5 ? z : -z;
}

}  // namespace cape
