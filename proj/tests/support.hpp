#pragma once

// Independent oracles and random generators shared by the unit tests and the
// acceptance binary. Nothing here calls into the library's numerics.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace oracle {

struct Params {
  double pi, pi0, alpha, beta, alpha0;
  double delta() const { return 1.0 - alpha - beta; }
  double pi_lower() const { return (pi0 - alpha0) / (1.0 - alpha0); }
};

// cell probabilities from the two-case table: X = 1 with prob pi, survey and
// official results independent given X
inline std::array<double, 4> tau_two_case(const Params& p) {
  const double beta0 = 1.0 - (p.pi0 - p.alpha0 * (1.0 - p.pi)) / p.pi;
  const double x1 = p.pi, x0 = 1.0 - p.pi;
  return {x1 * (1 - p.beta) * (1 - beta0) + x0 * p.alpha * p.alpha0,
          x1 * p.beta * (1 - beta0) + x0 * (1 - p.alpha) * p.alpha0,
          x1 * (1 - p.beta) * beta0 + x0 * p.alpha * (1 - p.alpha0),
          x1 * p.beta * beta0 + x0 * (1 - p.alpha) * (1 - p.alpha0)};
}

// the affine form written out term by term
inline std::array<double, 4> tau_affine(const Params& p) {
  const double d = p.delta(), a0 = p.alpha0, s = p.pi0 - a0;
  return {p.pi * d * a0 + s * (1 - p.beta) + p.alpha * a0,
          -p.pi * d * a0 + s * p.beta + (1 - p.alpha) * a0,
          p.pi * d * (1 - a0) - s * (1 - p.beta) + p.alpha * (1 - a0),
          -p.pi * d * (1 - a0) - s * p.beta + (1 - p.alpha) * (1 - a0)};
}

// Fisher information, the four-term expression with tau/tau^2
inline double fisher_four_term(const Params& p) {
  const auto t = tau_affine(p);
  const double d = p.delta(), a0 = p.alpha0, b0 = 1 - a0;
  double sum = 0.0;
  const double w[4] = {a0 * a0, a0 * a0, b0 * b0, b0 * b0};
  for (int l = 0; l < 4; ++l)
    if (w[l] > 0.0) sum += w[l] * t[l] / (t[l] * t[l]);
  return d * d * sum;
}

// -d^2/dp^2 of sum_l tau_l(pi) log tau_l(p) at p = pi, central differences
inline double fisher_numeric(const Params& p, double h = 1e-4) {
  const auto truth = tau_affine(p);
  // expected log-likelihood relative to its value at p.pi
  auto f = [&](double q) {
    Params x = p;
    x.pi = q;
    const auto t = tau_affine(x);
    double s = 0.0;
    for (int l = 0; l < 4; ++l)
      if (truth[l] > 0.0) s += truth[l] * std::log1p((t[l] - truth[l]) / truth[l]);
    return s;
  };
  auto d2 = [&](double step) { return -(f(p.pi + step) + f(p.pi - step)) / (step * step); };
  // Richardson: O(h^4)
  return (4 * d2(h / 2) - d2(h)) / 3;
}

inline double survey_mle(std::int64_t n, std::int64_t r_star1, double alpha, double beta) {
  return (static_cast<double>(r_star1) / n - alpha) / (1 - alpha - beta);
}

inline double mme(std::int64_t n, std::int64_t r01, const Params& p) {
  return (static_cast<double>(r01) / n + p.pi0 - p.beta * p.pi0 - p.alpha0 * p.delta() - p.alpha) /
         (p.delta() * (1 - p.alpha0));
}

// alpha0 = 0 closed form, unconstrained
inline double cmle_closed(std::int64_t r01, std::int64_t r00, const Params& p) {
  const double d = p.delta();
  return (p.pi0 * r00 + r01) / (d * (r01 + r00)) - p.pi0 * p.beta / d - p.alpha / d;
}

inline double var_survey(double pi, std::int64_t n, double alpha, double beta) {
  const double d = 1 - alpha - beta, t = alpha + d * pi;
  return t * (1 - t) / (n * d * d);
}

inline double var_mme(const Params& p, std::int64_t n) {
  const double t = tau_affine(p)[2], d = p.delta();
  return t * (1 - t) / (n * d * d * (1 - p.alpha0) * (1 - p.alpha0));
}

// optimal weights as printed, lambda from the sum constraint
inline std::array<double, 4> gmm_weights(const Params& p) {
  const auto t = tau_affine(p);
  const double a0 = p.alpha0;
  const double g1 = a0 / 2 * ((1 - a0) / t[3] + a0 / t[0]);
  const double g2 = a0 / 2 * (a0 / t[1] - (1 - a0) / t[3]);
  const double g3 = (1 - a0) / 2 * ((1 - a0) / t[3] + (1 - a0) / t[2]);
  const double lambda = 1.0 / (g1 + g2 + g3);
  return {lambda * g1, lambda * g2, lambda * g3, lambda};
}

// the six-term variance of the weighted estimator as printed
inline double gmm_variance(const Params& p, double g1, double g2, double g3, std::int64_t n) {
  const auto t = tau_affine(p);
  const double d2 = p.delta() * p.delta(), a0 = p.alpha0, b0 = 1 - a0;
  return (g1 * g1 / (n * d2 * a0 * a0) * t[0] * (1 - t[0]) +
          g2 * g2 / (n * d2 * a0 * a0) * t[1] * (1 - t[1]) +
          g3 * g3 / (n * d2 * b0 * b0) * t[2] * (1 - t[2]) +
          2 * g1 * g2 / (n * d2 * a0 * a0) * t[0] * t[1] -
          2 * g1 * g3 / (n * d2 * a0 * b0) * t[0] * t[2] +
          2 * g2 * g3 / (n * d2 * a0 * b0) * t[1] * t[2]);
}

inline std::array<double, 2> clopper_pearson(std::int64_t r, std::int64_t n, double level) {
  const double g = 1 - level;
  const double lo =
      r == 0 ? 0.0 : boost::math::ibeta_inv(static_cast<double>(r), static_cast<double>(n - r + 1), g / 2);
  const double hi =
      r == n ? 1.0 : boost::math::ibeta_inv(static_cast<double>(r + 1), static_cast<double>(n - r), 1 - g / 2);
  return {lo, hi};
}

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

inline double binomial_pmf(std::int64_t k, std::int64_t n, double p) {
  return boost::math::pdf(boost::math::binomial_distribution<double>(static_cast<double>(n), p),
                          static_cast<double>(k));
}

}  // namespace oracle

namespace gen {

// Hand-rolled generators for valid parameter tuples.
class Source {
 public:
  explicit Source(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(eng_);
  }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }

  // alpha + beta < 1, alpha0 <= pi0, pi in [pi_lower, 1]; some draws sit on
  // the edges (zero rates, pi at either bound)
  oracle::Params params(bool allow_alpha0 = true) {
    oracle::Params p{};
    p.alpha = coin(0.2) ? 0.0 : uniform(0.0, 0.3);
    p.beta = coin(0.2) ? 0.0 : uniform(0.0, 0.95 - p.alpha);
    p.alpha0 = !allow_alpha0 || coin(0.3) ? 0.0 : uniform(0.0, 0.05);
    p.pi0 = uniform(p.alpha0, 0.9);
    const double lo = p.pi_lower();
    const double u = uniform(0.0, 1.0);
    p.pi = u < 0.05 ? lo : u > 0.95 ? 1.0 : uniform(lo, 1.0);
    if (p.pi == 0.0) p.pi = 1e-3;
    return p;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace gen
