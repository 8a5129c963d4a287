#include "cape/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "cape/errors.hpp"
#include "cape/optimize.hpp"

namespace cape {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInteriorMargin = 1e-12;
constexpr double kOptimizerTol = 1e-10;

// tau_l(pi) from the affine form with cancellation noise removed.
double tau_at(const AffineTau& t, Cell c, double pi) {
  return std::max(0.0, t.at(c, pi));
}

// count * ln(tau) with 0 * ln 0 = 0; -inf for a nonzero count at tau == 0.
double xlogy(double count, double tau) {
  if (count == 0.0) return 0.0;
  if (tau <= 0.0) return kNegInf;
  return count * std::log(tau);
}

void require_pi_in_range(double pi, const OfficialContext& ctx) {
  if (!(pi >= ctx.pi_lower() && pi <= 1.0))
    throw DomainError("prevalence outside the admissible range [pi_lower, 1]");
}

void require_consistent(const OfficialContext& ctx, const ErrorRates& rates) {
  require_valid_design(ctx.pi0(), rates);
  if (ctx.alpha0() != rates.alpha0)
    throw DomainError("official context was built with a different alpha0");
}

bool is_constant(const AffineTau& t, Cell c) {
  return t.slope[static_cast<std::size_t>(c)] == 0.0;
}

// A cell observed with positive count whose probability is zero on the whole
// admissible range makes every likelihood value -inf.
void require_observable(const AffineTau& t, const OfficialContext& ctx, Cell c, double count) {
  if (count <= 0.0) return;
  const double lo = tau_at(t, c, ctx.pi_lower());
  const double hi = tau_at(t, c, 1.0);
  if (lo <= 0.0 && hi <= 0.0)
    throw DegenerateError(std::string("degenerate likelihood: ") + cell_name(c) +
                          " observed but its probability is zero for every admissible pi");
}

// Maximise loglik over [pi_lower, 1], honouring maxima at either bound.
struct BoundedArgmax {
  double x;
  bool at_boundary;
};

template <class F>
BoundedArgmax argmax_on_admissible(F&& loglik, const OfficialContext& ctx) {
  const double lo = ctx.pi_lower();
  const double hi = 1.0;
  if (hi - lo <= 2.0 * kInteriorMargin) return {lo, true};

  const auto best = optimize::maximize_bounded(loglik, lo + kInteriorMargin,
                                               hi - kInteriorMargin, kOptimizerTol);
  const double f_lo = loglik(lo);
  const double f_hi = loglik(hi);
  if (f_lo >= best.fx && f_lo >= f_hi) return {lo, true};
  if (f_hi >= best.fx) return {hi, true};
  return {best.x, false};
}

// Golden-section output is only good to about sqrt(eps); the score is
// decreasing on the admissible range, so bracket its zero near x and refine.
double polish_on_score(const AffineTau& t, const SurveyCounts& counts, const OfficialContext& ctx,
                       double x) {
  const auto score = [&](double pi) {
    double s = 0.0;
    for (Cell c : kAllCells) {
      const double k = static_cast<double>(counts[c]);
      const double slope = t.slope[static_cast<std::size_t>(c)];
      if (k == 0.0 || slope == 0.0) continue;
      s += k * slope / tau_at(t, c, pi);
    }
    return s;
  };
  const double lo = ctx.pi_lower() + kInteriorMargin;
  const double hi = 1.0 - kInteriorMargin;
  double step = 1e-7 * std::max(1.0, std::fabs(x));
  for (int i = 0; i < 40; ++i, step *= 4.0) {
    const double a = std::max(lo, x - step);
    const double b = std::min(hi, x + step);
    const double fa = score(a), fb = score(b);
    if (!std::isfinite(fa) || !std::isfinite(fb)) break;
    if (fa >= 0.0 && fb <= 0.0) return optimize::find_root(score, a, b).x;
  }
  return x;
}

std::optional<double> try_fisher(double pi, const OfficialContext& ctx, const ErrorRates& rates) {
  try {
    const double info = fisher_information(pi, ctx, rates);
    if (info > 0.0 && std::isfinite(info)) return info;
  } catch (const DomainError&) {
  }
  return std::nullopt;
}

PrevalenceEstimate likelihood_estimate(EstimatorKind kind, double point, bool at_boundary,
                                       std::optional<double> info, std::int64_t n) {
  PrevalenceEstimate est;
  est.kind = kind;
  est.point = point;
  est.raw = point;
  est.at_boundary = at_boundary;
  est.info = info;
  est.variance = info ? 1.0 / (static_cast<double>(n) * *info)
                      : std::numeric_limits<double>::infinity();
  return est;
}

double clamp_to_admissible(double raw, const OfficialContext& ctx) {
  return std::clamp(raw, ctx.pi_lower(), 1.0);
}

}  // namespace

std::string_view estimator_name(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::SurveyMLE: return "survey-mle";
    case EstimatorKind::ConditionalMLE: return "cmle";
    case EstimatorKind::MarginalMLE: return "mmle";
    case EstimatorKind::MME: return "mme";
    case EstimatorKind::CellMME: return "cell-mme";
    case EstimatorKind::OptimalGMM: return "gmm";
  }
  return "?";
}

EstimatorKind parse_estimator(std::string_view name) {
  for (auto k : {EstimatorKind::SurveyMLE, EstimatorKind::ConditionalMLE,
                 EstimatorKind::MarginalMLE, EstimatorKind::MME, EstimatorKind::CellMME,
                 EstimatorKind::OptimalGMM})
    if (estimator_name(k) == name) return k;
  throw DomainError("unknown estimator '" + std::string(name) + "'");
}

double log_likelihood(double pi, const SurveyCounts& counts, const OfficialContext& ctx,
                      const ErrorRates& rates) {
  require_pi_in_range(pi, ctx);
  const AffineTau t = tau_coefficients(ctx, rates);
  double ll = 0.0;
  for (Cell c : kAllCells) ll += xlogy(static_cast<double>(counts[c]), tau_at(t, c, pi));
  return ll;
}

double marginal_log_likelihood(double pi, std::int64_t r11, std::int64_t r01, std::int64_t n,
                               const OfficialContext& ctx, const ErrorRates& rates) {
  require_pi_in_range(pi, ctx);
  const AffineTau t = tau_coefficients(ctx, rates);
  const double nd = static_cast<double>(n);
  const double tau10 = tau_at(t, Cell::k10, pi);
  const double expected_r10 = nd * tau10;
  const double rest = nd - static_cast<double>(r11 + r01) - expected_r10;
  return xlogy(static_cast<double>(r11), tau_at(t, Cell::k11, pi)) +
         xlogy(static_cast<double>(r01), tau_at(t, Cell::k01, pi)) + xlogy(expected_r10, tau10) +
         xlogy(rest, tau_at(t, Cell::k00, pi));
}

double fisher_information(double pi, const OfficialContext& ctx, const ErrorRates& rates) {
  require_consistent(ctx, rates);
  require_pi_in_range(pi, ctx);
  const AffineTau t = tau_coefficients(ctx, rates);
  double info = 0.0;
  for (Cell c : kAllCells) {
    const double slope = t.slope[static_cast<std::size_t>(c)];
    if (slope == 0.0) continue;
    const double tau = tau_at(t, c, pi);
    if (tau <= 0.0)
      throw DomainError(std::string("Fisher information undefined: ") + cell_name(c) +
                        " has zero probability at this pi");
    info += slope * slope / tau;
  }
  return info;
}

double survey_mle_variance(double pi, std::int64_t n, const ErrorRates& rates) {
  rates.validate();
  if (n <= 0) throw DomainError("sample size n must be positive");
  const double d = rates.delta();
  const double p = pi * d + rates.alpha;
  return p * (1.0 - p) / (static_cast<double>(n) * d * d);
}

double mme_variance(double pi, std::int64_t n, const OfficialContext& ctx,
                    const ErrorRates& rates) {
  if (n <= 0) throw DomainError("sample size n must be positive");
  const TauVector tau = tau_probabilities(pi, ctx, rates);
  const double scale = rates.delta() * (1.0 - rates.alpha0);
  return tau.tau01 * (1.0 - tau.tau01) / (static_cast<double>(n) * scale * scale);
}

PrevalenceEstimate survey_mle(const SurveyCounts& counts, const ErrorRates& rates) {
  rates.validate();
  const double d = rates.delta();
  const double n = static_cast<double>(counts.n());
  PrevalenceEstimate est;
  est.kind = EstimatorKind::SurveyMLE;
  est.raw = (static_cast<double>(counts.r_star1()) / n - rates.alpha) / d;
  est.point = std::clamp(est.raw, 0.0, 1.0);
  est.at_boundary = est.raw < 0.0 || est.raw > 1.0;
  est.variance = survey_mle_variance(est.point, counts.n(), rates);
  return est;
}

PrevalenceEstimate conditional_mle_numeric(const SurveyCounts& counts,
                                           const OfficialContext& ctx,
                                           const ErrorRates& rates) {
  require_consistent(ctx, rates);
  const AffineTau t = tau_coefficients(ctx, rates);
  bool informative = false;
  for (Cell c : kAllCells) {
    require_observable(t, ctx, c, static_cast<double>(counts[c]));
    if (counts[c] > 0 && !is_constant(t, c)) informative = true;
  }
  if (!informative)
    throw DegenerateError("degenerate likelihood: no observed cell depends on pi");

  const auto loglik = [&](double pi) {
    double ll = 0.0;
    for (Cell c : kAllCells) ll += xlogy(static_cast<double>(counts[c]), tau_at(t, c, pi));
    return ll;
  };
  BoundedArgmax best = argmax_on_admissible(loglik, ctx);
  if (!best.at_boundary) best.x = polish_on_score(t, counts, ctx, best.x);
  return likelihood_estimate(EstimatorKind::ConditionalMLE, best.x, best.at_boundary,
                             try_fisher(best.x, ctx, rates), counts.n());
}

PrevalenceEstimate conditional_mle(const SurveyCounts& counts, const OfficialContext& ctx,
                                   const ErrorRates& rates) {
  if (rates.alpha0 != 0.0) return conditional_mle_numeric(counts, ctx, rates);

  require_consistent(ctx, rates);
  const AffineTau t = tau_coefficients(ctx, rates);
  for (Cell c : kAllCells) require_observable(t, ctx, c, static_cast<double>(counts[c]));
  const double r01 = static_cast<double>(counts.r01());
  const double r00 = static_cast<double>(counts.r00());
  if (r01 + r00 == 0.0)
    throw DegenerateError("degenerate likelihood: no observed cell depends on pi");

  // Unconstrained maximiser; the log-likelihood is concave, so outside the
  // admissible range the maximum sits on the nearest bound.
  const double d = rates.delta();
  const double pi0 = ctx.pi0();
  const double unconstrained =
      (pi0 * r00 + r01) / (d * (r01 + r00)) - pi0 * rates.beta / d - rates.alpha / d;
  const double point = clamp_to_admissible(unconstrained, ctx);
  const bool at_boundary = point == ctx.pi_lower() || point == 1.0;
  return likelihood_estimate(EstimatorKind::ConditionalMLE, point, at_boundary,
                             try_fisher(point, ctx, rates), counts.n());
}

PrevalenceEstimate marginal_mle(std::int64_t r11, std::int64_t r01, std::int64_t n,
                                const OfficialContext& ctx, const ErrorRates& rates) {
  require_consistent(ctx, rates);
  if (n <= 0) throw DomainError("sample size n must be positive");
  if (r11 < 0 || r01 < 0) throw DomainError("cell counts must be non-negative");
  if (r11 + r01 > n) throw DomainError("R11 + R01 exceeds the sample size n");

  const AffineTau t = tau_coefficients(ctx, rates);
  require_observable(t, ctx, Cell::k11, static_cast<double>(r11));
  require_observable(t, ctx, Cell::k01, static_cast<double>(r01));

  const auto loglik = [&](double pi) {
    return marginal_log_likelihood(pi, r11, r01, n, ctx, rates);
  };
  const BoundedArgmax best = argmax_on_admissible(loglik, ctx);

  std::optional<double> info;
  if (!best.at_boundary) {
    // Observed information of loglik / n by central differences.
    const double lo = ctx.pi_lower();
    double h = 1e-5 * std::max(1.0, best.x);
    h = std::min({h, 0.5 * (best.x - lo), 0.5 * (1.0 - best.x)});
    if (h > 0.0) {
      const double f0 = loglik(best.x);
      const double fp = loglik(best.x + h);
      const double fm = loglik(best.x - h);
      const double curvature = -(fp - 2.0 * f0 + fm) / (h * h) / static_cast<double>(n);
      if (curvature > 0.0 && std::isfinite(curvature)) info = curvature;
    }
  }
  return likelihood_estimate(EstimatorKind::MarginalMLE, best.x, best.at_boundary, info, n);
}

PrevalenceEstimate cell_mme(Cell cell, const SurveyCounts& counts, const OfficialContext& ctx,
                            const ErrorRates& rates) {
  require_consistent(ctx, rates);
  const AffineTau t = tau_coefficients(ctx, rates);
  const auto i = static_cast<std::size_t>(cell);
  const double slope = t.slope[i];
  if (slope == 0.0)
    throw DegenerateError(std::string("degenerate moment condition: E[") + cell_name(cell) +
                          "/n] does not depend on pi (alpha0 = 0)");
  const double n = static_cast<double>(counts.n());
  PrevalenceEstimate est;
  est.kind = EstimatorKind::CellMME;
  est.cell = cell;
  est.raw = (static_cast<double>(counts[cell]) / n - t.intercept[i]) / slope;
  est.point = clamp_to_admissible(est.raw, ctx);
  est.at_boundary = est.raw < ctx.pi_lower() || est.raw > 1.0;
  const double tau = tau_at(t, cell, est.point);
  est.variance = tau * (1.0 - tau) / (n * slope * slope);
  return est;
}

PrevalenceEstimate mme(const SurveyCounts& counts, const OfficialContext& ctx,
                       const ErrorRates& rates) {
  PrevalenceEstimate est = cell_mme(Cell::k01, counts, ctx, rates);
  est.kind = EstimatorKind::MME;
  return est;
}

GmmWeights gmm_weights(double pi, const OfficialContext& ctx, const ErrorRates& rates) {
  if (!(rates.alpha0 > 0.0))
    throw DegenerateError("GMM weights need alpha0 > 0; cells 11 and 10 are degenerate");
  const TauVector tau = tau_probabilities(pi, ctx, rates);
  if (!(tau.tau11 > 0.0 && tau.tau10 > 0.0 && tau.tau01 > 0.0 && tau.tau00 > 0.0))
    throw DomainError("GMM weights need every cell probability positive at the pilot");
  const double a0 = rates.alpha0;
  const double b0 = 1.0 - a0;
  const double c1 = a0 * (b0 / tau.tau00 + a0 / tau.tau11);
  const double c2 = a0 * (a0 / tau.tau10 - b0 / tau.tau00);
  const double c3 = b0 * (b0 / tau.tau00 + b0 / tau.tau01);
  const double s = c1 + c2 + c3;
  return GmmWeights{c1 / s, c2 / s, c3 / s, 2.0 / s};
}

double gmm_variance(const GmmWeights& w, double pi, std::int64_t n, const OfficialContext& ctx,
                    const ErrorRates& rates) {
  const TauVector tau = tau_probabilities(pi, ctx, rates);
  const AffineTau t = tau_coefficients(ctx, rates);
  const std::array<double, 3> gamma{w.gamma1, w.gamma2, w.gamma3};
  const std::array<double, 3> p{tau.tau11, tau.tau10, tau.tau01};
  // cell MME l is (R_l/n - b_l) / a_l, so its weight on R_l/n is gamma_l / a_l
  std::array<double, 3> coef{};
  for (std::size_t l = 0; l < 3; ++l) {
    if (gamma[l] == 0.0) continue;
    if (t.slope[l] == 0.0)
      throw DegenerateError("nonzero weight on a degenerate moment condition");
    coef[l] = gamma[l] / t.slope[l];
  }
  double var = 0.0;
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t m = 0; m < 3; ++m) {
      const double cov = (l == m ? p[l] : 0.0) - p[l] * p[m];
      var += coef[l] * coef[m] * cov;
    }
  return var / static_cast<double>(n);
}

GmmResult optimal_gmm(const SurveyCounts& counts, const OfficialContext& ctx,
                      const ErrorRates& rates, std::optional<double> pilot) {
  require_consistent(ctx, rates);
  if (rates.alpha0 == 0.0) {
    GmmResult out{mme(counts, ctx, rates), GmmWeights{0.0, 0.0, 1.0, 0.0}};
    out.estimate.kind = EstimatorKind::OptimalGMM;
    const TauVector tau = tau_probabilities(out.estimate.point, ctx, rates);
    if (tau.tau00 > 0.0 && tau.tau01 > 0.0)
      out.weights.lambda = 2.0 / (1.0 / tau.tau00 + 1.0 / tau.tau01);
    return out;
  }

  const double at = pilot ? *pilot : mme(counts, ctx, rates).point;
  if (!(at > ctx.pi_lower() && at < 1.0))
    throw DomainError("GMM pilot must lie strictly inside (pi_lower, 1)");

  const GmmWeights w = gmm_weights(at, ctx, rates);
  const double r11 = cell_mme(Cell::k11, counts, ctx, rates).raw;
  const double r10 = cell_mme(Cell::k10, counts, ctx, rates).raw;
  const double r01 = cell_mme(Cell::k01, counts, ctx, rates).raw;

  PrevalenceEstimate est;
  est.kind = EstimatorKind::OptimalGMM;
  est.raw = w.gamma1 * r11 + w.gamma2 * r10 + w.gamma3 * r01;
  est.point = clamp_to_admissible(est.raw, ctx);
  est.at_boundary = est.raw < ctx.pi_lower() || est.raw > 1.0;
  est.variance = gmm_variance(w, est.point, counts.n(), ctx, rates);
  return {est, w};
}

}  // namespace cape
