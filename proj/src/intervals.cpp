#include "cape/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cape/errors.hpp"
#include "cape/special_functions.hpp"

namespace cape {

namespace {

void require_level(double level) {
  if (!(level > 0.0 && level < 1.0))
    throw DomainError("confidence level must lie in (0, 1)");
}

ConfidenceInterval finish(double lower, double upper, double level, IntervalMethod method,
                          const OfficialContext& ctx, bool clamp) {
  ConfidenceInterval ci{lower, upper, level, method, false};
  if (clamp) {
    ci.lower = std::max(lower, ctx.pi_lower());
    ci.upper = std::min(upper, 1.0);
    ci.clamped = true;
    if (ci.lower > ci.upper)
      throw DegenerateError("empty interval: " + std::string(interval_name(method)) +
                            " lies entirely outside [pi_lower, 1]");
  }
  return ci;
}

}  // namespace

std::string_view interval_name(IntervalMethod method) noexcept {
  switch (method) {
    case IntervalMethod::CpRstar1: return "cp-rstar1";
    case IntervalMethod::CpR01: return "cp-r01";
    case IntervalMethod::AsymptoticCmle: return "asymptotic-cmle";
    case IntervalMethod::AsymptoticMmle: return "asymptotic-mmle";
  }
  return "?";
}

IntervalMethod parse_interval(std::string_view name) {
  for (auto m : {IntervalMethod::CpRstar1, IntervalMethod::CpR01,
                 IntervalMethod::AsymptoticCmle, IntervalMethod::AsymptoticMmle})
    if (interval_name(m) == name) return m;
  throw DomainError("unknown interval method '" + std::string(name) + "'");
}

ProportionInterval clopper_pearson(std::int64_t r, std::int64_t n, double level) {
  require_level(level);
  if (n <= 0 || r < 0 || r > n) throw DomainError("Clopper-Pearson needs 0 <= r <= n, n > 0");
  const double gamma = 1.0 - level;
  const double rd = static_cast<double>(r);
  const double nd = static_cast<double>(n);
  ProportionInterval out;
  out.lower = r == 0 ? 0.0 : beta_quantile(gamma / 2.0, rd, nd - rd + 1.0);
  out.upper = r == n ? 1.0 : beta_quantile(1.0 - gamma / 2.0, rd + 1.0, nd - rd);
  return out;
}

double normal_critical_value(double level) {
  require_level(level);
  return normal_quantile(1.0 - (1.0 - level) / 2.0);
}

ConfidenceInterval cp_survey_interval(const SurveyCounts& counts, const OfficialContext& ctx,
                                      const ErrorRates& rates, double level, bool clamp) {
  rates.validate();
  const ProportionInterval cp = clopper_pearson(counts.r_star1(), counts.n(), level);
  const double d = rates.delta();
  return finish((cp.lower - rates.alpha) / d, (cp.upper - rates.alpha) / d, level,
                IntervalMethod::CpRstar1, ctx, clamp);
}

ConfidenceInterval cp_mme_interval(const SurveyCounts& counts, const OfficialContext& ctx,
                                   const ErrorRates& rates, double level, bool clamp) {
  require_valid_design(ctx.pi0(), rates);
  const ProportionInterval cp = clopper_pearson(counts.r01(), counts.n(), level);
  const double a0 = rates.alpha0;
  const double shift = (ctx.pi0() - a0) * (1.0 - rates.beta) - rates.alpha * (1.0 - a0);
  const double scale = rates.delta() * (1.0 - a0);
  return finish((cp.lower + shift) / scale, (cp.upper + shift) / scale, level,
                IntervalMethod::CpR01, ctx, clamp);
}

ConfidenceInterval asymptotic_interval(const PrevalenceEstimate& estimate, std::int64_t n,
                                       double level, const OfficialContext& ctx, bool clamp) {
  require_level(level);
  if (n <= 0) throw DomainError("sample size n must be positive");
  IntervalMethod method;
  switch (estimate.kind) {
    case EstimatorKind::ConditionalMLE: method = IntervalMethod::AsymptoticCmle; break;
    case EstimatorKind::MarginalMLE: method = IntervalMethod::AsymptoticMmle; break;
    default:
      throw DomainError("asymptotic intervals are defined for the conditional and marginal MLE");
  }
  if (estimate.at_boundary)
    throw DegenerateError("asymptotic interval undefined: estimate lies on the boundary");
  if (!estimate.info || !(*estimate.info > 0.0))
    throw DegenerateError("asymptotic interval undefined: no positive information at estimate");
  const double half =
      normal_critical_value(level) * std::sqrt(1.0 / (static_cast<double>(n) * *estimate.info));
  return finish(estimate.point - half, estimate.point + half, level, method, ctx, clamp);
}

}  // namespace cape
