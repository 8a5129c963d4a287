#pragma once

// Confidence intervals for the prevalence.
//
// Exact intervals start from a Clopper-Pearson interval for a binomial
// proportion (R*1 or R01 over n) and push both bounds through the affine map
// that turns the cell probability into pi. Asymptotic intervals are Wald
// intervals from the Fisher information at a likelihood estimate.
//
// Intervals are unclamped by default; with `clamp` they are intersected with
// [pi_lower, 1] and an empty intersection is a DegenerateError.

#include <cstdint>
#include <string_view>

#include "cape/estimators.hpp"
#include "cape/model.hpp"

namespace cape {

enum class IntervalMethod { CpRstar1, CpR01, AsymptoticCmle, AsymptoticMmle };

std::string_view interval_name(IntervalMethod method) noexcept;
IntervalMethod parse_interval(std::string_view name);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 1.0;
  double level = 0.95;
  IntervalMethod method = IntervalMethod::CpRstar1;
  bool clamped = false;

  [[nodiscard]] double length() const noexcept { return upper - lower; }
  [[nodiscard]] bool contains(double pi) const noexcept { return lower <= pi && pi <= upper; }
};

struct ProportionInterval {
  double lower = 0.0;
  double upper = 1.0;
};

// Clopper-Pearson interval for r successes out of n at confidence `level`.
ProportionInterval clopper_pearson(std::int64_t r, std::int64_t n, double level);

// Two-sided standard normal critical value z_{1 - (1 - level)/2}.
double normal_critical_value(double level);

ConfidenceInterval cp_survey_interval(const SurveyCounts& counts, const OfficialContext& ctx,
                                      const ErrorRates& rates, double level, bool clamp = false);

ConfidenceInterval cp_mme_interval(const SurveyCounts& counts, const OfficialContext& ctx,
                                   const ErrorRates& rates, double level, bool clamp = false);

// point +- z * sqrt(1 / (n * info)). Throws DegenerateError for a boundary
// estimate or one without positive information.
ConfidenceInterval asymptotic_interval(const PrevalenceEstimate& estimate, std::int64_t n,
                                       double level, const OfficialContext& ctx,
                                       bool clamp = false);

}  // namespace cape
