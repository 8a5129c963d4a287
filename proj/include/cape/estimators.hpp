#pragma once

// Point estimators of the prevalence from a survey cross-tabulation.
//
//   survey MLE       uses only R*1 = R11 + R01 and ignores official status
//   conditional MLE  maximises the multinomial likelihood of all four cells
//   marginal MLE     as above with R10 and R00 replaced by expectations
//   MME              inverts E[R01 / n] = tau01(pi)
//   cell MME         inverts E[R_l / n] = tau_l(pi) for a single cell l
//   optimal GMM      minimum-variance combination of the cell MMEs 11, 10, 01
//
// Moment-type estimators keep both the raw (unbiased, possibly outside the
// parameter space) value and `point`, the value clamped to [pi_lower, 1].
// `variance` is the finite-sample variance of the estimator evaluated at
// `point`; for the likelihood estimators it is 1 / (n * info).

#include <optional>
#include <string_view>

#include "cape/model.hpp"

namespace cape {

enum class EstimatorKind { SurveyMLE, ConditionalMLE, MarginalMLE, MME, CellMME, OptimalGMM };

std::string_view estimator_name(EstimatorKind kind) noexcept;
// Accepts the names produced by estimator_name; throws DomainError otherwise.
EstimatorKind parse_estimator(std::string_view name);

struct PrevalenceEstimate {
  EstimatorKind kind = EstimatorKind::SurveyMLE;
  Cell cell = Cell::k01;  // meaningful for CellMME only
  double point = 0.0;
  double raw = 0.0;
  double variance = 0.0;
  bool at_boundary = false;
  std::optional<double> info;  // per-observation Fisher information at point
};

struct GmmWeights {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 1.0;
  double lambda = 0.0;
};

// Log-likelihood of the four cells up to an additive constant, with
// 0 * ln 0 = 0. Returns -infinity if a positive count meets tau == 0.
double log_likelihood(double pi, const SurveyCounts& counts, const OfficialContext& ctx,
                      const ErrorRates& rates);

// Log-likelihood with R10 and R00 replaced by n*tau10 and n - R - n*tau10,
// R = R11 + R01.
double marginal_log_likelihood(double pi, std::int64_t r11, std::int64_t r01, std::int64_t n,
                               const OfficialContext& ctx, const ErrorRates& rates);

// Per-observation Fisher information sum_l slope_l^2 / tau_l(pi), skipping
// cells whose tau does not depend on pi. Throws DomainError if pi is outside
// [pi_lower, 1] or a contributing tau vanishes.
double fisher_information(double pi, const OfficialContext& ctx, const ErrorRates& rates);

// Finite-sample variance of the survey MLE at prevalence pi:
// (pi*D + alpha)(1 - pi*D - alpha) / (n D^2).
double survey_mle_variance(double pi, std::int64_t n, const ErrorRates& rates);

// Finite-sample variance of the MME at prevalence pi:
// tau01 (1 - tau01) / (n D^2 (1 - alpha0)^2).
double mme_variance(double pi, std::int64_t n, const OfficialContext& ctx,
                    const ErrorRates& rates);

PrevalenceEstimate survey_mle(const SurveyCounts& counts, const ErrorRates& rates);

// Closed form when alpha0 == 0 (moved to the nearest bound if it leaves
// [pi_lower, 1], the log-likelihood being concave); numeric maximisation
// otherwise. Throws DegenerateError if an observed cell is impossible for
// every admissible pi or no observed cell depends on pi.
PrevalenceEstimate conditional_mle(const SurveyCounts& counts, const OfficialContext& ctx,
                                   const ErrorRates& rates);

// Always maximises the log-likelihood numerically. Exposed so the closed form
// can be checked against it.
PrevalenceEstimate conditional_mle_numeric(const SurveyCounts& counts,
                                           const OfficialContext& ctx,
                                           const ErrorRates& rates);

PrevalenceEstimate marginal_mle(std::int64_t r11, std::int64_t r01, std::int64_t n,
                                const OfficialContext& ctx, const ErrorRates& rates);

PrevalenceEstimate mme(const SurveyCounts& counts, const OfficialContext& ctx,
                       const ErrorRates& rates);

// Throws DegenerateError when tau_l does not depend on pi (cells 11 and 10
// with alpha0 == 0).
PrevalenceEstimate cell_mme(Cell cell, const SurveyCounts& counts, const OfficialContext& ctx,
                            const ErrorRates& rates);

// Variance-minimising weights of the cell MMEs 11, 10, 01 at prevalence pi.
// Requires alpha0 > 0 and pi with tau11, tau10, tau01, tau00 all positive.
GmmWeights gmm_weights(double pi, const OfficialContext& ctx, const ErrorRates& rates);

// Variance of sum_l gamma_l * cellMME_l at prevalence pi with sample size n.
double gmm_variance(const GmmWeights& weights, double pi, std::int64_t n,
                    const OfficialContext& ctx, const ErrorRates& rates);

struct GmmResult {
  PrevalenceEstimate estimate;
  GmmWeights weights;
};

// With alpha0 == 0 returns the MME with weights (0, 0, 1). Otherwise weights
// are evaluated at `pilot` (default: the MME point), which must lie strictly
// inside (pi_lower, 1).
GmmResult optimal_gmm(const SurveyCounts& counts, const OfficialContext& ctx,
                      const ErrorRates& rates, std::optional<double> pilot = std::nullopt);

}  // namespace cape
