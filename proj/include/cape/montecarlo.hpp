#pragma once

// Monte Carlo study of estimator accuracy and interval coverage.
//
// A scenario fixes the true prevalence, the official proportion, the error
// rates and the sample size. Each replicate draws the cross-tabulation from
// Multinomial(n, tau(pi)) using its own counter-based stream keyed by
// (seed, replicate index), runs the requested estimators and intervals, and
// stores the outcome in a per-replicate slot. Summaries are then reduced in
// replicate order, so results are bit-identical for any number of workers.
//
// run_scenario distributes replicates over OpenMP threads;
// run_scenario_serial is the single-threaded reference it is tested against.

#include <cstdint>
#include <string>
#include <vector>

#include "cape/estimators.hpp"
#include "cape/intervals.hpp"
#include "cape/model.hpp"

namespace cape {

enum class Setting { I, II, III, Custom };

std::string_view setting_name(Setting s) noexcept;
Setting parse_setting(std::string_view name);

// Error-rate presets: I none, II beta = 2%, III alpha = 1% and beta = 2%
// (alpha0 = 0 throughout).
ErrorRates setting_rates(Setting s);

inline constexpr int kDeskReplicatesIntervals = 5000;
inline constexpr int kDeskReplicatesRmse = 20000;
inline constexpr int kFullReplicates = 50000;

struct Scenario {
  Setting setting = Setting::I;
  double pi = 0.05;
  double pi0 = 0.025;
  ErrorRates rates{};
  std::int64_t n = 2000;
  std::int64_t replicates = kDeskReplicatesRmse;
  std::uint64_t seed = 20201101;
  std::vector<EstimatorKind> estimators{EstimatorKind::SurveyMLE, EstimatorKind::ConditionalMLE,
                                        EstimatorKind::MarginalMLE, EstimatorKind::MME};
  std::vector<IntervalMethod> intervals{};
  double level = 0.95;

  [[nodiscard]] OfficialContext context() const { return OfficialContext(pi0, rates.alpha0); }
  // Throws DomainError for an invalid design, pi outside [pi_lower, 1],
  // replicates < 1, n < 1, an unsupported estimator or a bad level.
  void validate() const;
};

struct EstimatorSummary {
  EstimatorKind kind{};
  double mean = 0.0;             // of the clamped point
  double rmse = 0.0;             // of the clamped point around pi
  double rel_rmse_vs_cmle = 0.0;
  double raw_mean = 0.0;         // of the unclamped value
  double raw_variance = 0.0;     // sample variance of the unclamped value
  std::int64_t successes = 0;
  std::int64_t failures = 0;
};

struct IntervalSummary {
  IntervalMethod method{};
  double coverage = 0.0;
  double mean_length = 0.0;
  double rel_length_vs_cmle_as = 0.0;
  std::int64_t successes = 0;
  std::int64_t failures = 0;
};

struct ScenarioResult {
  Scenario scenario;
  std::vector<EstimatorSummary> estimators;
  std::vector<IntervalSummary> intervals;
};

// Cell counts of replicate `replicate_index`; depends only on the scenario
// parameters, its seed and the index.
SurveyCounts sample_counts(const Scenario& scenario, std::uint64_t replicate_index);

// workers <= 0 uses the OpenMP default thread count.
ScenarioResult run_scenario(const Scenario& scenario, int workers = 0);
ScenarioResult run_scenario_serial(const Scenario& scenario);

// The pi0 grid for one value of pi: `points` equally spaced values from
// max(1.025 * alpha0, 0.025 * pi) to 0.975 * pi inclusive. Each scenario
// copies `base` and overrides setting, rates, pi and pi0.
std::vector<Scenario> scenario_grid(Setting setting, double pi, int points,
                                    const Scenario& base = Scenario{});

// Middle point of scenario_grid(setting, pi, points).
double mid_grid_pi0(Setting setting, double pi, int points = 30);

// Var(survey MLE) / Var(MME) without misclassification:
// pi (1 - pi) / ((pi - pi0) (1 + pi0 - pi)).
double efficiency_ratio(double pi, double pi0);

// n* / n, the sample-size multiple the survey MLE needs to match the MME's
// variance without misclassification: (1 - pi0) / (1 - pi0 / pi).
double equivalent_sample_ratio(double pi, double pi0);

// Cramer-Rao bound 1 / I(pi) divided by n * Var(estimator) from the
// closed-form finite-sample variances.
double survey_mle_efficiency(double pi, const OfficialContext& ctx, const ErrorRates& rates);
double mme_efficiency(double pi, const OfficialContext& ctx, const ErrorRates& rates);

}  // namespace cape
