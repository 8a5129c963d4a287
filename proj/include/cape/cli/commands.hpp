#pragma once

// Subcommand implementations. Each cmd_* writes its report to `out`,
// diagnostics to `err`, and returns the process exit code:
// 0 success, 2 input or validation error, 3 computational degeneracy.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cape/cli/config.hpp"
#include "cape/cli/request.hpp"
#include "cape/estimators.hpp"
#include "cape/intervals.hpp"

namespace cape::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitDegenerate = 3;

// Runs `body`, mapping DomainError to 2 and DegenerateError to 3 with an
// "error: ..." line on `err`.
int guarded(std::ostream& err, const std::function<int()>& body);

// estimate

struct EstimateReport {
  EstimateRequest request;  // resolved
  SurveyCounts counts;
  double pi_lower = 0.0;
  std::vector<std::string> warnings;
  std::vector<PrevalenceEstimate> estimates;
  std::optional<GmmWeights> gmm_weights;
  std::vector<ConfidenceInterval> intervals;
};

// Throws DomainError or DegenerateError.
EstimateReport compute_estimate(const EstimateRequest& request);
nlohmann::json to_json(const EstimateReport& report);

int cmd_estimate(const EstimateRequest& request, std::ostream& out, std::ostream& err);

// simulate

struct SimulateOptions {
  int workers = 0;  // <= 0: OpenMP default
  bool full_reps = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> replicates;
};

inline constexpr std::string_view kSimulateHeader =
    "setting,pi,pi0,n,replicates,seed,estimator,mean,rmse,rel_rmse_vs_cmle,method,coverage,"
    "mean_ci_length,rel_length_vs_cmle_as,failures";

// Scenarios of every block, with option overrides applied, in file order.
std::vector<Scenario> simulation_scenarios(const SimulationConfig& config,
                                           const SimulateOptions& options);

void write_simulation_csv(const std::vector<ScenarioResult>& results, std::ostream& out);

int cmd_simulate(const std::string& config_path, const SimulateOptions& options,
                 std::ostream& out, std::ostream& err);
int cmd_simulate_text(std::string_view config_text, const SimulateOptions& options,
                      std::ostream& out, std::ostream& err);

// sensitivity

struct SensitivityOptions {
  double beta_min = 0.0;
  double beta_max = 0.30;
  int steps = 31;
};

struct SensitivityRow {
  double beta = 0.0;
  EstimatorKind kind = EstimatorKind::SurveyMLE;
  double point = 0.0;
  ConfidenceInterval interval;
};

// Survey MLE with CP-Rstar1 and MME with CP-R01 at each beta; the request's
// beta is ignored. Throws DomainError if the range is empty, steps < 1 or
// alpha + beta_max >= 1.
std::vector<SensitivityRow> sensitivity_rows(const EstimateRequest& request,
                                             const SensitivityOptions& options);

int cmd_sensitivity(const EstimateRequest& request, const SensitivityOptions& options,
                    std::ostream& out, std::ostream& err);

// case study

inline constexpr double kCaseStudyLevels[] = {0.80, 0.95, 0.99};

struct CaseStudySetting {
  std::string name;
  ErrorRates rates;
};

std::vector<CaseStudySetting> case_study_settings();

struct CaseStudyRow {
  std::string setting;
  std::string method;       // CMLE-as, MME-CP, SMLE-CP
  std::optional<double> k;  // survey scale multiplier for scaled SMLE rows
  std::int64_t n = 0;
  std::int64_t r_star1 = 0;
  double point = 0.0;
  std::vector<ConfidenceInterval> intervals;  // one per kCaseStudyLevels
};

// Base rows then one scaled SMLE-CP row per multiplier, for each setting.
// Throws DomainError if a multiplier is below 1.
std::vector<CaseStudyRow> case_study_rows(const std::vector<double>& multipliers);

int cmd_case_study(const std::vector<double>& multipliers, OutputFormat format,
                   std::ostream& out, std::ostream& err);

// Percent with 4 significant digits, e.g. 0.0301579 -> "3.016%".
std::string percent(double proportion);

}  // namespace cape::cli
