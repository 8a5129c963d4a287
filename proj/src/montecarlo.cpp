#include "cape/montecarlo.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "cape/errors.hpp"
#include "cape/rng.hpp"

namespace cape {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class T>
bool contains(const std::vector<T>& v, T x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Everything a replicate needs, computed once per scenario.
struct Plan {
  Scenario scenario;
  OfficialContext ctx;
  std::array<double, 4> tau{};
  std::vector<EstimatorKind> estimators;  // requested, then CMLE if missing
  std::vector<IntervalMethod> intervals;  // requested, then asymptotic CMLE if missing
  std::size_t cmle_slot = 0;
  std::size_t cmle_as_slot = 0;
  bool needs_mmle = false;
};

Plan make_plan(const Scenario& s) {
  s.validate();
  Plan plan;
  plan.scenario = s;
  plan.ctx = s.context();
  const TauVector t = tau_probabilities(s.pi, plan.ctx, s.rates);
  plan.tau = {t.tau11, t.tau10, t.tau01, t.tau00};

  plan.estimators = s.estimators;
  if (!contains(plan.estimators, EstimatorKind::ConditionalMLE))
    plan.estimators.push_back(EstimatorKind::ConditionalMLE);
  plan.cmle_slot = static_cast<std::size_t>(
      std::find(plan.estimators.begin(), plan.estimators.end(), EstimatorKind::ConditionalMLE) -
      plan.estimators.begin());

  plan.intervals = s.intervals;
  if (!plan.intervals.empty() && !contains(plan.intervals, IntervalMethod::AsymptoticCmle))
    plan.intervals.push_back(IntervalMethod::AsymptoticCmle);
  plan.cmle_as_slot = static_cast<std::size_t>(
      std::find(plan.intervals.begin(), plan.intervals.end(), IntervalMethod::AsymptoticCmle) -
      plan.intervals.begin());

  plan.needs_mmle = contains(plan.estimators, EstimatorKind::MarginalMLE) ||
                    contains(plan.intervals, IntervalMethod::AsymptoticMmle);
  return plan;
}

// Flat per-replicate storage, row-major by replicate.
struct Outcomes {
  std::size_t n_est = 0;
  std::size_t n_int = 0;
  std::vector<double> point, raw;   // NaN marks a failed estimator
  std::vector<double> lower, upper; // NaN marks a failed interval

  Outcomes(std::size_t replicates, std::size_t e, std::size_t m)
      : n_est(e), n_int(m), point(replicates * e, kNaN), raw(replicates * e, kNaN),
        lower(replicates * m, kNaN), upper(replicates * m, kNaN) {}
};

SurveyCounts draw(const Plan& plan, std::uint64_t index) {
  RandomStream rng(plan.scenario.seed, index);
  const auto c = sample_multinomial(plan.scenario.n, plan.tau, rng);
  return SurveyCounts(plan.scenario.n, c[0], c[1], c[2]);
}

std::optional<PrevalenceEstimate> try_estimate(EstimatorKind kind, const SurveyCounts& counts,
                                               const Plan& plan) {
  const Scenario& s = plan.scenario;
  try {
    switch (kind) {
      case EstimatorKind::SurveyMLE: return survey_mle(counts, s.rates);
      case EstimatorKind::ConditionalMLE: return conditional_mle(counts, plan.ctx, s.rates);
      case EstimatorKind::MarginalMLE:
        return marginal_mle(counts.r11(), counts.r01(), counts.n(), plan.ctx, s.rates);
      case EstimatorKind::MME: return mme(counts, plan.ctx, s.rates);
      case EstimatorKind::OptimalGMM: return optimal_gmm(counts, plan.ctx, s.rates).estimate;
      case EstimatorKind::CellMME: break;
    }
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

void simulate_replicate(const Plan& plan, std::uint64_t r, Outcomes& out) {
  const Scenario& s = plan.scenario;
  const SurveyCounts counts = draw(plan, r);

  std::optional<PrevalenceEstimate> cmle, mmle;
  for (std::size_t e = 0; e < plan.estimators.size(); ++e) {
    const auto est = try_estimate(plan.estimators[e], counts, plan);
    if (plan.estimators[e] == EstimatorKind::ConditionalMLE) cmle = est;
    if (plan.estimators[e] == EstimatorKind::MarginalMLE) mmle = est;
    if (!est) continue;
    out.point[r * out.n_est + e] = est->point;
    out.raw[r * out.n_est + e] = est->raw;
  }
  if (plan.needs_mmle && !mmle) mmle = try_estimate(EstimatorKind::MarginalMLE, counts, plan);

  for (std::size_t m = 0; m < plan.intervals.size(); ++m) {
    try {
      ConfidenceInterval ci;
      switch (plan.intervals[m]) {
        case IntervalMethod::CpRstar1:
          ci = cp_survey_interval(counts, plan.ctx, s.rates, s.level);
          break;
        case IntervalMethod::CpR01:
          ci = cp_mme_interval(counts, plan.ctx, s.rates, s.level);
          break;
        case IntervalMethod::AsymptoticCmle:
          if (!cmle) continue;
          ci = asymptotic_interval(*cmle, s.n, s.level, plan.ctx);
          break;
        case IntervalMethod::AsymptoticMmle:
          if (!mmle) continue;
          ci = asymptotic_interval(*mmle, s.n, s.level, plan.ctx);
          break;
      }
      out.lower[r * out.n_int + m] = ci.lower;
      out.upper[r * out.n_int + m] = ci.upper;
    } catch (const std::exception&) {
    }
  }
}

ScenarioResult summarize(const Plan& plan, const Outcomes& out) {
  const Scenario& s = plan.scenario;
  const auto reps = static_cast<std::size_t>(s.replicates);
  ScenarioResult result;
  result.scenario = s;

  std::vector<EstimatorSummary> est(plan.estimators.size());
  for (std::size_t e = 0; e < plan.estimators.size(); ++e) {
    EstimatorSummary& sum = est[e];
    sum.kind = plan.estimators[e];
    double acc_point = 0.0, acc_sq = 0.0, acc_raw = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double p = out.point[r * out.n_est + e];
      if (std::isnan(p)) {
        ++sum.failures;
        continue;
      }
      ++sum.successes;
      acc_point += p;
      acc_sq += (p - s.pi) * (p - s.pi);
      acc_raw += out.raw[r * out.n_est + e];
    }
    if (sum.successes == 0) {
      sum.mean = sum.rmse = sum.raw_mean = sum.raw_variance = kNaN;
      continue;
    }
    const auto k = static_cast<double>(sum.successes);
    sum.mean = acc_point / k;
    sum.rmse = std::sqrt(acc_sq / k);
    sum.raw_mean = acc_raw / k;
    double acc_dev = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double p = out.point[r * out.n_est + e];
      if (std::isnan(p)) continue;
      const double d = out.raw[r * out.n_est + e] - sum.raw_mean;
      acc_dev += d * d;
    }
    sum.raw_variance = sum.successes > 1 ? acc_dev / (k - 1.0) : 0.0;
  }
  const double cmle_rmse = est[plan.cmle_slot].rmse;
  for (auto& e : est) e.rel_rmse_vs_cmle = e.rmse / cmle_rmse;

  std::vector<IntervalSummary> ints(plan.intervals.size());
  for (std::size_t m = 0; m < plan.intervals.size(); ++m) {
    IntervalSummary& sum = ints[m];
    sum.method = plan.intervals[m];
    std::int64_t covered = 0;
    double acc_len = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      const double lo = out.lower[r * out.n_int + m];
      const double hi = out.upper[r * out.n_int + m];
      if (std::isnan(lo) || std::isnan(hi)) {
        ++sum.failures;
        continue;
      }
      ++sum.successes;
      if (lo <= s.pi && s.pi <= hi) ++covered;
      acc_len += hi - lo;
    }
    if (sum.successes == 0) {
      sum.coverage = sum.mean_length = kNaN;
      continue;
    }
    sum.coverage = static_cast<double>(covered) / static_cast<double>(sum.successes);
    sum.mean_length = acc_len / static_cast<double>(sum.successes);
  }
  if (!ints.empty()) {
    const double ref = ints[plan.cmle_as_slot].mean_length;
    for (auto& i : ints) i.rel_length_vs_cmle_as = i.mean_length / ref;
  }

  // Report only what was asked for, in the order asked.
  for (auto kind : s.estimators)
    for (const auto& e : est)
      if (e.kind == kind) result.estimators.push_back(e);
  for (auto method : s.intervals)
    for (const auto& i : ints)
      if (i.method == method) result.intervals.push_back(i);
  return result;
}

}  // namespace

std::string_view setting_name(Setting s) noexcept {
  switch (s) {
    case Setting::I: return "I";
    case Setting::II: return "II";
    case Setting::III: return "III";
    case Setting::Custom: return "custom";
  }
  return "?";
}

Setting parse_setting(std::string_view name) {
  for (auto s : {Setting::I, Setting::II, Setting::III, Setting::Custom})
    if (setting_name(s) == name) return s;
  throw DomainError("unknown setting '" + std::string(name) + "' (expected I, II, III or custom)");
}

ErrorRates setting_rates(Setting s) {
  switch (s) {
    case Setting::I: return ErrorRates{0.0, 0.0, 0.0};
    case Setting::II: return ErrorRates{0.0, 0.02, 0.0};
    case Setting::III: return ErrorRates{0.01, 0.02, 0.0};
    case Setting::Custom: break;
  }
  throw DomainError("the custom setting has no preset error rates");
}

void Scenario::validate() const {
  require_valid_design(pi0, rates);
  const OfficialContext ctx = context();
  if (!(pi >= ctx.pi_lower() && pi <= 1.0))
    throw DomainError("scenario prevalence pi must lie in [pi_lower, 1]");
  if (n < 1) throw DomainError("scenario sample size n must be at least 1");
  if (replicates < 1) throw DomainError("scenario needs at least one replicate");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  if (estimators.empty()) throw DomainError("scenario needs at least one estimator");
  if (contains(estimators, EstimatorKind::CellMME))
    throw DomainError("cell-mme is not available in simulations");
}

SurveyCounts sample_counts(const Scenario& scenario, std::uint64_t replicate_index) {
  scenario.validate();
  const OfficialContext ctx = scenario.context();
  const TauVector t = tau_probabilities(scenario.pi, ctx, scenario.rates);
  Plan plan;
  plan.scenario = scenario;
  plan.tau = {t.tau11, t.tau10, t.tau01, t.tau00};
  return draw(plan, replicate_index);
}

ScenarioResult run_scenario_serial(const Scenario& scenario) {
  const Plan plan = make_plan(scenario);
  const auto reps = static_cast<std::uint64_t>(scenario.replicates);
  Outcomes out(reps, plan.estimators.size(), plan.intervals.size());
  for (std::uint64_t r = 0; r < reps; ++r) simulate_replicate(plan, r, out);
  return summarize(plan, out);
}

ScenarioResult run_scenario(const Scenario& scenario, int workers) {
  const Plan plan = make_plan(scenario);
  const auto reps = static_cast<std::int64_t>(scenario.replicates);
  Outcomes out(static_cast<std::size_t>(reps), plan.estimators.size(), plan.intervals.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 64)
  for (std::int64_t r = 0; r < reps; ++r)
    simulate_replicate(plan, static_cast<std::uint64_t>(r), out);
  return summarize(plan, out);
}

std::vector<Scenario> scenario_grid(Setting setting, double pi, int points, const Scenario& base) {
  if (points < 2) throw DomainError("a pi0 grid needs at least two points");
  const ErrorRates rates = setting == Setting::Custom ? base.rates : setting_rates(setting);
  const double lo = std::max(1.025 * rates.alpha0, 0.025 * pi);
  const double hi = 0.975 * pi;
  std::vector<Scenario> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    Scenario s = base;
    s.setting = setting;
    s.rates = rates;
    s.pi = pi;
    s.pi0 = i == points - 1 ? hi : lo + (hi - lo) * i / (points - 1);
    grid.push_back(std::move(s));
  }
  return grid;
}

double mid_grid_pi0(Setting setting, double pi, int points) {
  return scenario_grid(setting, pi, points)[static_cast<std::size_t>(points / 2)].pi0;
}

double efficiency_ratio(double pi, double pi0) {
  if (pi == pi0) throw DomainError("efficiency ratio is undefined at pi = pi0");
  if (!(pi > pi0)) throw DomainError("efficiency ratio needs pi > pi0");
  return pi * (1.0 - pi) / ((pi - pi0) * (1.0 + pi0 - pi));
}

double equivalent_sample_ratio(double pi, double pi0) {
  if (!(pi0 >= 0.0) || !(pi0 < pi))
    throw DomainError("equivalent sample ratio needs 0 <= pi0 < pi");
  return (1.0 - pi0) / (1.0 - pi0 / pi);
}

double survey_mle_efficiency(double pi, const OfficialContext& ctx, const ErrorRates& rates) {
  return 1.0 / fisher_information(pi, ctx, rates) / survey_mle_variance(pi, 1, rates);
}

double mme_efficiency(double pi, const OfficialContext& ctx, const ErrorRates& rates) {
  return 1.0 / fisher_information(pi, ctx, rates) / mme_variance(pi, 1, ctx, rates);
}

}  // namespace cape
