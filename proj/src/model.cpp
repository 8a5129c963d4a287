#include "cape/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cape/errors.hpp"

namespace cape {

namespace {

constexpr double kNegativeSlack = 1e-15;

bool in_unit_half_open(double p) { return p >= 0.0 && p < 1.0; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Snap cancellation noise to the nearest end of [0, 1].
double snap_probability(double p, const char* what) {
  if (p < 0.0) {
    if (p >= -kNegativeSlack) return 0.0;
    throw DomainError(std::string(what) + " is negative (" + fmt(p) + ")");
  }
  if (p > 1.0) {
    if (p <= 1.0 + kNegativeSlack) return 1.0;
    throw DomainError(std::string(what) + " exceeds 1 (" + fmt(p) + ")");
  }
  return p;
}

}  // namespace

void ErrorRates::validate() const {
  if (!in_unit_half_open(alpha) || !in_unit_half_open(beta) || !in_unit_half_open(alpha0))
    throw DomainError("violated rate ranges (alpha, beta, alpha0 must lie in [0, 1))");
  if (!(alpha + beta < 1.0))
    throw DomainError("violated assumption 1: alpha + beta < 1 (alpha + beta = " +
                      fmt(alpha + beta) + ")");
}

OfficialContext::OfficialContext(double pi0, double alpha0)
    : pi0_(pi0), alpha0_(alpha0), pi_lower_(prevalence_lower_bound(pi0, alpha0)) {}

const char* cell_name(Cell c) noexcept {
  switch (c) {
    case Cell::k11: return "R11";
    case Cell::k10: return "R10";
    case Cell::k01: return "R01";
    case Cell::k00: return "R00";
  }
  return "?";
}

double TauVector::operator[](Cell c) const noexcept {
  switch (c) {
    case Cell::k11: return tau11;
    case Cell::k10: return tau10;
    case Cell::k01: return tau01;
    case Cell::k00: return tau00;
  }
  return 0.0;
}

SurveyCounts::SurveyCounts(std::int64_t n, std::int64_t r11, std::int64_t r10,
                           std::int64_t r01)
    : n_(n), r11_(r11), r10_(r10), r01_(r01), r00_(n - r11 - r10 - r01) {
  if (n <= 0) throw DomainError("sample size n must be positive");
  if (r11 < 0 || r10 < 0 || r01 < 0)
    throw DomainError("cell counts must be non-negative");
  if (r00_ < 0)
    throw DomainError("cell counts R11 + R10 + R01 exceed the sample size n");
}

SurveyCounts SurveyCounts::from_partial(std::int64_t n, std::int64_t r_star1,
                                        std::int64_t r11) {
  if (r11 > r_star1)
    throw DomainError("R11 cannot exceed the number of survey positives R*1");
  return SurveyCounts(n, r11, 0, r_star1 - r11);
}

std::int64_t SurveyCounts::operator[](Cell c) const noexcept {
  switch (c) {
    case Cell::k11: return r11_;
    case Cell::k10: return r10_;
    case Cell::k01: return r01_;
    case Cell::k00: return r00_;
  }
  return 0;
}

AffineTau tau_coefficients(const OfficialContext& ctx, const ErrorRates& rates) {
  const double a = rates.alpha;
  const double b = rates.beta;
  const double a0 = rates.alpha0;
  const double d = rates.delta();
  const double excess = ctx.pi0() - a0;
  AffineTau t;
  t.slope = {d * a0, -d * a0, d * (1.0 - a0), -d * (1.0 - a0)};
  t.intercept = {excess * (1.0 - b) + a * a0, excess * b + (1.0 - a) * a0,
                 -excess * (1.0 - b) + a * (1.0 - a0),
                 -excess * b + (1.0 - a) * (1.0 - a0)};
  return t;
}

TauVector tau_probabilities(double pi, const OfficialContext& ctx, const ErrorRates& rates) {
  require_valid_design(ctx.pi0(), rates);
  if (ctx.alpha0() != rates.alpha0)
    throw DomainError("official context was built with a different alpha0");
  if (!(pi >= ctx.pi_lower() && pi <= 1.0))
    throw DomainError("prevalence " + fmt(pi) + " outside admissible range [" +
                      fmt(ctx.pi_lower()) + ", 1]");

  const AffineTau t = tau_coefficients(ctx, rates);
  return TauVector{snap_probability(t.at(Cell::k11, pi), "tau11"),
                   snap_probability(t.at(Cell::k10, pi), "tau10"),
                   snap_probability(t.at(Cell::k01, pi), "tau01"),
                   snap_probability(t.at(Cell::k00, pi), "tau00")};
}

double prevalence_lower_bound(double pi0, double alpha0) {
  if (!(pi0 >= 0.0 && pi0 <= 1.0))
    throw DomainError("official proportion pi0 must lie in [0, 1]");
  if (!in_unit_half_open(alpha0))
    throw DomainError("official false-positive rate alpha0 must lie in [0, 1)");
  if (alpha0 > pi0)
    throw DomainError("alpha0 > pi0 violates alpha0 + beta0 < 1 (assumption 2)");
  const double lower = (pi0 - alpha0) / (1.0 - alpha0);
  return std::clamp(lower, 0.0, 1.0);
}

double implied_official_fn_rate(double pi, double pi0, double alpha0) {
  if (pi == 0.0)
    throw DomainError("official false-negative rate is undefined at pi = 0");
  const double lower = prevalence_lower_bound(pi0, alpha0);
  if (!(pi > 0.0 && pi <= 1.0))
    throw DomainError("prevalence must lie in (0, 1]");
  if (pi < lower)
    throw DomainError("prevalence below the admissible lower bound");
  const double beta0 = 1.0 - (pi0 - alpha0 * (1.0 - pi)) / pi;
  return snap_probability(beta0, "beta0");
}

bool ValidationReport::ok() const noexcept { return first_failure() == nullptr; }

const AssumptionCheck* ValidationReport::first_failure() const noexcept {
  for (const auto& c : checks)
    if (!c.passed) return &c;
  return nullptr;
}

ValidationReport validate_design(double pi0, const ErrorRates& rates) {
  ValidationReport report;
  const bool ranges = in_unit_half_open(rates.alpha) && in_unit_half_open(rates.beta) &&
                      in_unit_half_open(rates.alpha0) && pi0 >= 0.0 && pi0 <= 1.0;
  report.checks.push_back(
      {"rate ranges", ranges,
       "alpha, beta, alpha0 in [0, 1) and pi0 in [0, 1]"});

  const double sum = rates.alpha + rates.beta;
  report.checks.push_back({"assumption 1: alpha + beta < 1", sum < 1.0,
                           "alpha + beta = " + fmt(sum)});

  report.checks.push_back({"assumption 2: alpha0 <= pi0", rates.alpha0 <= pi0,
                           "alpha0 = " + fmt(rates.alpha0) + ", pi0 = " + fmt(pi0)});
  return report;
}

void require_valid_design(double pi0, const ErrorRates& rates) {
  const ValidationReport report = validate_design(pi0, rates);
  if (const auto* failed = report.first_failure())
    throw DomainError("violated " + failed->name + " (" + failed->detail + ")");
}

}  // namespace cape
