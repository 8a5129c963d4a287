#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cape/estimators.hpp"
#include "cape/intervals.hpp"
#include "cape/model.hpp"
#include "json.hpp"

namespace cape::cli {

enum class OutputFormat { Text, Json, Csv };

std::string_view format_name(OutputFormat f) noexcept;
OutputFormat parse_format(std::string_view name);

// Counts come either in full (n, r11, r10, r01) or partial (n, r_star1, r11)
// form. In the partial form R10 is 0 and R01 = R*1 - R11.
struct EstimateRequest {
  std::optional<std::int64_t> n;
  std::optional<std::int64_t> r11;
  std::optional<std::int64_t> r10;
  std::optional<std::int64_t> r01;
  std::optional<std::int64_t> r_star1;
  std::optional<double> pi0;
  ErrorRates rates{};
  std::vector<EstimatorKind> estimators;  // empty: default set
  std::vector<IntervalMethod> intervals;  // empty: default set
  bool no_intervals = false;
  std::optional<int> cell;       // 1..4, cell order 11, 10, 01, 00
  std::optional<double> pilot;   // GMM pilot estimate
  double level = 0.95;
  bool clamp = false;
  OutputFormat format = OutputFormat::Text;

  [[nodiscard]] bool partial() const noexcept { return r_star1.has_value(); }

  // Throws DomainError if no or both count forms are given, or a count is
  // missing from the chosen form.
  [[nodiscard]] SurveyCounts counts() const;

  // Throws DomainError if pi0 is missing.
  [[nodiscard]] OfficialContext context() const;

  // Non-fatal notes, e.g. R10 = 0 assumed while beta > 0.
  [[nodiscard]] std::vector<std::string> warnings() const;

  // Copy with the default estimator and interval sets filled in.
  [[nodiscard]] EstimateRequest resolved() const;
};

std::vector<EstimatorKind> default_estimators(const ErrorRates& rates);
std::vector<IntervalMethod> default_intervals();

nlohmann::json to_json(const EstimateRequest& req);
// Accepts a bare request object or a full estimate report carrying one under
// "request". Throws DomainError on malformed input.
EstimateRequest request_from_json(const nlohmann::json& j);

struct CaseStudyDataset {
  static constexpr std::int64_t n = 2287;
  static constexpr std::int64_t r_star1 = 71;
  static constexpr std::int64_t r11 = 32;
  static constexpr double pi0 = 93914.0 / 7166167.0;
  static constexpr std::string_view label = "Austria November 2020";
};

}  // namespace cape::cli
