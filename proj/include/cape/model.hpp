#pragma once

// Probability model linking the survey cross-tabulation to the prevalence.
//
// Each survey participant carries a survey test result Y and an official
// status Z. Given the prevalence pi, the official proportion pi0 and the
// error rates (alpha, beta, alpha0), the four cells (Z, Y) in
// {11, 10, 01, 00} have success probabilities that are affine in pi:
//
//   tau11 =  pi*D*a0     + (pi0-a0)*(1-b) + a*a0
//   tau10 = -pi*D*a0     + (pi0-a0)*b     + (1-a)*a0
//   tau01 =  pi*D*(1-a0) - (pi0-a0)*(1-b) + a*(1-a0)
//   tau00 = -pi*D*(1-a0) - (pi0-a0)*b     + (1-a)*(1-a0)
//
// with D = 1 - (alpha + beta). All probabilities are proportions in [0, 1].

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace cape {

struct ErrorRates {
  double alpha = 0.0;   // survey false-positive rate (1 - specificity)
  double beta = 0.0;    // survey false-negative rate (1 - sensitivity)
  double alpha0 = 0.0;  // official-procedure false-positive rate

  [[nodiscard]] double delta() const noexcept { return 1.0 - (alpha + beta); }

  // Throws DomainError unless every rate is in [0, 1) and alpha + beta < 1.
  void validate() const;
};

// Official proportion together with the admissible lower bound of pi.
class OfficialContext {
 public:
  OfficialContext() = default;
  // Throws DomainError if pi0 is outside [0, 1], alpha0 outside [0, 1) or
  // alpha0 > pi0.
  OfficialContext(double pi0, double alpha0);

  [[nodiscard]] double pi0() const noexcept { return pi0_; }
  [[nodiscard]] double pi_lower() const noexcept { return pi_lower_; }
  [[nodiscard]] double alpha0() const noexcept { return alpha0_; }

 private:
  double pi0_ = 0.0;
  double alpha0_ = 0.0;
  double pi_lower_ = 0.0;
};

// Cell index in the fixed order 11, 10, 01, 00.
enum class Cell : int { k11 = 0, k10 = 1, k01 = 2, k00 = 3 };

inline constexpr std::array<Cell, 4> kAllCells{Cell::k11, Cell::k10, Cell::k01,
                                               Cell::k00};

const char* cell_name(Cell c) noexcept;

struct TauVector {
  double tau11 = 0.0;
  double tau10 = 0.0;
  double tau01 = 0.0;
  double tau00 = 0.0;

  [[nodiscard]] double operator[](Cell c) const noexcept;
  [[nodiscard]] double sum() const noexcept { return tau11 + tau10 + tau01 + tau00; }
};

// tau_l(pi) = slope[l] * pi + intercept[l], cells ordered 11, 10, 01, 00.
struct AffineTau {
  std::array<double, 4> slope{};
  std::array<double, 4> intercept{};

  [[nodiscard]] double at(Cell c, double pi) const noexcept {
    const auto i = static_cast<std::size_t>(c);
    return slope[i] * pi + intercept[i];
  }
};

class SurveyCounts {
 public:
  SurveyCounts() = default;
  // Throws DomainError on negative counts or r11 + r10 + r01 > n.
  // r00 is derived as n - r11 - r10 - r01.
  SurveyCounts(std::int64_t n, std::int64_t r11, std::int64_t r10, std::int64_t r01);

  // Counts known only as (n, R*1, R11): R10 is taken as 0 and
  // R01 = R*1 - R11.
  static SurveyCounts from_partial(std::int64_t n, std::int64_t r_star1, std::int64_t r11);

  [[nodiscard]] std::int64_t n() const noexcept { return n_; }
  [[nodiscard]] std::int64_t r11() const noexcept { return r11_; }
  [[nodiscard]] std::int64_t r10() const noexcept { return r10_; }
  [[nodiscard]] std::int64_t r01() const noexcept { return r01_; }
  [[nodiscard]] std::int64_t r00() const noexcept { return r00_; }
  [[nodiscard]] std::int64_t r_star1() const noexcept { return r11_ + r01_; }
  [[nodiscard]] std::int64_t operator[](Cell c) const noexcept;

  friend bool operator==(const SurveyCounts&, const SurveyCounts&) = default;

 private:
  std::int64_t n_ = 0;
  std::int64_t r11_ = 0;
  std::int64_t r10_ = 0;
  std::int64_t r01_ = 0;
  std::int64_t r00_ = 0;
};

// Cell probabilities at pi. Values in [-1e-15, 0) from cancellation are set to
// exactly 0; anything further out of range is a DomainError.
TauVector tau_probabilities(double pi, const OfficialContext& ctx, const ErrorRates& rates);

// Coefficients of the affine maps tau_l(pi); no range check on pi.
AffineTau tau_coefficients(const OfficialContext& ctx, const ErrorRates& rates);

// (pi0 - alpha0) / (1 - alpha0).
double prevalence_lower_bound(double pi0, double alpha0);

// beta0 = 1 - (pi0 - alpha0 * (1 - pi)) / pi.
double implied_official_fn_rate(double pi, double pi0, double alpha0);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<AssumptionCheck> checks;

  [[nodiscard]] bool ok() const noexcept;
  // First failing check, or nullptr.
  [[nodiscard]] const AssumptionCheck* first_failure() const noexcept;
};

// Checks rate ranges, alpha + beta < 1, and alpha0 <= pi0 (the observable
// consequence of alpha0 + beta0 < 1). Never throws.
ValidationReport validate_design(double pi0, const ErrorRates& rates);

// Throws DomainError naming the first failed check of validate_design.
void require_valid_design(double pi0, const ErrorRates& rates);

}  // namespace cape
