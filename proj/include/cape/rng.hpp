#pragma once

// Counter-based random numbers for reproducible parallel simulation.
//
// Philox4x64-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2,
// 3", SC'11) maps a 256-bit counter and a 128-bit key to 256 random bits.
// A RandomStream is keyed by (seed, stream id), so each Monte Carlo
// replicate owns an independent stream and the values it sees do not depend
// on which thread runs it or in what order.

#include <array>
#include <cstdint>

namespace cape {

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

PhiloxCounter philox4x64(PhiloxCounter counter, PhiloxKey key) noexcept;

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;

 private:
  PhiloxKey key_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;
};

// Binomial(n, p) by inversion of the CDF: the CDF at the mode is evaluated
// exactly and the search walks down or up from there with the pmf
// recurrence. Consumes exactly one uniform per call with 0 < p < 1 and n > 0.
std::int64_t sample_binomial(std::int64_t n, double p, RandomStream& rng);

// Multinomial(n, probs) by sequential conditional binomials in index order.
// Probabilities must be non-negative and sum to 1 (within rounding).
std::array<std::int64_t, 4> sample_multinomial(std::int64_t n, const std::array<double, 4>& probs,
                                               RandomStream& rng);

}  // namespace cape
