#include "cape/rng.hpp"

#include <algorithm>
#include <cmath>

#include "cape/errors.hpp"
#include "cape/special_functions.hpp"

namespace cape {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kPhiloxW0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kPhiloxW1 = 0xBB67AE8584CAA73BULL;

__extension__ typedef unsigned __int128 u128;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const u128 prod = static_cast<u128>(a) * b;
  hi = static_cast<std::uint64_t>(prod >> 64);
  lo = static_cast<std::uint64_t>(prod);
}

inline PhiloxCounter philox_round(const PhiloxCounter& x, const PhiloxKey& k) {
  std::uint64_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, x[0], hi0, lo0);
  mulhilo(kPhiloxM1, x[2], hi1, lo1);
  return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

PhiloxCounter philox4x64(PhiloxCounter counter, PhiloxKey key) noexcept {
  counter = philox_round(counter, key);
  for (int r = 1; r < 10; ++r) {
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
    counter = philox_round(counter, key);
  }
  return counter;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_{seed, stream} {}

std::uint64_t RandomStream::next_u64() noexcept {
  if (used_ == 4) {
    buffer_ = philox4x64({block_++, 0, 0, 0}, key_);
    used_ = 0;
  }
  return buffer_[static_cast<std::size_t>(used_++)];
}

double RandomStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::int64_t sample_binomial(std::int64_t n, double p, RandomStream& rng) {
  if (n < 0) throw DomainError("binomial sample size must be non-negative");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binomial probability must lie in [0, 1]");
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;

  const double u = rng.uniform();
  const double q = 1.0 - p;
  const double odds = p / q;
  const auto mode = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::floor(static_cast<double>(n + 1) * p)), 0, n);

  double cdf = binomial_cdf(mode, n, p);
  double pmf = std::exp(binomial_log_pmf(mode, n, p));
  std::int64_t k = mode;

  if (u <= cdf) {
    // smallest k with F(k) >= u, walking down
    while (k > 0) {
      const double below = cdf - pmf;
      if (u > below) break;
      pmf *= static_cast<double>(k) / (static_cast<double>(n - k + 1) * odds);
      cdf = below;
      --k;
    }
    return k;
  }
  while (k < n) {
    pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1) * odds;
    ++k;
    cdf += pmf;
    if (u <= cdf) return k;
  }
  return n;
}

std::array<std::int64_t, 4> sample_multinomial(std::int64_t n, const std::array<double, 4>& probs,
                                               RandomStream& rng) {
  std::array<std::int64_t, 4> out{};
  std::int64_t remaining = n;
  for (std::size_t l = 0; l + 1 < probs.size(); ++l) {
    double tail = 0.0;
    for (std::size_t j = l; j < probs.size(); ++j) tail += probs[j];
    const double p = tail > 0.0 ? std::clamp(probs[l] / tail, 0.0, 1.0) : 0.0;
    out[l] = sample_binomial(remaining, p, rng);
    remaining -= out[l];
  }
  out.back() = remaining;
  return out;
}

}  // namespace cape
