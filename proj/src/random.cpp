#include "confsets/random.hpp"

#include <cmath>

namespace confsets {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer; bijective on u64.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace

RandomStream RandomStream::derive(std::uint64_t master_seed, std::uint64_t repetition,
                                  std::uint64_t stage) {
  std::uint64_t k = mix(master_seed + kGamma);
  k = mix(k ^ (repetition + 0xBF58476D1CE4E5B9ULL));
  k = mix(k ^ (stage + 0x94D049BB133111EBULL));
  return RandomStream(k);
}

std::uint64_t RandomStream::next_u64() {
  state_ += kGamma;
  return mix(state_);
}

double RandomStream::next_uniform() {
  // 53-bit mantissa shifted to the cell midpoint keeps 0 and 1 unreachable.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

std::uint32_t RandomStream::next_below(std::uint32_t bound) {
  // Multiply-shift map of the top 32 bits; bias is O(2^-32), irrelevant here.
  const std::uint64_t x = next_u64() >> 32;
  return static_cast<std::uint32_t>((x * bound) >> 32);
}

}  // namespace confsets
