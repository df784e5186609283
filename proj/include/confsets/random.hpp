#ifndef CONFSETS_RANDOM_HPP
#define CONFSETS_RANDOM_HPP

#include <cstdint>

namespace confsets {

/// Counter-based random stream. Every output is a pure function of
/// (key, draw index), so streams derived from the same (seed, repetition,
/// stage) triple replay identically regardless of thread placement.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : state_(key) {}

  /// Derives an independent stream keyed by (master_seed, repetition, stage).
  static RandomStream derive(std::uint64_t master_seed, std::uint64_t repetition,
                             std::uint64_t stage);

  std::uint64_t next_u64();

  /// Uniform on the open interval (0,1).
  double next_uniform();

  /// Standard normal via Box-Muller; draws are consumed in pairs.
  double next_normal();

  bool next_bernoulli(double p) { return next_uniform() < p; }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint32_t next_below(std::uint32_t bound);

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace confsets

#endif
