#ifndef CONFSETS_CDF_HPP
#define CONFSETS_CDF_HPP

#include <cstdint>
#include <vector>

namespace confsets {

/// Empirical CDF over a score sample. Ties count on the <= side, exactly as
/// the calibration rule is written, and no interpolation is applied.
class EmpiricalCdf {
 public:
  /// Sorts a copy of the input; the original order is irrelevant.
  explicit EmpiricalCdf(std::vector<double> scores);

  /// (number of scores <= t) / N.
  double evaluate(double t) const;

  /// Generalized inverse: the smallest observed score whose CDF value
  /// reaches p. p = 0 returns the sample minimum.
  double quantile(double p) const;

  std::int64_t size() const { return static_cast<std::int64_t>(sorted_.size()); }
  const std::vector<double>& sorted_scores() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

inline EmpiricalCdf build_cdf(std::vector<double> scores) {
  return EmpiricalCdf(std::move(scores));
}

/// Uniform deviation radius gamma = sqrt(log(2/delta) / (2N)); the empirical
/// CDF stays within gamma of the truth with probability at least 1 - delta.
double dkw_radius(std::int64_t n, double delta);

}  // namespace confsets

#endif
