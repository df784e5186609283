#include "confsets/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace confsets {

EmpiricalCdf::EmpiricalCdf(std::vector<double> scores) : sorted_(std::move(scores)) {
  if (sorted_.empty()) throw std::invalid_argument("EmpiricalCdf: empty sample");
  for (double s : sorted_) {
    if (std::isnan(s)) throw std::invalid_argument("EmpiricalCdf: NaN score");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::evaluate(double t) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
  const auto count = static_cast<double>(it - sorted_.begin());
  return count / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double p) const {
  if (std::isnan(p) || p > 1.0 || p < 0.0)
    throw std::invalid_argument("EmpiricalCdf::quantile: p must be in [0,1]");
  const auto n = static_cast<std::int64_t>(sorted_.size());
  if (p == 0.0) return sorted_.front();
  // Smallest k with k/n >= p, using the same double division evaluate()
  // performs, so evaluate(t) >= p iff t >= quantile(p) holds exactly.
  std::int64_t lo = 1, hi = n;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (static_cast<double>(mid) / static_cast<double>(n) >= p) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return sorted_[static_cast<std::size_t>(lo - 1)];
}

double dkw_radius(std::int64_t n, double delta) {
  if (n < 1) throw std::invalid_argument("dkw_radius: n must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("dkw_radius: delta must be in (0,1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

}  // namespace confsets
