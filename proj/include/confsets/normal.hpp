#ifndef CONFSETS_NORMAL_HPP
#define CONFSETS_NORMAL_HPP

namespace confsets {

/// Standard normal CDF. Absolute error is at the erfc level (well below 1e-14
/// on [-8, 8]), which keeps closed-form values usable as test oracles.
double normal_cdf(double x);

/// Standard normal density.
double normal_pdf(double x);

/// Inverse of normal_cdf on (0,1). Rational initial guess refined by one
/// Halley step; returns +/-inf at the endpoints.
double normal_quantile(double p);

/// Numerically stable logistic function 1/(1+exp(-t)).
double sigmoid(double t);

}  // namespace confsets

#endif
