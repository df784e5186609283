#include "confsets/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "confsets/normal.hpp"

namespace confsets {

GaussianMixtureParams::GaussianMixtureParams(Eigen::VectorXd mu0_in,
                                             Eigen::VectorXd mu1_in,
                                             Eigen::MatrixXd sigma_in)
    : mu0(std::move(mu0_in)), mu1(std::move(mu1_in)), sigma(std::move(sigma_in)) {
  const Eigen::Index d = mu0.size();
  if (d < 1) throw std::invalid_argument("mixture dimension must be >= 1");
  if (mu1.size() != d || sigma.rows() != d || sigma.cols() != d)
    throw std::invalid_argument("mixture parameter dimensions disagree");
  if (!sigma.isApprox(sigma.transpose(), 1e-12))
    throw std::invalid_argument("covariance must be symmetric");

  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("covariance must be positive definite");
  chol_lower = llt.matrixL();

  const Eigen::VectorXd diff = mu1 - mu0;
  sigma_inv_diff = llt.solve(diff);
  delta = std::sqrt(diff.dot(sigma_inv_diff));
}

GaussianMixtureParams GaussianMixtureParams::canonical_1d(double delta) {
  if (delta < 0.0) throw std::invalid_argument("delta must be >= 0");
  Eigen::VectorXd mu0(1), mu1(1);
  mu0 << 0.0;
  mu1 << delta;
  Eigen::MatrixXd sigma(1, 1);
  sigma << 1.0;
  return GaussianMixtureParams(mu0, mu1, sigma);
}

GenerativeModel GenerativeModel::model1() { return GenerativeModel(Kind::Model1, 10); }
GenerativeModel GenerativeModel::model2() { return GenerativeModel(Kind::Model2, 3); }
GenerativeModel GenerativeModel::model3() { return GenerativeModel(Kind::Model3, 1); }

GenerativeModel GenerativeModel::gaussian_mixture(GaussianMixtureParams params) {
  GenerativeModel m(Kind::GaussianMixture, static_cast<int>(params.mu0.size()));
  m.gauss_ = std::move(params);
  return m;
}

std::string GenerativeModel::name() const {
  switch (kind_) {
    case Kind::Model1: return "model1";
    case Kind::Model2: return "model2";
    case Kind::Model3: return "model3";
    case Kind::GaussianMixture: return "gauss";
  }
  return "unknown";
}

double GenerativeModel::eta_star(const Eigen::VectorXd& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("eta_star: feature dimension mismatch");
  switch (kind_) {
    case Kind::Model1:
      return sigmoid(x[0] - x[1] - x[2] + x[8]);
    case Kind::Model2:
      // The published logit is scaled by 1/2; this is the scaling that
      // reproduces the reported risk tables and the mass of eta near 1/2.
      return sigmoid(0.5 * (x[0] * x[0] + 0.5 * x[1] + std::sin(x[0] + x[2]) +
                            3.0 * x[2]));
    case Kind::Model3: {
      const double u = x[0];
      if (u <= 0.25) return 0.2;
      if (u <= 0.5) return 0.4;
      if (u <= 0.75) return 0.6;
      return 0.8;
    }
    case Kind::GaussianMixture: {
      // Log-density difference; avoids the p1/(p1+p0) ratio underflowing for
      // well separated classes.
      const Eigen::VectorXd mid = 0.5 * (gauss_->mu0 + gauss_->mu1);
      const double logit = (x - mid).dot(gauss_->sigma_inv_diff);
      return sigmoid(logit);
    }
  }
  return 0.5;
}

Sample GenerativeModel::sample_one(RandomStream& rng) const {
  Sample s;
  if (kind_ == Kind::GaussianMixture) {
    s.y = rng.next_bernoulli(0.5) ? 1 : 0;
    Eigen::VectorXd z(dim_);
    for (int j = 0; j < dim_; ++j) z[j] = rng.next_normal();
    const Eigen::VectorXd& mu = (s.y == 1) ? gauss_->mu1 : gauss_->mu0;
    s.x = mu + gauss_->chol_lower * z;
    return s;
  }
  Eigen::VectorXd x(dim_);
  switch (kind_) {
    case Kind::Model1:
    case Kind::Model3:
      for (int j = 0; j < dim_; ++j) x[j] = rng.next_uniform();
      break;
    case Kind::Model2:
      for (int j = 0; j < dim_; ++j) x[j] = rng.next_normal();
      break;
    default:
      break;
  }
  s.x = std::move(x);
  s.y = rng.next_bernoulli(eta_star(s.x)) ? 1 : 0;
  return s;
}

std::vector<Sample> GenerativeModel::sample(int count, RandomStream& rng) const {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  std::vector<Sample> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(sample_one(rng));
  return out;
}

LabeledDataset GenerativeModel::sample_labeled(int count, RandomStream& rng) const {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  LabeledDataset d;
  d.features.resize(count, dim_);
  d.labels.resize(count);
  for (int i = 0; i < count; ++i) {
    Sample s = sample_one(rng);
    d.features.row(i) = s.x;
    d.labels[i] = s.y;
  }
  return d;
}

Eigen::MatrixXd GenerativeModel::sample_features(int count, RandomStream& rng) const {
  // Labels are drawn and discarded so that feature streams coincide with the
  // labeled ones draw-for-draw.
  LabeledDataset d = sample_labeled(count, rng);
  return std::move(d.features);
}

double gaussian_score_cdf(const GaussianMixtureParams& params, double alpha) {
  if (!(alpha >= 0.5 && alpha < 1.0))
    throw std::invalid_argument("gaussian_score_cdf: alpha must be in [1/2, 1)");
  if (!(params.delta > 0.0))
    throw std::invalid_argument("gaussian_score_cdf: needs separated classes (delta > 0)");
  if (alpha == 0.5) return 0.0;
  const double d = params.delta;
  const double log_u = std::log(alpha / (1.0 - alpha));
  return normal_cdf(0.5 * d + log_u / d) - normal_cdf(0.5 * d - log_u / d);
}

double gaussian_score_quantile(const GaussianMixtureParams& params, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("gaussian_score_quantile: epsilon must be in (0,1]");
  if (epsilon == 1.0) return 0.5;
  if (!(params.delta > 0.0))
    throw std::invalid_argument("gaussian_score_quantile: needs delta > 0");
  const double target = 1.0 - epsilon;
  double lo = 0.5, hi = 1.0 - 1e-15;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gaussian_score_cdf(params, mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double gaussian_oracle_risk(const GaussianMixtureParams& params, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("gaussian_oracle_risk: epsilon must be in (0,1]");
  const double d = params.delta;
  // z -> Phi(z) + Phi(z + delta) is strictly increasing from 0 to 2.
  double lo = -45.0, hi = 45.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = normal_cdf(mid) + normal_cdf(mid + d);
    if (v < epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return normal_cdf(0.5 * (lo + hi)) / epsilon;
}

Model3Oracle model3_oracle(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("model3_oracle: epsilon must be in (0,1]");
  if (epsilon >= 0.5) return {1.0, 0.3};
  return {0.5, 0.2};
}

}  // namespace confsets
