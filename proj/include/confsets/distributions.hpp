#ifndef CONFSETS_DISTRIBUTIONS_HPP
#define CONFSETS_DISTRIBUTIONS_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "confsets/data.hpp"
#include "confsets/random.hpp"

namespace confsets {

/// Two-component Gaussian location mixture with common covariance and
/// balanced class prior. The Mahalanobis separation delta is cached at
/// construction; construction fails unless sigma is symmetric positive
/// definite.
struct GaussianMixtureParams {
  Eigen::VectorXd mu0;
  Eigen::VectorXd mu1;
  Eigen::MatrixXd sigma;

  Eigen::MatrixXd chol_lower;       // L with sigma = L L^T
  Eigen::VectorXd sigma_inv_diff;   // sigma^{-1} (mu1 - mu0)
  double delta = 0.0;               // ||mu1 - mu0|| in the sigma^{-1} norm

  GaussianMixtureParams(Eigen::VectorXd mu0_in, Eigen::VectorXd mu1_in,
                        Eigen::MatrixXd sigma_in);

  /// mu0 = 0, mu1 = delta, sigma = 1 in one dimension; the closed forms
  /// depend on the separation only, so this pins the whole model.
  static GaussianMixtureParams canonical_1d(double delta);
};

class GenerativeModel {
 public:
  enum class Kind { Model1, Model2, Model3, GaussianMixture };

  static GenerativeModel model1();
  static GenerativeModel model2();
  static GenerativeModel model3();
  static GenerativeModel gaussian_mixture(GaussianMixtureParams params);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  std::string name() const;

  /// True regression function P(Y=1 | X=x).
  double eta_star(const Eigen::VectorXd& x) const;

  Sample sample_one(RandomStream& rng) const;
  std::vector<Sample> sample(int count, RandomStream& rng) const;
  LabeledDataset sample_labeled(int count, RandomStream& rng) const;
  Eigen::MatrixXd sample_features(int count, RandomStream& rng) const;

  /// Whether the CDF of the true score max(eta, 1-eta) is continuous.
  bool continuous_score_cdf() const { return kind_ != Kind::Model3; }

  const GaussianMixtureParams* gaussian_params() const {
    return gauss_ ? &*gauss_ : nullptr;
  }

 private:
  GenerativeModel(Kind kind, int dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  int dim_;
  std::optional<GaussianMixtureParams> gauss_;
};

/// CDF of the mixture score f*(X) evaluated at alpha in [1/2, 1).
/// Requires delta > 0; returns 0 at alpha = 1/2.
double gaussian_score_cdf(const GaussianMixtureParams& params, double alpha);

/// Generalized inverse of the score CDF at level 1 - epsilon; the rejection
/// threshold of the exact-level set. epsilon = 1 maps to 1/2.
double gaussian_score_quantile(const GaussianMixtureParams& params, double epsilon);

/// Closed-form conditional misclassification risk of the exact-level set,
/// computed by bisecting the strictly increasing map
/// z -> Phi(z) + Phi(z + delta) at epsilon and evaluating Phi at the root.
double gaussian_oracle_risk(const GaussianMixtureParams& params, double epsilon);

struct Model3Oracle {
  double classified_proportion;
  double risk;
};

/// Exact classified proportion and risk for the two-valued score of model 3.
/// The boundary epsilon = 0.5 belongs to the fully-classified regime.
Model3Oracle model3_oracle(double epsilon);

}  // namespace confsets

#endif
