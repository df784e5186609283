#ifndef CONFSETS_ESTIMATORS_HPP
#define CONFSETS_ESTIMATORS_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "confsets/data.hpp"
#include "confsets/distributions.hpp"
#include "confsets/random.hpp"

namespace confsets {

/// A fitted (or oracle) regression function together with the derived score
/// and label rules. Immutable and cheap to copy; safe to share across
/// threads.
class ScoreModel {
 public:
  ScoreModel() = default;
  ScoreModel(std::string kind, int dim, bool continuous_scores,
             std::function<double(const Eigen::VectorXd&)> eta,
             bool converged = true)
      : kind_(std::move(kind)),
        dim_(dim),
        continuous_scores_(continuous_scores),
        converged_(converged),
        eta_(std::move(eta)) {}

  /// Estimated P(Y=1 | X=x), in [0,1].
  double eta(const Eigen::VectorXd& x) const {
    if (dim_ >= 0 && x.size() != dim_)
      throw std::invalid_argument("ScoreModel: feature dimension mismatch");
    return eta_(x);
  }

  /// Score f(x) = max(eta, 1-eta) in [1/2, 1].
  double score(const Eigen::VectorXd& x) const {
    const double e = eta(x);
    return e >= 0.5 ? e : 1.0 - e;
  }

  /// Hard label 1{eta >= 1/2}; the boundary classifies as 1.
  int label(const Eigen::VectorXd& x) const { return eta(x) >= 0.5 ? 1 : 0; }

  const std::string& kind() const { return kind_; }
  int dim() const { return dim_; }
  bool continuous_scores() const { return continuous_scores_; }
  bool converged() const { return converged_; }

 private:
  std::string kind_;
  int dim_ = -1;
  bool continuous_scores_ = true;
  bool converged_ = true;
  std::function<double(const Eigen::VectorXd&)> eta_;
};

struct LogisticConfig {
  int max_iters = 100;
  double tolerance = 1e-8;
  double ridge = 1e-6;
};

struct LogisticDiagnostics {
  bool converged = false;
  int iterations = 0;
  std::vector<double> loss_history;  // penalized loss after each accepted step
};

/// Ridge-penalized logistic regression by damped Newton steps with a
/// gradient-descent fallback. The penalty covers the intercept, which keeps
/// the optimum finite on separable or single-class data.
ScoreModel fit_logistic(const LabeledDataset& data, const LogisticConfig& config = {},
                        LogisticDiagnostics* diagnostics = nullptr);

/// Gaussian-kernel weighted label average with window h. Training points are
/// stored in a canonical sort order and summed with compensation so that
/// predictions do not depend on the input row order, bit for bit.
ScoreModel fit_kernel(const LabeledDataset& data, double bandwidth = 1.0);

struct CartConfig {
  int max_depth = 3;
  int min_leaf = 7;
  int min_split = 20;
  // A split must reduce weighted Gini impurity by at least this fraction of
  // the root impurity (rpart-style complexity pre-stopping).
  double complexity = 0.01;
};

/// Greedy axis-aligned Gini tree; leaf values are label frequencies clipped
/// away from exact 0, 1/2 ties cannot arise from the clipping itself.
ScoreModel fit_cart(const LabeledDataset& data, const CartConfig& config = {});

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 10;
  int min_leaf = 5;
  int min_split = 2;
  double complexity = 0.0;
  // Fraction of features tried per split; <= 0 means ceil(sqrt(d)) features.
  double feature_fraction = 0.0;
  bool bootstrap = true;
};

/// Bagged Gini trees with per-split feature subsampling. Fully deterministic
/// given the stream; per-tree streams are derived from consecutive draws.
ScoreModel fit_forest(const LabeledDataset& data, const ForestConfig& config,
                      RandomStream& rng);

/// Wraps the true regression function of a generative model.
ScoreModel oracle_score_model(const GenerativeModel& model);

}  // namespace confsets

#endif
