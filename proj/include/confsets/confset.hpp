#ifndef CONFSETS_CONFSET_HPP
#define CONFSETS_CONFSET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "confsets/cdf.hpp"
#include "confsets/data.hpp"
#include "confsets/distributions.hpp"
#include "confsets/estimators.hpp"
#include "confsets/random.hpp"

namespace confsets {

/// Reject stands for the two-element set {0,1}; the empty set is never
/// produced.
enum class ConfidenceOutput { Label0, Label1, Reject };

inline ConfidenceOutput label_output(int label) {
  return label == 1 ? ConfidenceOutput::Label1 : ConfidenceOutput::Label0;
}

/// Classification rule shared by the calibrated sets: classify exactly when
/// the score's CDF value reaches 1 - epsilon (weak inequality, so ties on
/// the calibration grid classify).
inline bool classifies_at(double cdf_value, double epsilon) {
  return cdf_value >= 1.0 - epsilon;
}

/// Set calibrated on the empirical CDF of the fitted score over an unlabeled
/// sample.
class PluginConfidenceSet {
 public:
  PluginConfidenceSet(ScoreModel model, EmpiricalCdf calibration, double epsilon);

  /// Evaluates the fitted score on every unlabeled row and calibrates on the
  /// resulting empirical CDF.
  static PluginConfidenceSet build(const ScoreModel& model,
                                   const Eigen::MatrixXd& unlabeled_features,
                                   double epsilon);

  ConfidenceOutput predict(const Eigen::VectorXd& x) const;

  const ScoreModel& model() const { return model_; }
  const EmpiricalCdf& calibration() const { return calibration_; }
  double epsilon() const { return epsilon_; }

 private:
  ScoreModel model_;
  EmpiricalCdf calibration_;
  double epsilon_;
};

/// Exact-level set built from the true regression function, in either the
/// CDF-test form or the equivalent threshold form.
class OracleConfidenceSet {
 public:
  static OracleConfidenceSet from_cdf(ScoreModel model,
                                      std::function<double(double)> score_cdf,
                                      double epsilon);
  static OracleConfidenceSet from_threshold(ScoreModel model, double alpha,
                                            double epsilon);

  ConfidenceOutput predict(const Eigen::VectorXd& x) const;

  double epsilon() const { return epsilon_; }
  bool threshold_form() const { return !score_cdf_; }
  double threshold() const;  // only meaningful in threshold form
  const ScoreModel& model() const { return model_; }

 private:
  OracleConfidenceSet() = default;
  ScoreModel model_;
  std::function<double(double)> score_cdf_;  // empty in threshold form
  double alpha_ = 0.5;
  double epsilon_ = 1.0;
};

/// Fixed-threshold abstaining classifier: emit the model label when the
/// score reaches alpha, otherwise reject.
struct RejectClassifier {
  ScoreModel model;
  double alpha = 0.5;  // in [1/2, 1]
};

ConfidenceOutput chow_classify(const RejectClassifier& classifier,
                               const Eigen::VectorXd& x);

struct EvaluationResult {
  std::int64_t total = 0;
  std::int64_t n_classified = 0;
  std::int64_t n_errors = 0;

  double prop() const {
    return total > 0 ? static_cast<double>(n_classified) / static_cast<double>(total) : 0.0;
  }
  bool risk_defined() const { return n_classified > 0; }
  /// Misclassification rate among classified points; only meaningful when
  /// risk_defined().
  double risk() const {
    return risk_defined() ? static_cast<double>(n_errors) / static_cast<double>(n_classified)
                          : 0.0;
  }
};

template <typename SetT>
EvaluationResult evaluate_set(const SetT& set, const LabeledDataset& test) {
  test.validate();
  EvaluationResult r;
  r.total = test.size();
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    const ConfidenceOutput out = set.predict(test.features.row(i));
    if (out == ConfidenceOutput::Reject) continue;
    ++r.n_classified;
    const int label = out == ConfidenceOutput::Label1 ? 1 : 0;
    if (label != test.labels[i]) ++r.n_errors;
  }
  return r;
}

/// Empirical cost-weighted risk: misclassified-and-classified fraction plus
/// (1 - alpha) times the rejected fraction.
double l_alpha_risk(const RejectClassifier& classifier, const LabeledDataset& test);

using ConfidenceSetFn = std::function<ConfidenceOutput(const Eigen::VectorXd&)>;

/// Threshold rule on an alternative regression function, calibrated at the
/// empirical (1 - epsilon)-quantile of its own score so its classification
/// probability is epsilon.
ConfidenceSetFn calibrated_competitor(std::function<double(const Eigen::VectorXd&)> eta_alt,
                                      const GenerativeModel& model, double epsilon,
                                      std::int64_t calib_draws, RandomStream& rng);

/// Monte Carlo estimate of the excess-risk identity for a competitor whose
/// classification probability is epsilon: risk difference on the left, three
/// event expectations (each scaled by 1/epsilon) on the right. The risk
/// difference is evaluated with common draws so a competitor identical to
/// the exact set yields zero exactly.
struct RiskDecomposition {
  double lhs = 0.0;
  double lhs_se = 0.0;
  double c_term = 0.0;
  double a0b0_term = 0.0;
  double a1b1_term = 0.0;
  double rhs_se = 0.0;
  double competitor_prop = 0.0;

  double rhs() const { return c_term + a0b0_term + a1b1_term; }
};

RiskDecomposition excess_risk_terms(const GenerativeModel& model, double epsilon,
                                    double alpha_eps, const ConfidenceSetFn& competitor,
                                    std::int64_t mc_draws, RandomStream& rng);

/// Monte Carlo check of the oracle/plug-in risk bound. Thresholds for both
/// sides of the risk difference come from paired empirical quantiles on one
/// calibration sample, so a perfect estimate collapses everything to zero
/// exactly. Requires the Gaussian mixture (closed-form score CDF) and a
/// continuous estimated score.
struct Prop5Bound {
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs = 0.0;
  double rhs_se = 0.0;
  double margin_term0 = 0.0;  // around alpha for eta*
  double margin_term1 = 0.0;  // around alpha for 1 - eta*
  double cdf_gap_term = 0.0;
  double alpha_eps = 0.5;
};

Prop5Bound prop5_bound_check(const GenerativeModel& model, const ScoreModel& eta_hat,
                             double epsilon, std::int64_t mc_draws,
                             std::int64_t calib_draws, RandomStream& rng);

}  // namespace confsets

#endif
