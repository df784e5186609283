#include "confsets/confset.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace confsets {

PluginConfidenceSet::PluginConfidenceSet(ScoreModel model, EmpiricalCdf calibration,
                                         double epsilon)
    : model_(std::move(model)), calibration_(std::move(calibration)), epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("PluginConfidenceSet: epsilon must be in (0,1]");
}

PluginConfidenceSet PluginConfidenceSet::build(const ScoreModel& model,
                                               const Eigen::MatrixXd& unlabeled_features,
                                               double epsilon) {
  if (unlabeled_features.rows() < 1)
    throw std::invalid_argument("PluginConfidenceSet: empty calibration sample");
  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(unlabeled_features.rows()));
  for (Eigen::Index i = 0; i < unlabeled_features.rows(); ++i) {
    scores.push_back(model.score(unlabeled_features.row(i)));
  }
  return PluginConfidenceSet(model, EmpiricalCdf(std::move(scores)), epsilon);
}

ConfidenceOutput PluginConfidenceSet::predict(const Eigen::VectorXd& x) const {
  const double f = model_.score(x);
  if (!classifies_at(calibration_.evaluate(f), epsilon_)) return ConfidenceOutput::Reject;
  return label_output(model_.label(x));
}

OracleConfidenceSet OracleConfidenceSet::from_cdf(ScoreModel model,
                                                  std::function<double(double)> score_cdf,
                                                  double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("OracleConfidenceSet: epsilon must be in (0,1]");
  if (!score_cdf) throw std::invalid_argument("OracleConfidenceSet: missing score CDF");
  OracleConfidenceSet s;
  s.model_ = std::move(model);
  s.score_cdf_ = std::move(score_cdf);
  s.epsilon_ = epsilon;
  return s;
}

OracleConfidenceSet OracleConfidenceSet::from_threshold(ScoreModel model, double alpha,
                                                        double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("OracleConfidenceSet: epsilon must be in (0,1]");
  if (!(alpha >= 0.5 && alpha <= 1.0))
    throw std::invalid_argument("OracleConfidenceSet: alpha must be in [1/2,1]");
  OracleConfidenceSet s;
  s.model_ = std::move(model);
  s.alpha_ = alpha;
  s.epsilon_ = epsilon;
  return s;
}

double OracleConfidenceSet::threshold() const {
  if (!threshold_form())
    throw std::logic_error("OracleConfidenceSet: CDF form has no stored threshold");
  return alpha_;
}

ConfidenceOutput OracleConfidenceSet::predict(const Eigen::VectorXd& x) const {
  const double f = model_.score(x);
  const bool classify =
      score_cdf_ ? classifies_at(score_cdf_(f), epsilon_) : (f >= alpha_);
  if (!classify) return ConfidenceOutput::Reject;
  return label_output(model_.label(x));
}

ConfidenceOutput chow_classify(const RejectClassifier& classifier,
                               const Eigen::VectorXd& x) {
  if (!(classifier.alpha >= 0.5 && classifier.alpha <= 1.0))
    throw std::invalid_argument("chow_classify: alpha must be in [1/2,1]");
  if (classifier.model.score(x) < classifier.alpha) return ConfidenceOutput::Reject;
  return label_output(classifier.model.label(x));
}

double l_alpha_risk(const RejectClassifier& classifier, const LabeledDataset& test) {
  test.validate();
  std::int64_t errors = 0, rejected = 0;
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    const ConfidenceOutput out = chow_classify(classifier, test.features.row(i));
    if (out == ConfidenceOutput::Reject) {
      ++rejected;
      continue;
    }
    const int label = out == ConfidenceOutput::Label1 ? 1 : 0;
    if (label != test.labels[i]) ++errors;
  }
  const double k = static_cast<double>(test.size());
  return static_cast<double>(errors) / k +
         (1.0 - classifier.alpha) * static_cast<double>(rejected) / k;
}

ConfidenceSetFn calibrated_competitor(std::function<double(const Eigen::VectorXd&)> eta_alt,
                                      const GenerativeModel& model, double epsilon,
                                      std::int64_t calib_draws, RandomStream& rng) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("calibrated_competitor: epsilon must be in (0,1]");
  if (calib_draws < 1)
    throw std::invalid_argument("calibrated_competitor: calib_draws must be >= 1");

  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(calib_draws));
  for (std::int64_t i = 0; i < calib_draws; ++i) {
    const Sample s = model.sample_one(rng);
    const double e = eta_alt(s.x);
    scores.push_back(e >= 0.5 ? e : 1.0 - e);
  }
  EmpiricalCdf cdf(std::move(scores));
  const double tau = cdf.quantile(1.0 - epsilon);

  return [eta_alt = std::move(eta_alt), tau](const Eigen::VectorXd& x) {
    const double e = eta_alt(x);
    const double g = e >= 0.5 ? e : 1.0 - e;
    if (g < tau) return ConfidenceOutput::Reject;
    return label_output(e >= 0.5 ? 1 : 0);
  };
}

RiskDecomposition excess_risk_terms(const GenerativeModel& model, double epsilon,
                                    double alpha_eps, const ConfidenceSetFn& competitor,
                                    std::int64_t mc_draws, RandomStream& rng) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("excess_risk_terms: epsilon must be in (0,1]");
  if (mc_draws < 100) throw std::invalid_argument("excess_risk_terms: budget too small");

  RiskDecomposition out;

  // Risk difference on common labeled draws. Identical rules then agree
  // decision-for-decision and the difference is exactly zero.
  std::int64_t cls_o = 0, err_o = 0, cls_c = 0, err_c = 0;
  for (std::int64_t i = 0; i < mc_draws; ++i) {
    const Sample s = model.sample_one(rng);
    const double eta = model.eta_star(s.x);
    const double f = eta >= 0.5 ? eta : 1.0 - eta;
    const int bayes = eta >= 0.5 ? 1 : 0;
    if (f >= alpha_eps) {
      ++cls_o;
      if (bayes != s.y) ++err_o;
    }
    const ConfidenceOutput c = competitor(s.x);
    if (c != ConfidenceOutput::Reject) {
      ++cls_c;
      if ((c == ConfidenceOutput::Label1 ? 1 : 0) != s.y) ++err_c;
    }
  }
  if (cls_o == 0 || cls_c == 0)
    throw std::runtime_error("excess_risk_terms: no classified draws");
  const double risk_o = static_cast<double>(err_o) / static_cast<double>(cls_o);
  const double risk_c = static_cast<double>(err_c) / static_cast<double>(cls_c);
  out.lhs = risk_c - risk_o;
  out.lhs_se = std::sqrt(risk_o * (1.0 - risk_o) / static_cast<double>(cls_o) +
                         risk_c * (1.0 - risk_c) / static_cast<double>(cls_c));

  // Event expectations on an independent feature stream.
  double sum_c = 0.0, sum_a0b0 = 0.0, sum_a1b1 = 0.0;
  double sum_total = 0.0, sum_total_sq = 0.0;
  std::int64_t competitor_classified = 0;
  for (std::int64_t i = 0; i < mc_draws; ++i) {
    const Sample s = model.sample_one(rng);
    const double eta = model.eta_star(s.x);
    const double f = eta >= 0.5 ? eta : 1.0 - eta;
    const int bayes = eta >= 0.5 ? 1 : 0;
    const bool oracle_cls = f >= alpha_eps;
    const ConfidenceOutput c = competitor(s.x);
    const bool comp_cls = c != ConfidenceOutput::Reject;
    if (comp_cls) ++competitor_classified;
    const int comp_label = c == ConfidenceOutput::Label1 ? 1 : 0;

    double draw = 0.0;
    if (oracle_cls && comp_cls && bayes != comp_label) {
      const double g = std::fabs(2.0 * eta - 1.0);
      sum_c += g;
      draw += g;
    }
    // A_y: oracle classifies, competitor rejects, Bayes label differs from y.
    // B_y: oracle rejects, competitor classifies with label != y.
    const bool a0 = oracle_cls && !comp_cls && bayes != 0;
    const bool b0 = !oracle_cls && comp_cls && comp_label != 0;
    const bool a1 = oracle_cls && !comp_cls && bayes != 1;
    const bool b1 = !oracle_cls && comp_cls && comp_label != 1;
    if (a0 || b0) {
      const double g = std::fabs(eta - alpha_eps);
      sum_a0b0 += g;
      draw += g;
    }
    if (a1 || b1) {
      const double g = std::fabs(1.0 - eta - alpha_eps);
      sum_a1b1 += g;
      draw += g;
    }
    sum_total += draw;
    sum_total_sq += draw * draw;
  }

  const double m = static_cast<double>(mc_draws);
  out.competitor_prop = static_cast<double>(competitor_classified) / m;
  out.c_term = sum_c / m / epsilon;
  out.a0b0_term = sum_a0b0 / m / epsilon;
  out.a1b1_term = sum_a1b1 / m / epsilon;
  const double mean_total = sum_total / m;
  const double var_total = std::max(0.0, sum_total_sq / m - mean_total * mean_total);
  out.rhs_se = std::sqrt(var_total / m) / epsilon;

  // Decomposition hypothesis: the competitor classifies with probability
  // epsilon. The tolerance doubles the binomial error to absorb the
  // competitor's own calibration noise.
  const double prop_se = std::sqrt(epsilon * (1.0 - epsilon) / m);
  if (std::fabs(out.competitor_prop - epsilon) > 3.0 * (2.0 * prop_se) + 1e-12)
    throw std::runtime_error("excess_risk_terms: competitor classification probability is off epsilon");

  return out;
}

Prop5Bound prop5_bound_check(const GenerativeModel& model, const ScoreModel& eta_hat,
                             double epsilon, std::int64_t mc_draws,
                             std::int64_t calib_draws, RandomStream& rng) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("prop5_bound_check: epsilon must be in (0,1]");
  const GaussianMixtureParams* params = model.gaussian_params();
  if (params == nullptr)
    throw std::invalid_argument("prop5_bound_check: needs the Gaussian mixture (closed-form score CDF)");
  if (!eta_hat.continuous_scores() || !model.continuous_score_cdf())
    throw std::invalid_argument("prop5_bound_check: both score distributions must be continuous");
  if (mc_draws < 100 || calib_draws < 100)
    throw std::invalid_argument("prop5_bound_check: budget too small");

  const ScoreModel oracle = oracle_score_model(model);
  Prop5Bound out;
  out.alpha_eps = gaussian_score_quantile(*params, epsilon);

  // One calibration sample provides both empirical thresholds and the paired
  // CDF-gap estimate; identical estimated and true scores then cancel
  // exactly everywhere.
  std::vector<double> f_hat, f_star;
  f_hat.reserve(static_cast<std::size_t>(calib_draws));
  f_star.reserve(static_cast<std::size_t>(calib_draws));
  std::int64_t gap_hat = 0, gap_star = 0, gap_agree = 0;
  for (std::int64_t i = 0; i < calib_draws; ++i) {
    const Sample s = model.sample_one(rng);
    const double fh = eta_hat.score(s.x);
    const double fs = oracle.score(s.x);
    f_hat.push_back(fh);
    f_star.push_back(fs);
    const bool ih = fh <= out.alpha_eps;
    const bool is = fs <= out.alpha_eps;
    if (ih) ++gap_hat;
    if (is) ++gap_star;
    if (ih == is) ++gap_agree;
  }
  const double alpha_hat = EmpiricalCdf(std::move(f_hat)).quantile(1.0 - epsilon);
  const double alpha_ref = EmpiricalCdf(std::move(f_star)).quantile(1.0 - epsilon);
  const double mc = static_cast<double>(calib_draws);
  const double gap = std::fabs(static_cast<double>(gap_hat) - static_cast<double>(gap_star)) / mc;
  out.cdf_gap_term = out.alpha_eps * gap / epsilon;
  // Variance of the paired indicator difference.
  const double disagree = 1.0 - static_cast<double>(gap_agree) / mc;
  const double gap_se = std::sqrt(std::max(0.0, disagree - gap * gap) / mc);

  // Risk difference and margin expectations on common labeled draws.
  std::int64_t cls_t = 0, err_t = 0, cls_o = 0, err_o = 0;
  double sum_m0 = 0.0, sum_m1 = 0.0, sum_both = 0.0, sum_both_sq = 0.0;
  for (std::int64_t i = 0; i < mc_draws; ++i) {
    const Sample s = model.sample_one(rng);
    const double eta = model.eta_star(s.x);
    const double eh = eta_hat.eta(s.x);

    const double fh = eh >= 0.5 ? eh : 1.0 - eh;
    if (fh >= alpha_hat) {
      ++cls_t;
      if ((eh >= 0.5 ? 1 : 0) != s.y) ++err_t;
    }
    const double fs = eta >= 0.5 ? eta : 1.0 - eta;
    if (fs >= alpha_ref) {
      ++cls_o;
      if ((eta >= 0.5 ? 1 : 0) != s.y) ++err_o;
    }

    const double dev = std::fabs(eh - eta);
    double draw = 0.0;
    const double d0 = std::fabs(eta - out.alpha_eps);
    if (dev >= d0) {
      sum_m0 += d0;
      draw += d0;
    }
    const double d1 = std::fabs(1.0 - eta - out.alpha_eps);
    if (dev >= d1) {
      sum_m1 += d1;
      draw += d1;
    }
    sum_both += draw;
    sum_both_sq += draw * draw;
  }
  if (cls_t == 0 || cls_o == 0)
    throw std::runtime_error("prop5_bound_check: no classified draws");

  const double m = static_cast<double>(mc_draws);
  const double risk_t = static_cast<double>(err_t) / static_cast<double>(cls_t);
  const double risk_o = static_cast<double>(err_o) / static_cast<double>(cls_o);
  out.lhs = risk_t - risk_o;
  out.lhs_se = std::sqrt(risk_t * (1.0 - risk_t) / static_cast<double>(cls_t) +
                         risk_o * (1.0 - risk_o) / static_cast<double>(cls_o));

  out.margin_term0 = sum_m0 / m / epsilon;
  out.margin_term1 = sum_m1 / m / epsilon;
  const double mean_both = sum_both / m;
  const double var_both = std::max(0.0, sum_both_sq / m - mean_both * mean_both);
  const double margins_se = std::sqrt(var_both / m) / epsilon;

  out.rhs = out.margin_term0 + out.margin_term1 + out.cdf_gap_term;
  const double gap_term_se = out.alpha_eps * gap_se / epsilon;
  out.rhs_se = std::sqrt(margins_se * margins_se + gap_term_se * gap_term_se);
  return out;
}

}  // namespace confsets
