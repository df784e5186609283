#ifndef CONFSETS_HARNESS_HPP
#define CONFSETS_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "confsets/confset.hpp"
#include "confsets/distributions.hpp"
#include "confsets/estimators.hpp"

namespace confsets {

enum class EstimatorKind { Oracle, Logistic, Kernel, Cart, RForest };

std::string estimator_name(EstimatorKind kind);
EstimatorKind parse_estimator(const std::string& name);

struct ExperimentSpec {
  GenerativeModel model = GenerativeModel::model1();
  EstimatorKind estimator = EstimatorKind::Oracle;
  int n = 1;  // labeled training size (unused by the oracle)
  int N = 1;  // unlabeled calibration size
  int K = 1;  // labeled test size
  std::vector<double> epsilons;
  int reps = 1;
  std::uint64_t master_seed = 0;
  int workers = 1;

  void validate() const;
};

struct RepetitionRecord {
  bool fit_ok = true;
  std::vector<EvaluationResult> per_epsilon;
};

struct EpsilonSummary {
  double epsilon = 0.0;
  double mean_risk = 0.0;
  double sd_risk = 0.0;
  double mean_prop = 0.0;
  double sd_prop = 0.0;
  int undefined_risk_count = 0;
  int defined_count = 0;
  bool all_risk_undefined = false;
  bool single_sample = false;  // sd over one repetition is reported as 0
};

struct ExperimentReport {
  std::string model_name;
  std::string estimator;
  int n = 0, N = 0, K = 0, reps = 0;
  std::uint64_t master_seed = 0;
  std::vector<double> epsilons;
  std::vector<EpsilonSummary> summaries;
  std::vector<RepetitionRecord> records;
  int fit_failures = 0;
};

/// Unbiased mean/sd per epsilon; undefined risks (no classified points) are
/// excluded from the risk moments and counted.
std::vector<EpsilonSummary> aggregate(const std::vector<RepetitionRecord>& records,
                                      const std::vector<double>& epsilons);

/// Repetitions draw calibration features, compute the empirical CDF of the
/// true score, then evaluate on a fresh labeled sample at every epsilon.
ExperimentReport run_oracle_experiment(const ExperimentSpec& spec);

/// Repetitions draw a labeled training sample, fit the estimator, calibrate
/// on fresh unlabeled features, then evaluate on a fresh labeled sample;
/// one fitted model and one calibration serve every epsilon.
ExperimentReport run_plugin_experiment(const ExperimentSpec& spec);

/// Dispatches on spec.estimator.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// One report per training size, all runs deriving streams from the same
/// master seed so calibration and test draws are shared across sizes.
std::vector<ExperimentReport> convergence_sweep(const ExperimentSpec& base,
                                                const std::vector<int>& n_values);

}  // namespace confsets

#endif
