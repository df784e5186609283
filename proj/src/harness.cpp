#include "confsets/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "confsets/cdf.hpp"

namespace confsets {

namespace {

// Stage tags for per-repetition stream derivation; streams are never shared
// across stages or repetitions.
enum Stage : std::uint64_t { kTrain = 0, kCalibrate = 1, kTest = 2 };

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

ScoreModel fit_estimator(EstimatorKind kind, const LabeledDataset& train,
                         RandomStream& rng) {
  switch (kind) {
    case EstimatorKind::Logistic: return fit_logistic(train);
    case EstimatorKind::Kernel: return fit_kernel(train);
    case EstimatorKind::Cart: return fit_cart(train);
    case EstimatorKind::RForest: return fit_forest(train, ForestConfig{}, rng);
    case EstimatorKind::Oracle: break;
  }
  throw std::logic_error("fit_estimator: oracle has no fit step");
}

// Shared evaluation path: score the calibration features, score the test
// sample once, then sweep epsilon over the cached CDF values.
RepetitionRecord evaluate_sweep(const ScoreModel& score_model,
                                const Eigen::MatrixXd& calib_features,
                                const LabeledDataset& test,
                                const std::vector<double>& epsilons) {
  std::vector<double> calib_scores;
  calib_scores.reserve(static_cast<std::size_t>(calib_features.rows()));
  for (Eigen::Index i = 0; i < calib_features.rows(); ++i)
    calib_scores.push_back(score_model.score(calib_features.row(i)));
  const EmpiricalCdf cdf(std::move(calib_scores));

  const Eigen::Index k = test.size();
  std::vector<double> cdf_value(static_cast<std::size_t>(k));
  std::vector<char> wrong(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::VectorXd x = test.features.row(i);
    cdf_value[static_cast<std::size_t>(i)] = cdf.evaluate(score_model.score(x));
    wrong[static_cast<std::size_t>(i)] =
        static_cast<char>(score_model.label(x) != test.labels[i]);
  }

  RepetitionRecord rec;
  rec.per_epsilon.reserve(epsilons.size());
  for (double eps : epsilons) {
    EvaluationResult r;
    r.total = k;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (!classifies_at(cdf_value[static_cast<std::size_t>(i)], eps)) continue;
      ++r.n_classified;
      r.n_errors += wrong[static_cast<std::size_t>(i)];
    }
    rec.per_epsilon.push_back(r);
  }
  return rec;
}

ExperimentReport assemble(const ExperimentSpec& spec,
                          std::vector<RepetitionRecord> records) {
  ExperimentReport report;
  report.model_name = spec.model.name();
  report.estimator = estimator_name(spec.estimator);
  report.n = spec.n;
  report.N = spec.N;
  report.K = spec.K;
  report.reps = spec.reps;
  report.master_seed = spec.master_seed;
  report.epsilons = spec.epsilons;
  report.fit_failures = 0;
  for (const auto& r : records)
    if (!r.fit_ok) ++report.fit_failures;
  std::vector<RepetitionRecord> ok;
  ok.reserve(records.size());
  for (auto& r : records)
    if (r.fit_ok) ok.push_back(std::move(r));
  report.summaries = aggregate(ok, spec.epsilons);
  report.records = std::move(ok);
  return report;
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Oracle: return "oracle";
    case EstimatorKind::Logistic: return "logistic";
    case EstimatorKind::Kernel: return "kernel";
    case EstimatorKind::Cart: return "cart";
    case EstimatorKind::RForest: return "rforest";
  }
  return "unknown";
}

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "oracle") return EstimatorKind::Oracle;
  if (name == "logistic") return EstimatorKind::Logistic;
  if (name == "kernel") return EstimatorKind::Kernel;
  if (name == "cart") return EstimatorKind::Cart;
  if (name == "rforest") return EstimatorKind::RForest;
  throw std::invalid_argument("unknown estimator: " + name);
}

void ExperimentSpec::validate() const {
  if (reps < 1) throw std::invalid_argument("ExperimentSpec: reps must be >= 1");
  if (n < 1 || N < 1 || K < 1)
    throw std::invalid_argument("ExperimentSpec: sample sizes must be >= 1");
  if (epsilons.empty()) throw std::invalid_argument("ExperimentSpec: no epsilon values");
  double prev = 0.0;
  for (double e : epsilons) {
    if (!(e > 0.0 && e <= 1.0))
      throw std::invalid_argument("ExperimentSpec: epsilon values must be in (0,1]");
    if (e < prev) throw std::invalid_argument("ExperimentSpec: epsilons must be sorted");
    prev = e;
  }
  if (workers < 1) throw std::invalid_argument("ExperimentSpec: workers must be >= 1");
}

std::vector<EpsilonSummary> aggregate(const std::vector<RepetitionRecord>& records,
                                      const std::vector<double>& epsilons) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  std::vector<EpsilonSummary> out;
  out.reserve(epsilons.size());
  for (std::size_t j = 0; j < epsilons.size(); ++j) {
    EpsilonSummary s;
    s.epsilon = epsilons[j];
    double risk_sum = 0.0, prop_sum = 0.0;
    for (const auto& rec : records) {
      const EvaluationResult& r = rec.per_epsilon.at(j);
      prop_sum += r.prop();
      if (r.risk_defined()) {
        risk_sum += r.risk();
        ++s.defined_count;
      } else {
        ++s.undefined_risk_count;
      }
    }
    const double b = static_cast<double>(records.size());
    s.mean_prop = prop_sum / b;
    s.all_risk_undefined = s.defined_count == 0;
    s.mean_risk = s.all_risk_undefined ? 0.0 : risk_sum / s.defined_count;
    s.single_sample = records.size() == 1;

    double var_prop = 0.0, var_risk = 0.0;
    for (const auto& rec : records) {
      const EvaluationResult& r = rec.per_epsilon.at(j);
      const double dp = r.prop() - s.mean_prop;
      var_prop += dp * dp;
      if (r.risk_defined()) {
        const double dr = r.risk() - s.mean_risk;
        var_risk += dr * dr;
      }
    }
    s.sd_prop = records.size() > 1 ? std::sqrt(var_prop / (b - 1.0)) : 0.0;
    s.sd_risk = s.defined_count > 1
                    ? std::sqrt(var_risk / static_cast<double>(s.defined_count - 1))
                    : 0.0;
    out.push_back(s);
  }
  return out;
}

ExperimentReport run_oracle_experiment(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.estimator != EstimatorKind::Oracle)
    throw std::invalid_argument("run_oracle_experiment: estimator must be oracle");

  const ScoreModel oracle = oracle_score_model(spec.model);
  std::vector<RepetitionRecord> records(static_cast<std::size_t>(spec.reps));
  parallel_for(spec.reps, spec.workers, [&](int rep) {
    RandomStream calib_rng =
        RandomStream::derive(spec.master_seed, static_cast<std::uint64_t>(rep), kCalibrate);
    RandomStream test_rng =
        RandomStream::derive(spec.master_seed, static_cast<std::uint64_t>(rep), kTest);
    const Eigen::MatrixXd calib = spec.model.sample_features(spec.N, calib_rng);
    const LabeledDataset test = spec.model.sample_labeled(spec.K, test_rng);
    records[static_cast<std::size_t>(rep)] =
        evaluate_sweep(oracle, calib, test, spec.epsilons);
  });
  return assemble(spec, std::move(records));
}

ExperimentReport run_plugin_experiment(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.estimator == EstimatorKind::Oracle)
    throw std::invalid_argument("run_plugin_experiment: estimator must not be oracle");

  std::vector<RepetitionRecord> records(static_cast<std::size_t>(spec.reps));
  parallel_for(spec.reps, spec.workers, [&](int rep) {
    RandomStream train_rng =
        RandomStream::derive(spec.master_seed, static_cast<std::uint64_t>(rep), kTrain);
    RandomStream calib_rng =
        RandomStream::derive(spec.master_seed, static_cast<std::uint64_t>(rep), kCalibrate);
    RandomStream test_rng =
        RandomStream::derive(spec.master_seed, static_cast<std::uint64_t>(rep), kTest);
    RepetitionRecord& rec = records[static_cast<std::size_t>(rep)];
    try {
      const LabeledDataset train = spec.model.sample_labeled(spec.n, train_rng);
      // The training stream continues into any estimator-internal randomness.
      const ScoreModel fitted = fit_estimator(spec.estimator, train, train_rng);
      const Eigen::MatrixXd calib = spec.model.sample_features(spec.N, calib_rng);
      const LabeledDataset test = spec.model.sample_labeled(spec.K, test_rng);
      rec = evaluate_sweep(fitted, calib, test, spec.epsilons);
    } catch (const std::exception&) {
      rec.fit_ok = false;
    }
  });
  return assemble(spec, std::move(records));
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  return spec.estimator == EstimatorKind::Oracle ? run_oracle_experiment(spec)
                                                 : run_plugin_experiment(spec);
}

std::vector<ExperimentReport> convergence_sweep(const ExperimentSpec& base,
                                                const std::vector<int>& n_values) {
  if (n_values.empty()) throw std::invalid_argument("convergence_sweep: no sizes");
  for (std::size_t i = 1; i < n_values.size(); ++i) {
    if (n_values[i] <= n_values[i - 1])
      throw std::invalid_argument("convergence_sweep: sizes must be increasing");
  }
  std::vector<ExperimentReport> out;
  out.reserve(n_values.size());
  for (int n : n_values) {
    ExperimentSpec spec = base;
    spec.n = n;
    out.push_back(run_experiment(spec));
  }
  return out;
}

}  // namespace confsets
