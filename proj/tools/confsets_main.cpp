// Command-line front end: seeded simulation runs to CSV/JSON, closed-form
// Gaussian queries, and Monte Carlo verification suites.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "confsets/confset.hpp"
#include "confsets/harness.hpp"
#include "confsets/normal.hpp"
#include "confsets/report_io.hpp"

namespace {

using namespace confsets;

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw CLI::ValidationError("empty numeric list: " + text);
  return out;
}

GenerativeModel make_model(const std::string& name, double delta,
                           const std::string& mu0, const std::string& mu1,
                           const std::string& sigma) {
  if (name == "1") return GenerativeModel::model1();
  if (name == "2") return GenerativeModel::model2();
  if (name == "3") return GenerativeModel::model3();
  if (name != "gauss") throw CLI::ValidationError("unknown model: " + name);
  if (mu0.empty() && mu1.empty() && sigma.empty())
    return GenerativeModel::gaussian_mixture(GaussianMixtureParams::canonical_1d(delta));
  if (mu0.empty() || mu1.empty() || sigma.empty())
    throw CLI::ValidationError("gauss needs either --delta or all of --mu0/--mu1/--sigma");
  const std::vector<double> m0 = parse_double_list(mu0);
  const std::vector<double> m1 = parse_double_list(mu1);
  const std::vector<double> sg = parse_double_list(sigma);
  const auto d = static_cast<Eigen::Index>(m0.size());
  if (static_cast<Eigen::Index>(m1.size()) != d ||
      static_cast<Eigen::Index>(sg.size()) != d * d)
    throw CLI::ValidationError("--mu0/--mu1 need d entries and --sigma d*d (row-major)");
  Eigen::VectorXd v0(d), v1(d);
  Eigen::MatrixXd s(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    v0[i] = m0[static_cast<std::size_t>(i)];
    v1[i] = m1[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j)
      s(i, j) = sg[static_cast<std::size_t>(i * d + j)];
  }
  return GenerativeModel::gaussian_mixture(GaussianMixtureParams(v0, v1, s));
}

int cmd_simulate(const std::string& model_name, double delta, const std::string& mu0,
                 const std::string& mu1, const std::string& sigma,
                 const std::string& estimator, int n, int N, int K, int reps,
                 const std::string& epsilons, std::uint64_t seed,
                 const std::string& out, const std::string& format, int workers) {
  ExperimentSpec spec;
  spec.model = make_model(model_name, delta, mu0, mu1, sigma);
  spec.estimator = parse_estimator(estimator);
  spec.n = n;
  spec.N = N;
  spec.K = K;
  spec.reps = reps;
  spec.epsilons = parse_double_list(epsilons);
  std::sort(spec.epsilons.begin(), spec.epsilons.end());
  spec.master_seed = seed;
  spec.workers = workers;
  spec.validate();

  const ExperimentReport report = run_experiment(spec);
  std::string payload;
  if (format == "csv") {
    payload = report_to_csv(report);
  } else if (format == "json") {
    payload = report_to_json(report).dump(2);
    payload += '\n';
  } else {
    throw CLI::ValidationError("unknown format: " + format);
  }
  if (out == "-") {
    std::cout << payload;
  } else {
    write_text_file(out, payload);
  }
  return 0;
}

int cmd_gauss(double delta, double epsilon, double cdf_at, bool has_cdf_at) {
  const auto params = GaussianMixtureParams::canonical_1d(delta);
  std::printf("%.12g\n", gaussian_oracle_risk(params, epsilon));
  if (has_cdf_at) std::printf("%.12g\n", gaussian_score_cdf(params, cdf_at));
  return 0;
}

int suite_prop3(double delta) {
  const auto params = GaussianMixtureParams::canonical_1d(delta);
  bool ok = true;
  double prev = -1.0;
  std::printf("closed-form risk over epsilon = 0.01..1.00, delta = %g\n", delta);
  for (int k = 1; k <= 100; ++k) {
    const double eps = k / 100.0;
    const double risk = gaussian_oracle_risk(params, eps);
    ok = ok && risk >= prev - 1e-12;
    prev = risk;
    std::printf("%.6f%c", risk, k % 10 == 0 ? '\n' : ' ');
  }
  std::printf("monotone non-decreasing: %s\n", ok ? "yes" : "NO");
  return ok ? 0 : 1;
}

int suite_prop2(double delta, std::int64_t budget, std::uint64_t seed) {
  const GenerativeModel model =
      GenerativeModel::gaussian_mixture(GaussianMixtureParams::canonical_1d(delta));
  const auto* params = model.gaussian_params();

  struct Perturbation {
    const char* name;
    std::function<double(const Eigen::VectorXd&)> eta;
  };
  const std::vector<Perturbation> perturbations = {
      {"prob-shift +0.05",
       [model](const Eigen::VectorXd& x) {
         return std::min(std::max(model.eta_star(x) + 0.05, 0.0), 1.0);
       }},
      {"logit-shift -0.4",
       [model](const Eigen::VectorXd& x) {
         const double e = model.eta_star(x);
         return sigmoid(std::log(e / (1.0 - e)) - 0.4);
       }},
      {"prob-shift -0.08",
       [model](const Eigen::VectorXd& x) {
         return std::min(std::max(model.eta_star(x) - 0.08, 0.0), 1.0);
       }},
  };

  bool ok = true;
  int stream_id = 0;
  for (double eps : {0.3, 0.5, 0.8}) {
    const double alpha = gaussian_score_quantile(*params, eps);
    for (const auto& p : perturbations) {
      RandomStream calib_rng = RandomStream::derive(seed, ++stream_id, 10);
      const ConfidenceSetFn competitor =
          calibrated_competitor(p.eta, model, eps, budget, calib_rng);
      RandomStream rng = RandomStream::derive(seed, stream_id, 11);
      const RiskDecomposition d =
          excess_risk_terms(model, eps, alpha, competitor, budget, rng);
      const double se = std::sqrt(d.lhs_se * d.lhs_se + d.rhs_se * d.rhs_se);
      const bool dominance = d.lhs >= -3.0 * d.lhs_se;
      const bool identity = std::fabs(d.lhs - d.rhs()) <= 3.0 * se;
      ok = ok && dominance && identity;
      std::printf(
          "eps=%.1f %-18s lhs=%.5f rhs=%.5f (C=%.5f A0B0=%.5f A1B1=%.5f) "
          "|lhs-rhs|=%.5f tol=%.5f %s\n",
          eps, p.name, d.lhs, d.rhs(), d.c_term, d.a0b0_term, d.a1b1_term,
          std::fabs(d.lhs - d.rhs()), 3.0 * se,
          dominance && identity ? "ok" : "VIOLATED");
    }
  }
  return ok ? 0 : 1;
}

int suite_prop5(double delta, std::int64_t budget, std::uint64_t seed) {
  const GenerativeModel model =
      GenerativeModel::gaussian_mixture(GaussianMixtureParams::canonical_1d(delta));
  bool ok = true;
  int stream_id = 0;
  for (double shift : {0.2, 0.5}) {
    const ScoreModel perturbed(
        "perturbed", model.dim(), true, [model, shift](const Eigen::VectorXd& x) {
          const double e = model.eta_star(x);
          return sigmoid(std::log(e / (1.0 - e)) + shift);
        });
    for (double eps : {0.5, 0.8}) {
      RandomStream rng = RandomStream::derive(seed, ++stream_id, 20);
      const Prop5Bound b = prop5_bound_check(model, perturbed, eps, budget, budget, rng);
      const double se = std::sqrt(b.lhs_se * b.lhs_se + b.rhs_se * b.rhs_se);
      const bool nonneg = b.lhs >= -3.0 * b.lhs_se;
      const bool bounded = b.lhs <= b.rhs + 3.0 * se;
      ok = ok && nonneg && bounded;
      std::printf("shift=%.1f eps=%.1f lhs=%.5f rhs=%.5f tol=%.5f %s\n", shift, eps,
                  b.lhs, b.rhs, 3.0 * se, nonneg && bounded ? "ok" : "VIOLATED");
    }
  }
  return ok ? 0 : 1;
}

int suite_control(const std::string& model_name, const std::string& estimator, int n,
                  int N, int K, int reps, std::uint64_t seed) {
  ExperimentSpec spec;
  spec.model = make_model(model_name, 2.0, "", "", "");
  spec.estimator = parse_estimator(estimator);
  spec.n = n;
  spec.N = N;
  spec.K = K;
  spec.reps = reps;
  spec.epsilons = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  spec.master_seed = seed;
  spec.validate();

  const ExperimentReport report = run_experiment(spec);
  const double bound = dkw_radius(N, 0.01) + dkw_radius(K, 0.01) + 0.01;
  int checks = 0, ok = 0;
  for (const auto& rec : report.records) {
    for (std::size_t j = 0; j < spec.epsilons.size(); ++j) {
      ++checks;
      ok += std::fabs(rec.per_epsilon[j].prop() - spec.epsilons[j]) <= bound;
    }
  }
  const double rate = checks > 0 ? static_cast<double>(ok) / checks : 0.0;
  std::printf("per-repetition bound |prop - eps| <= %.4f\n", bound);
  for (std::size_t j = 0; j < report.summaries.size(); ++j) {
    std::printf("eps=%.1f mean_prop=%.3f sd=%.3f\n", report.summaries[j].epsilon,
                report.summaries[j].mean_prop, report.summaries[j].sd_prop);
  }
  std::printf("pass rate %.3f (%d/%d), required 0.99\n", rate, ok, checks);
  if (rate < 0.99) {
    std::printf("classification-probability control VIOLATED\n");
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epsilon-level confidence sets for binary classification with reject option"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a seeded experiment and write CSV/JSON");
  std::string model_name = "2", estimator = "oracle", epsilons = "0.1,0.5,1.0";
  std::string mu0, mu1, sigma, out = "-", format = "csv";
  double delta = 2.0;
  int n = 1, N = 1000, K = 1000, reps = 100, workers = 1;
  std::uint64_t seed = 0;
  sim->add_option("--model", model_name, "generative model: 1|2|3|gauss");
  sim->add_option("--estimator", estimator, "oracle|logistic|kernel|cart|rforest");
  sim->add_option("--n", n, "labeled training size (plug-in only)");
  sim->add_option("--N", N, "unlabeled calibration size");
  sim->add_option("--K", K, "labeled test size");
  sim->add_option("--reps", reps, "number of repetitions");
  sim->add_option("--epsilons", epsilons, "comma list of levels in (0,1]");
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--out", out, "output path, - for stdout");
  sim->add_option("--format", format, "csv|json");
  sim->add_option("--workers", workers, "worker threads");
  sim->add_option("--delta", delta, "gauss: canonical 1-d separation");
  sim->add_option("--mu0", mu0, "gauss: comma list");
  sim->add_option("--mu1", mu1, "gauss: comma list");
  sim->add_option("--sigma", sigma, "gauss: row-major d*d comma list");

  // gauss
  auto* gauss = app.add_subcommand("gauss", "closed-form mixture quantities");
  double g_delta = 2.0, g_eps = 1.0, g_cdf_at = 0.5;
  gauss->add_option("--delta", g_delta, "separation")->required();
  gauss->add_option("--epsilon", g_eps, "level in (0,1]")->required();
  auto* cdf_opt = gauss->add_option("--cdf-at", g_cdf_at, "also print the score CDF here");

  // verify
  auto* verify = app.add_subcommand("verify", "Monte Carlo property suites");
  std::string suite;
  std::int64_t budget = 1000000;
  std::uint64_t v_seed = 1;
  double v_delta = 2.0;
  std::string v_model = "2", v_estimator = "logistic";
  int v_n = 100, v_N = 100, v_K = 1000, v_reps = 100;
  verify->add_option("--suite", suite, "prop2|prop3|prop5|control")->required();
  verify->add_option("--budget", budget, "Monte Carlo draws per estimate");
  verify->add_option("--seed", v_seed, "seed");
  verify->add_option("--delta", v_delta, "mixture separation");
  verify->add_option("--model", v_model, "control: generative model");
  verify->add_option("--estimator", v_estimator, "control: estimator");
  verify->add_option("--n", v_n, "control: training size");
  verify->add_option("--N", v_N, "control: calibration size");
  verify->add_option("--K", v_K, "control: test size");
  verify->add_option("--reps", v_reps, "control: repetitions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) {
      return cmd_simulate(model_name, delta, mu0, mu1, sigma, estimator, n, N, K, reps,
                          epsilons, seed, out, format, workers);
    }
    if (gauss->parsed()) {
      try {
        return cmd_gauss(g_delta, g_eps, g_cdf_at, cdf_opt->count() > 0);
      } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;  // argument range problem
      }
    }
    if (verify->parsed()) {
      if (suite == "prop3") return suite_prop3(v_delta);
      if (suite == "prop2") return suite_prop2(v_delta, budget, v_seed);
      if (suite == "prop5") return suite_prop5(v_delta, budget, v_seed);
      if (suite == "control")
        return suite_control(v_model, v_estimator, v_n, v_N, v_K, v_reps, v_seed);
      std::fprintf(stderr, "error: unknown suite %s\n", suite.c_str());
      return 2;
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
