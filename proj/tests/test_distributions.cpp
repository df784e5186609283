#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "confsets/distributions.hpp"
#include "confsets/normal.hpp"
#include "confsets/random.hpp"

using namespace confsets;

TEST_CASE("mixture params cache the Mahalanobis separation") {
  Eigen::VectorXd mu0(2), mu1(2);
  mu0 << 0.0, 0.0;
  mu1 << 1.0, 2.0;
  Eigen::MatrixXd sigma(2, 2);
  sigma << 2.0, 0.3, 0.3, 1.0;
  GaussianMixtureParams p(mu0, mu1, sigma);
  const Eigen::VectorXd diff = mu1 - mu0;
  const double expected = std::sqrt(diff.dot(sigma.inverse() * diff));
  CHECK(p.delta == doctest::Approx(expected).epsilon(1e-12));

  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(GaussianMixtureParams(mu0, mu1, bad), std::invalid_argument);

  CHECK(GaussianMixtureParams::canonical_1d(2.0).delta == doctest::Approx(2.0));
}

TEST_CASE("eta_star point values") {
  const GenerativeModel m1 = GenerativeModel::model1();
  CHECK(m1.eta_star(Eigen::VectorXd::Zero(10)) == 0.5);
  Eigen::VectorXd x1(10);
  x1.setZero();
  x1[0] = 0.3;
  x1[1] = 0.1;
  x1[2] = 0.5;
  x1[8] = 0.9;  // logit = 0.3 - 0.1 - 0.5 + 0.9 = 0.6
  CHECK(m1.eta_star(x1) == doctest::Approx(0.64565630622579545).epsilon(1e-14));

  const GenerativeModel m2 = GenerativeModel::model2();
  Eigen::VectorXd x2(3);
  x2 << 1.0, 0.0, 0.0;
  CHECK(m2.eta_star(x2) == doctest::Approx(0.71519194364247998).epsilon(1e-14));

  const GenerativeModel m3 = GenerativeModel::model3();
  Eigen::VectorXd x3(1);
  x3 << 0.3;
  CHECK(m3.eta_star(x3) == doctest::Approx(0.4).epsilon(1e-15));
  x3 << 0.25;
  CHECK(m3.eta_star(x3) == doctest::Approx(0.2));  // boundary belongs left
  x3 << 0.9;
  CHECK(m3.eta_star(x3) == doctest::Approx(0.8));

  const GenerativeModel g =
      GenerativeModel::gaussian_mixture(GaussianMixtureParams::canonical_1d(2.0));
  Eigen::VectorXd xg(1);
  xg << 1.7;  // logit = (x - 1) * 2
  CHECK(g.eta_star(xg) == doctest::Approx(0.80218388855858175).epsilon(1e-14));
  xg << 1.0;
  CHECK(g.eta_star(xg) == 0.5);

  CHECK_THROWS_AS((void)m2.eta_star(Eigen::VectorXd::Zero(4)), std::invalid_argument);
}

TEST_CASE("eta_star is deterministic bit for bit") {
  const GenerativeModel m2 = GenerativeModel::model2();
  RandomStream rng(3);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd x(3);
    x << rng.next_normal(), rng.next_normal(), rng.next_normal();
    const double a = m2.eta_star(x);
    const double b = m2.eta_star(x);
    CHECK(a == b);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
  }
}

TEST_CASE("model 3 sampling stays on its support") {
  const GenerativeModel m3 = GenerativeModel::model3();
  RandomStream rng(11);
  const auto samples = m3.sample(4, rng);
  CHECK(samples.size() == 4);
  for (const Sample& s : samples) {
    CHECK(s.x.size() == 1);
    CHECK(s.x[0] >= 0.0);
    CHECK(s.x[0] <= 1.0);
    CHECK((s.y == 0 || s.y == 1));
  }
  CHECK_THROWS_AS((void)m3.sample(0, rng), std::invalid_argument);
}

TEST_CASE("coincident mixture components give balanced labels") {
  Eigen::VectorXd mu(2);
  mu << 1.0, -1.0;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(2, 2);
  const GenerativeModel g =
      GenerativeModel::gaussian_mixture(GaussianMixtureParams(mu, mu, sigma));
  RandomStream rng(17);
  int ones = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Sample s = g.sample_one(rng);
    ones += s.y;
    CHECK(g.eta_star(s.x) == 0.5);
  }
  CHECK(std::fabs(static_cast<double>(ones) / n - 0.5) < 0.01);
}

TEST_CASE("model 1 concentrates eta near 1/2") {
  const GenerativeModel m1 = GenerativeModel::model1();
  RandomStream rng(23);
  int mid = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Sample s = m1.sample_one(rng);
    const double e = m1.eta_star(s.x);
    if (e >= 0.4 && e <= 0.6) ++mid;
  }
  CHECK(std::fabs(static_cast<double>(mid) / n - 0.5) < 0.02);
}

TEST_CASE("labels are Bernoulli(eta) within binomial error, per eta bin") {
  RandomStream rng(31);
  for (const GenerativeModel& m :
       {GenerativeModel::model1(), GenerativeModel::model2(), GenerativeModel::model3()}) {
    const int bins = 10, n = 200000;
    std::vector<double> count(bins, 0.0), ones(bins, 0.0), eta_sum(bins, 0.0);
    for (int i = 0; i < n; ++i) {
      const Sample s = m.sample_one(rng);
      const double e = m.eta_star(s.x);
      int b = std::min(bins - 1, static_cast<int>(e * bins));
      count[b] += 1.0;
      ones[b] += s.y;
      eta_sum[b] += e;
    }
    for (int b = 0; b < bins; ++b) {
      if (count[b] < 100) continue;
      const double target = eta_sum[b] / count[b];
      const double freq = ones[b] / count[b];
      const double se = std::sqrt(std::max(target * (1.0 - target), 1e-6) / count[b]);
      CHECK(std::fabs(freq - target) <= 3.0 * se + 1e-9);
    }
  }
}

TEST_CASE("gaussian score CDF: closed form") {
  const auto p2 = GaussianMixtureParams::canonical_1d(2.0);
  CHECK(gaussian_score_cdf(p2, 0.5) == 0.0);
  CHECK(gaussian_score_cdf(p2, 0.9) == doctest::Approx(0.521351397581956).epsilon(1e-12));
  CHECK(gaussian_score_cdf(GaussianMixtureParams::canonical_1d(1.0), 0.75) ==
        doctest::Approx(0.670330881516202).epsilon(1e-12));
  CHECK(gaussian_score_cdf(GaussianMixtureParams::canonical_1d(4.0), 0.99) ==
        doctest::Approx(0.196503799054407).epsilon(1e-12));
  CHECK(gaussian_score_cdf(GaussianMixtureParams::canonical_1d(0.5), 0.6) ==
        doctest::Approx(0.568216636773354).epsilon(1e-12));
  CHECK(gaussian_score_cdf(p2, 1.0 - 1e-13) == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS((void)gaussian_score_cdf(p2, 0.4), std::invalid_argument);
  CHECK_THROWS_AS((void)gaussian_score_cdf(p2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)gaussian_score_cdf(GaussianMixtureParams::canonical_1d(0.0), 0.7),
                  std::invalid_argument);
}

TEST_CASE("gaussian score CDF is non-decreasing in alpha") {
  for (double delta : {0.5, 1.0, 2.0, 4.0}) {
    const auto p = GaussianMixtureParams::canonical_1d(delta);
    double prev = -1.0;
    for (int i = 0; i < 1000; ++i) {
      const double alpha = 0.5 + 0.4999 * i / 999.0;
      const double v = gaussian_score_cdf(p, alpha);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("empirical score CDF matches the closed form uniformly") {
  const auto p = GaussianMixtureParams::canonical_1d(2.0);
  const GenerativeModel g = GenerativeModel::gaussian_mixture(p);
  RandomStream rng(41);
  const int n = 1000000;
  std::vector<double> scores;
  scores.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Sample s = g.sample_one(rng);
    const double e = g.eta_star(s.x);
    scores.push_back(std::max(e, 1.0 - e));
  }
  std::sort(scores.begin(), scores.end());
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double alpha = 0.5 + 0.4998 * i / 999.0;
    const auto it = std::upper_bound(scores.begin(), scores.end(), alpha);
    const double emp = static_cast<double>(it - scores.begin()) / n;
    worst = std::max(worst, std::fabs(emp - gaussian_score_cdf(p, alpha)));
  }
  CHECK(worst < 0.005);
}

TEST_CASE("gaussian score quantile inverts the CDF") {
  const auto p = GaussianMixtureParams::canonical_1d(2.0);
  CHECK(gaussian_score_quantile(p, 1.0) == 0.5);
  CHECK(gaussian_score_quantile(p, 0.5) ==
        doctest::Approx(0.89100893856455907).epsilon(1e-10));
  CHECK(gaussian_score_quantile(p, 0.2) ==
        doctest::Approx(0.97584792817982536).epsilon(1e-10));
  for (double eps : {0.1, 0.35, 0.7, 0.95}) {
    const double alpha = gaussian_score_quantile(p, eps);
    CHECK(gaussian_score_cdf(p, alpha) == doctest::Approx(1.0 - eps).epsilon(1e-9));
  }
}

TEST_CASE("gaussian oracle risk: closed-form values") {
  // Symmetric mixture: half of the classified points are wrong at any level.
  const auto p0 = GaussianMixtureParams::canonical_1d(0.0);
  for (double eps : {0.1, 0.5, 1.0}) {
    CHECK(gaussian_oracle_risk(p0, eps) == doctest::Approx(0.5).epsilon(1e-10));
  }

  // Full classification reduces to the plain misclassification risk.
  for (double delta : {0.5, 1.0, 2.0, 4.0}) {
    const auto p = GaussianMixtureParams::canonical_1d(delta);
    CHECK(std::fabs(gaussian_oracle_risk(p, 1.0) - (1.0 - normal_cdf(delta / 2))) < 1e-10);
  }

  // Independent Monte Carlo oracle, 1e7 draws, frozen before implementation:
  // estimate 0.040439400 with SE 8.902e-05.
  const auto p2 = GaussianMixtureParams::canonical_1d(2.0);
  CHECK(std::fabs(gaussian_oracle_risk(p2, 0.5) - 0.0404394) <= 3.0 * 8.902e-05);

  // High-precision root-finding references.
  CHECK(gaussian_oracle_risk(p2, 0.5) == doctest::Approx(0.0403113461372825).epsilon(1e-9));
  CHECK(gaussian_oracle_risk(GaussianMixtureParams::canonical_1d(1.0), 0.3) ==
        doctest::Approx(0.159077317034627).epsilon(1e-9));
  CHECK(gaussian_oracle_risk(GaussianMixtureParams::canonical_1d(4.0), 0.7) ==
        doctest::Approx(3.63089805233595e-4).epsilon(1e-6));
  CHECK(gaussian_oracle_risk(GaussianMixtureParams::canonical_1d(0.5), 0.2) ==
        doctest::Approx(0.290156828680143).epsilon(1e-9));

  CHECK_THROWS_AS((void)gaussian_oracle_risk(p2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)gaussian_oracle_risk(p2, 1.5), std::invalid_argument);
}

TEST_CASE("gaussian oracle risk: monotone in epsilon and in separation") {
  for (double delta : {0.5, 1.0, 2.0}) {
    const auto p = GaussianMixtureParams::canonical_1d(delta);
    double prev = -1.0;
    for (int k = 1; k <= 100; ++k) {
      const double risk = gaussian_oracle_risk(p, k / 100.0);
      CHECK(risk >= prev - 1e-12);
      prev = risk;
    }
  }
  for (double eps : {0.2, 0.5, 1.0}) {
    double prev = 1.0;
    for (double delta : {0.25, 0.5, 1.0, 2.0, 3.0, 4.0}) {
      const double risk = gaussian_oracle_risk(GaussianMixtureParams::canonical_1d(delta), eps);
      CHECK(risk <= prev + 1e-12);
      prev = risk;
    }
  }
}

TEST_CASE("model 3 oracle regimes") {
  CHECK(model3_oracle(0.7).classified_proportion == 1.0);
  CHECK(model3_oracle(0.7).risk == doctest::Approx(0.3));
  CHECK(model3_oracle(0.2).classified_proportion == 0.5);
  CHECK(model3_oracle(0.2).risk == doctest::Approx(0.2));
  // The boundary belongs to the fully-classified regime.
  CHECK(model3_oracle(0.5).classified_proportion == 1.0);
  CHECK(model3_oracle(0.5).risk == doctest::Approx(0.3));
  CHECK_THROWS_AS((void)model3_oracle(0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)model3_oracle(1.1), std::invalid_argument);
}
