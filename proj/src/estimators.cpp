#include "confsets/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "confsets/normal.hpp"

namespace confsets {

namespace {

double clip_unit(double p) {
  const double lo = 1e-6;
  return std::min(std::max(p, lo), 1.0 - lo);
}

// log(1 + exp(t)) without overflow.
double log1pexp(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Logistic regression
// ---------------------------------------------------------------------------

ScoreModel fit_logistic(const LabeledDataset& data, const LogisticConfig& config,
                        LogisticDiagnostics* diagnostics) {
  data.validate();
  if (!data.features.allFinite())
    throw std::invalid_argument("fit_logistic: features contain NaN or Inf");
  if (config.ridge < 0.0) throw std::invalid_argument("fit_logistic: ridge must be >= 0");

  const Eigen::Index n = data.size();
  const Eigen::Index d = data.dim();

  Eigen::MatrixXd design(n, d + 1);
  design.leftCols(d) = data.features;
  design.col(d).setOnes();
  Eigen::VectorXd y = data.labels.cast<double>();

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);

  const auto loss_at = [&](const Eigen::VectorXd& th) {
    const Eigen::VectorXd t = design * th;
    double loss = 0.5 * config.ridge * th.squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) loss += log1pexp(t[i]) - y[i] * t[i];
    return loss;
  };

  double loss = loss_at(theta);
  bool converged = false;
  int iter = 0;
  if (diagnostics) {
    *diagnostics = LogisticDiagnostics{};
    diagnostics->loss_history.push_back(loss);
  }

  for (; iter < config.max_iters; ++iter) {
    const Eigen::VectorXd t = design * theta;
    Eigen::VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = sigmoid(t[i]);
      w[i] = p[i] * (1.0 - p[i]);
    }
    const Eigen::VectorXd grad =
        design.transpose() * (p - y) + config.ridge * theta;
    if (grad.lpNorm<Eigen::Infinity>() <= config.tolerance) {
      converged = true;
      break;
    }

    Eigen::MatrixXd hess = design.transpose() * w.asDiagonal() * design;
    hess.diagonal().array() += config.ridge;
    Eigen::VectorXd dir;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    bool have_newton = ldlt.info() == Eigen::Success;
    if (have_newton) {
      dir = ldlt.solve(-grad);
      have_newton = dir.allFinite() && grad.dot(dir) < 0.0;
    }
    if (!have_newton) dir = -grad;  // steepest descent fallback

    // Backtracking line search; steps are only accepted when the penalized
    // loss does not increase, so the recorded history is monotone.
    const double slope = grad.dot(dir);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd cand = theta + step * dir;
      const double cand_loss = loss_at(cand);
      if (std::isfinite(cand_loss) && cand_loss <= loss + 1e-4 * step * slope) {
        theta = cand;
        loss = cand_loss;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (diagnostics) diagnostics->loss_history.push_back(loss);
    if (!accepted) break;
  }

  if (diagnostics) {
    diagnostics->converged = converged;
    diagnostics->iterations = iter;
  }

  const Eigen::VectorXd weights = theta.head(d);
  const double intercept = theta[d];
  auto eta = [weights, intercept](const Eigen::VectorXd& x) {
    return sigmoid(weights.dot(x) + intercept);
  };
  return ScoreModel("logistic", static_cast<int>(d), true, std::move(eta), converged);
}

// ---------------------------------------------------------------------------
// Kernel rule
// ---------------------------------------------------------------------------

ScoreModel fit_kernel(const LabeledDataset& data, double bandwidth) {
  data.validate();
  if (!data.features.allFinite())
    throw std::invalid_argument("fit_kernel: features contain NaN or Inf");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("fit_kernel: bandwidth must be > 0");

  const Eigen::Index n = data.size();
  const Eigen::Index d = data.dim();

  // Canonical ordering: lexicographic over features, labels break ties.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (data.features(a, j) != data.features(b, j))
        return data.features(a, j) < data.features(b, j);
    }
    return data.labels[a] < data.labels[b];
  });

  auto points = std::make_shared<Eigen::MatrixXd>(n, d);
  auto labels = std::make_shared<Eigen::VectorXd>(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    points->row(i) = data.features.row(order[i]);
    (*labels)[i] = data.labels[order[i]];
  }

  const double inv_two_h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  auto eta = [points, labels, inv_two_h2, n](const Eigen::VectorXd& x) {
    // Shift by the largest exponent; the dominant weight is then exactly 1
    // and the denominator cannot underflow to zero.
    Eigen::VectorXd neg = Eigen::VectorXd(n);
    double m = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      neg[i] = -(points->row(i).transpose() - x).squaredNorm() * inv_two_h2;
      m = std::max(m, neg[i]);
    }
    KahanSum num, den;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = std::exp(neg[i] - m);
      num.add(w * (*labels)[i]);
      den.add(w);
    }
    const double e = num.sum / den.sum;
    return std::min(std::max(e, 0.0), 1.0);
  };
  return ScoreModel("kernel", static_cast<int>(d), true, std::move(eta));
}

// ---------------------------------------------------------------------------
// Trees
// ---------------------------------------------------------------------------

namespace {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf label frequency
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(const Eigen::VectorXd& x) const {
    int id = 0;
    while (nodes[id].feature >= 0) {
      id = (x[nodes[id].feature] <= nodes[id].threshold) ? nodes[id].left
                                                         : nodes[id].right;
    }
    return nodes[id].value;
  }
};

// Gini "impurity mass": m * gini = m - (pos^2 + neg^2)/m.
double gini_mass(double m, double pos) {
  if (m <= 0.0) return 0.0;
  const double neg = m - pos;
  return m - (pos * pos + neg * neg) / m;
}

struct SplitParams {
  int max_depth;
  int min_leaf;
  int min_split;
  double min_improvement;  // absolute, on the impurity-mass scale
};

struct BestSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double improvement = 0.0;
};

BestSplit find_split(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                     const std::vector<int>& idx, const std::vector<int>& features,
                     const SplitParams& params) {
  const int m = static_cast<int>(idx.size());
  double pos_total = 0.0;
  for (int i : idx) pos_total += y[i];
  const double parent = gini_mass(m, pos_total);

  BestSplit best;
  std::vector<std::pair<double, int>> vals(m);
  for (int f : features) {
    for (int k = 0; k < m; ++k) vals[k] = {X(idx[k], f), y[idx[k]]};
    std::sort(vals.begin(), vals.end());
    double pos_left = 0.0;
    for (int k = 1; k < m; ++k) {
      pos_left += vals[k - 1].second;
      if (vals[k - 1].first == vals[k].first) continue;  // no boundary here
      const int n_left = k, n_right = m - k;
      if (n_left < params.min_leaf || n_right < params.min_leaf) continue;
      const double impurity =
          gini_mass(n_left, pos_left) + gini_mass(n_right, pos_total - pos_left);
      const double improvement = parent - impurity;
      if (improvement > best.improvement + 1e-12) {
        best.found = true;
        best.feature = f;
        best.threshold = 0.5 * (vals[k - 1].first + vals[k].first);
        best.improvement = improvement;
      }
    }
  }
  if (best.found && best.improvement < params.min_improvement) best.found = false;
  return best;
}

int grow(Tree& tree, const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
         std::vector<int>& idx, int depth, const SplitParams& params, int mtry,
         RandomStream* rng, int d) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();

  const int m = static_cast<int>(idx.size());
  double pos = 0.0;
  for (int i : idx) pos += y[i];
  tree.nodes[id].value = pos / m;

  const bool pure = (pos == 0.0 || pos == static_cast<double>(m));
  if (depth >= params.max_depth || m < params.min_split || m < 2 * params.min_leaf ||
      pure) {
    return id;
  }

  std::vector<int> features;
  if (mtry >= d) {
    features.resize(d);
    std::iota(features.begin(), features.end(), 0);
  } else {
    // Partial Fisher-Yates, then sorted so the scan order stays canonical.
    std::vector<int> pool(d);
    std::iota(pool.begin(), pool.end(), 0);
    for (int k = 0; k < mtry; ++k) {
      const int j = k + static_cast<int>(rng->next_below(static_cast<std::uint32_t>(d - k)));
      std::swap(pool[k], pool[j]);
    }
    features.assign(pool.begin(), pool.begin() + mtry);
    std::sort(features.begin(), features.end());
  }

  const BestSplit split = find_split(X, y, idx, features, params);
  if (!split.found) return id;

  std::vector<int> left_idx, right_idx;
  left_idx.reserve(idx.size());
  right_idx.reserve(idx.size());
  for (int i : idx) {
    (X(i, split.feature) <= split.threshold ? left_idx : right_idx).push_back(i);
  }
  idx.clear();
  idx.shrink_to_fit();

  tree.nodes[id].feature = split.feature;
  tree.nodes[id].threshold = split.threshold;
  tree.nodes[id].left = grow(tree, X, y, left_idx, depth + 1, params, mtry, rng, d);
  tree.nodes[id].right = grow(tree, X, y, right_idx, depth + 1, params, mtry, rng, d);
  return id;
}

Tree fit_tree(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
              std::vector<int> idx, const SplitParams& base, int mtry,
              RandomStream* rng, int d) {
  SplitParams params = base;
  double pos = 0.0;
  for (int i : idx) pos += y[i];
  // Complexity threshold is relative to the root impurity of this sample.
  params.min_improvement = base.min_improvement * gini_mass(static_cast<double>(idx.size()), pos);
  Tree tree;
  grow(tree, X, y, idx, 0, params, mtry, rng, d);
  return tree;
}

}  // namespace

ScoreModel fit_cart(const LabeledDataset& data, const CartConfig& config) {
  data.validate();
  if (!data.features.allFinite())
    throw std::invalid_argument("fit_cart: features contain NaN or Inf");
  if (data.size() < config.min_leaf)
    throw std::invalid_argument("fit_cart: fewer samples than min_leaf");

  const int n = static_cast<int>(data.size());
  const int d = static_cast<int>(data.dim());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);

  SplitParams params{config.max_depth, config.min_leaf, config.min_split,
                     config.complexity};
  auto tree = std::make_shared<Tree>(
      fit_tree(data.features, data.labels, std::move(idx), params, d, nullptr, d));

  auto eta = [tree](const Eigen::VectorXd& x) { return clip_unit(tree->predict(x)); };
  return ScoreModel("cart", d, false, std::move(eta));
}

ScoreModel fit_forest(const LabeledDataset& data, const ForestConfig& config,
                      RandomStream& rng) {
  data.validate();
  if (!data.features.allFinite())
    throw std::invalid_argument("fit_forest: features contain NaN or Inf");
  if (config.n_trees < 1) throw std::invalid_argument("fit_forest: n_trees must be >= 1");
  if (data.size() < config.min_leaf)
    throw std::invalid_argument("fit_forest: fewer samples than min_leaf");

  const int n = static_cast<int>(data.size());
  const int d = static_cast<int>(data.dim());
  const int mtry =
      config.feature_fraction > 0.0
          ? std::min(d, std::max(1, static_cast<int>(std::ceil(config.feature_fraction * d))))
          : std::min(d, std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))))));

  SplitParams params{config.max_depth, config.min_leaf, config.min_split,
                     config.complexity};

  auto trees = std::make_shared<std::vector<Tree>>();
  trees->reserve(config.n_trees);
  for (int t = 0; t < config.n_trees; ++t) {
    RandomStream tree_rng(rng.next_u64());
    std::vector<int> idx(n);
    if (config.bootstrap) {
      for (int i = 0; i < n; ++i)
        idx[i] = static_cast<int>(tree_rng.next_below(static_cast<std::uint32_t>(n)));
    } else {
      std::iota(idx.begin(), idx.end(), 0);
    }
    trees->push_back(
        fit_tree(data.features, data.labels, std::move(idx), params, mtry, &tree_rng, d));
  }

  auto eta = [trees](const Eigen::VectorXd& x) {
    double acc = 0.0;
    for (const Tree& t : *trees) acc += t.predict(x);
    return clip_unit(acc / static_cast<double>(trees->size()));
  };
  return ScoreModel("rforest", d, false, std::move(eta));
}

ScoreModel oracle_score_model(const GenerativeModel& model) {
  const bool continuous = model.continuous_score_cdf();
  auto eta = [model](const Eigen::VectorXd& x) { return model.eta_star(x); };
  return ScoreModel("oracle", model.dim(), continuous, std::move(eta));
}

}  // namespace confsets
