#ifndef CONFSETS_DATA_HPP
#define CONFSETS_DATA_HPP

#include <Eigen/Dense>
#include <stdexcept>

namespace confsets {

/// One observation; y is 0/1, or -1 when the draw is unlabeled.
struct Sample {
  Eigen::VectorXd x;
  int y = -1;
};

struct LabeledDataset {
  Eigen::MatrixXd features;  // n x d
  Eigen::VectorXi labels;    // n entries in {0,1}

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  void validate() const {
    if (features.rows() < 1) throw std::invalid_argument("dataset is empty");
    if (labels.size() != features.rows())
      throw std::invalid_argument("label count does not match feature rows");
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
      if (labels[i] != 0 && labels[i] != 1)
        throw std::invalid_argument("labels must be 0 or 1");
    }
  }
};

}  // namespace confsets

#endif
