#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dcgkit/dataset.hpp"
#include "dcgkit/random.hpp"

namespace testutil {

// Features drawn from a small grid of multiples of 1/8 so sums, differences
// and integer shifts stay exactly representable.
inline Eigen::MatrixXd dyadic_matrix(dcgkit::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      x(i, j) = (static_cast<double>(dcgkit::uniform_index(rng, 161)) - 80.0) / 8.0;
    }
  }
  return x;
}

inline Eigen::MatrixXd gaussian_matrix(dcgkit::Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = scale * dcgkit::standard_normal(rng);
  }
  return x;
}

/// Labels 1..classes, each class present at least `min_per_class` times.
inline std::vector<int> random_labels(dcgkit::Rng& rng, int n, int classes, int min_per_class = 1) {
  std::vector<int> labels;
  for (int c = 1; c <= classes; ++c) {
    for (int r = 0; r < min_per_class; ++r) labels.push_back(c);
  }
  while (static_cast<int>(labels.size()) < n) labels.push_back(1 + static_cast<int>(dcgkit::uniform_index(rng, classes)));
  dcgkit::shuffle(std::span<int>(labels), rng);
  return labels;
}

inline Eigen::MatrixXd class_covariance(const Eigen::MatrixXd& x, const std::vector<int>& labels, int label) {
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) rows.push_back(static_cast<Eigen::Index>(i));
  }
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) sub.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  const Eigen::MatrixXd c = sub.rowwise() - sub.colwise().mean();
  return c.transpose() * c / static_cast<double>(std::max<std::size_t>(rows.size() - 1, 1));
}

}  // namespace testutil
