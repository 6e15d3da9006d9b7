#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dcgkit/dataset.hpp"
#include "dcgkit/reduction.hpp"

namespace dcgkit {

enum class KnnMetric { euclidean };
enum class VoteTieBreak { smallest_label };

struct KnnConfig {
  int k = 1;
  KnnMetric metric = KnnMetric::euclidean;
  VoteTieBreak tie_break = VoteTieBreak::smallest_label;
};

/// Majority vote among the k nearest training rows. Equal distances are
/// ordered by training-row index; equal vote counts go to the smaller label.
std::vector<int> knn_predict(const Eigen::MatrixXd& train, std::span<const int> train_labels,
                             const Eigen::MatrixXd& queries, const KnnConfig& config);

/// Predictions for several k at once (one neighbor sort per query).
/// result[j] holds the predictions for ks[j]; ks must be ascending.
std::vector<std::vector<int>> knn_predict_multi(const Eigen::MatrixXd& train, std::span<const int> train_labels,
                                                const Eigen::MatrixXd& queries, std::span<const int> ks);

double accuracy_percent(std::span<const int> predicted, std::span<const int> truth);

/// Leave-one-out accuracy of k-NN on its own training data.
double leave_one_out_accuracy(const Eigen::MatrixXd& features, std::span<const int> labels, int k);

/// Mean and sample standard deviation (n - 1 denominator) of per-fold
/// accuracies in percent.
struct AccuracyStat {
  double mean = 0.0;
  double std_dev = 0.0;
  std::vector<double> fold_scores;

  static AccuracyStat from_scores(std::vector<double> scores);
  bool operator==(const AccuracyStat&) const = default;
};

/// Which training rows the classifier stores after projection when shifting
/// is on. `original`: the shift only steers how W is learned, and both
/// training and validation rows are projected unshifted. `shifted`: the
/// classifier stores the projected shifted rows.
enum class KnnReference { original, shifted };

std::string_view to_string(KnnReference r);
KnnReference parse_knn_reference(std::string_view text);

/// Either a fixed k, or k picked per outer fold by inner cross-validation on
/// that fold's training rows only.
struct KnnSelection {
  std::optional<int> k;
  KnnReference reference = KnnReference::original;
  std::vector<int> candidates{1, 3, 5, 7, 9, 11, 13, 15};
  int inner_folds = 3;
};

/// Repeated stratified k-fold cross-validation. Repeat r draws its folds
/// from derive_seed(seed, r).
struct Protocol {
  int folds = 10;
  int repeats = 5;
  std::uint64_t seed = 1;
};

struct PipelineResult {
  AccuracyStat accuracy;
  std::vector<int> fold_k;        // k used per fold, fold order
  std::vector<int> fold_out_dim;  // m' used per fold
  std::uint64_t partition_fingerprint = 0;
};

/// The folds a protocol produces, one entry per repeat.
std::vector<std::vector<Fold>> protocol_folds(const Dataset& d, const Protocol& protocol);
std::uint64_t protocol_fingerprint(const Dataset& d, const Protocol& protocol);

/// Per fold: shift the training rows by alpha, learn the projection on them,
/// project the reference rows (see KnnReference) and the untouched
/// validation rows, then score k-NN. Validation rows are never label-shifted.
PipelineResult evaluate_pipeline(const Dataset& d, int alpha, const ReductionConfig& reduction,
                                 const KnnSelection& knn, const Protocol& protocol);

/// Same protocol with the shifting stage removed entirely.
PipelineResult evaluate_classical(const Dataset& d, const ReductionConfig& reduction, const KnnSelection& knn,
                                  const Protocol& protocol);

/// Trains the pipeline on `train` and scores it on `test`.
struct HoldoutScore {
  double accuracy = 0.0;
  int k = 0;
  int out_dim = 0;
};
HoldoutScore evaluate_holdout(const Dataset& train, const Dataset& test, int alpha, const ReductionConfig& reduction,
                              const KnnSelection& knn, std::uint64_t seed);

}  // namespace dcgkit
