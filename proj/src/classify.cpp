#include "dcgkit/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dcgkit/dispel.hpp"
#include "dcgkit/errors.hpp"
#include "dcgkit/random.hpp"

namespace dcgkit {

std::string_view to_string(KnnReference r) { return r == KnnReference::original ? "original" : "shifted"; }

KnnReference parse_knn_reference(std::string_view text) {
  if (text == "original") return KnnReference::original;
  if (text == "shifted") return KnnReference::shifted;
  throw ConfigError("unknown k-NN reference '" + std::string(text) + "' (expected original or shifted)");
}

namespace {

void check_k(int k, Eigen::Index train_size) {
  if (k < 1 || k % 2 == 0) throw ConfigError("knn: k must be an odd positive integer, got " + std::to_string(k));
  if (k > train_size) {
    throw ConfigError("knn: k=" + std::to_string(k) + " exceeds training size " + std::to_string(train_size));
  }
}

/// Indices of the `count` nearest rows, ordered by (distance, index).
void nearest(const Eigen::MatrixXd& train, const Eigen::RowVectorXd& query, std::size_t count,
             std::vector<std::size_t>& order, Eigen::VectorXd& dist) {
  dist = (train.rowwise() - query).rowwise().squaredNorm();
  order.resize(static_cast<std::size_t>(train.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto closer = [&](std::size_t a, std::size_t b) {
    const double da = dist(static_cast<Eigen::Index>(a));
    const double db = dist(static_cast<Eigen::Index>(b));
    return da < db || (da == db && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(), closer);
}

int vote_winner(const std::vector<int>& votes) {
  int best = 0;
  for (std::size_t l = 1; l < votes.size(); ++l) {
    if (votes[l] > votes[static_cast<std::size_t>(best)]) best = static_cast<int>(l);
  }
  return best;
}

}  // namespace

std::vector<std::vector<int>> knn_predict_multi(const Eigen::MatrixXd& train, std::span<const int> train_labels,
                                                const Eigen::MatrixXd& queries, std::span<const int> ks) {
  if (train.rows() == 0) throw ConfigError("knn: empty training set");
  if (static_cast<std::size_t>(train.rows()) != train_labels.size()) {
    throw ShapeError("knn: training rows and labels differ in count");
  }
  if (queries.cols() != train.cols()) {
    throw ShapeError("knn: query dimension " + std::to_string(queries.cols()) + " != training dimension " +
                     std::to_string(train.cols()));
  }
  if (ks.empty()) throw ConfigError("knn: no k given");
  for (std::size_t j = 0; j < ks.size(); ++j) {
    check_k(ks[j], train.rows());
    if (j && ks[j] <= ks[j - 1]) throw ConfigError("knn: k list must be strictly ascending");
  }
  const int max_label = *std::max_element(train_labels.begin(), train_labels.end());
  const auto kmax = static_cast<std::size_t>(ks.back());

  std::vector<std::vector<int>> out(ks.size(), std::vector<int>(static_cast<std::size_t>(queries.rows())));
  std::vector<std::size_t> order;
  Eigen::VectorXd dist;
  std::vector<int> votes(static_cast<std::size_t>(max_label) + 1);
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    nearest(train, queries.row(q), kmax, order, dist);
    std::fill(votes.begin(), votes.end(), 0);
    std::size_t used = 0;
    for (std::size_t j = 0; j < ks.size(); ++j) {
      for (; used < static_cast<std::size_t>(ks[j]); ++used) ++votes[static_cast<std::size_t>(train_labels[order[used]])];
      out[j][static_cast<std::size_t>(q)] = vote_winner(votes);
    }
  }
  return out;
}

std::vector<int> knn_predict(const Eigen::MatrixXd& train, std::span<const int> train_labels,
                             const Eigen::MatrixXd& queries, const KnnConfig& config) {
  const int k = config.k;
  return std::move(knn_predict_multi(train, train_labels, queries, std::span(&k, 1)).front());
}

double accuracy_percent(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw ShapeError("accuracy: prediction/truth length mismatch");
  if (truth.empty()) throw DegenerateInputError("accuracy: no samples");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

double leave_one_out_accuracy(const Eigen::MatrixXd& features, std::span<const int> labels, int k) {
  const auto n = features.rows();
  if (n < 2) throw DegenerateInputError("leave-one-out: need at least 2 rows");
  std::vector<int> predicted;
  std::vector<int> rest_labels;
  Eigen::MatrixXd rest(n - 1, features.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    rest_labels.clear();
    for (Eigen::Index r = 0, o = 0; r < n; ++r) {
      if (r == i) continue;
      rest.row(o++) = features.row(r);
      rest_labels.push_back(labels[static_cast<std::size_t>(r)]);
    }
    predicted.push_back(knn_predict(rest, rest_labels, features.row(i), KnnConfig{k}).front());
  }
  return accuracy_percent(predicted, labels);
}

AccuracyStat AccuracyStat::from_scores(std::vector<double> scores) {
  AccuracyStat s;
  s.fold_scores = std::move(scores);
  const auto n = s.fold_scores.size();
  if (n == 0) return s;
  s.mean = std::accumulate(s.fold_scores.begin(), s.fold_scores.end(), 0.0) / static_cast<double>(n);
  if (n > 1) {
    double ss = 0.0;
    for (double v : s.fold_scores) ss += (v - s.mean) * (v - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return s;
}

namespace {

struct Reduced {
  ProjectionModel model;
  Eigen::MatrixXd train;  // projected k-NN reference rows
};

/// Optional shift, fit on the (shifted) training rows, then project the
/// k-NN reference rows.
Reduced reduce_train(const Eigen::MatrixXd& train, std::span<const int> labels, std::optional<int> alpha,
                     const ReductionConfig& reduction, KnnReference reference) {
  Reduced r;
  if (alpha) {
    const Eigen::MatrixXd shifted = apply_dcg(train, labels, *alpha);
    r.model = fit_reduction(reduction, shifted, labels);
    r.train = project(r.model, reference == KnnReference::shifted ? shifted : train);
  } else {
    r.model = fit_reduction(reduction, train, labels);
    r.train = project(r.model, train);
  }
  return r;
}

int select_k(const Dataset& train, std::optional<int> alpha, const ReductionConfig& reduction,
             const KnnSelection& knn, std::uint64_t seed) {
  const auto n = static_cast<int>(train.num_samples());
  const int inner = std::min(knn.inner_folds, n);
  if (inner < 2) return 1;
  const auto folds = k_folds(train.labels, train.num_classes(), inner, seed);
  std::size_t min_train = train.labels.size();
  for (const auto& f : folds) min_train = std::min(min_train, f.train_rows.size());

  std::vector<int> ks;
  for (int k : knn.candidates) {
    if (k >= 1 && k % 2 == 1 && static_cast<std::size_t>(k) <= min_train) ks.push_back(k);
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  if (ks.size() <= 1) return ks.empty() ? 1 : ks.front();

  std::vector<std::size_t> hits(ks.size(), 0);
  for (const auto& f : folds) {
    const auto tr = train.subset(f.train_rows);
    const auto va = train.subset(f.validation_rows);
    const auto reduced = reduce_train(tr.features, tr.labels, alpha, reduction, knn.reference);
    const auto preds = knn_predict_multi(reduced.train, tr.labels, project(reduced.model, va.features), ks);
    for (std::size_t j = 0; j < ks.size(); ++j) {
      for (std::size_t i = 0; i < va.labels.size(); ++i) hits[j] += preds[j][i] == va.labels[i];
    }
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < ks.size(); ++j) {
    if (hits[j] > hits[best]) best = j;
  }
  return ks[best];
}

HoldoutScore train_and_score(const Dataset& train, const Dataset& test, std::optional<int> alpha,
                             const ReductionConfig& reduction, const KnnSelection& knn, std::uint64_t seed) {
  HoldoutScore s;
  if (knn.k) {
    check_k(*knn.k, train.num_samples());
    s.k = *knn.k;
  } else {
    s.k = select_k(train, alpha, reduction, knn, seed);
  }
  const auto reduced = reduce_train(train.features, train.labels, alpha, reduction, knn.reference);
  const auto preds = knn_predict(reduced.train, train.labels, project(reduced.model, test.features), KnnConfig{s.k});
  s.accuracy = accuracy_percent(preds, test.labels);
  s.out_dim = static_cast<int>(reduced.model.out_dim());
  return s;
}

PipelineResult run_protocol(const Dataset& d, std::optional<int> alpha, const ReductionConfig& reduction,
                            const KnnSelection& knn, const Protocol& protocol) {
  const auto all_folds = protocol_folds(d, protocol);
  PipelineResult result;
  result.partition_fingerprint = protocol_fingerprint(d, protocol);
  std::vector<double> scores;
  for (std::size_t r = 0; r < all_folds.size(); ++r) {
    const auto& folds = all_folds[r];
    for (std::size_t f = 0; f < folds.size(); ++f) {
      const auto train = d.subset(folds[f].train_rows);
      const auto test = d.subset(folds[f].validation_rows);
      const auto inner_seed = derive_seed(derive_seed(protocol.seed, r), 1000 + f);
      const auto s = train_and_score(train, test, alpha, reduction, knn, inner_seed);
      scores.push_back(s.accuracy);
      result.fold_k.push_back(s.k);
      result.fold_out_dim.push_back(s.out_dim);
    }
  }
  result.accuracy = AccuracyStat::from_scores(std::move(scores));
  return result;
}

}  // namespace

std::vector<std::vector<Fold>> protocol_folds(const Dataset& d, const Protocol& protocol) {
  if (protocol.repeats < 1) throw ConfigError("protocol: repeats must be >= 1");
  std::vector<std::vector<Fold>> out;
  for (int r = 0; r < protocol.repeats; ++r) {
    out.push_back(k_folds(d, protocol.folds, derive_seed(protocol.seed, static_cast<std::uint64_t>(r))));
  }
  return out;
}

std::uint64_t protocol_fingerprint(const Dataset& d, const Protocol& protocol) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& folds : protocol_folds(d, protocol)) h = partition_fingerprint(folds, h);
  return h;
}

PipelineResult evaluate_pipeline(const Dataset& d, int alpha, const ReductionConfig& reduction,
                                 const KnnSelection& knn, const Protocol& protocol) {
  return run_protocol(d, alpha, reduction, knn, protocol);
}

PipelineResult evaluate_classical(const Dataset& d, const ReductionConfig& reduction, const KnnSelection& knn,
                                  const Protocol& protocol) {
  return run_protocol(d, std::nullopt, reduction, knn, protocol);
}

HoldoutScore evaluate_holdout(const Dataset& train, const Dataset& test, int alpha, const ReductionConfig& reduction,
                              const KnnSelection& knn, std::uint64_t seed) {
  return train_and_score(train, test, alpha, reduction, knn, seed);
}

}  // namespace dcgkit
