#include "dcgkit/dispel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "dcgkit/errors.hpp"

namespace dcgkit {

std::string_view to_string(AlphaOrigin origin) {
  switch (origin) {
    case AlphaOrigin::fixed: return "fixed";
    case AlphaOrigin::grid: return "grid";
    case AlphaOrigin::hill_climb: return "hill_climb";
    case AlphaOrigin::sga: return "sga";
  }
  return "fixed";
}

Eigen::MatrixXd apply_dcg(const Eigen::MatrixXd& features, std::span<const int> labels, int alpha) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw ShapeError("apply_dcg: " + std::to_string(features.rows()) + " rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  Eigen::MatrixXd out = features;
  if (alpha == 0) return out;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const auto shift = static_cast<double>(static_cast<std::int64_t>(alpha) * labels[static_cast<std::size_t>(i)]);
    out.row(i).array() -= shift;
  }
  return out;
}

namespace {

struct ClassMeans {
  std::vector<int> classes;
  Eigen::MatrixXd means;  // one row per class
};

ClassMeans class_means(const Eigen::MatrixXd& features, std::span<const int> labels) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw ShapeError("separability: " + std::to_string(features.rows()) + " rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  ClassMeans cm;
  cm.classes.assign(labels.begin(), labels.end());
  std::sort(cm.classes.begin(), cm.classes.end());
  cm.classes.erase(std::unique(cm.classes.begin(), cm.classes.end()), cm.classes.end());
  if (cm.classes.size() < 2) throw DegenerateInputError("separability: need at least 2 classes");

  const auto nc = static_cast<Eigen::Index>(cm.classes.size());
  cm.means = Eigen::MatrixXd::Zero(nc, features.cols());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(nc);
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const auto c = std::lower_bound(cm.classes.begin(), cm.classes.end(), labels[static_cast<std::size_t>(i)]) -
                   cm.classes.begin();
    cm.means.row(c) += features.row(i);
    counts(c) += 1.0;
  }
  for (Eigen::Index c = 0; c < nc; ++c) cm.means.row(c) /= counts(c);
  return cm;
}

}  // namespace

SeparabilityScore separability(const Eigen::MatrixXd& features, std::span<const int> labels) {
  const auto cm = class_means(features, labels);
  const auto nc = cm.means.rows();
  SeparabilityScore s;
  s.classes = cm.classes;
  s.per_pair = Eigen::MatrixXd::Zero(nc, nc);
  s.min_pair_distance = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < nc; ++a) {
    for (Eigen::Index b = a + 1; b < nc; ++b) {
      const double d = (cm.means.row(a) - cm.means.row(b)).norm();
      s.per_pair(a, b) = s.per_pair(b, a) = d;
      s.min_pair_distance = std::min(s.min_pair_distance, d);
    }
  }
  return s;
}

std::vector<int> scan_lpmr(const Eigen::MatrixXd& features, std::span<const int> labels, AlphaRange range) {
  if (range.lo > range.hi) throw ConfigError("scan_lpmr: empty alpha range");
  const double baseline = separability(features, labels).min_pair_distance;
  std::vector<int> out;
  for (int a = range.lo; a <= range.hi; ++a) {
    if (a == 0) continue;
    if (separability(apply_dcg(features, labels, a), labels).min_pair_distance < baseline) out.push_back(a);
  }
  return out;
}

int dispersion_threshold(const Eigen::MatrixXd& features, std::span<const int> labels) {
  const auto cm = class_means(features, labels);
  double max_norm = 0.0;
  int min_gap = std::numeric_limits<int>::max();
  for (std::size_t a = 0; a < cm.classes.size(); ++a) {
    for (std::size_t b = a + 1; b < cm.classes.size(); ++b) {
      max_norm = std::max(
          max_norm, (cm.means.row(static_cast<Eigen::Index>(a)) - cm.means.row(static_cast<Eigen::Index>(b))).norm());
      min_gap = std::min(min_gap, cm.classes[b] - cm.classes[a]);
    }
  }
  return static_cast<int>(std::ceil(max_norm / min_gap)) + 1;
}

std::map<int, Eigen::VectorXd> class_minima(const Eigen::MatrixXd& features, std::span<const int> labels) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw ShapeError("class_minima: row/label count mismatch");
  }
  std::map<int, Eigen::VectorXd> out;
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const int l = labels[static_cast<std::size_t>(i)];
    auto [it, inserted] = out.try_emplace(l, features.row(i).transpose());
    if (!inserted) it->second = it->second.cwiseMin(features.row(i).transpose());
  }
  return out;
}

double alpha_bound_value(const AlphaBoundParams& p, int alpha, int label) {
  const auto mins = p.class_minima.find(label);
  if (mins == p.class_minima.end()) {
    throw LookupError("alpha bound: no class minimum for label " + std::to_string(label));
  }
  const auto center = p.centers.find(label);
  if (center == p.centers.end()) {
    throw LookupError("alpha bound: no center for label " + std::to_string(label));
  }
  if (mins->second.size() != p.w_row.size()) throw ShapeError("alpha bound: w_row and class minimum differ in size");
  if (!(p.sigma > 0.0)) throw ConfigError("alpha bound: sigma must be positive");
  if (!(p.theta_min < p.theta_max)) throw ConfigError("alpha bound: theta_min must be below theta_max");

  const auto shift = static_cast<double>(static_cast<std::int64_t>(alpha) * label);
  const Eigen::VectorXd shifted = mins->second.array() - shift;
  const double residual = p.w_row.dot(shifted) - center->second;
  return residual * residual / (p.sigma * p.sigma);
}

bool validate_alpha_bound(const AlphaBoundParams& p, int alpha, int label) {
  const double v = alpha_bound_value(p, alpha, label);
  return p.theta_min < v && v < p.theta_max;
}

}  // namespace dcgkit
