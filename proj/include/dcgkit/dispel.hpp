#pragma once

#include <map>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dcgkit {

/// How a loop count was chosen.
enum class AlphaOrigin { fixed, grid, hill_climb, sga };

std::string_view to_string(AlphaOrigin origin);

/// Number of dispelling loops; zero is the identity transform and negative
/// values move classes the opposite way.
struct DcgParams {
  int alpha = 0;
  AlphaOrigin origin = AlphaOrigin::fixed;
};

/// Shifts every feature of sample i by -alpha * labels[i].
///
/// Subtracting the label alpha times is the same as one subtraction of
/// alpha * label; the shift is formed in integer arithmetic so it is exact.
Eigen::MatrixXd apply_dcg(const Eigen::MatrixXd& features, std::span<const int> labels, int alpha);

/// Pairwise Euclidean distances between class means.
struct SeparabilityScore {
  double min_pair_distance = 0.0;
  Eigen::MatrixXd per_pair;  // indexed like `classes`
  std::vector<int> classes;  // distinct labels present, ascending
};

SeparabilityScore separability(const Eigen::MatrixXd& features, std::span<const int> labels);

struct AlphaRange {
  int lo = 0;
  int hi = 0;
};

/// Loop counts whose min_pair_distance is strictly below the untransformed one.
std::vector<int> scan_lpmr(const Eigen::MatrixXd& features, std::span<const int> labels, AlphaRange range);

/// Smallest integer T such that min_pair_distance is strictly increasing for
/// every alpha >= T: ceil(max mean-difference norm / min label gap) + 1.
int dispersion_threshold(const Eigen::MatrixXd& features, std::span<const int> labels);

/// Parameters of the admissible-range check
///   theta_min < (w . (m_label - alpha * label * 1) - C_label)^2 / sigma^2 < theta_max
struct AlphaBoundParams {
  Eigen::VectorXd w_row;
  double sigma = 1.0;
  double theta_min = 0.0;
  double theta_max = 1.0;
  std::map<int, Eigen::VectorXd> class_minima;
  std::map<int, double> centers;
};

/// Per-class column minima, keyed by label.
std::map<int, Eigen::VectorXd> class_minima(const Eigen::MatrixXd& features, std::span<const int> labels);

double alpha_bound_value(const AlphaBoundParams& p, int alpha, int label);
bool validate_alpha_bound(const AlphaBoundParams& p, int alpha, int label);

}  // namespace dcgkit
