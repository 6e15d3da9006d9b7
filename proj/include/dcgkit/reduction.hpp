#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace dcgkit {

enum class ReductionMethod { pca, srda };

std::string_view to_string(ReductionMethod method);
ReductionMethod parse_reduction_method(std::string_view text);

/// Linear map y = w * (x - center), w is m' x m.
struct ProjectionModel {
  ReductionMethod method = ReductionMethod::pca;
  Eigen::MatrixXd w;
  Eigen::VectorXd center;
  /// PCA only: all m covariance eigenvalues, non-increasing.
  Eigen::VectorXd eigenvalues;

  Eigen::Index out_dim() const noexcept { return w.rows(); }
  Eigen::Index in_dim() const noexcept { return w.cols(); }
};

struct ReductionConfig {
  ReductionMethod method = ReductionMethod::pca;
  /// nullopt selects automatically: PCA keeps `variance_threshold` of the
  /// variance, SRDA always yields Nc - 1 directions.
  std::optional<int> out_dim;
  double ridge_lambda = 0.01;
  double variance_threshold = 0.95;
};

/// Top `out_dim` principal directions of the sample covariance (N - 1
/// denominator). Each direction's largest-magnitude entry is made positive.
ProjectionModel fit_pca(const Eigen::MatrixXd& train, int out_dim);

/// Smallest m' whose leading eigenvalues hold at least `threshold` of the trace.
int pca_auto_dim(const Eigen::VectorXd& eigenvalues, double threshold, int rank_bound);

/// Spectral regression discriminant analysis.
///
/// The class indicator vectors are orthogonalized against the all-ones
/// vector (and each other); the vector that collapses to zero is dropped,
/// leaving Nc - 1 responses. Each response y gives one row of w by solving
/// (Xc^T Xc + lambda I) a = Xc^T y on the centered training matrix Xc.
ProjectionModel fit_srda(const Eigen::MatrixXd& train, std::span<const int> labels, double ridge_lambda);

ProjectionModel fit_reduction(const ReductionConfig& config, const Eigen::MatrixXd& train,
                              std::span<const int> labels);

Eigen::MatrixXd project(const ProjectionModel& model, const Eigen::MatrixXd& features);

// Text format, version 1:
//   dcgkit-projection 1
//   method <pca|srda>
//   shape <rows> <cols>
//   center <cols values>
//   eigenvalues <count> <values...>
//   w
//   <rows lines of cols values>
// Values are written with 17 significant digits so a round trip is exact.
std::string serialize_model(const ProjectionModel& model);
ProjectionModel parse_model(std::string_view text);
void save_model(const ProjectionModel& model, const std::filesystem::path& path);
ProjectionModel load_model(const std::filesystem::path& path);

}  // namespace dcgkit
