#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace dcgkit {

/// Maps raw class strings onto 1..Nc in sorted string order.
class LabelEncoding {
 public:
  LabelEncoding() = default;
  /// Builds the encoding from the distinct values in `raw` (duplicates allowed).
  static LabelEncoding from_raw(std::span<const std::string> raw);
  /// Wraps an already-ordered list of class names.
  static LabelEncoding from_names(std::vector<std::string> sorted_names);

  int encode(std::string_view name) const;
  const std::string& decode(int label) const;
  int num_classes() const noexcept { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& class_names() const noexcept { return names_; }

  bool operator==(const LabelEncoding&) const = default;

 private:
  std::vector<std::string> names_;
};

/// Feature matrix (one sample per row) with integer labels in 1..Nc.
///
/// Datasets built through `make_dataset` or `load_csv` satisfy the full
/// invariant set (every label in 1..Nc appears). Row subsets keep the parent's
/// encoding and label values, so a fold may be missing a class.
struct Dataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  LabelEncoding encoding;
  std::string name;
  /// Rows removed at load time by the missing-value policy.
  std::size_t dropped_rows = 0;

  Eigen::Index num_samples() const noexcept { return features.rows(); }
  Eigen::Index num_features() const noexcept { return features.cols(); }
  int num_classes() const noexcept { return encoding.num_classes(); }

  Dataset subset(std::span<const std::size_t> rows) const;
};

/// Validates and assembles a dataset; labels must already be 1..Nc with no gaps.
Dataset make_dataset(Eigen::MatrixXd features, std::vector<int> labels, std::string name = {},
                     LabelEncoding encoding = {});

/// Rows indexed per class: result[c - 1] holds the row indices with label c.
std::vector<std::vector<std::size_t>> rows_by_class(std::span<const int> labels, int num_classes);

using ColumnSelector = std::variant<std::size_t, std::string>;

enum class MissingPolicy { drop_row, error };

struct CsvOptions {
  ColumnSelector label_column = std::size_t{0};
  std::vector<ColumnSelector> drop_columns;
  MissingPolicy missing_policy = MissingPolicy::drop_row;
  bool has_header = false;
};

/// Parses comma-separated text. Empty cells, "?", "NA" and non-finite values
/// count as missing.
Dataset parse_csv(std::string_view text, const CsvOptions& options, std::string name = {});
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options);

/// Column-wise z-scoring; constant columns are only centered.
Dataset standardize(const Dataset& d);

struct SplitSpec {
  double train_fraction = 0.7;
  std::uint64_t seed = 1;
  bool stratified = true;
};

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_rows;  // ascending
  std::vector<std::size_t> test_rows;   // ascending
};

Split stratified_split(const Dataset& d, const SplitSpec& spec);

struct Fold {
  std::vector<std::size_t> train_rows;       // ascending
  std::vector<std::size_t> validation_rows;  // ascending
};

/// Stratified k-fold partition. Each class is shuffled and dealt round-robin
/// across folds, continuing from where the previous class stopped, so fold
/// sizes differ by at most one even when a class has fewer than k members.
std::vector<Fold> k_folds(const Dataset& d, int k, std::uint64_t seed);
std::vector<Fold> k_folds(std::span<const int> labels, int num_classes, int k, std::uint64_t seed);

/// FNV-1a digest of fold assignments; equal digests mean identical partitions.
std::uint64_t partition_fingerprint(std::span<const Fold> folds, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace dcgkit
