#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dcgkit/classify.hpp"
#include "dcgkit/dataset.hpp"
#include "dcgkit/dispel.hpp"
#include "dcgkit/reduction.hpp"
#include "dcgkit/search.hpp"

namespace dcgkit {

inline constexpr std::string_view kToolVersion = "0.3.0";
inline constexpr int kConfigFormatVersion = 1;
inline constexpr int kReportFormatVersion = 1;

struct DatasetSpec {
  std::filesystem::path path;
  std::string name;
  CsvOptions csv;
  bool standardize = false;
};

struct SearchSpec {
  SearchStrategy strategy = SearchStrategy::sga;
  int alpha_min = -10;
  int alpha_max = 80;
  std::uint64_t seed = 1;
  int hill_start = 0;
  int hill_max_steps = 100;
  int hill_restarts = 5;
  int sga_population = 20;
  int sga_generations = 30;
  double sga_mutation_rate = 0.05;
  double sga_crossover_rate = 0.9;
};

/// Additive Gaussian noise on floor(fraction * N * m) distinct cells; each
/// draw has standard deviation magnitude * (that column's sample std).
struct NoiseSpec {
  double fraction = 0.0;
  double magnitude = 0.0;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  ReductionConfig reduction;
  KnnSelection knn;
  Protocol protocol;
  SearchSpec search;
  std::optional<NoiseSpec> noise;
  std::vector<NoiseSpec> noise_levels;
  /// When > 0, a stratified holdout is set aside before the search and
  /// scored once at alpha 0 and at the selected alpha.
  double holdout_fraction = 0.0;
};

// Config files are flat "key = value" lines; '#' starts a comment. The first
// key must be "format_version = 1". Relative dataset paths resolve against
// the config file's directory. See README for the key list.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
/// Applies one "key = value" override on top of an existing config.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value,
                      const std::filesystem::path& base_dir = {});
/// Canonical ordered key/value form; formatting a parsed canonical config reproduces it.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& config);
std::string format_config(const ExperimentConfig& config);

Dataset load_experiment_dataset(const ExperimentConfig& config);

struct HoldoutReport {
  double baseline = 0.0;
  double dcg = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::string dataset_name;
  Eigen::Index samples = 0;
  Eigen::Index features = 0;
  int classes = 0;
  std::vector<std::string> class_names;
  std::size_t dropped_rows = 0;

  PipelineResult baseline;  // classical pipeline, no shifting stage
  PipelineResult dcg;       // pipeline at best_alpha
  int best_alpha = 0;
  AlphaOrigin alpha_origin = AlphaOrigin::grid;
  AlphaSearchTrace trace;
  int out_dim_used = 0;  // most frequent m' across folds at best_alpha
  int k_used = 0;        // most frequent k across folds at best_alpha
  std::uint64_t partition_fingerprint = 0;
  bool baseline_matches_alpha0 = false;
  std::optional<HoldoutReport> holdout;
  std::string timestamp;
};

nlohmann::json report_to_json(const ExperimentReport& report);
/// Pretty-printed report document, newline terminated.
std::string format_report(const ExperimentReport& report);

ExperimentReport run_comparison(const ExperimentConfig& config);
ExperimentReport run_comparison(const ExperimentConfig& config, const Dataset& data);

/// One row per integer alpha in [alpha_min, alpha_max].
std::vector<Evaluation> run_alpha_sweep(const ExperimentConfig& config, const Dataset& data, int alpha_min,
                                        int alpha_max);

Dataset inject_noise(const Dataset& d, double fraction, double magnitude, std::uint64_t seed);

struct NoiseLevelResult {
  NoiseSpec level;
  ExperimentReport report;
  double baseline_drop = 0.0;  // clean baseline mean - noisy baseline mean
  double dcg_drop = 0.0;       // clean dcg mean - noisy dcg mean
};

struct NoiseStudy {
  ExperimentReport clean;
  std::vector<NoiseLevelResult> levels;
};

NoiseStudy run_noise_study(const ExperimentConfig& config, const Dataset& data, const std::vector<NoiseSpec>& levels);
nlohmann::json noise_study_to_json(const NoiseStudy& study);

/// "alpha,min_pair_distance,in_lpmr" rows for every alpha in range.
std::string lpmr_table(const Eigen::MatrixXd& features, std::span<const int> labels, AlphaRange range);

/// Gaussian classes for tests and demos. Class c (1-based) is centered at
/// c * separation * direction, where direction is the unit all-ones vector
/// when `ones_direction` is set and a random unit vector otherwise.
struct SyntheticSpec {
  int classes = 2;
  int per_class = 40;
  int features = 4;
  double separation = 3.0;
  double spread = 1.0;
  bool ones_direction = false;
  std::uint64_t seed = 1;
};
Dataset synthetic_dataset(const SyntheticSpec& spec);

}  // namespace dcgkit
