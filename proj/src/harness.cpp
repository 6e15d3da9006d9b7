#include "dcgkit/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>
#include <numeric>
#include <sstream>

#include "dcgkit/errors.hpp"
#include "dcgkit/random.hpp"

namespace dcgkit {

Dataset load_experiment_dataset(const ExperimentConfig& config) {
  if (config.dataset.path.empty()) throw ConfigError("config: dataset.path is required");
  auto d = load_csv(config.dataset.path, config.dataset.csv);
  if (!config.dataset.name.empty()) d.name = config.dataset.name;
  if (config.dataset.standardize) d = standardize(d);
  if (config.noise) d = inject_noise(d, config.noise->fraction, config.noise->magnitude, config.noise->seed);
  return d;
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int most_frequent(const std::vector<int>& values) {
  std::map<int, int> counts;
  for (int v : values) ++counts[v];
  int best = 0, best_count = -1;
  for (auto [v, c] : counts) {
    if (c > best_count) {
      best = v;
      best_count = c;
    }
  }
  return best;
}

AlphaOrigin origin_of(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::grid: return AlphaOrigin::grid;
    case SearchStrategy::hill_climb: return AlphaOrigin::hill_climb;
    case SearchStrategy::sga: return AlphaOrigin::sga;
  }
  return AlphaOrigin::grid;
}

void validate(const ExperimentConfig& c) {
  if (c.protocol.folds < 2) throw ConfigError("config: protocol.folds must be >= 2");
  if (c.protocol.repeats < 1) throw ConfigError("config: protocol.repeats must be >= 1");
  if (c.search.alpha_min > c.search.alpha_max) throw ConfigError("config: search.alpha_min > search.alpha_max");
  if (c.holdout_fraction < 0.0 || c.holdout_fraction >= 1.0) {
    throw ConfigError("config: protocol.holdout_fraction must lie in [0,1)");
  }
  if (c.knn.inner_folds < 2 && !c.knn.k) throw ConfigError("config: knn.inner_folds must be >= 2");
}

AlphaSearchTrace run_search(const SearchSpec& s, const FitnessFn& fitness) {
  switch (s.strategy) {
    case SearchStrategy::grid: return grid_search(fitness, s.alpha_min, s.alpha_max);
    case SearchStrategy::hill_climb: {
      HillClimbConfig h;
      h.start_alpha = std::clamp(s.hill_start, s.alpha_min, s.alpha_max);
      h.max_steps = s.hill_max_steps;
      h.restarts = s.hill_restarts;
      h.alpha_min = s.alpha_min;
      h.alpha_max = s.alpha_max;
      h.seed = s.seed;
      return hill_climb(fitness, h);
    }
    case SearchStrategy::sga: {
      SgaConfig g;
      g.population = s.sga_population;
      g.generations = s.sga_generations;
      g.mutation_rate = s.sga_mutation_rate;
      g.crossover_rate = s.sga_crossover_rate;
      g.alpha_min = s.alpha_min;
      g.alpha_max = s.alpha_max;
      g.seed = s.seed;
      return sga_search(fitness, g);
    }
  }
  throw ConfigError("config: unknown search strategy");
}

/// Runs `fn`, prefixing any toolkit error with the stage name. The error
/// kind (and therefore the exit code) is kept.
template <typename Fn>
auto in_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), stage + ": " + e.what());
  }
}

nlohmann::json stat_json(const AccuracyStat& s) {
  return {{"mean", s.mean}, {"std_dev", s.std_dev}, {"fold_scores", s.fold_scores}};
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

ExperimentReport run_comparison(const ExperimentConfig& config) {
  const auto data = in_stage("load", [&] { return load_experiment_dataset(config); });
  return run_comparison(config, data);
}

ExperimentReport run_comparison(const ExperimentConfig& config, const Dataset& data) {
  in_stage("config", [&] { validate(config); });
  ExperimentReport report;
  report.config = config;
  report.dataset_name = data.name;
  report.samples = data.num_samples();
  report.features = data.num_features();
  report.classes = data.num_classes();
  report.class_names = data.encoding.class_names();
  report.dropped_rows = data.dropped_rows;

  std::optional<Split> split;
  if (config.holdout_fraction > 0.0) {
    split = in_stage("holdout split", [&] {
      return stratified_split(data, SplitSpec{1.0 - config.holdout_fraction, derive_seed(config.protocol.seed, 77)});
    });
  }
  const Dataset& dev = split ? split->train : data;

  std::map<int, PipelineResult> results;
  auto fitness = [&](int alpha) {
    auto r = in_stage("pipeline at alpha=" + std::to_string(alpha),
                      [&] { return evaluate_pipeline(dev, alpha, config.reduction, config.knn, config.protocol); });
    const double mean = r.accuracy.mean;
    results.emplace(alpha, std::move(r));
    return mean;
  };
  report.trace = in_stage("search", [&] { return run_search(config.search, fitness); });
  report.best_alpha = report.trace.best_alpha;
  report.alpha_origin = origin_of(config.search.strategy);
  report.dcg = results.at(report.best_alpha);
  report.baseline = in_stage("baseline", [&] { return evaluate_classical(dev, config.reduction, config.knn, config.protocol); });
  if (auto it = results.find(0); it != results.end()) {
    report.baseline_matches_alpha0 = it->second.accuracy == report.baseline.accuracy;
  }
  if (report.baseline.partition_fingerprint != report.dcg.partition_fingerprint) {
    throw NumericalError("comparison: baseline and shifted pipelines saw different partitions");
  }
  report.partition_fingerprint = report.baseline.partition_fingerprint;
  report.out_dim_used = most_frequent(report.dcg.fold_out_dim);
  report.k_used = most_frequent(report.dcg.fold_k);

  if (split) {
    const auto seed = derive_seed(config.protocol.seed, 78);
    HoldoutReport h;
    in_stage("holdout", [&] {
      h.baseline = evaluate_holdout(split->train, split->test, 0, config.reduction, config.knn, seed).accuracy;
      h.dcg = evaluate_holdout(split->train, split->test, report.best_alpha, config.reduction, config.knn, seed).accuracy;
    });
    h.train_size = split->train_rows.size();
    h.test_size = split->test_rows.size();
    report.holdout = h;
  }
  report.timestamp = utc_timestamp();
  return report;
}

nlohmann::json report_to_json(const ExperimentReport& r) {
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [k, v] : config_entries(r.config)) config[k] = v;
  nlohmann::json evals = nlohmann::json::array();
  for (const auto& e : r.trace.evaluations) evals.push_back({{"alpha", e.alpha}, {"accuracy", e.fitness}});

  nlohmann::json j;
  j["format"] = "dcgkit-report";
  j["format_version"] = kReportFormatVersion;
  j["tool_version"] = std::string(kToolVersion);
  j["timestamp"] = r.timestamp;
  j["config"] = config;
  j["dataset"] = {{"name", r.dataset_name},
                  {"samples", r.samples},
                  {"features", r.features},
                  {"classes", r.classes},
                  {"class_names", r.class_names},
                  {"dropped_rows", r.dropped_rows}};
  j["baseline"] = stat_json(r.baseline.accuracy);
  j["dcg"] = stat_json(r.dcg.accuracy);
  j["best_alpha"] = r.best_alpha;
  j["alpha_origin"] = std::string(to_string(r.alpha_origin));
  j["trace"] = {{"strategy", std::string(to_string(r.trace.strategy))},
                {"best_alpha", r.trace.best_alpha},
                {"best_fitness", r.trace.best_fitness},
                {"evaluations", evals}};
  j["metadata"] = {{"out_dim_used", r.out_dim_used},
                   {"k_used", r.k_used},
                   {"baseline_fold_k", r.baseline.fold_k},
                   {"dcg_fold_k", r.dcg.fold_k},
                   {"dcg_fold_out_dim", r.dcg.fold_out_dim},
                   {"partition_fingerprint", hex64(r.partition_fingerprint)},
                   {"baseline_matches_alpha0", r.baseline_matches_alpha0},
                   {"selection_protocol",
                    std::to_string(r.config.protocol.repeats) + "x" + std::to_string(r.config.protocol.folds) +
                        "-fold stratified cross-validation"}};
  if (r.holdout) {
    j["holdout"] = {{"baseline", r.holdout->baseline},
                    {"dcg", r.holdout->dcg},
                    {"train_size", r.holdout->train_size},
                    {"test_size", r.holdout->test_size}};
  }
  return j;
}

std::string format_report(const ExperimentReport& report) { return report_to_json(report).dump(2) + "\n"; }

std::vector<Evaluation> run_alpha_sweep(const ExperimentConfig& config, const Dataset& data, int alpha_min,
                                        int alpha_max) {
  validate(config);
  auto fitness = [&](int alpha) {
    return evaluate_pipeline(data, alpha, config.reduction, config.knn, config.protocol).accuracy.mean;
  };
  return grid_search(fitness, alpha_min, alpha_max).sorted();
}

Dataset inject_noise(const Dataset& d, double fraction, double magnitude, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw ConfigError("noise: fraction must lie in [0,1]");
  if (!(magnitude >= 0.0)) throw ConfigError("noise: magnitude must be >= 0");
  Dataset out = d;
  const auto n = d.num_samples();
  const auto m = d.num_features();
  const auto cells = static_cast<std::uint64_t>(n * m);
  const auto count = static_cast<std::uint64_t>(std::floor(fraction * static_cast<double>(cells)));
  if (count == 0) return out;

  Eigen::VectorXd col_sd(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double mean = d.features.col(j).mean();
    col_sd(j) = std::sqrt((d.features.col(j).array() - mean).square().sum() / static_cast<double>(n - 1));
  }
  Rng rng(seed);
  std::vector<std::uint64_t> idx(cells);
  std::iota(idx.begin(), idx.end(), std::uint64_t{0});
  for (std::uint64_t i = 0; i < count; ++i) {
    std::swap(idx[i], idx[i + uniform_index(rng, cells - i)]);
    const auto row = static_cast<Eigen::Index>(idx[i] / static_cast<std::uint64_t>(m));
    const auto col = static_cast<Eigen::Index>(idx[i] % static_cast<std::uint64_t>(m));
    out.features(row, col) += magnitude * col_sd(col) * standard_normal(rng);
  }
  return out;
}

NoiseStudy run_noise_study(const ExperimentConfig& config, const Dataset& data, const std::vector<NoiseSpec>& levels) {
  if (levels.empty()) throw ConfigError("noise study: no levels given");
  NoiseStudy study;
  study.clean = run_comparison(config, data);
  for (const auto& level : levels) {
    NoiseLevelResult r;
    r.level = level;
    r.report = run_comparison(config, inject_noise(data, level.fraction, level.magnitude, level.seed));
    r.baseline_drop = study.clean.baseline.accuracy.mean - r.report.baseline.accuracy.mean;
    r.dcg_drop = study.clean.dcg.accuracy.mean - r.report.dcg.accuracy.mean;
    study.levels.push_back(std::move(r));
  }
  return study;
}

nlohmann::json noise_study_to_json(const NoiseStudy& study) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : study.levels) {
    levels.push_back({{"fraction", l.level.fraction},
                      {"magnitude", l.level.magnitude},
                      {"seed", l.level.seed},
                      {"baseline_drop", l.baseline_drop},
                      {"dcg_drop", l.dcg_drop},
                      {"report", report_to_json(l.report)}});
  }
  return {{"format", "dcgkit-noise-study"},
          {"format_version", kReportFormatVersion},
          {"clean", report_to_json(study.clean)},
          {"levels", levels}};
}

std::string lpmr_table(const Eigen::MatrixXd& features, std::span<const int> labels, AlphaRange range) {
  if (range.lo > range.hi) throw ConfigError("lpmr: empty alpha range");
  const double baseline = separability(features, labels).min_pair_distance;
  std::ostringstream out;
  out << "alpha,min_pair_distance,in_lpmr\n";
  char buf[96];
  for (int a = range.lo; a <= range.hi; ++a) {
    const double d = separability(apply_dcg(features, labels, a), labels).min_pair_distance;
    std::snprintf(buf, sizeof buf, "%d,%.9g,%d\n", a, d, d < baseline ? 1 : 0);
    out << buf;
  }
  return out.str();
}

Dataset synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.classes < 2 || spec.per_class < 1 || spec.features < 1) {
    throw ConfigError("synthetic: need classes >= 2, per_class >= 1, features >= 1");
  }
  Rng rng(spec.seed);
  Eigen::VectorXd direction(spec.features);
  if (spec.ones_direction) {
    direction.setOnes();
  } else {
    for (Eigen::Index j = 0; j < direction.size(); ++j) direction(j) = standard_normal(rng);
  }
  direction.normalize();
  const auto n = static_cast<Eigen::Index>(spec.classes) * spec.per_class;
  Eigen::MatrixXd x(n, spec.features);
  std::vector<int> labels;
  for (int c = 1; c <= spec.classes; ++c) {
    for (int i = 0; i < spec.per_class; ++i) {
      const auto row = static_cast<Eigen::Index>(labels.size());
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        x(row, j) = c * spec.separation * direction(j) + spec.spread * standard_normal(rng);
      }
      labels.push_back(c);
    }
  }
  return make_dataset(std::move(x), std::move(labels), "synthetic");
}

}  // namespace dcgkit
