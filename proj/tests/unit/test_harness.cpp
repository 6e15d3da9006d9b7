#include <algorithm>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "dcgkit/errors.hpp"
#include "dcgkit/harness.hpp"
#include "helpers.hpp"

using namespace dcgkit;

namespace {

const std::filesystem::path data_dir = DCGKIT_DATA_DIR;

ExperimentConfig quick_config() {
  ExperimentConfig c;
  c.protocol = {3, 1, 5};
  c.knn.k = 1;
  c.search.strategy = SearchStrategy::grid;
  c.search.alpha_min = -2;
  c.search.alpha_max = 4;
  return c;
}

Dataset quick_data(std::uint64_t seed = 1) {
  SyntheticSpec s;
  s.classes = 3;
  s.per_class = 15;
  s.features = 4;
  s.separation = 1.0;
  s.seed = seed;
  return synthetic_dataset(s);
}

std::string without_timestamp(ExperimentReport r) {
  r.timestamp.clear();
  return format_report(r);
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(
      "format_version = 1\n"
      "# comment line\n"
      "dataset.path = glass.csv\n"
      "dataset.label_column = 10\n"
      "dataset.drop_columns = 0\n"
      "reduction.method = srda   # trailing comment\n"
      "knn.k = 5\n"
      "search.strategy = hill\n"
      "search.alpha_max = 90\n"
      "noise.levels = 0.1:1, 0.2:0.5\n",
      "/data/sets");
  CHECK(c.dataset.path == std::filesystem::path("/data/sets/glass.csv"));
  CHECK(std::get<std::size_t>(c.dataset.csv.label_column) == 10);
  CHECK(c.dataset.csv.drop_columns.size() == 1);
  CHECK(c.reduction.method == ReductionMethod::srda);
  CHECK(c.knn.k == 5);
  CHECK(c.search.strategy == SearchStrategy::hill_climb);
  CHECK(c.search.alpha_max == 90);
  REQUIRE(c.noise_levels.size() == 2);
  CHECK(c.noise_levels[1].fraction == 0.2);
  CHECK(c.noise_levels[1].magnitude == 0.5);
  CHECK_FALSE(c.noise.has_value());
}

TEST_CASE("config defaults") {
  const auto c = parse_config("format_version = 1\n");
  CHECK(c.reduction.method == ReductionMethod::pca);
  CHECK(!c.reduction.out_dim);
  CHECK(c.reduction.ridge_lambda == 0.01);
  CHECK(!c.knn.k);
  CHECK(c.protocol.folds == 10);
  CHECK(c.protocol.repeats == 5);
  CHECK(c.search.strategy == SearchStrategy::sga);
  CHECK(c.search.alpha_min == -10);
  CHECK(c.search.alpha_max == 80);
  CHECK(c.search.sga_population == 20);
  CHECK(c.search.sga_generations == 30);
  CHECK(!c.dataset.standardize);
  CHECK(c.dataset.csv.missing_policy == MissingPolicy::drop_row);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config(""), ConfigError);
  CHECK_THROWS_AS(parse_config("dataset.path = x\nformat_version = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\nbogus.key = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\nknn.k = three\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\nreduction.method = lda\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\njust words\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("format_version = 1\nnoise.levels = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(load_config(data_dir / "missing.cfg"), ConfigError);
  try {
    parse_config("format_version = 1\nbogus = 1\n");
  } catch (const Error& e) {
    CHECK(e.exit_code() == 1);
  }
}

TEST_CASE("format_config round trips") {
  auto c = parse_config(
      "format_version = 1\ndataset.path = /x/y.csv\ndataset.label_column = cls\ndataset.header = true\n"
      "reduction.ridge_lambda = 0.125\nnoise.fraction = 0.1\nnoise.magnitude = 1\nnoise.seed = 9\n"
      "noise.levels = 0.05:1,0.1:2\nknn.candidates = 1,3,5\nprotocol.holdout_fraction = 0.3\n");
  const auto text = format_config(c);
  const auto again = parse_config(text);
  CHECK(format_config(again) == text);
  CHECK(again.noise->seed == 9);
  CHECK(again.noise_levels[0].seed == 9);
  CHECK(again.knn.candidates == std::vector<int>{1, 3, 5});
}

TEST_CASE("shipped dataset configs load") {
  for (const char* name : {"haberman.cfg", "glass.cfg", "breast-cancer-wisconsin.cfg"}) {
    CAPTURE(name);
    const auto c = load_config(data_dir / name);
    const auto d = load_experiment_dataset(c);
    CHECK(d.num_samples() > 0);
  }
  const auto lung = load_config(data_dir / "lung-cancer.cfg");
  CHECK(lung.dataset.path.filename() == "lung-cancer.csv");
}

TEST_CASE("comparison report invariants") {
  const auto cfg = quick_config();
  const auto d = quick_data();
  const auto r = run_comparison(cfg, d);
  CHECK(r.dcg.accuracy.mean >= r.baseline.accuracy.mean);
  CHECK(r.baseline_matches_alpha0);
  CHECK(r.dcg.accuracy.mean == r.trace.best_fitness);
  CHECK(r.best_alpha == r.trace.best_alpha);
  CHECK(r.alpha_origin == AlphaOrigin::grid);
  CHECK(r.samples == 45);
  CHECK(r.classes == 3);
  CHECK(r.k_used == 1);
  CHECK(r.partition_fingerprint == protocol_fingerprint(d, cfg.protocol));
  const auto zero = std::find_if(r.trace.evaluations.begin(), r.trace.evaluations.end(),
                                 [](const Evaluation& e) { return e.alpha == 0; });
  REQUIRE(zero != r.trace.evaluations.end());
  CHECK(zero->fitness == r.baseline.accuracy.mean);

  const auto j = report_to_json(r);
  CHECK(j["format"] == "dcgkit-report");
  CHECK(j["format_version"] == 1);
  CHECK(j["tool_version"] == std::string(kToolVersion));
  CHECK(j["config"]["search.alpha_max"] == "4");
  CHECK(j["metadata"]["partition_fingerprint"].get<std::string>().size() == 16);
  CHECK(j["trace"]["evaluations"].size() == 7);
  // the embedded config reproduces the run
  ExperimentConfig embedded;
  for (const auto& [k, v] : j["config"].items()) set_config_value(embedded, k, v.get<std::string>());
  CHECK(format_config(embedded) == format_config(cfg));
}

TEST_CASE("reports are byte-identical apart from the timestamp") {
  auto cfg = quick_config();
  cfg.search.strategy = SearchStrategy::sga;
  cfg.search.sga_generations = 3;
  cfg.search.sga_population = 6;
  const auto d = quick_data(2);
  CHECK(without_timestamp(run_comparison(cfg, d)) == without_timestamp(run_comparison(cfg, d)));
}

TEST_CASE("bounds [0,0] force identical stats") {
  auto cfg = quick_config();
  cfg.search.alpha_min = 0;
  cfg.search.alpha_max = 0;
  for (auto strategy : {SearchStrategy::grid, SearchStrategy::hill_climb, SearchStrategy::sga}) {
    cfg.search.strategy = strategy;
    const auto r = run_comparison(cfg, quick_data(3));
    CHECK(r.best_alpha == 0);
    CHECK(r.dcg.accuracy == r.baseline.accuracy);
  }
}

TEST_CASE("holdout block") {
  auto cfg = quick_config();
  cfg.holdout_fraction = 0.3;
  const auto r = run_comparison(cfg, quick_data(4));
  REQUIRE(r.holdout.has_value());
  CHECK(r.holdout->train_size + r.holdout->test_size == 45);
  CHECK(r.samples == 45);
  CHECK(report_to_json(r).contains("holdout"));
}

TEST_CASE("comparison errors name the stage and keep the exit code") {
  auto cfg = quick_config();
  cfg.reduction.method = ReductionMethod::srda;
  cfg.reduction.ridge_lambda = -1.0;
  try {
    run_comparison(cfg, quick_data());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.exit_code() == 1);
    CHECK(std::string(e.what()).find("pipeline at alpha=") != std::string::npos);
  }
  cfg = quick_config();
  cfg.dataset.path = data_dir / "nope.csv";
  try {
    run_comparison(cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.exit_code() == 2);
    CHECK(std::string(e.what()).rfind("load:", 0) == 0);
  }
  cfg = quick_config();
  cfg.search.alpha_min = 5;
  cfg.search.alpha_max = 1;
  CHECK_THROWS_AS(run_comparison(cfg, quick_data()), Error);
}

TEST_CASE("alpha sweep") {
  const auto cfg = quick_config();
  const auto d = quick_data(5);
  const auto rows = run_alpha_sweep(cfg, d, -1, 3);
  REQUIRE(rows.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(rows[static_cast<std::size_t>(i)].alpha == i - 1);
  const auto single = run_alpha_sweep(cfg, d, 0, 0);
  REQUIRE(single.size() == 1);
  CHECK(single[0].fitness == evaluate_classical(d, cfg.reduction, cfg.knn, cfg.protocol).accuracy.mean);
  CHECK(evaluations_table(rows) == evaluations_table(run_alpha_sweep(cfg, d, -1, 3)));
}

TEST_CASE("label-aligned offset: accuracy does not drop past the dispersion threshold") {
  // Holds for well-separated classes; with overlapping classes the k-NN
  // score fluctuates while the learned direction is still turning.
  auto cfg = quick_config();
  cfg.protocol = {5, 2, 3};
  cfg.reduction.out_dim = 1;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    SyntheticSpec s;
    s.classes = 2;
    s.per_class = 30;
    s.features = 3;
    s.separation = 5.0;
    s.ones_direction = true;
    s.seed = seed;
    const auto d = synthetic_dataset(s);
    const int t = dispersion_threshold(d.features, d.labels);
    const auto rows = run_alpha_sweep(cfg, d, t, t + 10);
    REQUIRE(rows.size() == 11);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].fitness >= rows[i - 1].fitness);
  }
}

TEST_CASE("noise injection") {
  Rng rng(7);
  const auto labels = testutil::random_labels(rng, 100, 2);
  const auto d = make_dataset(testutil::gaussian_matrix(rng, 100, 4), labels);
  CHECK(inject_noise(d, 0.0, 3.0, 1).features == d.features);
  CHECK(inject_noise(d, 1.0, 0.0, 1).features == d.features);

  const auto noisy = inject_noise(d, 0.25, 1.0, 1);
  CHECK(noisy.labels == d.labels);
  CHECK(noisy.features.rows() == 100);
  CHECK(noisy.features.cols() == 4);
  CHECK((noisy.features.array() != d.features.array()).count() == 100);
  CHECK(inject_noise(d, 0.25, 1.0, 1).features == noisy.features);
  CHECK(inject_noise(d, 0.25, 1.0, 2).features != noisy.features);

  CHECK_THROWS_AS(inject_noise(d, 1.5, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(inject_noise(d, 0.5, -1.0, 1), ConfigError);
}

TEST_CASE("property: noise touches exactly floor(f * N * m) cells") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5 + static_cast<int>(uniform_index(rng, 50));
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(uniform_index(rng, 6));
    const auto d = make_dataset(testutil::gaussian_matrix(rng, n, m), testutil::random_labels(rng, n, 2));
    const double f = uniform_unit(rng);
    const auto noisy = inject_noise(d, f, 0.5, rng());
    const auto expected = static_cast<Eigen::Index>(std::floor(f * static_cast<double>(n * m)));
    CHECK((noisy.features.array() != d.features.array()).count() == expected);
  }
}

TEST_CASE("noise study: zero levels give zero drops") {
  const auto cfg = quick_config();
  const auto d = quick_data(9);
  const auto study = run_noise_study(cfg, d, {{0.0, 1.0, 1}, {0.1, 0.0, 2}, {0.2, 1.0, 3}});
  REQUIRE(study.levels.size() == 3);
  CHECK(study.levels[0].baseline_drop == 0.0);
  CHECK(study.levels[0].dcg_drop == 0.0);
  CHECK(study.levels[1].baseline_drop == 0.0);
  CHECK(study.levels[1].dcg_drop == 0.0);
  const auto j = noise_study_to_json(study);
  CHECK(j["levels"].size() == 3);
  CHECK(j["format"] == "dcgkit-noise-study");
  CHECK_THROWS_AS(run_noise_study(cfg, d, {}), ConfigError);
}

TEST_CASE("lpmr table") {
  Eigen::MatrixXd x(2, 1);
  x << 5, 7;
  CHECK(lpmr_table(x, std::vector<int>{1, 2}, {1, 4}) ==
        "alpha,min_pair_distance,in_lpmr\n1,1,1\n2,0,1\n3,1,1\n4,2,0\n");
}

TEST_CASE("synthetic datasets") {
  SyntheticSpec s;
  s.classes = 4;
  s.per_class = 5;
  const auto a = synthetic_dataset(s);
  CHECK(a.num_samples() == 20);
  CHECK(a.num_classes() == 4);
  CHECK(synthetic_dataset(s).features == a.features);
  s.classes = 1;
  CHECK_THROWS_AS(synthetic_dataset(s), ConfigError);
}
