// dcgtool: command-line front end for the comparison harness.
//
//   dcgtool compare --config exp.cfg [--output report.json]
//   dcgtool sweep   --config exp.cfg --alpha-min 1 --alpha-max 30 [--output sweep.csv]
//   dcgtool noise   --config exp.cfg [--levels 0.1:1,0.2:1] [--output study.json]
//   dcgtool lpmr    --config exp.cfg --alpha-min -10 --alpha-max 10
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 numerical failure.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dcgkit/errors.hpp"
#include "dcgkit/harness.hpp"

using namespace dcgkit;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> alpha_min;
  std::optional<int> alpha_max;
  std::optional<std::string> strategy;
  std::string output;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, Common& c, bool with_strategy) {
  cmd->add_option("-c,--config", c.config, "experiment config file")->required();
  cmd->add_option("--seed", c.seed, "override protocol.seed and search.seed");
  cmd->add_option("--alpha-min", c.alpha_min, "override search.alpha_min");
  cmd->add_option("--alpha-max", c.alpha_max, "override search.alpha_max");
  if (with_strategy) cmd->add_option("--strategy", c.strategy, "override search.strategy (grid|hill_climb|sga)");
  cmd->add_option("-o,--output", c.output, "output path (default: stdout)");
  cmd->add_option("--set", c.sets, "extra key=value override, repeatable");
}

ExperimentConfig resolve(const Common& c) {
  auto cfg = load_config(c.config);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1), std::filesystem::current_path());
  }
  if (c.seed) {
    cfg.protocol.seed = *c.seed;
    cfg.search.seed = *c.seed;
  }
  if (c.alpha_min) cfg.search.alpha_min = *c.alpha_min;
  if (c.alpha_max) cfg.search.alpha_max = *c.alpha_max;
  if (c.strategy) cfg.search.strategy = parse_search_strategy(*c.strategy);
  return cfg;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
}

void summary(const ExperimentReport& r) {
  std::fprintf(stderr, "%s: N=%lld m=%lld Nc=%d  baseline %.2f +- %.2f  dcg %.2f +- %.2f at alpha=%d (m'=%d, k=%d)\n",
               r.dataset_name.c_str(), static_cast<long long>(r.samples), static_cast<long long>(r.features),
               r.classes, r.baseline.accuracy.mean, r.baseline.accuracy.std_dev, r.dcg.accuracy.mean,
               r.dcg.accuracy.std_dev, r.best_alpha, r.out_dim_used, r.k_used);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dispelling-classes preprocessing: compare, sweep, noise and LPMR tools"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Common compare_opts, sweep_opts, noise_opts, lpmr_opts;
  std::string levels;

  auto* compare = app.add_subcommand("compare", "baseline vs shifted pipeline at the searched alpha");
  add_common(compare, compare_opts, true);
  auto* sweep = app.add_subcommand("sweep", "accuracy for every integer alpha in the bounds");
  add_common(sweep, sweep_opts, false);
  auto* noise = app.add_subcommand("noise", "paired accuracy drops under injected noise");
  add_common(noise, noise_opts, true);
  noise->add_option("--levels", levels, "fraction:magnitude list, overrides noise.levels");
  auto* lpmr = app.add_subcommand("lpmr", "class-mean separability per alpha, flagging the problem range");
  add_common(lpmr, lpmr_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ErrorKind::config);
  }

  try {
    if (compare->parsed()) {
      const auto cfg = resolve(compare_opts);
      const auto report = run_comparison(cfg);
      summary(report);
      emit(compare_opts.output, format_report(report));
    } else if (sweep->parsed()) {
      const auto cfg = resolve(sweep_opts);
      const auto data = load_experiment_dataset(cfg);
      emit(sweep_opts.output, evaluations_table(run_alpha_sweep(cfg, data, cfg.search.alpha_min, cfg.search.alpha_max)));
    } else if (noise->parsed()) {
      auto cfg = resolve(noise_opts);
      if (!levels.empty()) set_config_value(cfg, "noise.levels", levels);
      if (cfg.noise_levels.empty()) throw ConfigError("noise: no levels (set noise.levels or --levels)");
      // the study injects its own noise; a single noise block would stack on top
      auto clean_cfg = cfg;
      clean_cfg.noise.reset();
      const auto data = load_experiment_dataset(clean_cfg);
      const auto study = run_noise_study(cfg, data, cfg.noise_levels);
      for (const auto& l : study.levels) {
        std::fprintf(stderr, "fraction %.3g magnitude %.3g: baseline drop %.3f, dcg drop %.3f\n", l.level.fraction,
                     l.level.magnitude, l.baseline_drop, l.dcg_drop);
      }
      emit(noise_opts.output, noise_study_to_json(study).dump(2) + "\n");
    } else if (lpmr->parsed()) {
      const auto cfg = resolve(lpmr_opts);
      const auto data = load_experiment_dataset(cfg);
      emit(lpmr_opts.output, lpmr_table(data.features, data.labels, {cfg.search.alpha_min, cfg.search.alpha_max}));
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "dcgtool: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dcgtool: unexpected failure: %s\n", e.what());
    return static_cast<int>(ErrorKind::numerical);
  }
  return 0;
}
