#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dcgkit {

/// Fitness of a loop count, in percent (higher is better).
using FitnessFn = std::function<double(int)>;

enum class SearchStrategy { grid, hill_climb, sga };

std::string_view to_string(SearchStrategy s);
SearchStrategy parse_search_strategy(std::string_view text);

struct Evaluation {
  int alpha = 0;
  double fitness = 0.0;
  bool operator==(const Evaluation&) const = default;
};

/// True when `a` should be preferred over `b`: higher fitness, then smaller
/// |alpha|, then positive over negative.
bool preferred(const Evaluation& a, const Evaluation& b);

struct AlphaSearchTrace {
  std::vector<Evaluation> evaluations;  // each alpha once, in evaluation order
  int best_alpha = 0;
  double best_fitness = 0.0;
  SearchStrategy strategy = SearchStrategy::grid;

  /// Rows sorted by alpha.
  std::vector<Evaluation> sorted() const;
};

/// Two-column "alpha,accuracy_percent" table sorted by alpha.
std::string trace_table(const AlphaSearchTrace& trace);
std::string evaluations_table(const std::vector<Evaluation>& rows);

/// Caches fitness by alpha and records first-evaluation order.
class MemoizedFitness {
 public:
  explicit MemoizedFitness(FitnessFn fn) : fn_(std::move(fn)) {}
  double operator()(int alpha);
  AlphaSearchTrace finish(SearchStrategy strategy) const;
  std::size_t calls() const noexcept { return order_.size(); }

 private:
  FitnessFn fn_;
  std::map<int, double> cache_;
  std::vector<Evaluation> order_;
};

AlphaSearchTrace grid_search(const FitnessFn& fitness, int alpha_min, int alpha_max);

struct HillClimbConfig {
  int start_alpha = 0;
  int max_steps = 100;
  /// Total number of climbs; the first starts at start_alpha, the rest at
  /// uniform draws from [alpha_min, alpha_max].
  int restarts = 5;
  int alpha_min = -10;
  int alpha_max = 80;
  std::uint64_t seed = 1;
};

/// Steepest ascent over the +-1 neighborhood, moving only on strict
/// improvement. Alpha 0 is always evaluated.
AlphaSearchTrace hill_climb(const FitnessFn& fitness, const HillClimbConfig& config);

struct SgaConfig {
  int population = 20;
  int generations = 30;
  double mutation_rate = 0.05;
  double crossover_rate = 0.9;
  int alpha_min = -10;
  int alpha_max = 80;
  std::uint64_t seed = 1;
};

/// Simple genetic algorithm over the binary code of (alpha - alpha_min):
/// size-2 tournaments, single-point crossover, per-bit mutation, one elite.
/// Codes past alpha_max wrap modulo the range width. The initial population
/// always contains alpha 0.
AlphaSearchTrace sga_search(const FitnessFn& fitness, const SgaConfig& config);

}  // namespace dcgkit
