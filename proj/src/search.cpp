#include "dcgkit/search.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "dcgkit/errors.hpp"
#include "dcgkit/random.hpp"

namespace dcgkit {

std::string_view to_string(SearchStrategy s) {
  switch (s) {
    case SearchStrategy::grid: return "grid";
    case SearchStrategy::hill_climb: return "hill_climb";
    case SearchStrategy::sga: return "sga";
  }
  return "grid";
}

SearchStrategy parse_search_strategy(std::string_view text) {
  if (text == "grid") return SearchStrategy::grid;
  if (text == "hill_climb" || text == "hill") return SearchStrategy::hill_climb;
  if (text == "sga") return SearchStrategy::sga;
  throw ConfigError("unknown search strategy '" + std::string(text) + "' (expected grid, hill_climb or sga)");
}

bool preferred(const Evaluation& a, const Evaluation& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  const int aa = std::abs(a.alpha), ab = std::abs(b.alpha);
  if (aa != ab) return aa < ab;
  return a.alpha > b.alpha;
}

std::vector<Evaluation> AlphaSearchTrace::sorted() const {
  auto rows = evaluations;
  std::sort(rows.begin(), rows.end(), [](const Evaluation& a, const Evaluation& b) { return a.alpha < b.alpha; });
  return rows;
}

std::string evaluations_table(const std::vector<Evaluation>& rows) {
  std::ostringstream out;
  out << "alpha,accuracy_percent\n";
  char buf[64];
  for (const auto& e : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.6f\n", e.alpha, e.fitness);
    out << buf;
  }
  return out.str();
}

std::string trace_table(const AlphaSearchTrace& trace) { return evaluations_table(trace.sorted()); }

double MemoizedFitness::operator()(int alpha) {
  if (auto it = cache_.find(alpha); it != cache_.end()) return it->second;
  const double f = fn_(alpha);
  cache_.emplace(alpha, f);
  order_.push_back({alpha, f});
  return f;
}

AlphaSearchTrace MemoizedFitness::finish(SearchStrategy strategy) const {
  AlphaSearchTrace t;
  t.strategy = strategy;
  t.evaluations = order_;
  if (order_.empty()) return t;
  Evaluation best = order_.front();
  for (const auto& e : order_) {
    if (preferred(e, best)) best = e;
  }
  t.best_alpha = best.alpha;
  t.best_fitness = best.fitness;
  return t;
}

AlphaSearchTrace grid_search(const FitnessFn& fitness, int alpha_min, int alpha_max) {
  if (alpha_min > alpha_max) throw ConfigError("grid_search: alpha_min > alpha_max");
  MemoizedFitness memo(fitness);
  for (int a = alpha_min; a <= alpha_max; ++a) memo(a);
  return memo.finish(SearchStrategy::grid);
}

AlphaSearchTrace hill_climb(const FitnessFn& fitness, const HillClimbConfig& config) {
  if (config.max_steps < 1) throw ConfigError("hill_climb: max_steps must be >= 1");
  if (config.restarts < 1) throw ConfigError("hill_climb: restarts must be >= 1");
  if (config.alpha_min > config.alpha_max) throw ConfigError("hill_climb: alpha_min > alpha_max");
  if (config.start_alpha < config.alpha_min || config.start_alpha > config.alpha_max) {
    throw ConfigError("hill_climb: start_alpha outside bounds");
  }
  MemoizedFitness memo(fitness);
  memo(0);
  Rng rng(config.seed);
  const auto width = static_cast<std::uint64_t>(config.alpha_max - config.alpha_min) + 1;
  for (int r = 0; r < config.restarts; ++r) {
    int current = r == 0 ? config.start_alpha : config.alpha_min + static_cast<int>(uniform_index(rng, width));
    double current_fit = memo(current);
    for (int step = 0; step < config.max_steps; ++step) {
      bool have = false;
      Evaluation best{};
      for (int candidate : {current - 1, current + 1}) {
        if (candidate < config.alpha_min || candidate > config.alpha_max) continue;
        const Evaluation e{candidate, memo(candidate)};
        if (!have || preferred(e, best)) best = e;
        have = true;
      }
      if (!have || !(best.fitness > current_fit)) break;
      current = best.alpha;
      current_fit = best.fitness;
    }
  }
  return memo.finish(SearchStrategy::hill_climb);
}

AlphaSearchTrace sga_search(const FitnessFn& fitness, const SgaConfig& config) {
  if (config.population < 2) throw ConfigError("sga: population must be >= 2");
  if (config.generations < 0) throw ConfigError("sga: generations must be >= 0");
  if (!(config.alpha_min <= 0 && 0 <= config.alpha_max)) {
    throw ConfigError("sga: bounds must contain 0 (alpha_min <= 0 <= alpha_max)");
  }
  if (config.mutation_rate < 0.0 || config.mutation_rate > 1.0 || config.crossover_rate < 0.0 ||
      config.crossover_rate > 1.0) {
    throw ConfigError("sga: rates must lie in [0,1]");
  }
  const auto width = static_cast<std::uint64_t>(config.alpha_max - config.alpha_min) + 1;
  const int bits = std::max(1, static_cast<int>(std::bit_width(width - 1)));
  auto decode = [&](std::uint64_t code) { return config.alpha_min + static_cast<int>(code % width); };

  MemoizedFitness memo(fitness);
  Rng rng(config.seed);
  std::vector<std::uint64_t> pop;
  pop.push_back(static_cast<std::uint64_t>(-config.alpha_min));
  while (pop.size() < static_cast<std::size_t>(config.population)) pop.push_back(uniform_index(rng, width));

  auto eval = [&](std::uint64_t code) { return Evaluation{decode(code), memo(decode(code))}; };
  auto tournament = [&]() {
    const auto a = pop[uniform_index(rng, pop.size())];
    const auto b = pop[uniform_index(rng, pop.size())];
    return preferred(eval(b), eval(a)) ? b : a;
  };
  auto mutate = [&](std::uint64_t code) {
    for (int b = 0; b < bits; ++b) {
      if (uniform_unit(rng) < config.mutation_rate) code ^= std::uint64_t{1} << b;
    }
    return code;
  };

  for (auto c : pop) eval(c);
  for (int g = 0; g < config.generations; ++g) {
    auto elite = pop.front();
    for (auto c : pop) {
      if (preferred(eval(c), eval(elite))) elite = c;
    }
    std::vector<std::uint64_t> next{elite};
    while (next.size() < pop.size()) {
      auto p1 = tournament();
      auto p2 = tournament();
      if (bits >= 2 && uniform_unit(rng) < config.crossover_rate) {
        const int point = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(bits - 1)));
        const std::uint64_t low = (std::uint64_t{1} << point) - 1;
        const auto c1 = (p1 & ~low) | (p2 & low);
        const auto c2 = (p2 & ~low) | (p1 & low);
        p1 = c1;
        p2 = c2;
      }
      next.push_back(mutate(p1));
      if (next.size() < pop.size()) next.push_back(mutate(p2));
    }
    pop = std::move(next);
    for (auto c : pop) eval(c);
  }
  return memo.finish(SearchStrategy::sga);
}

}  // namespace dcgkit
