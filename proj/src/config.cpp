#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dcgkit/errors.hpp"
#include "dcgkit/harness.hpp"

namespace dcgkit {

namespace {

std::string_view strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  if (strip(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(strip(s.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("config: '" + std::string(key) + "' expects an integer, got '" + std::string(value) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("config: '" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw ConfigError("config: '" + std::string(key) + "' expects true/false, got '" + std::string(value) + "'");
}

ColumnSelector parse_column(std::string_view value) {
  std::size_t idx = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, idx);
  if (ec == std::errc{} && ptr == end) return idx;
  return std::string(value);
}

std::string column_text(const ColumnSelector& c) {
  if (const auto* i = std::get_if<std::size_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string real_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest text that round-trips.
  for (int prec = 1; prec <= 17; ++prec) {
    char tmp[40];
    std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) return tmp;
  }
  return buf;
}

NoiseSpec parse_level(std::string_view key, std::string_view item, std::uint64_t seed) {
  const auto colon = item.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("config: '" + std::string(key) + "' entries are fraction:magnitude, got '" + std::string(item) +
                      "'");
  }
  NoiseSpec n;
  n.fraction = parse_double(key, strip(item.substr(0, colon)));
  n.magnitude = parse_double(key, strip(item.substr(colon + 1)));
  n.seed = seed;
  return n;
}

}  // namespace

void set_config_value(ExperimentConfig& c, std::string_view key, std::string_view value,
                      const std::filesystem::path& base_dir) {
  value = strip(value);
  auto& ds = c.dataset;
  auto& se = c.search;
  if (key == "format_version") {
    if (parse_integer<int>(key, value) != kConfigFormatVersion) {
      throw ConfigError("config: unsupported format_version " + std::string(value));
    }
  } else if (key == "dataset.path") {
    std::filesystem::path p{std::string(value)};
    ds.path = p.is_relative() && !base_dir.empty() ? (base_dir / p).lexically_normal() : p;
  } else if (key == "dataset.name") {
    ds.name = std::string(value);
  } else if (key == "dataset.label_column") {
    ds.csv.label_column = parse_column(value);
  } else if (key == "dataset.header") {
    ds.csv.has_header = parse_bool(key, value);
  } else if (key == "dataset.drop_columns") {
    ds.csv.drop_columns.clear();
    for (auto item : split_list(value)) ds.csv.drop_columns.push_back(parse_column(item));
  } else if (key == "dataset.missing_policy") {
    if (value == "drop_row") {
      ds.csv.missing_policy = MissingPolicy::drop_row;
    } else if (value == "error") {
      ds.csv.missing_policy = MissingPolicy::error;
    } else {
      throw ConfigError("config: dataset.missing_policy must be drop_row or error");
    }
  } else if (key == "dataset.standardize") {
    ds.standardize = parse_bool(key, value);
  } else if (key == "reduction.method") {
    c.reduction.method = parse_reduction_method(value);
  } else if (key == "reduction.out_dim") {
    c.reduction.out_dim = value == "auto" ? std::nullopt : std::optional<int>(parse_integer<int>(key, value));
  } else if (key == "reduction.ridge_lambda") {
    c.reduction.ridge_lambda = parse_double(key, value);
  } else if (key == "reduction.variance_threshold") {
    c.reduction.variance_threshold = parse_double(key, value);
  } else if (key == "knn.k") {
    c.knn.k = value == "auto" ? std::nullopt : std::optional<int>(parse_integer<int>(key, value));
  } else if (key == "knn.reference") {
    c.knn.reference = parse_knn_reference(value);
  } else if (key == "knn.candidates") {
    c.knn.candidates.clear();
    for (auto item : split_list(value)) c.knn.candidates.push_back(parse_integer<int>(key, item));
  } else if (key == "knn.inner_folds") {
    c.knn.inner_folds = parse_integer<int>(key, value);
  } else if (key == "protocol.folds") {
    c.protocol.folds = parse_integer<int>(key, value);
  } else if (key == "protocol.repeats") {
    c.protocol.repeats = parse_integer<int>(key, value);
  } else if (key == "protocol.seed") {
    c.protocol.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "protocol.holdout_fraction") {
    c.holdout_fraction = parse_double(key, value);
  } else if (key == "search.strategy") {
    se.strategy = parse_search_strategy(value);
  } else if (key == "search.alpha_min") {
    se.alpha_min = parse_integer<int>(key, value);
  } else if (key == "search.alpha_max") {
    se.alpha_max = parse_integer<int>(key, value);
  } else if (key == "search.seed") {
    se.seed = parse_integer<std::uint64_t>(key, value);
  } else if (key == "search.hill.start") {
    se.hill_start = parse_integer<int>(key, value);
  } else if (key == "search.hill.max_steps") {
    se.hill_max_steps = parse_integer<int>(key, value);
  } else if (key == "search.hill.restarts") {
    se.hill_restarts = parse_integer<int>(key, value);
  } else if (key == "search.sga.population") {
    se.sga_population = parse_integer<int>(key, value);
  } else if (key == "search.sga.generations") {
    se.sga_generations = parse_integer<int>(key, value);
  } else if (key == "search.sga.mutation_rate") {
    se.sga_mutation_rate = parse_double(key, value);
  } else if (key == "search.sga.crossover_rate") {
    se.sga_crossover_rate = parse_double(key, value);
  } else if (key == "noise.fraction" || key == "noise.magnitude" || key == "noise.seed") {
    if (!c.noise) c.noise = NoiseSpec{};
    if (key == "noise.fraction") c.noise->fraction = parse_double(key, value);
    if (key == "noise.magnitude") c.noise->magnitude = parse_double(key, value);
    if (key == "noise.seed") {
      c.noise->seed = parse_integer<std::uint64_t>(key, value);
      for (auto& l : c.noise_levels) l.seed = c.noise->seed;
    }
  } else if (key == "noise.levels") {
    c.noise_levels.clear();
    const std::uint64_t seed = c.noise ? c.noise->seed : 1;
    for (auto item : split_list(value)) c.noise_levels.push_back(parse_level(key, item, seed));
  } else {
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
  }
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  bool saw_version = false;
  std::size_t start = 0, line_no = 0;
  while (start <= text.size()) {
    ++line_no;
    const auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config: line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const auto key = strip(line.substr(0, eq));
    if (!saw_version && key != "format_version") {
      throw ConfigError("config: first key must be format_version");
    }
    saw_version = true;
    set_config_value(c, key, line.substr(eq + 1), base_dir);
  }
  if (!saw_version) throw ConfigError("config: empty document (format_version missing)");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& c) {
  std::vector<std::pair<std::string, std::string>> e;
  auto add = [&e](std::string k, std::string v) { e.emplace_back(std::move(k), std::move(v)); };
  const auto& ds = c.dataset;
  const auto& se = c.search;
  add("format_version", std::to_string(kConfigFormatVersion));
  add("dataset.path", ds.path.generic_string());
  add("dataset.name", ds.name);
  add("dataset.label_column", column_text(ds.csv.label_column));
  add("dataset.header", ds.csv.has_header ? "true" : "false");
  std::string drops;
  for (const auto& d : ds.csv.drop_columns) drops += (drops.empty() ? "" : ",") + column_text(d);
  add("dataset.drop_columns", drops);
  add("dataset.missing_policy", ds.csv.missing_policy == MissingPolicy::drop_row ? "drop_row" : "error");
  add("dataset.standardize", ds.standardize ? "true" : "false");
  add("reduction.method", std::string(to_string(c.reduction.method)));
  add("reduction.out_dim", c.reduction.out_dim ? std::to_string(*c.reduction.out_dim) : "auto");
  add("reduction.ridge_lambda", real_text(c.reduction.ridge_lambda));
  add("reduction.variance_threshold", real_text(c.reduction.variance_threshold));
  add("knn.k", c.knn.k ? std::to_string(*c.knn.k) : "auto");
  add("knn.reference", std::string(to_string(c.knn.reference)));
  std::string cands;
  for (int k : c.knn.candidates) cands += (cands.empty() ? "" : ",") + std::to_string(k);
  add("knn.candidates", cands);
  add("knn.inner_folds", std::to_string(c.knn.inner_folds));
  add("protocol.folds", std::to_string(c.protocol.folds));
  add("protocol.repeats", std::to_string(c.protocol.repeats));
  add("protocol.seed", std::to_string(c.protocol.seed));
  add("protocol.holdout_fraction", real_text(c.holdout_fraction));
  add("search.strategy", std::string(to_string(se.strategy)));
  add("search.alpha_min", std::to_string(se.alpha_min));
  add("search.alpha_max", std::to_string(se.alpha_max));
  add("search.seed", std::to_string(se.seed));
  add("search.hill.start", std::to_string(se.hill_start));
  add("search.hill.max_steps", std::to_string(se.hill_max_steps));
  add("search.hill.restarts", std::to_string(se.hill_restarts));
  add("search.sga.population", std::to_string(se.sga_population));
  add("search.sga.generations", std::to_string(se.sga_generations));
  add("search.sga.mutation_rate", real_text(se.sga_mutation_rate));
  add("search.sga.crossover_rate", real_text(se.sga_crossover_rate));
  if (c.noise) {
    add("noise.fraction", real_text(c.noise->fraction));
    add("noise.magnitude", real_text(c.noise->magnitude));
    add("noise.seed", std::to_string(c.noise->seed));
  }
  if (!c.noise_levels.empty()) {
    std::string levels;
    for (const auto& l : c.noise_levels) {
      levels += (levels.empty() ? "" : ",") + real_text(l.fraction) + ":" + real_text(l.magnitude);
    }
    add("noise.levels", levels);
  }
  return e;
}

std::string format_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [k, v] : config_entries(config)) out += k + " = " + v + "\n";
  return out;
}

}  // namespace dcgkit
