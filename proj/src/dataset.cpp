#include "dcgkit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "dcgkit/errors.hpp"
#include "dcgkit/random.hpp"

namespace dcgkit {

LabelEncoding LabelEncoding::from_raw(std::span<const std::string> raw) {
  std::set<std::string> distinct(raw.begin(), raw.end());
  return from_names({distinct.begin(), distinct.end()});
}

LabelEncoding LabelEncoding::from_names(std::vector<std::string> sorted_names) {
  if (!std::is_sorted(sorted_names.begin(), sorted_names.end()) ||
      std::adjacent_find(sorted_names.begin(), sorted_names.end()) != sorted_names.end()) {
    throw SchemaError("label encoding: class names must be sorted and distinct");
  }
  LabelEncoding e;
  e.names_ = std::move(sorted_names);
  return e;
}

int LabelEncoding::encode(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) {
    throw LookupError("unknown class '" + std::string(name) + "'");
  }
  return static_cast<int>(it - names_.begin()) + 1;
}

const std::string& LabelEncoding::decode(int label) const {
  if (label < 1 || label > num_classes()) {
    throw LookupError("label " + std::to_string(label) + " outside 1.." + std::to_string(num_classes()));
  }
  return names_[static_cast<std::size_t>(label - 1)];
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    if (r >= static_cast<std::size_t>(features.rows())) {
      throw ShapeError("subset: row " + std::to_string(r) + " out of range");
    }
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(r));
    out.labels.push_back(labels[r]);
  }
  out.encoding = encoding;
  out.name = name;
  return out;
}

Dataset make_dataset(Eigen::MatrixXd features, std::vector<int> labels, std::string name,
                     LabelEncoding encoding) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw ShapeError("dataset: " + std::to_string(features.rows()) + " feature rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  if (features.rows() < 2) throw SchemaError("dataset: need at least 2 samples");
  if (features.cols() < 1) throw SchemaError("dataset: need at least 1 feature");
  if (!features.allFinite()) throw SchemaError("dataset: non-finite feature value");

  const int max_label = *std::max_element(labels.begin(), labels.end());
  std::vector<bool> seen(static_cast<std::size_t>(std::max(max_label, 0)) + 1, false);
  for (int l : labels) {
    if (l < 1) throw SchemaError("dataset: labels must be >= 1, got " + std::to_string(l));
    seen[static_cast<std::size_t>(l)] = true;
  }
  for (int c = 1; c <= max_label; ++c) {
    if (!seen[static_cast<std::size_t>(c)]) {
      throw SchemaError("dataset: label " + std::to_string(c) + " never occurs (labels must be 1..Nc)");
    }
  }
  if (max_label < 2) throw SchemaError("dataset: need at least 2 classes");

  if (encoding.num_classes() == 0) {
    // Zero-padded decimal names sort in numeric order.
    const auto width = std::to_string(max_label).size();
    std::vector<std::string> names;
    for (int c = 1; c <= max_label; ++c) {
      auto digits = std::to_string(c);
      names.push_back(std::string(width - digits.size(), '0') + digits);
    }
    encoding = LabelEncoding::from_names(std::move(names));
  } else if (encoding.num_classes() != max_label) {
    throw SchemaError("dataset: encoding has " + std::to_string(encoding.num_classes()) +
                      " classes but labels reach " + std::to_string(max_label));
  }

  Dataset d;
  d.features = std::move(features);
  d.labels = std::move(labels);
  d.encoding = std::move(encoding);
  d.name = std::move(name);
  return d;
}

std::vector<std::vector<std::size_t>> rows_by_class(std::span<const int> labels, int num_classes) {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int l = labels[i];
    if (l < 1 || l > num_classes) throw LookupError("label " + std::to_string(l) + " outside 1..Nc");
    out[static_cast<std::size_t>(l - 1)].push_back(i);
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool is_missing_token(std::string_view cell) { return cell.empty() || cell == "?" || cell == "NA"; }

bool parse_real(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::size_t resolve_column(const ColumnSelector& sel, const std::vector<std::string>& header,
                           std::size_t num_columns, const char* what) {
  if (const auto* idx = std::get_if<std::size_t>(&sel)) {
    if (*idx >= num_columns) {
      throw SchemaError(std::string(what) + " column " + std::to_string(*idx) + " missing (file has " +
                        std::to_string(num_columns) + " columns)");
    }
    return *idx;
  }
  const auto& name = std::get<std::string>(sel);
  if (header.empty()) {
    throw SchemaError(std::string(what) + " column '" + name + "' given by name but the file has no header");
  }
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw SchemaError(std::string(what) + " column '" + name + "' not in header");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

Dataset parse_csv(std::string_view text, const CsvOptions& options, std::string name) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;  // (1-based line number, content)
  {
    std::size_t start = 0, line_no = 1;
    while (start <= text.size()) {
      auto nl = text.find('\n', start);
      auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
      if (!trim(line).empty()) lines.emplace_back(line_no, line);
      if (nl == std::string_view::npos) break;
      start = nl + 1;
      ++line_no;
    }
  }
  std::vector<std::string> header;
  std::size_t first = 0;
  if (options.has_header) {
    if (lines.empty()) throw ParseError("csv: missing header line");
    for (auto c : split_cells(lines[0].second)) header.emplace_back(c);
    first = 1;
  }
  if (lines.size() <= first) throw SchemaError("csv: no data rows");

  const std::size_t num_columns = options.has_header ? header.size() : split_cells(lines[first].second).size();
  const std::size_t label_col = resolve_column(options.label_column, header, num_columns, "label");
  std::vector<bool> is_feature(num_columns, true);
  is_feature[label_col] = false;
  for (const auto& sel : options.drop_columns) {
    const auto c = resolve_column(sel, header, num_columns, "drop");
    if (c == label_col) throw SchemaError("csv: label column cannot also be dropped");
    is_feature[c] = false;
  }
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < num_columns; ++c) {
    if (is_feature[c]) feature_cols.push_back(c);
  }
  if (feature_cols.empty()) throw SchemaError("csv: no feature columns remain");

  auto column_name = [&](std::size_t c) {
    return header.empty() ? "column " + std::to_string(c) : "column " + std::to_string(c) + " ('" + header[c] + "')";
  };

  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::size_t dropped = 0;
  for (std::size_t li = first; li < lines.size(); ++li) {
    const auto [line_no, line] = lines[li];
    const auto cells = split_cells(line);
    if (cells.size() != num_columns) {
      throw ParseError("csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " columns, expected " + std::to_string(num_columns));
    }
    bool bad = false;
    std::vector<double> row;
    row.reserve(feature_cols.size());
    for (auto c : feature_cols) {
      double v = 0.0;
      if (!parse_real(cells[c], v)) {
        if (options.missing_policy == MissingPolicy::error) {
          const char* why = is_missing_token(cells[c]) ? "missing value" : "non-numeric value";
          throw ParseError("csv: line " + std::to_string(line_no) + ", " + column_name(c) + ": " + why + " '" +
                           std::string(cells[c]) + "'");
        }
        bad = true;
        break;
      }
      row.push_back(v);
    }
    if (!bad && cells[label_col].empty()) {
      if (options.missing_policy == MissingPolicy::error) {
        throw ParseError("csv: line " + std::to_string(line_no) + ", " + column_name(label_col) + ": missing label");
      }
      bad = true;
    }
    if (bad) {
      ++dropped;
      continue;
    }
    values.insert(values.end(), row.begin(), row.end());
    raw_labels.emplace_back(cells[label_col]);
  }

  const auto n = static_cast<Eigen::Index>(raw_labels.size());
  const auto m = static_cast<Eigen::Index>(feature_cols.size());
  if (n < 2) throw SchemaError("csv: fewer than 2 usable rows");
  Eigen::MatrixXd features = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, m);

  auto encoding = LabelEncoding::from_raw(raw_labels);
  if (encoding.num_classes() < 2) {
    throw SchemaError("csv: fewer than 2 classes after load (found " + std::to_string(encoding.num_classes()) + ")");
  }
  std::vector<int> labels;
  labels.reserve(raw_labels.size());
  for (const auto& r : raw_labels) labels.push_back(encoding.encode(r));

  auto d = make_dataset(std::move(features), std::move(labels), std::move(name), std::move(encoding));
  d.dropped_rows = dropped;
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), options, path.stem().string());
}

Dataset standardize(const Dataset& d) {
  Dataset out = d;
  const auto n = d.features.rows();
  const Eigen::RowVectorXd mean = d.features.colwise().mean();
  out.features.rowwise() -= mean;
  for (Eigen::Index j = 0; j < out.features.cols(); ++j) {
    const double sd = std::sqrt(out.features.col(j).squaredNorm() / static_cast<double>(n - 1));
    if (sd > 0.0) out.features.col(j) /= sd;
  }
  return out;
}

Split stratified_split(const Dataset& d, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw ConfigError("split: train_fraction must lie in (0,1)");
  }
  Rng rng(spec.seed);
  std::vector<std::size_t> train, test;
  auto take = [&](std::vector<std::size_t> rows) {
    shuffle(std::span(rows), rng);
    const auto size = rows.size();
    auto n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(size) + 0.5));
    n_train = std::clamp<std::size_t>(n_train, 1, size - 1);
    train.insert(train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.insert(test.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  };
  if (spec.stratified) {
    for (auto& rows : rows_by_class(d.labels, d.num_classes())) {
      if (rows.size() < 2) {
        throw StratificationError("split: a class has " + std::to_string(rows.size()) +
                                  " sample(s); stratification needs at least 2");
      }
      take(std::move(rows));
    }
  } else {
    std::vector<std::size_t> all(d.labels.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    take(std::move(all));
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  Split s{d.subset(train), d.subset(test), std::move(train), std::move(test)};
  return s;
}

std::vector<Fold> k_folds(std::span<const int> labels, int num_classes, int k, std::uint64_t seed) {
  const auto n = labels.size();
  if (k < 2) throw FoldError("k_folds: k must be >= 2");
  if (static_cast<std::size_t>(k) > n) {
    throw FoldError("k_folds: k=" + std::to_string(k) + " exceeds sample count " + std::to_string(n));
  }
  Rng rng(seed);
  std::vector<int> fold_of(n, -1);
  std::size_t dealt = 0;
  for (auto& rows : rows_by_class(labels, num_classes)) {
    shuffle(std::span(rows), rng);
    for (auto r : rows) fold_of[r] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
  }
  std::vector<Fold> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    for (int f = 0; f < k; ++f) {
      auto& fold = folds[static_cast<std::size_t>(f)];
      (fold_of[i] == f ? fold.validation_rows : fold.train_rows).push_back(i);
    }
  }
  return folds;
}

std::vector<Fold> k_folds(const Dataset& d, int k, std::uint64_t seed) {
  return k_folds(d.labels, d.num_classes(), k, seed);
}

std::uint64_t partition_fingerprint(std::span<const Fold> folds, std::uint64_t basis) {
  std::uint64_t h = basis;
  auto feed = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& f : folds) {
    feed(f.validation_rows.size());
    for (auto r : f.validation_rows) feed(r);
  }
  return h;
}

}  // namespace dcgkit
