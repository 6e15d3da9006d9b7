#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dcgkit/classify.hpp"
#include "dcgkit/dataset.hpp"
#include "dcgkit/dispel.hpp"
#include "dcgkit/errors.hpp"
#include "dcgkit/harness.hpp"
#include "dcgkit/reduction.hpp"
#include "dcgkit/search.hpp"

namespace py = pybind11;
using namespace dcgkit;

namespace {

ColumnSelector to_column(const py::object& o) {
  if (py::isinstance<py::str>(o)) return o.cast<std::string>();
  return o.cast<std::size_t>();
}

py::dict trace_dict(const AlphaSearchTrace& t) {
  py::list evals;
  for (const auto& e : t.evaluations) evals.append(py::make_tuple(e.alpha, e.fitness));
  py::dict d;
  d["evaluations"] = evals;
  d["best_alpha"] = t.best_alpha;
  d["best_fitness"] = t.best_fitness;
  d["strategy"] = std::string(to_string(t.strategy));
  return d;
}

py::dict pipeline_dict(const PipelineResult& r) {
  py::dict d;
  d["mean"] = r.accuracy.mean;
  d["std_dev"] = r.accuracy.std_dev;
  d["fold_scores"] = r.accuracy.fold_scores;
  d["fold_k"] = r.fold_k;
  d["fold_out_dim"] = r.fold_out_dim;
  d["partition_fingerprint"] = r.partition_fingerprint;
  return d;
}

ExperimentConfig config_from(const std::string& text, const std::map<std::string, std::string>& overrides) {
  auto cfg = parse_config(text, std::filesystem::current_path());
  for (const auto& [k, v] : overrides) set_config_value(cfg, k, v, std::filesystem::current_path());
  return cfg;
}

ReductionConfig reduction_config(const std::string& method, std::optional<int> out_dim, double ridge_lambda) {
  ReductionConfig r;
  r.method = parse_reduction_method(method);
  r.out_dim = out_dim;
  r.ridge_lambda = ridge_lambda;
  return r;
}

}  // namespace

PYBIND11_MODULE(_dcgkit, m) {
  m.doc() = "Label-shift preprocessing for linear feature reduction";
  m.attr("__version__") = std::string(kToolVersion);

  static py::exception<Error> error(m, "Error");
  static py::exception<ConfigError> config_error(m, "ConfigError", error.ptr());
  static py::exception<DataError> data_error(m, "DataError", error.ptr());
  static py::exception<NumericalError> numerical_error(m, "NumericalError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::config: py::set_error(config_error, e.what()); return;
        case ErrorKind::data: py::set_error(data_error, e.what()); return;
        case ErrorKind::numerical: py::set_error(numerical_error, e.what()); return;
      }
      py::set_error(error, e.what());
    }
  });

  py::class_<Dataset>(m, "Dataset")
      .def_readonly("features", &Dataset::features)
      .def_readonly("labels", &Dataset::labels)
      .def_readonly("name", &Dataset::name)
      .def_readonly("dropped_rows", &Dataset::dropped_rows)
      .def_property_readonly("class_names", [](const Dataset& d) { return d.encoding.class_names(); })
      .def_property_readonly("num_samples", &Dataset::num_samples)
      .def_property_readonly("num_features", &Dataset::num_features)
      .def_property_readonly("num_classes", &Dataset::num_classes)
      .def("subset", [](const Dataset& d, const std::vector<std::size_t>& rows) { return d.subset(rows); })
      .def("__repr__", [](const Dataset& d) {
        return "<Dataset " + d.name + " N=" + std::to_string(d.num_samples()) + " m=" +
               std::to_string(d.num_features()) + " Nc=" + std::to_string(d.num_classes()) + ">";
      });

  m.def(
      "make_dataset",
      [](Eigen::MatrixXd features, std::vector<int> labels, std::string name) {
        return make_dataset(std::move(features), std::move(labels), std::move(name));
      },
      py::arg("features"), py::arg("labels"), py::arg("name") = "");

  m.def(
      "load_csv",
      [](const std::filesystem::path& path, const py::object& label_column, const std::vector<py::object>& drop_columns,
         const std::string& missing_policy, bool header) {
        CsvOptions o;
        o.label_column = to_column(label_column);
        for (const auto& c : drop_columns) o.drop_columns.push_back(to_column(c));
        if (missing_policy == "drop_row") {
          o.missing_policy = MissingPolicy::drop_row;
        } else if (missing_policy == "error") {
          o.missing_policy = MissingPolicy::error;
        } else {
          throw ConfigError("missing_policy must be 'drop_row' or 'error'");
        }
        o.has_header = header;
        return load_csv(path, o);
      },
      py::arg("path"), py::arg("label_column"), py::arg("drop_columns") = std::vector<py::object>{},
      py::arg("missing_policy") = "drop_row", py::arg("header") = false);

  m.def(
      "stratified_split",
      [](const Dataset& d, double train_fraction, std::uint64_t seed, bool stratified) {
        auto s = stratified_split(d, {train_fraction, seed, stratified});
        return py::make_tuple(s.train, s.test, s.train_rows, s.test_rows);
      },
      py::arg("dataset"), py::arg("train_fraction") = 0.7, py::arg("seed") = 1, py::arg("stratified") = true);

  m.def(
      "k_folds",
      [](const Dataset& d, int k, std::uint64_t seed) {
        py::list out;
        for (const auto& f : k_folds(d, k, seed)) out.append(py::make_tuple(f.train_rows, f.validation_rows));
        return out;
      },
      py::arg("dataset"), py::arg("k"), py::arg("seed") = 1);

  m.def(
      "apply_dcg",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels, int alpha) { return apply_dcg(x, labels, alpha); },
      py::arg("features"), py::arg("labels"), py::arg("alpha"));

  m.def(
      "separability",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels) {
        const auto s = separability(x, labels);
        py::dict d;
        d["min_pair_distance"] = s.min_pair_distance;
        d["per_pair"] = s.per_pair;
        d["classes"] = s.classes;
        return d;
      },
      py::arg("features"), py::arg("labels"));

  m.def(
      "scan_lpmr",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels, int lo, int hi) {
        return scan_lpmr(x, labels, {lo, hi});
      },
      py::arg("features"), py::arg("labels"), py::arg("alpha_min"), py::arg("alpha_max"));

  m.def(
      "dispersion_threshold",
      [](const Eigen::MatrixXd& x, const std::vector<int>& labels) { return dispersion_threshold(x, labels); },
      py::arg("features"), py::arg("labels"));

  m.def(
      "validate_alpha_bound",
      [](const Eigen::VectorXd& w_row, double sigma, double theta_min, double theta_max,
         const std::map<int, Eigen::VectorXd>& class_minima, const std::map<int, double>& centers, int alpha,
         int label) {
        AlphaBoundParams p{w_row, sigma, theta_min, theta_max, class_minima, centers};
        return validate_alpha_bound(p, alpha, label);
      },
      py::arg("w_row"), py::arg("sigma"), py::arg("theta_min"), py::arg("theta_max"), py::arg("class_minima"),
      py::arg("centers"), py::arg("alpha"), py::arg("label"));

  py::class_<ProjectionModel>(m, "ProjectionModel")
      .def_property_readonly("method", [](const ProjectionModel& p) { return std::string(to_string(p.method)); })
      .def_readonly("w", &ProjectionModel::w)
      .def_readonly("center", &ProjectionModel::center)
      .def_readonly("eigenvalues", &ProjectionModel::eigenvalues)
      .def_property_readonly("out_dim", &ProjectionModel::out_dim)
      .def_property_readonly("in_dim", &ProjectionModel::in_dim)
      .def("to_text", [](const ProjectionModel& p) { return serialize_model(p); })
      .def_static("from_text", [](const std::string& text) { return parse_model(text); });

  m.def("fit_pca", &fit_pca, py::arg("train"), py::arg("out_dim"));
  m.def(
      "fit_srda",
      [](const Eigen::MatrixXd& train, const std::vector<int>& labels, double ridge_lambda) {
        return fit_srda(train, labels, ridge_lambda);
      },
      py::arg("train"), py::arg("labels"), py::arg("ridge_lambda") = 0.01);
  m.def("project", &project, py::arg("model"), py::arg("features"));

  m.def(
      "knn_predict",
      [](const Eigen::MatrixXd& train, const std::vector<int>& labels, const Eigen::MatrixXd& queries, int k) {
        return knn_predict(train, labels, queries, KnnConfig{k});
      },
      py::arg("train"), py::arg("labels"), py::arg("queries"), py::arg("k") = 1);

  m.def(
      "evaluate_pipeline",
      [](const Dataset& d, std::optional<int> alpha, const std::string& method, std::optional<int> out_dim,
         double ridge_lambda, std::optional<int> k, int folds, int repeats, std::uint64_t seed,
         const std::string& reference) {
        const auto red = reduction_config(method, out_dim, ridge_lambda);
        KnnSelection knn;
        knn.k = k;
        knn.reference = parse_knn_reference(reference);
        const Protocol protocol{folds, repeats, seed};
        return pipeline_dict(alpha ? evaluate_pipeline(d, *alpha, red, knn, protocol)
                                   : evaluate_classical(d, red, knn, protocol));
      },
      py::arg("dataset"), py::arg("alpha"), py::arg("method") = "pca", py::arg("out_dim") = py::none(),
      py::arg("ridge_lambda") = 0.01, py::arg("k") = py::none(), py::arg("folds") = 10, py::arg("repeats") = 5,
      py::arg("seed") = 1, py::arg("reference") = "original",
      "Cross-validated accuracy; alpha=None runs the classical pipeline without the shift stage.");

  m.def(
      "grid_search",
      [](const std::function<double(int)>& f, int lo, int hi) { return trace_dict(grid_search(f, lo, hi)); },
      py::arg("fitness"), py::arg("alpha_min"), py::arg("alpha_max"));
  m.def(
      "hill_climb",
      [](const std::function<double(int)>& f, int start, int max_steps, int restarts, int lo, int hi,
         std::uint64_t seed) {
        return trace_dict(hill_climb(f, HillClimbConfig{start, max_steps, restarts, lo, hi, seed}));
      },
      py::arg("fitness"), py::arg("start_alpha") = 0, py::arg("max_steps") = 100, py::arg("restarts") = 5,
      py::arg("alpha_min") = -10, py::arg("alpha_max") = 80, py::arg("seed") = 1);
  m.def(
      "sga_search",
      [](const std::function<double(int)>& f, int population, int generations, double mutation_rate,
         double crossover_rate, int lo, int hi, std::uint64_t seed) {
        return trace_dict(
            sga_search(f, SgaConfig{population, generations, mutation_rate, crossover_rate, lo, hi, seed}));
      },
      py::arg("fitness"), py::arg("population") = 20, py::arg("generations") = 30, py::arg("mutation_rate") = 0.05,
      py::arg("crossover_rate") = 0.9, py::arg("alpha_min") = -10, py::arg("alpha_max") = 80, py::arg("seed") = 1);

  m.def("inject_noise", &inject_noise, py::arg("dataset"), py::arg("fraction"), py::arg("magnitude"),
        py::arg("seed") = 1);

  m.def(
      "synthetic_dataset",
      [](int classes, int per_class, int features, double separation, double spread, bool ones_direction,
         std::uint64_t seed) {
        return synthetic_dataset({classes, per_class, features, separation, spread, ones_direction, seed});
      },
      py::arg("classes") = 2, py::arg("per_class") = 40, py::arg("features") = 4, py::arg("separation") = 3.0,
      py::arg("spread") = 1.0, py::arg("ones_direction") = false, py::arg("seed") = 1);

  m.def(
      "load_config_text",
      [](const std::filesystem::path& path) { return format_config(load_config(path)); }, py::arg("path"),
      "Canonical key = value text of a config file (relative paths resolved).");

  m.def(
      "run_comparison_json",
      [](const std::string& config_text, const std::map<std::string, std::string>& overrides,
         const std::optional<Dataset>& data) {
        const auto cfg = config_from(config_text, overrides);
        py::gil_scoped_release release;
        return format_report(data ? run_comparison(cfg, *data) : run_comparison(cfg));
      },
      py::arg("config_text"), py::arg("overrides") = std::map<std::string, std::string>{},
      py::arg("data") = py::none());

  m.def(
      "run_alpha_sweep",
      [](const std::string& config_text, const std::map<std::string, std::string>& overrides, const Dataset& data,
         int lo, int hi) {
        const auto cfg = config_from(config_text, overrides);
        py::list out;
        for (const auto& e : run_alpha_sweep(cfg, data, lo, hi)) out.append(py::make_tuple(e.alpha, e.fitness));
        return out;
      },
      py::arg("config_text"), py::arg("overrides"), py::arg("data"), py::arg("alpha_min"), py::arg("alpha_max"));
}
