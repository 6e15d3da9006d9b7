#include "dcgkit/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "dcgkit/errors.hpp"

namespace dcgkit {

std::string_view to_string(ReductionMethod method) { return method == ReductionMethod::pca ? "pca" : "srda"; }

ReductionMethod parse_reduction_method(std::string_view text) {
  if (text == "pca") return ReductionMethod::pca;
  if (text == "srda") return ReductionMethod::srda;
  throw ConfigError("unknown reduction method '" + std::string(text) + "' (expected pca or srda)");
}

namespace {

Eigen::MatrixXd centered(const Eigen::MatrixXd& x, Eigen::VectorXd& mean) {
  mean = x.colwise().mean().transpose();
  return x.rowwise() - mean.transpose();
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > best) {
      best = std::abs(v(i));
      arg = i;
    }
  }
  if (v(arg) < 0.0) v = -v;
}

}  // namespace

int pca_auto_dim(const Eigen::VectorXd& eigenvalues, double threshold, int rank_bound) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw ConfigError("pca: variance threshold must lie in (0,1]");
  rank_bound = std::max(rank_bound, 1);
  const double total = eigenvalues.cwiseMax(0.0).sum();
  if (total <= 0.0) return 1;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    acc += std::max(eigenvalues(i), 0.0);
    if (acc >= threshold * total) return std::min(static_cast<int>(i) + 1, rank_bound);
  }
  return std::min(static_cast<int>(eigenvalues.size()), rank_bound);
}

namespace {

struct PcaBasis {
  Eigen::VectorXd center;
  Eigen::VectorXd eigenvalues;  // descending
  Eigen::MatrixXd vectors;      // columns match eigenvalues
};

PcaBasis pca_basis(const Eigen::MatrixXd& train) {
  if (train.rows() < 2) throw DimensionError("pca: need at least 2 training rows");
  PcaBasis b;
  const Eigen::MatrixXd xc = centered(train, b.center);
  const Eigen::MatrixXd cov = (xc.transpose() * xc) / static_cast<double>(train.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("pca: eigendecomposition failed");
  const auto m = cov.rows();
  b.eigenvalues = eig.eigenvalues().reverse();
  b.vectors = eig.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < m; ++j) fix_sign(b.vectors.col(j));
  return b;
}

ProjectionModel pca_model(PcaBasis b, int out_dim) {
  ProjectionModel model;
  model.method = ReductionMethod::pca;
  model.w = b.vectors.leftCols(out_dim).transpose();
  model.center = std::move(b.center);
  model.eigenvalues = std::move(b.eigenvalues);
  return model;
}

}  // namespace

ProjectionModel fit_pca(const Eigen::MatrixXd& train, int out_dim) {
  const auto bound = std::min<Eigen::Index>(train.rows() - 1, train.cols());
  if (out_dim < 1 || out_dim > bound) {
    throw DimensionError("pca: out_dim " + std::to_string(out_dim) + " outside 1.." + std::to_string(bound));
  }
  return pca_model(pca_basis(train), out_dim);
}

ProjectionModel fit_srda(const Eigen::MatrixXd& train, std::span<const int> labels, double ridge_lambda) {
  if (static_cast<std::size_t>(train.rows()) != labels.size()) {
    throw ShapeError("srda: " + std::to_string(train.rows()) + " rows but " + std::to_string(labels.size()) +
                     " labels");
  }
  if (!(ridge_lambda > 0.0)) throw ConfigError("srda: ridge_lambda must be positive");
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  const auto nc = static_cast<Eigen::Index>(classes.size());
  if (nc < 2) throw DegenerateInputError("srda: need at least 2 classes in the training data");
  if (nc - 1 > train.cols()) {
    throw DimensionError("srda: " + std::to_string(nc - 1) + " directions requested from " +
                         std::to_string(train.cols()) + " features");
  }

  const auto n = train.rows();
  // Gram-Schmidt over [1, e_1, ..., e_Nc]; the last indicator is spanned by the others.
  Eigen::MatrixXd basis(n, nc + 1);
  basis.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::Index kept = 1;
  const double tol = 1e-10 * std::sqrt(static_cast<double>(n));
  for (Eigen::Index c = 0; c < nc; ++c) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = labels[static_cast<std::size_t>(i)] == classes[c] ? 1.0 : 0.0;
    for (Eigen::Index j = 0; j < kept; ++j) v -= basis.col(j).dot(v) * basis.col(j);
    const double norm = v.norm();
    if (norm > tol) basis.col(kept++) = v / norm;
  }
  const Eigen::MatrixXd responses = basis.middleCols(1, kept - 1);

  ProjectionModel model;
  model.method = ReductionMethod::srda;
  const Eigen::MatrixXd xc = centered(train, model.center);
  Eigen::MatrixXd system = xc.transpose() * xc;
  system.diagonal().array() += ridge_lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() != Eigen::Success || !system.allFinite()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system, Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << "srda: ridge system is not positive definite (lambda=" << ridge_lambda << ", eigenvalue range ["
        << eig.eigenvalues().minCoeff() << ", " << eig.eigenvalues().maxCoeff() << "])";
    throw NumericalError(msg.str());
  }
  const Eigen::MatrixXd coef = llt.solve(xc.transpose() * responses);  // m x (Nc - 1)
  if (!coef.allFinite()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system, Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << "srda: non-finite solution, condition estimate "
        << eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff();
    throw NumericalError(msg.str());
  }
  model.w = coef.transpose();
  return model;
}

ProjectionModel fit_reduction(const ReductionConfig& config, const Eigen::MatrixXd& train,
                              std::span<const int> labels) {
  if (config.method == ReductionMethod::srda) {
    auto model = fit_srda(train, labels, config.ridge_lambda);
    if (config.out_dim && *config.out_dim != model.out_dim()) {
      throw DimensionError("srda: out_dim is fixed at Nc - 1 = " + std::to_string(model.out_dim()));
    }
    return model;
  }
  const auto bound = static_cast<int>(std::min<Eigen::Index>(train.rows() - 1, train.cols()));
  if (config.out_dim) return fit_pca(train, *config.out_dim);
  auto basis = pca_basis(train);
  const int dim = pca_auto_dim(basis.eigenvalues, config.variance_threshold, bound);
  return pca_model(std::move(basis), dim);
}

Eigen::MatrixXd project(const ProjectionModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.in_dim()) {
    throw DimensionError("project: input has " + std::to_string(features.cols()) + " columns, model expects " +
                         std::to_string(model.in_dim()));
  }
  return (features.rowwise() - model.center.transpose()) * model.w.transpose();
}

namespace {

void write_values(std::ostream& out, const double* values, Eigen::Index count) {
  char buf[32];
  for (Eigen::Index i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    out << (i ? " " : "") << buf;
  }
}

}  // namespace

std::string serialize_model(const ProjectionModel& model) {
  std::ostringstream out;
  out << "dcgkit-projection 1\n";
  out << "method " << to_string(model.method) << "\n";
  out << "shape " << model.w.rows() << " " << model.w.cols() << "\n";
  out << "center ";
  write_values(out, model.center.data(), model.center.size());
  out << "\neigenvalues " << model.eigenvalues.size();
  if (model.eigenvalues.size()) {
    out << " ";
    write_values(out, model.eigenvalues.data(), model.eigenvalues.size());
  }
  out << "\nw\n";
  for (Eigen::Index r = 0; r < model.w.rows(); ++r) {
    const Eigen::RowVectorXd row = model.w.row(r);
    write_values(out, row.data(), row.size());
    out << "\n";
  }
  return out.str();
}

ProjectionModel parse_model(std::string_view text) {
  std::istringstream in{std::string(text)};
  auto expect = [&](const char* word) {
    std::string tok;
    if (!(in >> tok) || tok != word) throw ParseError(std::string("model: expected '") + word + "'");
  };
  auto read_double = [&]() {
    std::string tok;
    if (!(in >> tok)) throw ParseError("model: truncated value list");
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw ParseError("model: bad number '" + tok + "'");
      return v;
    } catch (const std::logic_error&) {
      throw ParseError("model: bad number '" + tok + "'");
    }
  };
  expect("dcgkit-projection");
  int version = 0;
  if (!(in >> version) || version != 1) throw ParseError("model: unsupported format version");
  expect("method");
  std::string method;
  in >> method;
  ProjectionModel model;
  try {
    model.method = parse_reduction_method(method);
  } catch (const ConfigError& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  expect("shape");
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1) throw ParseError("model: bad shape");
  expect("center");
  model.center.resize(cols);
  for (Eigen::Index i = 0; i < cols; ++i) model.center(i) = read_double();
  expect("eigenvalues");
  Eigen::Index ev = 0;
  if (!(in >> ev) || ev < 0) throw ParseError("model: bad eigenvalue count");
  model.eigenvalues.resize(ev);
  for (Eigen::Index i = 0; i < ev; ++i) model.eigenvalues(i) = read_double();
  expect("w");
  model.w.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) model.w(r, c) = read_double();
  }
  return model;
}

void save_model(const ProjectionModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << serialize_model(model);
}

ProjectionModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace dcgkit
