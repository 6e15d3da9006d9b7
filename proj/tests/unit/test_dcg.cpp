#include <cmath>
#include <set>

#include "doctest.h"
#include "dcgkit/dispel.hpp"
#include "dcgkit/errors.hpp"
#include "dcgkit/reduction.hpp"
#include "helpers.hpp"

using namespace dcgkit;

namespace {

Eigen::MatrixXd rows_of_class(const Eigen::MatrixXd& x, const std::vector<int>& labels, int label) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) idx.push_back(static_cast<Eigen::Index>(i));
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(idx[i]);
  return out;
}

Eigen::RowVectorXd brute_mean(const Eigen::MatrixXd& x, const std::vector<int>& labels, int label) {
  return rows_of_class(x, labels, label).colwise().mean();
}

}  // namespace

TEST_CASE("alpha zero is the identity") {
  Rng rng(1);
  const auto x = testutil::gaussian_matrix(rng, 12, 3);
  const auto labels = testutil::random_labels(rng, 12, 3);
  CHECK(apply_dcg(x, labels, 0) == x);
}

TEST_CASE("worked two-row example") {
  Eigen::MatrixXd x(2, 2);
  x << 1, 2, 4, 6;
  Eigen::MatrixXd expected(2, 2);
  expected << -1, 0, 0, 2;
  const std::vector<int> labels{1, 2};
  CHECK(apply_dcg(x, labels, 2) == expected);
  // input untouched
  CHECK(x(0, 0) == 1.0);
}

TEST_CASE("scalar two-point illustration") {
  Eigen::MatrixXd x(2, 1);
  x << 5, 7;
  const std::vector<int> labels{1, 2};
  const auto far = apply_dcg(x, labels, 10);
  CHECK(far(0, 0) == -5.0);
  CHECK(far(1, 0) == -13.0);
  CHECK(std::abs(far(0, 0) - far(1, 0)) == 8.0);
  const auto near = apply_dcg(x, labels, 3);
  CHECK(std::abs(near(0, 0) - near(1, 0)) == 1.0);
}

TEST_CASE("apply_dcg shape error") {
  Eigen::MatrixXd x(3, 2);
  x.setZero();
  CHECK_THROWS_AS(apply_dcg(x, std::vector<int>{1, 2}, 1), ShapeError);
}

TEST_CASE("negative alpha and large shifts are exact") {
  Eigen::MatrixXd x(2, 1);
  x << 0.5, 0.25;
  const auto out = apply_dcg(x, std::vector<int>{3, 7}, -1000000);
  CHECK(out(0, 0) == 3000000.5);
  CHECK(out(1, 0) == 7000000.25);
}

TEST_CASE("separability: 3-4-5 triangle and degenerate geometry") {
  Eigen::MatrixXd x(4, 2);
  x << -1, 0, 1, 0, 3, 3, 3, 5;
  const std::vector<int> labels{1, 1, 2, 2};
  const auto s = separability(x, labels);
  CHECK(s.min_pair_distance == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(s.per_pair(0, 1) == s.per_pair(1, 0));
  CHECK(s.per_pair(0, 0) == 0.0);

  Eigen::MatrixXd same(4, 2);
  same << 0, 0, 2, 2, 1, 1, 1, 1;
  CHECK(separability(same, labels).min_pair_distance == 0.0);

  CHECK_THROWS_AS(separability(x, std::vector<int>{1, 1, 1, 1}), DegenerateInputError);
}

TEST_CASE("property: separability matrix structure") {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int classes = 2 + static_cast<int>(uniform_index(rng, 4));
    const auto labels = testutil::random_labels(rng, 30, classes);
    const auto x = testutil::gaussian_matrix(rng, 30, 3, 4.0);
    const auto s = separability(x, labels);
    double min_off = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < s.per_pair.rows(); ++a) {
      CHECK(s.per_pair(a, a) == 0.0);
      for (Eigen::Index b = 0; b < s.per_pair.cols(); ++b) {
        CHECK(s.per_pair(a, b) == s.per_pair(b, a));
        if (a != b) min_off = std::min(min_off, s.per_pair(a, b));
      }
    }
    CHECK(s.min_pair_distance == min_off);
  }
}

TEST_CASE("property: shifted mean distances follow the closed form") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int classes = 2 + static_cast<int>(uniform_index(rng, 3));
    const auto labels = testutil::random_labels(rng, 25, classes);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(uniform_index(rng, 4));
    const auto x = testutil::gaussian_matrix(rng, 25, m, 3.0);
    const int t = static_cast<int>(uniform_index(rng, 41)) - 20;
    const auto s = separability(apply_dcg(x, labels, t), labels);
    for (std::size_t a = 0; a < s.classes.size(); ++a) {
      for (std::size_t b = a + 1; b < s.classes.size(); ++b) {
        const int la = s.classes[a], lb = s.classes[b];
        const Eigen::RowVectorXd diff = brute_mean(x, labels, la) - brute_mean(x, labels, lb);
        const double expected =
            (diff.array() - static_cast<double>(t) * static_cast<double>(la - lb)).matrix().norm();
        CHECK(s.per_pair(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) ==
              doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("LPMR on the scalar two-point instance") {
  Eigen::MatrixXd x(2, 1);
  x << 5, 7;
  const std::vector<int> labels{1, 2};
  CHECK(scan_lpmr(x, labels, {1, 4}) == std::vector<int>{1, 2, 3});
  CHECK(scan_lpmr(x, labels, {0, 0}).empty());
  CHECK_THROWS_AS(scan_lpmr(x, labels, {3, 2}), ConfigError);
}

TEST_CASE("LPMR is empty when class means already lie along the ones direction") {
  // class 1 mean = class 2 mean + c * 1 with c > 0
  Rng rng(4);
  const Eigen::Index m = 3;
  auto x = testutil::gaussian_matrix(rng, 40, m, 0.5);
  std::vector<int> labels(40);
  for (int i = 0; i < 40; ++i) {
    labels[static_cast<std::size_t>(i)] = i < 20 ? 1 : 2;
    if (i < 20) x.row(i).array() += 2.5;
  }
  const auto lpmr = scan_lpmr(x, labels, {1, 30});
  CHECK(lpmr.empty());
  // brute force agrees: distance grows with every step
  double prev = separability(x, labels).min_pair_distance;
  for (int a = 1; a <= 30; ++a) {
    const double d = separability(apply_dcg(x, labels, a), labels).min_pair_distance;
    CHECK(d > prev);
    prev = d;
  }
  // and negative loops pass through the problem range
  CHECK(!scan_lpmr(x, labels, {-5, -1}).empty());
}

TEST_CASE("property: LPMR matches brute force") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto labels = testutil::random_labels(rng, 15, 3);
    const auto x = testutil::gaussian_matrix(rng, 15, 2, 5.0);
    const auto got = scan_lpmr(x, labels, {-8, 8});
    const double base = separability(x, labels).min_pair_distance;
    std::vector<int> want;
    for (int a = -8; a <= 8; ++a) {
      if (separability(apply_dcg(x, labels, a), labels).min_pair_distance < base) want.push_back(a);
    }
    CHECK(got == want);
  }
}

TEST_CASE("property: within-class distances and per-class covariance are preserved") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const int classes = 2 + static_cast<int>(uniform_index(rng, 4));
    const int n = 3 * classes + static_cast<int>(uniform_index(rng, 20));
    const auto labels = testutil::random_labels(rng, n, classes, 2);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(uniform_index(rng, 5));
    const auto x = testutil::gaussian_matrix(rng, n, m, 10.0);
    const int alpha = static_cast<int>(uniform_index(rng, 201)) - 100;
    const auto y = apply_dcg(x, labels, alpha);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)]) continue;
        CHECK(std::abs((x.row(i) - x.row(j)).norm() - (y.row(i) - y.row(j)).norm()) <= 1e-9);
      }
    }
    for (int c = 1; c <= classes; ++c) {
      const double diff =
          (testutil::class_covariance(x, labels, c) - testutil::class_covariance(y, labels, c)).norm();
      CHECK(diff <= 1e-9);
    }
  }
}

TEST_CASE("property: per-class principal directions are unchanged up to sign") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto labels = testutil::random_labels(rng, 40, 2, 10);
    const auto x = testutil::gaussian_matrix(rng, 40, 3, 2.0);
    const int alpha = 1 + static_cast<int>(uniform_index(rng, 50));
    const auto y = apply_dcg(x, labels, alpha);
    for (int c = 1; c <= 2; ++c) {
      const auto before = fit_pca(rows_of_class(x, labels, c), 3);
      const auto after = fit_pca(rows_of_class(y, labels, c), 3);
      CHECK((before.eigenvalues - after.eigenvalues).cwiseAbs().maxCoeff() <= 1e-9);
      for (Eigen::Index r = 0; r < 3; ++r) {
        CHECK(std::abs(std::abs(before.w.row(r).dot(after.w.row(r))) - 1.0) <= 1e-8);
      }
    }
  }
}

TEST_CASE("property: label scaling and sign symmetry are exact") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const int classes = 2 + static_cast<int>(uniform_index(rng, 5));
    const auto labels = testutil::random_labels(rng, 20, classes);
    const auto x = testutil::dyadic_matrix(rng, 20, 3);
    const int alpha = static_cast<int>(uniform_index(rng, 61)) - 30;
    const int beta = 1 + static_cast<int>(uniform_index(rng, 5));
    std::vector<int> scaled(labels);
    for (auto& l : scaled) l *= beta;
    CHECK(apply_dcg(x, scaled, alpha) == apply_dcg(x, labels, beta * alpha));
    CHECK(apply_dcg(x, labels, -alpha) == (2.0 * x - apply_dcg(x, labels, alpha)));
  }
}

TEST_CASE("property: separability strictly increases beyond the dispersion threshold") {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const int classes = 2 + static_cast<int>(uniform_index(rng, 3));
    const auto labels = testutil::random_labels(rng, 12, classes);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(uniform_index(rng, 3));
    const auto x = testutil::gaussian_matrix(rng, 12, m, 8.0);
    const int t = dispersion_threshold(x, labels);
    double prev = separability(apply_dcg(x, labels, t), labels).min_pair_distance;
    for (int a = t + 1; a <= t + 20; ++a) {
      const double cur = separability(apply_dcg(x, labels, a), labels).min_pair_distance;
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("alpha bound validator") {
  AlphaBoundParams p;
  p.w_row = Eigen::VectorXd::Zero(2);
  p.class_minima[1] = Eigen::Vector2d(3, 4);
  p.centers[1] = 0.0;
  p.theta_min = -1.0;
  p.theta_max = 1.0;
  for (int a = -50; a <= 50; ++a) CHECK(validate_alpha_bound(p, a, 1));

  // squared term exactly 0 sits on the excluded lower boundary
  p.theta_min = 0.0;
  CHECK_FALSE(validate_alpha_bound(p, 3, 1));

  AlphaBoundParams q;
  q.w_row = Eigen::VectorXd::Constant(1, 2.0);
  q.class_minima[1] = Eigen::VectorXd::Constant(1, 3.0);
  q.centers[1] = 0.0;
  q.sigma = 1.0;
  q.theta_min = 0.0;
  q.theta_max = 100.0;
  CHECK(alpha_bound_value(q, 2, 1) == 4.0);
  CHECK(validate_alpha_bound(q, 2, 1));
  CHECK(alpha_bound_value(q, -3, 1) == 144.0);
  CHECK_FALSE(validate_alpha_bound(q, -3, 1));

  CHECK_THROWS_AS(validate_alpha_bound(q, 0, 2), LookupError);
}

TEST_CASE("class minima") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 5, 2, 0, 9, 9;
  const auto mins = class_minima(x, std::vector<int>{1, 1, 2});
  CHECK(mins.at(1) == Eigen::Vector2d(1, 0));
  CHECK(mins.at(2) == Eigen::Vector2d(9, 9));
}
