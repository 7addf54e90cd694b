#include "aqicast/error.hpp"
#include "aqicast/feature_select.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace aqicast;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::MatrixXd X(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) X(i, j) = g(rng);
  return X;
}

// Least-squares oracle with an intercept column.
Eigen::VectorXd normal_equations(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::MatrixXd A(X.rows(), X.cols() + 1);
  A.col(0).setOnes();
  A.rightCols(X.cols()) = X;
  return (A.transpose() * A).ldlt().solve(A.transpose() * y);
}

}  // namespace

TEST_SUITE("feature_select") {

TEST_CASE("fit examples") {
  SelectConfig cfg;
  Eigen::MatrixXd X(3, 1);
  X << 1, 2, 3;
  Eigen::VectorXd y(3);
  y << 2, 4, 6;
  auto fit = fit_linear_regression(X, y, cfg);
  CHECK(std::abs(fit.intercept) < 1e-6);
  CHECK(std::abs(fit.coefficients[0] - 2.0) < 1e-6);
  CHECK(fit.coefficients.size() == 1);

  Eigen::MatrixXd X2(2, 1);
  X2 << 0, 1;
  Eigen::VectorXd y2(2);
  y2 << 1, 3;
  fit = fit_linear_regression(X2, y2, cfg);
  CHECK(std::abs(fit.intercept - 1.0) < 1e-6);
  CHECK(std::abs(fit.coefficients[0] - 2.0) < 1e-6);
}

TEST_CASE("constant target gives intercept only") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd X = random_matrix(rng, 30, 3);
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(30, 4.5);
  const auto fit = fit_linear_regression(X, y);
  CHECK(std::abs(fit.intercept - 4.5) < 1e-9);
  CHECK(fit.coefficients.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("constant column gets coefficient zero") {
  std::mt19937_64 rng(2);
  Eigen::MatrixXd X = random_matrix(rng, 40, 2);
  X.col(1).setConstant(7.0);
  const Eigen::VectorXd y = 3.0 * X.col(0);
  const auto fit = fit_linear_regression(X, y);
  CHECK(fit.coefficients[1] == 0.0);
  CHECK(fit.coefficients[0] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("final loss matches a recomputation") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd X = random_matrix(rng, 50, 4, 5.0);
  const Eigen::VectorXd y = random_matrix(rng, 50, 1).col(0);
  const auto fit = fit_linear_regression(X, y);
  const Eigen::VectorXd r = (X * fit.coefficients).array() + fit.intercept - y.array();
  CHECK(fit.final_loss == doctest::Approx(r.squaredNorm() / 50.0).epsilon(1e-9));
  CHECK(fit.final_loss >= 0.0);
}

TEST_CASE("fit errors") {
  SelectConfig cfg;
  Eigen::MatrixXd one(1, 1);
  one << 1;
  Eigen::VectorXd y1(1);
  y1 << 1;
  try {
    fit_linear_regression(one, y1, cfg);
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
  }
  Eigen::MatrixXd X(2, 1);
  X << 1, INFINITY;
  Eigen::VectorXd y(2);
  y << 1, 2;
  try {
    fit_linear_regression(X, y, cfg);
    FAIL("expected numeric input error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numeric_input);
  }
  cfg.k = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("gradient examples") {
  Eigen::MatrixXd X(1, 1);
  X << 1;
  Eigen::VectorXd y(1), beta(1);
  y << 3;
  beta << 0;
  const auto g = regression_gradient(X, y, 0.0, beta);
  CHECK(g.coefficients[0] == -6.0);
  CHECK(g.intercept == -6.0);
  Eigen::VectorXd wrong(2);
  CHECK_THROWS_AS(regression_gradient(X, y, 0.0, wrong), Error);

  Eigen::MatrixXd X3(3, 1);
  X3 << 1, 2, 3;
  Eigen::VectorXd y3(3), b3(1);
  y3 << 2, 4, 6;
  b3 << 2;
  const auto g0 = regression_gradient(X3, y3, 0.0, b3);
  CHECK(std::abs(g0.intercept) < 1e-6);
  CHECK(std::abs(g0.coefficients[0]) < 1e-6);
}

TEST_CASE("gradient matches central finite differences") {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<Eigen::Index> nn(2, 20), mm(1, 5);
  std::normal_distribution<double> g;
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = nn(rng), m = mm(rng);
    const Eigen::MatrixXd X = random_matrix(rng, n, m);
    const Eigen::VectorXd y = random_matrix(rng, n, 1).col(0);
    const Eigen::VectorXd beta = random_matrix(rng, m, 1).col(0);
    const double b0 = g(rng);
    const auto grad = regression_gradient(X, y, b0, beta);
    const double fd0 = (mean_squared_loss(X, y, b0 + h, beta) - mean_squared_loss(X, y, b0 - h, beta)) / (2 * h);
    CHECK(std::abs(fd0 - grad.intercept) <= 1e-5 * std::max(1.0, std::abs(grad.intercept)));
    for (Eigen::Index j = 0; j < m; ++j) {
      Eigen::VectorXd up = beta, down = beta;
      up[j] += h;
      down[j] -= h;
      const double fd = (mean_squared_loss(X, y, b0, up) - mean_squared_loss(X, y, b0, down)) / (2 * h);
      CHECK(std::abs(fd - grad.coefficients[j]) <= 1e-5 * std::max(1.0, std::abs(grad.coefficients[j])));
    }
  }
}

TEST_CASE("fit agrees with the normal equations") {
  std::mt19937_64 rng(20);
  std::uniform_int_distribution<Eigen::Index> mm(1, 5);
  SelectConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.max_iters = 100000;
  cfg.tol = 1e-12;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index m = mm(rng);
    Eigen::MatrixXd X = random_matrix(rng, 60, m, 3.0);
    X.col(0).array() += 50.0;
    const Eigen::VectorXd y = X * random_matrix(rng, m, 1).col(0) + random_matrix(rng, 60, 1).col(0);
    const auto oracle = normal_equations(X, y);
    const auto fit = fit_linear_regression(X, y, cfg);
    Eigen::VectorXd ours(m + 1);
    ours << fit.intercept, fit.coefficients;
    CHECK((ours - oracle).norm() <= 1e-4 * oracle.norm());
  }
}

TEST_CASE("descent is monotone for a small enough step") {
  std::mt19937_64 rng(30);
  Eigen::MatrixXd X = random_matrix(rng, 40, 3);
  const Eigen::VectorXd y = X * Eigen::Vector3d(1, -2, 0.5) + random_matrix(rng, 40, 1).col(0);
  const Eigen::VectorXd mean = X.colwise().mean();
  X.rowwise() -= mean.transpose();
  const double lmax = (2.0 / 40.0 * X.transpose() * X).eigenvalues().real().maxCoeff();
  const double step = 1.0 / (2.0 * std::max(lmax, 2.0));
  double b0 = 0.0;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(3);
  double prev = mean_squared_loss(X, y, b0, beta);
  for (int it = 0; it < 200; ++it) {
    const auto g = regression_gradient(X, y, b0, beta);
    b0 -= step * g.intercept;
    beta -= step * g.coefficients;
    const double loss = mean_squared_loss(X, y, b0, beta);
    CHECK(loss <= prev + 1e-12);
    prev = loss;
  }
}

TEST_CASE("correlation examples") {
  std::mt19937_64 rng(40);
  const Eigen::MatrixXd X = random_matrix(rng, 100, 3);
  auto c = correlation_scores(X, X.col(1));
  CHECK(c.target[1] == doctest::Approx(1.0).epsilon(1e-12));
  c = correlation_scores(X, -X.col(2));
  CHECK(c.target[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((c.inter_feature - c.inter_feature.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((c.inter_feature.diagonal().array() == 1.0).all());

  const Eigen::MatrixXd big = random_matrix(rng, 10000, 2);
  c = correlation_scores(big, big.col(0));
  CHECK(std::abs(c.inter_feature(0, 1)) < 0.05);

  Eigen::MatrixXd withConst = X;
  withConst.col(0).setConstant(2.0);
  c = correlation_scores(withConst, X.col(1));
  CHECK(c.target[0] == 0.0);

  Eigen::MatrixXd tiny(1, 1);
  tiny << 1;
  CHECK_THROWS_AS(correlation_scores(tiny, Eigen::VectorXd::Ones(1)), Error);
}

TEST_CASE("k = m and cutoff 1 selects every feature") {
  const auto frame = fixtures::planted_frame(1);
  SelectConfig cfg;
  cfg.k = 8;
  cfg.redundancy_cutoff = 1.0;
  const auto r = select_features(frame, "y", cfg);
  CHECK(r.selected.size() == 8);
  CHECK(r.ranked.size() == 8);
}

TEST_CASE("ranking invariants") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto frame = fixtures::planted_frame(seed);
    SelectConfig cfg;
    cfg.k = 3;
    const auto r = select_features(frame, "y", cfg);
    for (std::size_t i = 1; i < r.ranked.size(); ++i) CHECK(r.ranked[i - 1].second >= r.ranked[i].second);
    for (const auto& [name, score] : r.ranked) {
      CHECK(score >= 0.0);
      CHECK(score <= 1.0);
    }
    std::set<std::string> names;
    for (const auto& entry : r.ranked) names.insert(entry.first);
    for (const auto& s : r.selected) CHECK(names.count(s) == 1);
    CHECK(r.selected.size() == 3);
    const auto again = select_features(frame, "y", cfg);
    CHECK(again.ranked == r.ranked);
    CHECK(again.selected == r.selected);
  }
}

TEST_CASE("planted features are recovered") {
  SelectConfig cfg;
  cfg.k = 2;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = select_features(fixtures::planted_frame(seed), "y", cfg);
    const std::set<std::string> got(r.selected.begin(), r.selected.end());
    if (got == std::set<std::string>{"PM2.5", "O3"}) ++hits;
  }
  CHECK(hits >= 95);
}

TEST_CASE("duplicate column is filtered as redundant") {
  const auto base = fixtures::planted_frame(5);
  Eigen::MatrixXd data = base.data();
  data.col(*base.column_index("PM10")) = base.column("PM2.5");
  const auto frame = base.with_data(data);
  SelectConfig cfg;
  cfg.k = 4;
  cfg.redundancy_cutoff = 0.9;
  const auto r = select_features(frame, "y", cfg);
  const auto count = std::count_if(r.selected.begin(), r.selected.end(),
                                   [](const std::string& s) { return s == "PM2.5" || s == "PM10"; });
  CHECK(count <= 1);
}

TEST_CASE("scaling a column leaves scores and selection unchanged") {
  const auto base = fixtures::planted_frame(6);
  Eigen::MatrixXd data = base.data();
  data.col(*base.column_index("O3")) *= 10.0;
  const auto scaled = base.with_data(data);
  SelectConfig cfg;
  cfg.k = 3;
  const auto a = select_features(base, "y", cfg);
  const auto b = select_features(scaled, "y", cfg);
  CHECK(a.selected == b.selected);
  REQUIRE(a.ranked.size() == b.ranked.size());
  for (std::size_t i = 0; i < a.ranked.size(); ++i) {
    CHECK(a.ranked[i].first == b.ranked[i].first);
    CHECK(std::abs(a.ranked[i].second - b.ranked[i].second) < 1e-9);
  }
}

TEST_CASE("ties keep schema order") {
  Eigen::MatrixXd data(6, 3);
  data << 1, 1, 0, 2, 2, 1, 3, 3, 0, 4, 4, 1, 5, 5, 0, 6, 6, 1;
  std::vector<Timestamp> ts;
  for (int i = 0; i < 6; ++i) ts.push_back({i, false});
  SeriesFrame frame("T", ts, {"PM2.5", "PM10", "y"}, data);
  frame = frame.with_column("z", frame.column("PM2.5"));
  SelectConfig cfg;
  cfg.k = 3;
  cfg.redundancy_cutoff = 1.0;
  const auto r = select_features(frame, "z", cfg);
  CHECK(r.ranked[0].first == "PM2.5");
  CHECK(r.ranked[1].first == "PM10");
}

TEST_CASE("select_features errors") {
  const auto frame = fixtures::planted_frame(1);
  try {
    select_features(frame, "AQI");
    FAIL("expected name error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::name);
  }
  SelectConfig cfg;
  cfg.k = 0;
  try {
    select_features(frame, "y", cfg);
    FAIL("expected argument error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::argument);
  }
}

}  // TEST_SUITE
