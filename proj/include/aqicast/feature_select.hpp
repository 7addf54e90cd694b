#pragma once

#include "aqicast/error.hpp"
#include "aqicast/ingest.hpp"

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aqicast {

struct SelectConfig {
  std::size_t k = 7;
  double learning_rate = 0.01;
  int max_iters = 10000;
  double tol = 1e-8;
  double redundancy_cutoff = 0.95;
  double weight_regression = 0.5;

  /// Throws Error(argument) when a bound is violated.
  void validate() const;
};

struct RegressionFit {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;  ///< input scale
  /// Coefficients on the internally standardized columns (target units per
  /// standard deviation of the feature); zero for constant columns.
  Eigen::VectorXd standardized_coefficients;
  double final_loss = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct RegressionGradient {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
};

/// L = (1/n) * sum_i (b0 + x_i . beta - y_i)^2
template <typename DerivedX, typename DerivedY, typename DerivedB>
double mean_squared_loss(const Eigen::MatrixBase<DerivedX>& X, const Eigen::MatrixBase<DerivedY>& y,
                         double beta0, const Eigen::MatrixBase<DerivedB>& beta) {
  const Eigen::VectorXd residual =
      ((X * beta).array() + beta0 - y.array()).matrix();
  return residual.squaredNorm() / static_cast<double>(X.rows());
}

/// dL/db0 = (2/n) sum_i r_i,  dL/dbeta = (2/n) X^T r,  r = b0 + X beta - y.
/// Equivalent to (2 X^T X beta - 2 X^T y) / n for the slope block.
template <typename DerivedX, typename DerivedY, typename DerivedB>
RegressionGradient regression_gradient(const Eigen::MatrixBase<DerivedX>& X,
                                       const Eigen::MatrixBase<DerivedY>& y, double beta0,
                                       const Eigen::MatrixBase<DerivedB>& beta) {
  if (X.rows() != y.size() || X.cols() != beta.size()) {
    throw Error(ErrorKind::shape, "gradient shapes disagree: X is " + std::to_string(X.rows()) +
                                      "x" + std::to_string(X.cols()) + ", y has " +
                                      std::to_string(y.size()) + ", beta has " +
                                      std::to_string(beta.size()));
  }
  if (X.rows() == 0) throw Error(ErrorKind::insufficient_data, "gradient of an empty sample");
  const Eigen::VectorXd residual = ((X * beta).array() + beta0 - y.array()).matrix();
  const double scale = 2.0 / static_cast<double>(X.rows());
  RegressionGradient g;
  g.intercept = scale * residual.sum();
  g.coefficients = scale * (X.transpose() * residual);
  return g;
}

/// Gradient descent on the mean-squared loss over standardized columns,
/// starting from zero. Stops when the max-norm of the gradient drops below
/// config.tol or after config.max_iters steps.
RegressionFit fit_linear_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const SelectConfig& config = {});

struct CorrelationScores {
  Eigen::VectorXd target;        ///< |Pearson r| of each column against y
  Eigen::MatrixXd inter_feature;  ///< signed Pearson r, unit diagonal
};

CorrelationScores correlation_scores(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct FeatureRanking {
  std::vector<std::pair<std::string, double>> ranked;  ///< non-increasing score
  std::vector<std::string> selected;
  std::vector<std::string> candidates;  ///< column order of fit.coefficients
  std::string target;
  RegressionFit fit;
};

/// Ranks every column except `target_column` by
///   w * |standardized beta_j| / max|beta| + (1 - w) * |r_j| / max|r|
/// and greedily keeps up to k names, skipping a candidate whose |r| with an
/// already-kept name exceeds the redundancy cutoff. Ties keep column order.
FeatureRanking select_features(const SeriesFrame& frame, std::string_view target_column,
                               const SelectConfig& config = {});

/// Same ranking over raw columns; `names` labels the columns of X.
FeatureRanking select_features(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               std::vector<std::string> names, std::string target,
                               const SelectConfig& config = {});

}  // namespace aqicast
