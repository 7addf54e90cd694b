#include "aqicast/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aqicast {
namespace {

// Columns whose spread is below this fraction of their magnitude are
// treated as constant.
constexpr double kConstantTolerance = 1e-12;

struct Standardized {
  Eigen::MatrixXd z;
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;  ///< 0 for constant columns
};

Standardized standardize(const Eigen::MatrixXd& X) {
  Standardized s;
  const double n = static_cast<double>(X.rows());
  s.mean = X.colwise().mean();
  s.z = X.rowwise() - s.mean;
  s.scale = (s.z.colwise().squaredNorm() / n).cwiseSqrt();
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double magnitude = std::max(1.0, std::abs(s.mean[j]));
    if (s.scale[j] <= kConstantTolerance * magnitude) {
      s.scale[j] = 0.0;
      s.z.col(j).setZero();
    } else {
      s.z.col(j) /= s.scale[j];
    }
  }
  return s;
}

void require_finite(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (!X.allFinite() || !y.allFinite()) {
    throw Error(ErrorKind::numeric_input, "regression input contains non-finite values");
  }
}

}  // namespace

void SelectConfig::validate() const {
  if (k < 1) throw Error(ErrorKind::argument, "k must be >= 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::argument, "learning_rate must be > 0");
  if (max_iters < 1) throw Error(ErrorKind::argument, "max_iters must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorKind::argument, "tol must be > 0");
  if (!(redundancy_cutoff > 0.0 && redundancy_cutoff <= 1.0)) {
    throw Error(ErrorKind::argument, "redundancy_cutoff must be in (0, 1]");
  }
  if (!(weight_regression >= 0.0 && weight_regression <= 1.0)) {
    throw Error(ErrorKind::argument, "weight_regression must be in [0, 1]");
  }
}

RegressionFit fit_linear_regression(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                    const SelectConfig& config) {
  config.validate();
  if (X.rows() != y.size()) {
    throw Error(ErrorKind::shape, "X has " + std::to_string(X.rows()) + " rows, y has " +
                                      std::to_string(y.size()));
  }
  if (X.rows() < 2) {
    throw Error(ErrorKind::insufficient_data, "regression needs n >= 2, got " +
                                                  std::to_string(X.rows()));
  }
  require_finite(X, y);

  const Standardized s = standardize(X);
  double beta0 = 0.0;
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(X.cols());

  RegressionFit fit;
  for (int it = 0; it < config.max_iters; ++it) {
    const auto g = regression_gradient(s.z, y, beta0, gamma);
    const double gmax =
        std::max(std::abs(g.intercept), g.coefficients.size() ? g.coefficients.cwiseAbs().maxCoeff() : 0.0);
    if (gmax < config.tol) {
      fit.converged = true;
      break;
    }
    beta0 -= config.learning_rate * g.intercept;
    gamma -= config.learning_rate * g.coefficients;
    fit.iterations = it + 1;
  }
  if (!fit.converged) {
    const auto g = regression_gradient(s.z, y, beta0, gamma);
    fit.converged = std::max(std::abs(g.intercept),
                             g.coefficients.size() ? g.coefficients.cwiseAbs().maxCoeff() : 0.0) <
                    config.tol;
  }
  // The intercept's exact minimizer given the slopes; the standardized
  // columns are centered, so this is mean(y) up to rounding.
  beta0 = (y - s.z * gamma).mean();

  fit.standardized_coefficients = gamma;
  fit.coefficients = Eigen::VectorXd::Zero(X.cols());
  double shift = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    if (s.scale[j] == 0.0) continue;
    fit.coefficients[j] = gamma[j] / s.scale[j];
    shift += fit.coefficients[j] * s.mean[j];
  }
  fit.intercept = beta0 - shift;
  fit.final_loss = mean_squared_loss(X, y, fit.intercept, fit.coefficients);
  return fit;
}

CorrelationScores correlation_scores(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) {
    throw Error(ErrorKind::shape, "X has " + std::to_string(X.rows()) + " rows, y has " +
                                      std::to_string(y.size()));
  }
  if (X.rows() < 2) {
    throw Error(ErrorKind::insufficient_data, "correlation needs n >= 2, got " +
                                                  std::to_string(X.rows()));
  }
  require_finite(X, y);

  const Standardized sx = standardize(X);
  const Standardized sy = standardize(Eigen::MatrixXd(y));
  const double n = static_cast<double>(X.rows());

  CorrelationScores out;
  out.target = ((sx.z.transpose() * sy.z.col(0)) / n).cwiseAbs().cwiseMin(1.0);
  out.inter_feature = (sx.z.transpose() * sx.z) / n;
  for (Eigen::Index i = 0; i < X.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < X.cols(); ++j) {
      const double r = std::clamp(0.5 * (out.inter_feature(i, j) + out.inter_feature(j, i)), -1.0, 1.0);
      out.inter_feature(i, j) = r;
      out.inter_feature(j, i) = r;
    }
    out.inter_feature(i, i) = 1.0;
  }
  return out;
}

FeatureRanking select_features(const SeriesFrame& frame, std::string_view target_column,
                               const SelectConfig& config) {
  config.validate();
  if (!frame.column_index(target_column)) {
    throw Error(ErrorKind::name, "target column '" + std::string(target_column) +
                                     "' not in frame '" + frame.city() + "'");
  }

  std::vector<std::string> candidates;
  for (const auto& name : frame.columns()) {
    if (name != target_column) candidates.push_back(name);
  }
  if (candidates.empty()) {
    throw Error(ErrorKind::insufficient_data, "frame has no feature columns besides the target");
  }
  const Eigen::MatrixXd X = frame.select_columns(candidates).data();
  const Eigen::VectorXd y = frame.column(target_column);
  return select_features(X, y, std::move(candidates), std::string(target_column), config);
}

FeatureRanking select_features(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                               std::vector<std::string> names, std::string target,
                               const SelectConfig& config) {
  config.validate();
  if (static_cast<Eigen::Index>(names.size()) != X.cols()) {
    throw Error(ErrorKind::shape, "select_features: " + std::to_string(names.size()) +
                                      " names for " + std::to_string(X.cols()) + " columns");
  }
  if (X.cols() == 0) {
    throw Error(ErrorKind::insufficient_data, "no feature columns to rank");
  }

  FeatureRanking ranking;
  ranking.target = std::move(target);
  ranking.candidates = std::move(names);
  const auto& candidates = ranking.candidates;
  ranking.fit = fit_linear_regression(X, y, config);
  const CorrelationScores corr = correlation_scores(X, y);

  const Eigen::VectorXd beta = ranking.fit.standardized_coefficients.cwiseAbs();
  const double beta_max = beta.maxCoeff();
  const double r_max = corr.target.maxCoeff();
  const double w = config.weight_regression;

  Eigen::VectorXd score(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double reg = beta_max > 0.0 ? beta[j] / beta_max : 0.0;
    const double cor = r_max > 0.0 ? corr.target[j] / r_max : 0.0;
    score[j] = std::clamp(w * reg + (1.0 - w) * cor, 0.0, 1.0);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(X.cols()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return score[a] > score[b]; });

  std::vector<Eigen::Index> kept;
  for (Eigen::Index j : order) {
    ranking.ranked.emplace_back(candidates[static_cast<std::size_t>(j)], score[j]);
    if (kept.size() >= config.k) continue;
    const bool redundant = std::any_of(kept.begin(), kept.end(), [&](Eigen::Index s) {
      return std::abs(corr.inter_feature(j, s)) > config.redundancy_cutoff;
    });
    if (!redundant) kept.push_back(j);
  }
  for (Eigen::Index j : kept) ranking.selected.push_back(candidates[static_cast<std::size_t>(j)]);
  return ranking;
}

}  // namespace aqicast
