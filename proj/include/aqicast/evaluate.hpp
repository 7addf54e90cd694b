#pragma once

#include "aqicast/aqi.hpp"
#include "aqicast/svm.hpp"

#include <Eigen/Dense>

#include <span>

namespace aqicast {

using ConfusionMatrix = Eigen::Matrix<long long, kBucketCount, kBucketCount>;

struct EvalReport {
  long long n_samples = 0;
  long long n_correct = 0;
  long long n_wrong = 0;
  double accuracy_pct = 0.0;
  double error_pct = 0.0;
  double forecast_time_ms = 0.0;
  double per_sample_ms = 0.0;
  ConfusionMatrix confusion = ConfusionMatrix::Zero();  ///< rows truth, cols predicted
};

/// 100 * |{i : predicted_i == truth_i}| / n
double accuracy(std::span<const BucketLabel> predicted, std::span<const BucketLabel> truth);

/// 100 * |{i : predicted_i != truth_i}| / n
double error_rate(std::span<const BucketLabel> predicted, std::span<const BucketLabel> truth);

/// n_samples * per_sample_ms
double forecast_time(long long n_samples, double per_sample_ms);

ConfusionMatrix confusion_matrix(std::span<const BucketLabel> predicted,
                                 std::span<const BucketLabel> truth);

/// Counts, both percentages and the confusion matrix; timing fields stay 0
/// unless per_sample_ms is given.
EvalReport make_report(std::span<const BucketLabel> predicted, std::span<const BucketLabel> truth,
                       double per_sample_ms = 0.0);

/// Wall-clock milliseconds per predict() call over the rows of X, measured
/// single-threaded after `warmup` discarded predictions.
double measure_per_sample_ms(const SvmModel& model, const Eigen::MatrixXd& X, int warmup = 100);

}  // namespace aqicast
