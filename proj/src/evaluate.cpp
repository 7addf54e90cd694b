#include "aqicast/evaluate.hpp"

#include "aqicast/error.hpp"

#include <chrono>
#include <cmath>

namespace aqicast {
namespace {

void check_pair(std::span<const BucketLabel> predicted, std::span<const BucketLabel> truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorKind::shape, "predicted has " + std::to_string(predicted.size()) +
                                      " labels, truth has " + std::to_string(truth.size()));
  }
}

long long count_matches(std::span<const BucketLabel> predicted, std::span<const BucketLabel> truth) {
  check_pair(predicted, truth);
  if (truth.empty()) throw Error(ErrorKind::empty_input, "metrics need at least one sample");
  long long hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return hits;
}

}  // namespace

double accuracy(std::span<const BucketLabel> predicted, std::span<const BucketLabel> truth) {
  const long long hits = count_matches(predicted, truth);
  return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

double error_rate(std::span<const BucketLabel> predicted, std::span<const BucketLabel> truth) {
  const long long misses = static_cast<long long>(truth.size()) - count_matches(predicted, truth);
  return 100.0 * static_cast<double>(misses) / static_cast<double>(truth.size());
}

double forecast_time(long long n_samples, double per_sample_ms) {
  if (n_samples < 0 || !(per_sample_ms >= 0.0) || !std::isfinite(per_sample_ms)) {
    throw Error(ErrorKind::argument, "forecast_time needs n >= 0 and a finite per-sample time >= 0");
  }
  return static_cast<double>(n_samples) * per_sample_ms;
}

ConfusionMatrix confusion_matrix(std::span<const BucketLabel> predicted,
                                 std::span<const BucketLabel> truth) {
  check_pair(predicted, truth);
  ConfusionMatrix m = ConfusionMatrix::Zero();
  for (std::size_t i = 0; i < truth.size(); ++i) ++m(ordinal(truth[i]), ordinal(predicted[i]));
  return m;
}

EvalReport make_report(std::span<const BucketLabel> predicted, std::span<const BucketLabel> truth,
                       double per_sample_ms) {
  EvalReport r;
  r.n_samples = static_cast<long long>(truth.size());
  r.n_correct = count_matches(predicted, truth);
  r.n_wrong = r.n_samples - r.n_correct;
  r.accuracy_pct = accuracy(predicted, truth);
  r.error_pct = error_rate(predicted, truth);
  r.per_sample_ms = per_sample_ms;
  r.forecast_time_ms = forecast_time(r.n_samples, per_sample_ms);
  r.confusion = confusion_matrix(predicted, truth);
  return r;
}

double measure_per_sample_ms(const SvmModel& model, const Eigen::MatrixXd& X, int warmup) {
  if (X.rows() == 0) return 0.0;
  int sink = 0;
  for (int i = 0; i < warmup; ++i) {
    sink += ordinal(predict(model, X.row(i % X.rows()).transpose()).label);
  }
  const auto start = std::chrono::steady_clock::now();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    sink += ordinal(predict(model, X.row(i).transpose()).label);
  }
  const auto stop = std::chrono::steady_clock::now();
  volatile int keep = sink;
  (void)keep;
  const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return ms / static_cast<double>(X.rows());
}

}  // namespace aqicast
