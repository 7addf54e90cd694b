#pragma once

#include "aqicast/aqi.hpp"
#include "aqicast/ingest.hpp"
#include "aqicast/svm.hpp"

#include <Eigen/Dense>

#include <map>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

// PM2.5 and O3 carry the signal, six other pollutants are pure noise, and
// y = 3*PM2.5 - 2*O3 + N(0, 0.1) is appended as column "y".
inline aqicast::SeriesFrame planted_frame(std::uint64_t seed, Eigen::Index rows = 400) {
  aqicast::SyntheticParams params;
  params.waves["PM2.5"] = {100.0, 50.0, 24.0, 5.0};
  params.waves["O3"] = {60.0, 30.0, 37.0, 3.0};
  for (const char* decoy : {"PM10", "NO", "NO2", "NOx", "NH3", "CO"}) {
    params.waves[decoy] = {50.0, 0.0, 24.0, 10.0};
  }
  const auto full = aqicast::generate_synthetic(seed, rows, params);
  const auto frame =
      full.select_columns({"PM2.5", "PM10", "NO", "NO2", "NOx", "NH3", "CO", "O3"});
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> noise(0.0, 0.1);
  Eigen::VectorXd y = 3.0 * frame.column("PM2.5") - 2.0 * frame.column("O3");
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += noise(rng);
  return frame.with_column("y", y);
}

struct OracleRows {
  Eigen::MatrixXd X;  // one column: normalized AQI score
  std::vector<aqicast::BucketLabel> labels;
};

// Balanced over the six buckets (row i targets bucket i % 6). Each row is a
// full pollutant reading whose AQI lands in the target interval; the single
// feature is its normalized AQI and the label is the bucket oracle's.
inline OracleRows oracle_rows(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OracleRows out;
  out.X.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    const int b = i % 6;
    const double score = b == 0 ? 0.0 : 0.25 * (b - 1) + 0.25 * (1.0 - u(rng));
    const double aqi = 400.0 * score;
    const double share = 0.2 + 0.6 * u(rng);
    std::map<std::string, double, std::less<>> reading;
    double weights[5];
    double total = 0.0;
    for (double& w : weights) total += (w = 0.5 + u(rng));
    int k = 0;
    for (auto name : aqicast::kAqiAveraged) {
      reading[std::string(name)] = aqi * share * 5.0 * weights[k++] / total;
    }
    const double peak = aqi * (1.0 - share);
    const bool co_wins = u(rng) < 0.5;
    reading["CO"] = co_wins ? peak : peak * u(rng);
    reading["O3"] = co_wins ? peak * u(rng) : peak;
    const double x = aqicast::normalize_aqi(aqicast::compute_aqi(reading));
    out.X(i, 0) = x;
    out.labels.push_back(aqicast::bucket_of_score(x));
  }
  return out;
}

inline aqicast::SvmHyper oracle_hyper(std::uint64_t seed) {
  aqicast::SvmHyper h;
  h.lambda = 1e-6;
  h.learning_rate = 1.0;
  h.epochs = 300;
  h.batch_size = 1;
  h.seed = seed;
  return h;
}

}  // namespace fixtures
