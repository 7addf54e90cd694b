#include "aqicast/aqi.hpp"

#include "aqicast/error.hpp"

#include <algorithm>
#include <cmath>

namespace aqicast {

std::string_view to_string(BucketLabel b) noexcept {
  switch (b) {
    case BucketLabel::Good: return "Good";
    case BucketLabel::Satisfactory: return "Satisfactory";
    case BucketLabel::Moderate: return "Moderate";
    case BucketLabel::Poor: return "Poor";
    case BucketLabel::VeryPoor: return "VeryPoor";
    case BucketLabel::Severe: return "Severe";
  }
  return "unknown";
}

BucketLabel parse_bucket(std::string_view name) {
  for (auto b : kAllBuckets) {
    if (to_string(b) == name) return b;
  }
  if (name == "Very Poor") return BucketLabel::VeryPoor;
  throw Error(ErrorKind::domain, "unknown AQI bucket '" + std::string(name) + "'");
}

void AqiConfig::validate() const {
  if (!(normalizer > 0.0) || !std::isfinite(normalizer)) {
    throw Error(ErrorKind::argument, "AQI normalizer must be a positive finite number");
  }
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    if (!(bounds[i - 1] < bounds[i])) {
      throw Error(ErrorKind::argument, "AQI bucket bounds must be strictly ascending");
    }
  }
}

double compute_aqi(const std::map<std::string, double, std::less<>>& reading) {
  auto value = [&](std::string_view name) {
    auto it = reading.find(name);
    if (it == reading.end() || std::isnan(it->second)) {
      throw Error(ErrorKind::missing_pollutant, "AQI input '" + std::string(name) + "' missing");
    }
    if (!std::isfinite(it->second) || it->second < 0.0) {
      throw Error(ErrorKind::domain, "AQI input '" + std::string(name) +
                                         "' must be finite and >= 0");
    }
    return it->second;
  };
  double sum = 0.0;
  for (auto name : kAqiAveraged) sum += value(name);
  double peak = 0.0;
  for (auto name : kAqiMaximized) peak = std::max(peak, value(name));
  return sum / static_cast<double>(kAqiAveraged.size()) + peak;
}

Eigen::VectorXd compute_aqi(const SeriesFrame& frame) {
  auto col = [&](std::string_view name) {
    auto idx = frame.column_index(name);
    if (!idx) {
      throw Error(ErrorKind::missing_pollutant,
                  "frame '" + frame.city() + "' lacks AQI input '" + std::string(name) + "'");
    }
    return frame.data().col(*idx);
  };
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(frame.rows());
  for (auto name : kAqiAveraged) mean += col(name);
  mean /= static_cast<double>(kAqiAveraged.size());
  Eigen::VectorXd aqi = mean + col(kAqiMaximized[0]).cwiseMax(col(kAqiMaximized[1]));
  if (!aqi.allFinite()) {
    throw Error(ErrorKind::missing_pollutant,
                "frame '" + frame.city() + "' has missing AQI inputs; impute first");
  }
  return aqi;
}

double normalize_aqi(double aqi, const AqiConfig& config) {
  config.validate();
  if (!(aqi >= 0.0)) throw Error(ErrorKind::domain, "AQI must be >= 0");
  return aqi / config.normalizer;
}

BucketLabel bucket_of_score(double score, const AqiConfig& config) {
  if (!(score >= 0.0)) {
    throw Error(ErrorKind::domain, "bucket score must be >= 0, got " + std::to_string(score));
  }
  for (std::size_t i = 0; i < config.bounds.size(); ++i) {
    if (score <= config.bounds[i]) return kAllBuckets[i];
  }
  return BucketLabel::Severe;
}

}  // namespace aqicast
