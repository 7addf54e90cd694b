#pragma once

#include "aqicast/ingest.hpp"

#include <Eigen/Dense>

#include <array>
#include <map>
#include <string>
#include <string_view>

namespace aqicast {

enum class BucketLabel : int { Good = 0, Satisfactory, Moderate, Poor, VeryPoor, Severe };

inline constexpr int kBucketCount = 6;
inline constexpr std::array<BucketLabel, kBucketCount> kAllBuckets = {
    BucketLabel::Good, BucketLabel::Satisfactory, BucketLabel::Moderate,
    BucketLabel::Poor, BucketLabel::VeryPoor,     BucketLabel::Severe};

constexpr int ordinal(BucketLabel b) noexcept { return static_cast<int>(b); }
std::string_view to_string(BucketLabel b) noexcept;
/// Throws Error(domain) for an unknown name.
BucketLabel parse_bucket(std::string_view name);

/// Averaged and maximized inputs of the AQI formula.
inline constexpr std::array<std::string_view, 5> kAqiAveraged = {"PM2.5", "PM10", "SO2", "NOx",
                                                                 "NH3"};
inline constexpr std::array<std::string_view, 2> kAqiMaximized = {"CO", "O3"};

struct AqiConfig {
  double normalizer = 400.0;
  /// Upper-closed bucket edges over the normalized score:
  /// Good = [0, b0], Satisfactory = (b0, b1], ..., Severe = (b4, inf).
  std::array<double, 5> bounds = {0.0, 0.25, 0.5, 0.75, 1.0};

  void validate() const;
};

/// mean(PM2.5, PM10, SO2, NOx, NH3) + max(CO, O3)
double compute_aqi(const std::map<std::string, double, std::less<>>& reading);

/// Row-wise AQI of a complete frame; throws Error(missing_pollutant) if the
/// frame lacks one of the seven inputs.
Eigen::VectorXd compute_aqi(const SeriesFrame& frame);

double normalize_aqi(double aqi, const AqiConfig& config = {});

BucketLabel bucket_of_score(double score, const AqiConfig& config = {});

}  // namespace aqicast
