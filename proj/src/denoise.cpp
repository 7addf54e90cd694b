#include "aqicast/denoise.hpp"

#include <algorithm>

namespace aqicast {

std::string_view to_string(WaveletFilter filter) noexcept {
  return filter == WaveletFilter::haar ? "haar" : "db2";
}

std::string_view to_string(ThresholdRule rule) noexcept {
  switch (rule) {
    case ThresholdRule::none: return "none";
    case ThresholdRule::universal_soft: return "universal_soft";
    case ThresholdRule::universal_hard: return "universal_hard";
  }
  return "unknown";
}

WaveletFilter parse_wavelet_filter(std::string_view name) {
  if (name == "haar") return WaveletFilter::haar;
  if (name == "db2") return WaveletFilter::db2;
  throw Error(ErrorKind::config, "unknown wavelet filter '" + std::string(name) + "'");
}

ThresholdRule parse_threshold_rule(std::string_view name) {
  if (name == "none") return ThresholdRule::none;
  if (name == "universal_soft") return ThresholdRule::universal_soft;
  if (name == "universal_hard") return ThresholdRule::universal_hard;
  throw Error(ErrorKind::config, "unknown threshold rule '" + std::string(name) + "'");
}

Eigen::VectorXd denoise_series(const Eigen::VectorXd& series, const DenoiseConfig& config) {
  if (config.levels < 1) {
    throw Error(ErrorKind::argument, "denoise levels must be >= 1");
  }
  if (series.size() < 2) {
    throw Error(ErrorKind::column_too_short,
                "series of length " + std::to_string(series.size()) + " cannot be decomposed");
  }
  const int levels = std::min(config.levels, max_levels(series.size()));
  auto pyramid = dwt_decompose<double>(series, config.filter, levels);
  if (config.threshold_rule != ThresholdRule::none) {
    pyramid = threshold_coeffs(std::move(pyramid), config.threshold_rule);
  }
  return dwt_reconstruct(pyramid);
}

SeriesFrame preprocess_frame(const SeriesFrame& frame, const DenoiseConfig& config) {
  if (frame.missing_count() != 0) {
    throw Error(ErrorKind::numeric_input,
                "frame '" + frame.city() + "' has missing cells; impute before denoising");
  }
  Eigen::MatrixXd data(frame.rows(), frame.cols());
  for (Eigen::Index j = 0; j < frame.cols(); ++j) {
    try {
      data.col(j) = denoise_series(frame.data().col(j), config);
    } catch (const Error& e) {
      throw Error(e.kind(), "column '" + frame.columns()[static_cast<std::size_t>(j)] +
                                "' of '" + frame.city() + "': " + e.what());
    }
  }
  return frame.with_data(std::move(data));
}

}  // namespace aqicast
