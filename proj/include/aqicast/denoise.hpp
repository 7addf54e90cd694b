#pragma once

#include "aqicast/ingest.hpp"
#include "aqicast/wavelet.hpp"

namespace aqicast {

struct DenoiseConfig {
  WaveletFilter filter = WaveletFilter::haar;
  int levels = 3;
  ThresholdRule threshold_rule = ThresholdRule::universal_soft;
};

/// decompose -> threshold -> reconstruct, with levels clamped to the legal
/// depth for the series length.
Eigen::VectorXd denoise_series(const Eigen::VectorXd& series, const DenoiseConfig& config);

/// Denoises every column of an imputed frame independently. Timestamps and
/// column order are preserved.
SeriesFrame preprocess_frame(const SeriesFrame& frame, const DenoiseConfig& config);

}  // namespace aqicast
