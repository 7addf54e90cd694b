#pragma once

// Periodized orthonormal discrete wavelet transform (Mallat pyramid).
//
// Each level splits the running approximation into a low-pass approximation
// and a high-pass detail sequence, both downsampled by two. An odd-length
// level is zero-padded by one sample first, so every level length is
// ceil(N / 2^k) and the analysis operator stays an isometry. Reconstruction
// applies the transposed (upsample-then-filter) operators and truncates each
// level back to its stored length.

#include "aqicast/error.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <optional>
#include <type_traits>
#include <string>
#include <string_view>
#include <vector>

namespace aqicast {

template <typename Scalar>
using Series = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class WaveletFilter { haar, db2 };
enum class ThresholdRule { none, universal_soft, universal_hard };

std::string_view to_string(WaveletFilter filter) noexcept;
std::string_view to_string(ThresholdRule rule) noexcept;
WaveletFilter parse_wavelet_filter(std::string_view name);
ThresholdRule parse_threshold_rule(std::string_view name);

/// Orthonormal two-channel filter bank. highpass[k] = (-1)^k lowpass[L-1-k].
template <typename Scalar>
struct FilterBank {
  Series<Scalar> lowpass;
  Series<Scalar> highpass;

  static FilterBank make(WaveletFilter filter) {
    using std::sqrt;
    FilterBank bank;
    if (filter == WaveletFilter::haar) {
      const Scalar r = Scalar(1) / sqrt(Scalar(2));
      bank.lowpass.resize(2);
      bank.lowpass << r, r;
    } else {
      const Scalar s3 = sqrt(Scalar(3));
      const Scalar den = Scalar(4) * sqrt(Scalar(2));
      bank.lowpass.resize(4);
      bank.lowpass << (Scalar(1) + s3) / den, (Scalar(3) + s3) / den,
          (Scalar(3) - s3) / den, (Scalar(1) - s3) / den;
    }
    const Eigen::Index taps = bank.lowpass.size();
    bank.highpass.resize(taps);
    for (Eigen::Index k = 0; k < taps; ++k) {
      const Scalar sign = (k % 2 == 0) ? Scalar(1) : Scalar(-1);
      bank.highpass[k] = sign * bank.lowpass[taps - 1 - k];
    }
    return bank;
  }
};

template <typename Scalar>
struct CoeffPyramid {
  int levels = 0;
  Series<Scalar> approx;               ///< coarsest approximation
  std::vector<Series<Scalar>> details;  ///< details[k-1] is level k (finest first)
  Eigen::Index original_length = 0;
  WaveletFilter filter = WaveletFilter::haar;

  Scalar energy() const {
    Scalar total = approx.squaredNorm();
    for (const auto& d : details) total += d.squaredNorm();
    return total;
  }
};

/// ceil(n / 2^k)
constexpr Eigen::Index level_length(Eigen::Index n, int k) noexcept {
  for (int i = 0; i < k; ++i) n = (n + 1) / 2;
  return n;
}

/// Deepest legal decomposition: every level must start from >= 2 samples.
constexpr int max_levels(Eigen::Index n) noexcept {
  int levels = 0;
  while (n >= 2) {
    n = (n + 1) / 2;
    ++levels;
  }
  return levels;
}

namespace detail {

/// One analysis step on an even-length signal.
template <typename Scalar>
void analyze(const Series<Scalar>& x, const FilterBank<Scalar>& bank, Series<Scalar>& approx,
             Series<Scalar>& detail) {
  const Eigen::Index m = x.size();
  const Eigen::Index half = m / 2;
  const Eigen::Index taps = bank.lowpass.size();
  approx.setZero(half);
  detail.setZero(half);
  for (Eigen::Index i = 0; i < half; ++i) {
    for (Eigen::Index k = 0; k < taps; ++k) {
      const Scalar v = x[(2 * i + k) % m];
      approx[i] += bank.lowpass[k] * v;
      detail[i] += bank.highpass[k] * v;
    }
  }
}

/// Transpose of analyze(): upsample by two, filter, sum both branches.
template <typename Scalar>
Series<Scalar> synthesize(const Series<Scalar>& approx, const Series<Scalar>& detail,
                          const FilterBank<Scalar>& bank) {
  const Eigen::Index half = approx.size();
  const Eigen::Index m = 2 * half;
  const Eigen::Index taps = bank.lowpass.size();
  Series<Scalar> x = Series<Scalar>::Zero(m);
  for (Eigen::Index i = 0; i < half; ++i) {
    for (Eigen::Index k = 0; k < taps; ++k) {
      x[(2 * i + k) % m] += bank.lowpass[k] * approx[i] + bank.highpass[k] * detail[i];
    }
  }
  return x;
}

template <typename Scalar>
Scalar median_abs(const Series<Scalar>& v) {
  std::vector<Scalar> a(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(v[i]);
  const std::size_t mid = a.size() / 2;
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid), a.end());
  Scalar upper = a[mid];
  if (a.size() % 2 == 1) return upper;
  const Scalar lower = *std::max_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / Scalar(2);
}

}  // namespace detail

template <typename Scalar>
CoeffPyramid<Scalar> dwt_decompose(const Series<Scalar>& signal, WaveletFilter filter,
                                   int levels) {
  if (levels < 1) {
    throw Error(ErrorKind::argument, "wavelet levels must be >= 1, got " + std::to_string(levels));
  }
  if (!signal.allFinite()) {
    throw Error(ErrorKind::numeric_input, "wavelet input contains non-finite values");
  }
  if (levels > max_levels(signal.size())) {
    throw Error(ErrorKind::level_depth,
                std::to_string(levels) + " levels too deep for a signal of length " +
                    std::to_string(signal.size()) + " (max " +
                    std::to_string(max_levels(signal.size())) + ")");
  }

  const auto bank = FilterBank<Scalar>::make(filter);
  CoeffPyramid<Scalar> pyramid;
  pyramid.levels = levels;
  pyramid.original_length = signal.size();
  pyramid.filter = filter;

  Series<Scalar> current = signal;
  for (int k = 1; k <= levels; ++k) {
    if (current.size() % 2 == 1) {
      current.conservativeResize(current.size() + 1);
      current[current.size() - 1] = Scalar(0);
    }
    Series<Scalar> low, high;
    detail::analyze(current, bank, low, high);
    pyramid.details.push_back(std::move(high));
    current = std::move(low);
  }
  pyramid.approx = std::move(current);
  return pyramid;
}

template <typename Scalar>
Series<Scalar> dwt_reconstruct(const CoeffPyramid<Scalar>& pyramid) {
  const Eigen::Index n = pyramid.original_length;
  const int levels = pyramid.levels;
  if (levels < 1 || n < 2 || static_cast<int>(pyramid.details.size()) != levels ||
      pyramid.approx.size() != level_length(n, levels)) {
    throw Error(ErrorKind::pyramid_shape, "pyramid levels and approximation length disagree");
  }
  for (int k = 1; k <= levels; ++k) {
    if (pyramid.details[static_cast<std::size_t>(k - 1)].size() != level_length(n, k)) {
      throw Error(ErrorKind::pyramid_shape,
                  "level " + std::to_string(k) + " detail has length " +
                      std::to_string(pyramid.details[static_cast<std::size_t>(k - 1)].size()) +
                      ", expected " + std::to_string(level_length(n, k)));
    }
  }

  const auto bank = FilterBank<Scalar>::make(pyramid.filter);
  Series<Scalar> current = pyramid.approx;
  for (int k = levels; k >= 1; --k) {
    Series<Scalar> up =
        detail::synthesize(current, pyramid.details[static_cast<std::size_t>(k - 1)], bank);
    current = up.head(level_length(n, k - 1));
  }
  return current;
}

/// sigma = median(|level-1 detail|) / 0.6745
template <typename Scalar>
Scalar estimate_noise_sigma(const CoeffPyramid<Scalar>& pyramid) {
  if (pyramid.details.empty() || pyramid.details.front().size() == 0) {
    throw Error(ErrorKind::estimation, "cannot estimate noise: level-1 detail is empty");
  }
  return detail::median_abs(pyramid.details.front()) / Scalar(0.6745);
}

/// lambda = sigma * sqrt(2 ln N)
template <typename Scalar>
Scalar universal_threshold(Scalar sigma, Eigen::Index n) {
  using std::log;
  using std::sqrt;
  return sigma * sqrt(Scalar(2) * log(static_cast<Scalar>(n)));
}

/// Shrinks every detail coefficient with a fixed lambda; approx untouched.
template <typename Scalar>
CoeffPyramid<Scalar> apply_threshold(CoeffPyramid<Scalar> pyramid, ThresholdRule rule,
                                     Scalar lambda) {
  if (rule == ThresholdRule::none) return pyramid;
  for (auto& d : pyramid.details) {
    if (rule == ThresholdRule::universal_soft) {
      d = d.unaryExpr([lambda](Scalar c) {
        const Scalar shrunk = std::max(std::abs(c) - lambda, Scalar(0));
        return c < Scalar(0) ? -shrunk : shrunk;
      });
    } else {
      d = d.unaryExpr([lambda](Scalar c) { return std::abs(c) > lambda ? c : Scalar(0); });
    }
  }
  return pyramid;
}

template <typename Scalar>
CoeffPyramid<Scalar> threshold_coeffs(CoeffPyramid<Scalar> pyramid, ThresholdRule rule,
                                      std::optional<std::type_identity_t<Scalar>> sigma_estimate = std::nullopt) {
  if (rule == ThresholdRule::none) return pyramid;
  const Scalar sigma = sigma_estimate ? *sigma_estimate : estimate_noise_sigma(pyramid);
  const Scalar lambda = universal_threshold(sigma, pyramid.original_length);
  return apply_threshold(std::move(pyramid), rule, lambda);
}

}  // namespace aqicast
