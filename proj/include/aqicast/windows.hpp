#pragma once

#include <Eigen/Dense>

namespace aqicast {

/// Sliding-window samples: row i holds features[i .. i+window_size) flattened
/// row by row, and targets[i] = target[i + window_size + horizon - 1].
struct WindowSet {
  Eigen::Index window_size = 0;
  Eigen::Index horizon = 0;
  Eigen::MatrixXd samples;
  Eigen::VectorXd targets;

  Eigen::Index size() const noexcept { return samples.rows(); }
};

/// max(0, length - window_size - horizon + 1)
constexpr Eigen::Index window_count(Eigen::Index length, Eigen::Index window_size,
                                    Eigen::Index horizon) noexcept {
  const Eigen::Index n = length - window_size - horizon + 1;
  return n > 0 ? n : 0;
}

/// Multi-feature form: `features` is length x n_features.
WindowSet make_windows(const Eigen::MatrixXd& features, const Eigen::VectorXd& target,
                       Eigen::Index window_size, Eigen::Index horizon);

inline WindowSet make_windows(const Eigen::VectorXd& series, const Eigen::VectorXd& target,
                              Eigen::Index window_size, Eigen::Index horizon) {
  return make_windows(Eigen::MatrixXd(series), target, window_size, horizon);
}

}  // namespace aqicast
