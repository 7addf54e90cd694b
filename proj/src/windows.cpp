#include "aqicast/windows.hpp"

#include "aqicast/error.hpp"

#include <string>

namespace aqicast {

WindowSet make_windows(const Eigen::MatrixXd& features, const Eigen::VectorXd& target,
                       Eigen::Index window_size, Eigen::Index horizon) {
  if (window_size < 1) {
    throw Error(ErrorKind::argument, "window size must be >= 1, got " + std::to_string(window_size));
  }
  if (horizon < 1) {
    throw Error(ErrorKind::argument, "horizon must be >= 1, got " + std::to_string(horizon));
  }
  if (features.rows() != target.size()) {
    throw Error(ErrorKind::shape, "series length " + std::to_string(features.rows()) +
                                      " != target length " + std::to_string(target.size()));
  }

  const Eigen::Index n_features = features.cols();
  const Eigen::Index count = window_count(features.rows(), window_size, horizon);
  WindowSet set;
  set.window_size = window_size;
  set.horizon = horizon;
  set.samples.resize(count, window_size * n_features);
  set.targets.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index w = 0; w < window_size; ++w) {
      set.samples.row(i).segment(w * n_features, n_features) = features.row(i + w);
    }
    set.targets[i] = target[i + window_size + horizon - 1];
  }
  return set;
}

}  // namespace aqicast
