#pragma once

#include "aqicast/aqi.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace aqicast {

struct SvmHyper {
  double lambda = 1e-3;
  int epochs = 200;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
  int batch_size = 1;

  void validate() const;
};

/// Linear multiclass margin classifier: score_c(x) = W.row(c) . x + B[c].
/// Rows follow kAllBuckets; a class never seen in training keeps a zero row,
/// has trained[c] == false and never wins the argmax.
struct SvmModel {
  std::vector<BucketLabel> classes;
  Eigen::MatrixXd weights;  ///< C x d
  Eigen::VectorXd biases;   ///< C
  std::vector<bool> trained;
  std::vector<std::string> feature_names;
  SvmHyper hyper;
  double normalizer = 400.0;

  Eigen::Index dimension() const noexcept { return weights.cols(); }
  /// Throws Error(shape) / Error(numeric_input) when the invariants fail.
  void validate() const;
};

struct Prediction {
  BucketLabel label = BucketLabel::Good;
  Eigen::VectorXd scores;
};

struct SvmTraining {
  SvmModel model;
  /// Objective after each epoch (index 0 = initial zero model), evaluated on
  /// the internally standardized features.
  std::vector<double> objective;
  int rejected_epochs = 0;
};

/// Joint multiclass hinge:
///   lambda * sum_c |w_c|^2 + (1/n) sum_i max(0, 1 + max_{c != y_i} s_c(x_i) - s_{y_i}(x_i))
/// minimized by minibatch subgradient descent over seed-shuffled epochs.
/// Features are standardized internally and the scaling is folded back into
/// the returned weights and biases. An epoch that raises the objective is
/// discarded and the step size halved; an accepted one lets the step grow
/// back by 10%, never past hyper.learning_rate.
SvmTraining train_svm_with_history(const Eigen::MatrixXd& X, std::span<const BucketLabel> labels,
                                   const SvmHyper& hyper,
                                   std::vector<std::string> feature_names = {});

SvmModel train_svm(const Eigen::MatrixXd& X, std::span<const BucketLabel> labels,
                   const SvmHyper& hyper, std::vector<std::string> feature_names = {});

/// argmax over trained classes; ties go to the lower (cleaner) bucket.
Prediction predict(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

std::vector<BucketLabel> predict_labels(const SvmModel& model, const Eigen::MatrixXd& X);

}  // namespace aqicast
