#include "aqicast/svm.hpp"

#include "aqicast/error.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace aqicast {

void SvmHyper::validate() const {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::argument, "svm lambda must be >= 0");
  if (epochs < 1) throw Error(ErrorKind::argument, "svm epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::argument, "svm learning_rate must be > 0");
  if (batch_size < 1) throw Error(ErrorKind::argument, "svm batch_size must be >= 1");
}

void SvmModel::validate() const {
  const auto c = static_cast<Eigen::Index>(classes.size());
  if (weights.rows() != c || biases.size() != c || static_cast<Eigen::Index>(trained.size()) != c) {
    throw Error(ErrorKind::shape, "svm model has inconsistent class dimensions");
  }
  if (static_cast<Eigen::Index>(feature_names.size()) != weights.cols()) {
    throw Error(ErrorKind::shape, "svm model has " + std::to_string(feature_names.size()) +
                                      " feature names for " + std::to_string(weights.cols()) +
                                      " weight columns");
  }
  if (!weights.allFinite() || !biases.allFinite()) {
    throw Error(ErrorKind::numeric_input, "svm model parameters must be finite");
  }
  if (std::none_of(trained.begin(), trained.end(), [](bool t) { return t; })) {
    throw Error(ErrorKind::shape, "svm model has no trained class");
  }
}

namespace {

struct Problem {
  const Eigen::MatrixXd& z;  // standardized features, n x d
  const std::vector<int>& y;
  const std::vector<bool>& present;
  double lambda;
};

// Highest-scoring competitor of the true class among trained classes.
int rival(const Eigen::VectorXd& s, int truth, const std::vector<bool>& present) {
  int best = -1;
  for (int c = 0; c < static_cast<int>(s.size()); ++c) {
    if (c == truth || !present[static_cast<std::size_t>(c)]) continue;
    if (best < 0 || s[c] > s[best]) best = c;
  }
  return best;
}

double objective(const Problem& p, const Eigen::MatrixXd& W, const Eigen::VectorXd& B) {
  const Eigen::MatrixXd scores = (p.z * W.transpose()).rowwise() + B.transpose();
  double hinge = 0.0;
  for (Eigen::Index i = 0; i < p.z.rows(); ++i) {
    const Eigen::VectorXd s = scores.row(i).transpose();
    const int t = p.y[static_cast<std::size_t>(i)];
    const int r = rival(s, t, p.present);
    hinge += std::max(0.0, 1.0 + s[r] - s[t]);
  }
  return p.lambda * W.squaredNorm() + hinge / static_cast<double>(p.z.rows());
}

}  // namespace

SvmTraining train_svm_with_history(const Eigen::MatrixXd& X, std::span<const BucketLabel> labels,
                                   const SvmHyper& hyper, std::vector<std::string> feature_names) {
  hyper.validate();
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw Error(ErrorKind::shape, "svm: " + std::to_string(n) + " rows but " +
                                      std::to_string(labels.size()) + " labels");
  }
  if (n < 2) throw Error(ErrorKind::insufficient_data, "svm needs at least 2 samples");
  if (d < 1) throw Error(ErrorKind::shape, "svm needs at least one feature");
  if (!X.allFinite()) throw Error(ErrorKind::numeric_input, "svm features must be finite");
  if (feature_names.empty()) {
    for (Eigen::Index j = 0; j < d; ++j) feature_names.push_back("x" + std::to_string(j));
  }
  if (static_cast<Eigen::Index>(feature_names.size()) != d) {
    throw Error(ErrorKind::shape, "svm: feature name count does not match columns");
  }

  std::vector<int> y(labels.size());
  std::vector<bool> present(kBucketCount, false);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    y[i] = ordinal(labels[i]);
    present[static_cast<std::size_t>(y[i])] = true;
  }
  if (std::count(present.begin(), present.end(), true) < 2) {
    throw Error(ErrorKind::degenerate_labels, "svm needs at least two distinct labels");
  }

  const Eigen::RowVectorXd mean = X.colwise().mean();
  Eigen::RowVectorXd scale =
      ((X.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(scale[j] > 1e-12 * std::max(1.0, std::abs(mean[j])))) scale[j] = 1.0;
  }
  const Eigen::MatrixXd z = (X.rowwise() - mean).array().rowwise() / scale.array();

  const Problem problem{z, y, present, hyper.lambda};
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(kBucketCount, d);
  Eigen::VectorXd B = Eigen::VectorXd::Zero(kBucketCount);

  SvmTraining result;
  double current = objective(problem, W, B);
  result.objective.push_back(current);

  std::mt19937_64 rng(hyper.seed);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  double lr = hyper.learning_rate;
  const auto batch = static_cast<std::size_t>(hyper.batch_size);

  Eigen::MatrixXd gradW(kBucketCount, d);
  Eigen::VectorXd gradB(kBucketCount);
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd Wt = W;
    Eigen::VectorXd Bt = B;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      gradW = 2.0 * hyper.lambda * Wt;
      gradB.setZero();
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (std::size_t k = start; k < stop; ++k) {
        const Eigen::Index i = order[k];
        const Eigen::VectorXd s = Wt * z.row(i).transpose() + Bt;
        const int t = y[static_cast<std::size_t>(i)];
        const int r = rival(s, t, present);
        if (1.0 + s[r] - s[t] > 0.0) {
          gradW.row(t) -= inv * z.row(i);
          gradW.row(r) += inv * z.row(i);
          gradB[t] -= inv;
          gradB[r] += inv;
        }
      }
      Wt -= lr * gradW;
      Bt -= lr * gradB;
    }
    const double next = objective(problem, Wt, Bt);
    if (next <= current) {
      W = std::move(Wt);
      B = std::move(Bt);
      current = next;
      lr = std::min(hyper.learning_rate, lr * 1.1);
    } else {
      lr *= 0.5;
      ++result.rejected_epochs;
    }
    result.objective.push_back(current);
  }

  // Fold standardization back: w_orig = w / scale, b_orig = b - w_orig . mean.
  SvmModel& model = result.model;
  model.classes.assign(kAllBuckets.begin(), kAllBuckets.end());
  model.weights = W.array().rowwise() / scale.array();
  model.biases = B - model.weights * mean.transpose();
  for (int c = 0; c < kBucketCount; ++c) {
    if (!present[static_cast<std::size_t>(c)]) {
      model.weights.row(c).setZero();
      model.biases[c] = 0.0;
    }
  }
  model.trained = present;
  model.feature_names = std::move(feature_names);
  model.hyper = hyper;
  return result;
}

SvmModel train_svm(const Eigen::MatrixXd& X, std::span<const BucketLabel> labels,
                   const SvmHyper& hyper, std::vector<std::string> feature_names) {
  return train_svm_with_history(X, labels, hyper, std::move(feature_names)).model;
}

Prediction predict(const SvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.dimension()) {
    throw Error(ErrorKind::shape, "predict: input has " + std::to_string(x.size()) +
                                      " features, model expects " +
                                      std::to_string(model.dimension()));
  }
  if (!x.allFinite()) throw Error(ErrorKind::numeric_input, "predict: input must be finite");
  Prediction p;
  p.scores = model.weights * x + model.biases;
  int best = -1;
  for (int c = 0; c < static_cast<int>(p.scores.size()); ++c) {
    if (!model.trained[static_cast<std::size_t>(c)]) continue;
    if (best < 0 || p.scores[c] > p.scores[best]) best = c;
  }
  p.label = model.classes[static_cast<std::size_t>(best)];
  return p;
}

std::vector<BucketLabel> predict_labels(const SvmModel& model, const Eigen::MatrixXd& X) {
  std::vector<BucketLabel> out;
  out.reserve(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out.push_back(predict(model, X.row(i).transpose()).label);
  }
  return out;
}

}  // namespace aqicast
