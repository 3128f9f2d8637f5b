#ifndef TEMPORA_MODEL_HPP_
#define TEMPORA_MODEL_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tempora/corpus.hpp"
#include "tempora/error.hpp"

namespace tempora {

struct Config;

// ---------------------------------------------------------------------------
// Simplex primitives

/// Max-shifted softmax of a vector expression.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
softmax(const Eigen::MatrixBase<Derived> &logits) {
  using Scalar = typename Derived::Scalar;
  if (!logits.allFinite()) {
    throw Error("softmax: non-finite logits");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

/// theta = softmax(W h + b).
template <typename DerivedH, typename DerivedW, typename DerivedB>
Eigen::Matrix<typename DerivedH::Scalar, Eigen::Dynamic, 1>
topic_distribution(const Eigen::MatrixBase<DerivedH> &h, const Eigen::MatrixBase<DerivedW> &W,
                   const Eigen::MatrixBase<DerivedB> &b) {
  if (W.cols() != h.size() || W.rows() != b.size()) {
    throw Error("topic_distribution: shape mismatch");
  }
  if (!h.allFinite() || !W.allFinite() || !b.allFinite()) {
    throw Error("topic_distribution: non-finite input");
  }
  return softmax(W * h + b);
}

/// Clips negatives to zero and renormalizes; uniform when nothing positive
/// remains.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
simplex_project(const Eigen::MatrixBase<Derived> &v) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = v.cwiseMax(Scalar(0));
  const Scalar total = out.sum();
  if (!(total > Scalar(0))) {
    out.setConstant(Scalar(1) / static_cast<Scalar>(v.size()));
    return out;
  }
  return out / total;
}

/// A theta + eps with eps ~ N(0, sigma^2 I); eps = 0 without a generator.
/// The result is not projected onto the simplex.
template <typename DerivedT, typename DerivedA, typename Rng = std::mt19937_64>
Eigen::Matrix<typename DerivedT::Scalar, Eigen::Dynamic, 1>
transition_step(const Eigen::MatrixBase<DerivedT> &theta, const Eigen::MatrixBase<DerivedA> &A,
                typename DerivedT::Scalar sigma, Rng *rng = nullptr) {
  using Scalar = typename DerivedT::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> next = A * theta;
  if (rng != nullptr && sigma > Scalar(0)) {
    std::normal_distribution<Scalar> noise(Scalar(0), sigma);
    for (Eigen::Index k = 0; k < next.size(); ++k) {
      next[k] += noise(*rng);
    }
  }
  return next;
}

// ---------------------------------------------------------------------------
// Model state

enum class TrainMode { supervised, unsupervised };

struct ModelParams {
  Eigen::MatrixXd W;   // K x d
  Eigen::VectorXd b;   // K
  Eigen::MatrixXd A;   // K x K topic transition
  Eigen::MatrixXd phi; // K x V topic-word, rows on the simplex
  double sigma = 0.0;
  double beta = 1.0;

  Eigen::Index k() const { return W.rows(); }
};

struct TopicAssignments {
  Eigen::MatrixXd theta_doc;   // N x K
  Eigen::MatrixXd theta_slice; // T x K
};

struct TrainConfig {
  std::size_t epochs = 200;
  double learning_rate = 0.05;
  std::uint64_t seed = 7;
  TrainMode mode = TrainMode::unsupervised;
  double init_scale = 0.01;
  double beta = 1.0;
  std::size_t k = 20;
  double smoothing_eta = 0.01;
  double sigma = 0.0;

  static TrainConfig from(const Config &config);
  void validate() const;
};

struct LossTerms {
  double likelihood = 0.0;
  double consistency = 0.0;
  double total = 0.0;
};

struct Gradients {
  Eigen::MatrixXd W;
  Eigen::VectorXd b;
  Eigen::MatrixXd A;
  LossTerms loss;
};

/// One row of softmax(W h~_i + b) per document.
Eigen::MatrixXd topic_distributions(const Eigen::MatrixXd &pooled, const Eigen::MatrixXd &W,
                                    const Eigen::VectorXd &b);

/// Per-slice mean of document topic distributions. Throws on an empty slice.
Eigen::MatrixXd slice_topic_state(const Eigen::MatrixXd &theta_doc, const TimeSliceIndex &slices);

/// phi_kw proportional to eta + sum_d theta_dk c_dw.
Eigen::MatrixXd estimate_topic_word(const Eigen::MatrixXd &theta_doc, const CountMatrix &counts,
                                    double eta);

/// What the likelihood term scores: class labels (supervised) or token counts
/// under theta * phi (unsupervised).
struct Targets {
  TrainMode mode = TrainMode::unsupervised;
  std::vector<Eigen::Index> labels; // supervised: class index per document
  const CountMatrix *counts = nullptr;
};

/// Sorted distinct labels; class index = position. Throws when a document is
/// unlabeled.
std::vector<std::string> label_classes(const Corpus &corpus);
std::vector<Eigen::Index> label_indices(const Corpus &corpus, std::size_t k);

/// Likelihood term plus beta * sum_t ||theta_{t+1} - A theta_t||^2.
LossTerms joint_loss(const Eigen::MatrixXd &theta_doc, const Eigen::MatrixXd &theta_slice,
                     const Targets &targets, const ModelParams &params);

/// The objective over a fixed batch: pooled representations, slicing and
/// targets. phi is treated as a constant.
class Objective {
public:
  Objective(const Eigen::MatrixXd &pooled, const TimeSliceIndex &slices, Targets targets);

  TopicAssignments forward(const ModelParams &params) const;
  LossTerms loss(const ModelParams &params) const;
  /// Closed-form gradients of the total loss w.r.t. W, b and A.
  Gradients gradients(const ModelParams &params) const;

  const Targets &targets() const { return targets_; }

private:
  const Eigen::MatrixXd &pooled_;
  const TimeSliceIndex &slices_;
  Targets targets_;
  std::vector<double> inv_population_;
};

struct TrainResult {
  ModelParams params;
  TopicAssignments assignments;
  /// Loss before each step and once after the last one (epochs + 1 entries).
  std::vector<LossTerms> history;
};

/// Full-batch gradient descent on W, b and A. In unsupervised mode phi is
/// re-estimated from the current thetas before every step.
TrainResult train(const Corpus &corpus, const Eigen::MatrixXd &pooled,
                  const TimeSliceIndex &slices, const TrainConfig &cfg);

ModelParams initial_params(const TrainConfig &cfg, Eigen::Index dim, Eigen::Index vocab_size);

/// Iterates theta <- simplex_project(A theta) `steps` times.
std::vector<Eigen::VectorXd> forecast(const Eigen::VectorXd &theta_last, const Eigen::MatrixXd &A,
                                      std::size_t steps);

} // namespace tempora

#endif // TEMPORA_MODEL_HPP_
