#ifndef TEMPORA_TEMPORAL_HPP_
#define TEMPORA_TEMPORAL_HPP_

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "tempora/corpus.hpp"
#include "tempora/error.hpp"

namespace tempora {

struct Config;

struct DecayConfig {
  double lambda = 0.5; // per slice width
  int window = 3;      // max slice distance; -1 = unlimited

  static DecayConfig from(const Config &config);
  void validate() const;
};

/// Exponential time decay g(dt) = exp(-lambda * dt).
template <typename Scalar> Scalar decay(Scalar delta_t, Scalar lambda) {
  if (!(delta_t >= Scalar(0)) || !(lambda >= Scalar(0))) {
    throw Error("decay: delta_t and lambda must be non-negative");
  }
  using std::exp;
  return exp(-lambda * delta_t);
}

/// Sparse row-stochastic attention. Row i holds weights over
/// `neighbors[i]` (ascending document indices, self included); every other
/// entry of the row is zero.
struct AttentionMatrix {
  std::vector<std::vector<Eigen::Index>> neighbors;
  std::vector<Eigen::VectorXd> weights;

  Eigen::Index rows() const { return static_cast<Eigen::Index>(neighbors.size()); }
  double weight(Eigen::Index i, Eigen::Index j) const;
  Eigen::MatrixXd dense() const;
};

/// Time-aware attention over documents. For j in the window of i,
///   a_ij = softmax_j( (h_i . h_j / sqrt(d)) * g(|slice(i) - slice(j)|) ),
/// the decay scaling the score inside the exponent.
AttentionMatrix attention_weights(const Eigen::MatrixXd &embeddings,
                                  const TimeSliceIndex &slices, const DecayConfig &cfg);

/// h~_i = sum_j a_ij h_j. Rows are convex combinations and are not
/// renormalized.
Eigen::MatrixXd temporal_pool(const Eigen::MatrixXd &embeddings, const AttentionMatrix &attention);

} // namespace tempora

#endif // TEMPORA_TEMPORAL_HPP_
