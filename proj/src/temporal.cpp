#include "tempora/temporal.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <limits>

#include "tempora/config.hpp"

namespace tempora {

DecayConfig DecayConfig::from(const Config &config) {
  DecayConfig cfg{config.lambda, config.attention_window};
  cfg.validate();
  return cfg;
}

void DecayConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error("decay config: lambda must be finite and >= 0");
  }
  if (window < -1) {
    throw Error("decay config: window must be >= 0, or -1 for unlimited");
  }
}

double AttentionMatrix::weight(Eigen::Index i, Eigen::Index j) const {
  const auto &nb = neighbors.at(static_cast<std::size_t>(i));
  const auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) {
    return 0.0;
  }
  return weights[static_cast<std::size_t>(i)][it - nb.begin()];
}

Eigen::MatrixXd AttentionMatrix::dense() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows(), rows());
  for (Eigen::Index i = 0; i < rows(); ++i) {
    const auto &nb = neighbors[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < nb.size(); ++k) {
      out(i, nb[k]) = weights[static_cast<std::size_t>(i)][static_cast<Eigen::Index>(k)];
    }
  }
  return out;
}

AttentionMatrix attention_weights(const Eigen::MatrixXd &embeddings,
                                  const TimeSliceIndex &slices, const DecayConfig &cfg) {
  cfg.validate();
  const Eigen::Index n = embeddings.rows();
  if (static_cast<std::size_t>(n) != slices.slice_of.size()) {
    throw Error("attention_weights: " + std::to_string(n) + " embeddings but " +
                std::to_string(slices.slice_of.size()) + " sliced documents");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(embeddings.row(i).norm() - 1.0) > 1e-6) {
      throw Error("attention_weights: embedding row " + std::to_string(i) + " is not unit norm");
    }
  }

  const auto members = slices.members();
  const auto num_slices = static_cast<long>(slices.num_slices);
  const long window = cfg.window < 0 ? num_slices : cfg.window;
  const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(embeddings.cols()));

  // decay depends only on the slice distance
  std::vector<double> g(static_cast<std::size_t>(std::min(window, num_slices) + 1));
  for (std::size_t dt = 0; dt < g.size(); ++dt) {
    g[dt] = decay(static_cast<double>(dt), cfg.lambda);
  }

  AttentionMatrix attn;
  attn.neighbors.resize(static_cast<std::size_t>(n));
  attn.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const long si = static_cast<long>(slices.slice_of[static_cast<std::size_t>(i)]);
    auto &nb = attn.neighbors[static_cast<std::size_t>(i)];
    for (long s = std::max(0L, si - window); s <= std::min(num_slices - 1, si + window); ++s) {
      for (const auto j : members[static_cast<std::size_t>(s)]) {
        nb.push_back(static_cast<Eigen::Index>(j));
      }
    }
    std::sort(nb.begin(), nb.end());
    assert(std::binary_search(nb.begin(), nb.end(), i));

    Eigen::VectorXd scores(static_cast<Eigen::Index>(nb.size()));
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const auto j = nb[k];
      const long dt = std::labs(si - static_cast<long>(slices.slice_of[static_cast<std::size_t>(j)]));
      scores[static_cast<Eigen::Index>(k)] =
          embeddings.row(i).dot(embeddings.row(j)) * inv_sqrt_d * g[static_cast<std::size_t>(dt)];
    }
    Eigen::VectorXd w = (scores.array() - scores.maxCoeff()).exp().matrix();
    w /= w.sum();
    attn.weights[static_cast<std::size_t>(i)] = std::move(w);
  }
  return attn;
}

Eigen::MatrixXd temporal_pool(const Eigen::MatrixXd &embeddings, const AttentionMatrix &attention) {
  if (attention.rows() != embeddings.rows()) {
    throw Error("temporal_pool: attention has " + std::to_string(attention.rows()) +
                " rows but there are " + std::to_string(embeddings.rows()) + " embeddings");
  }
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(embeddings.rows(), embeddings.cols());
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    const auto &nb = attention.neighbors[static_cast<std::size_t>(i)];
    const auto &w = attention.weights[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(nb.size()) != w.size()) {
      throw Error("temporal_pool: malformed attention row " + std::to_string(i));
    }
    for (std::size_t k = 0; k < nb.size(); ++k) {
      if (nb[k] < 0 || nb[k] >= embeddings.rows()) {
        throw Error("temporal_pool: neighbor index out of range in row " + std::to_string(i));
      }
      pooled.row(i) += w[static_cast<Eigen::Index>(k)] * embeddings.row(nb[k]);
    }
  }
  return pooled;
}

} // namespace tempora
