#include "tempora/embed.hpp"

#include <random>

#include "tempora/config.hpp"
#include "tempora/error.hpp"

namespace tempora {

LocalEmbedder::LocalEmbedder(const Vocabulary &vocabulary, std::size_t num_docs,
                             std::uint64_t seed, Eigen::Index dim)
    : seed_(seed) {
  if (dim < 2) {
    throw Error("local embedder: dimension must be >= 2");
  }
  if (num_docs == 0 || vocabulary.size() == 0) {
    throw Error("local embedder: empty corpus or vocabulary");
  }
  const auto v = static_cast<Eigen::Index>(vocabulary.size());
  projection_ = projection_matrix(seed, dim, v);
  idf_.resize(v);
  const double n = static_cast<double>(num_docs);
  for (Eigen::Index w = 0; w < v; ++w) {
    const auto df = static_cast<double>(vocabulary.df(static_cast<TermId>(w)));
    idf_[w] = std::log1p(n / df);
  }
}

Eigen::MatrixXd LocalEmbedder::projection_matrix(std::uint64_t seed, Eigen::Index dim,
                                                 Eigen::Index vocab_size) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd p(dim, vocab_size);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < vocab_size; ++c) {
      p(r, c) = normal(rng);
    }
  }
  return p;
}

std::string LocalEmbedder::name() const {
  return "local:seed=" + std::to_string(seed_) + ",d=" + std::to_string(dim());
}

Eigen::VectorXd LocalEmbedder::embed_counts(const Eigen::Ref<const Eigen::VectorXi> &counts) const {
  if (counts.size() != idf_.size()) {
    throw Error("local embedder: count vector length " + std::to_string(counts.size()) +
                " does not match vocabulary size " + std::to_string(idf_.size()));
  }
  if ((counts.array() < 0).any()) {
    throw Error("local embedder: negative count");
  }
  if ((counts.array() == 0).all()) {
    throw Error("local embedder: all-zero count vector");
  }
  const Eigen::VectorXd tfidf =
      counts.cast<double>().array().log1p().matrix().cwiseProduct(idf_);
  Eigen::VectorXd v = projection_ * tfidf;
  const double norm = v.norm();
  if (!(norm > 0)) {
    throw Error("local embedder: projection collapsed to zero");
  }
  return v / norm;
}

Eigen::MatrixXd LocalEmbedder::embed(std::span<const Document> docs) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(docs.size()), dim());
  Eigen::VectorXi counts(idf_.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    counts.setZero();
    for (const auto t : docs[i].tokens) {
      if (t < 0 || t >= counts.size()) {
        throw Error("local embedder: document '" + docs[i].id +
                    "' has a token outside the vocabulary");
      }
      ++counts[t];
    }
    out.row(static_cast<Eigen::Index>(i)) = embed_counts(counts).transpose();
  }
  return out;
}

EmbeddingMatrix embed_corpus(const Corpus &corpus, const EmbeddingProvider &provider,
                             std::size_t batch_size) {
  if (corpus.documents.empty()) {
    throw Error("embed_corpus: empty corpus");
  }
  if (batch_size == 0) {
    throw Error("embed_corpus: batch size must be >= 1");
  }
  const std::span<const Document> docs(corpus.documents);
  EmbeddingMatrix h;
  h.provider_tag = provider.name();
  h.rows.resize(static_cast<Eigen::Index>(docs.size()), provider.dim());
  for (std::size_t begin = 0; begin < docs.size(); begin += batch_size) {
    const auto count = std::min(batch_size, docs.size() - begin);
    const auto batch = docs.subspan(begin, count);
    Eigen::MatrixXd block;
    try {
      block = provider.embed(batch);
      if (block.rows() != static_cast<Eigen::Index>(count) || block.cols() != provider.dim()) {
        throw Error("provider returned a " + std::to_string(block.rows()) + "x" +
                    std::to_string(block.cols()) + " block");
      }
      for (Eigen::Index r = 0; r < block.rows(); ++r) {
        if (!(std::abs(block.row(r).norm() - 1.0) <= 1e-9)) {
          throw Error("provider returned a row without unit norm");
        }
      }
    } catch (const Error &e) {
      throw Error("embedding documents '" + batch.front().id + "'..'" + batch.back().id +
                  "' failed: " + e.what());
    }
    h.rows.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count)) = block;
  }
  return h;
}

std::unique_ptr<EmbeddingProvider> make_provider(const Config &config, const Corpus &corpus) {
  const auto dim = static_cast<Eigen::Index>(config.embed_dim);
  if (config.provider == "remote") {
    return std::make_unique<RemoteEmbedder>(
        RemoteOptions{config.endpoint, dim, config.embed_batch_size,
                      std::chrono::milliseconds(config.embed_timeout_ms)});
  }
  return std::make_unique<LocalEmbedder>(corpus.vocabulary, corpus.size(), config.embed_seed, dim);
}

} // namespace tempora
