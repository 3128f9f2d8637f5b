#ifndef TEMPORA_EMBED_HPP_
#define TEMPORA_EMBED_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tempora/corpus.hpp"
#include "tempora/error.hpp"

namespace tempora {

/// N x d document representations, one unit-norm row per document in corpus
/// order.
struct EmbeddingMatrix {
  Eigen::MatrixXd rows;
  std::string provider_tag;

  Eigen::Index size() const { return rows.rows(); }
  Eigen::Index dim() const { return rows.cols(); }
};

/// Maps documents to unit-norm d-vectors. Implementations other than the
/// remote client must be deterministic.
class EmbeddingProvider {
public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index dim() const = 0;
  /// One row per document, in input order.
  virtual Eigen::MatrixXd embed(std::span<const Document> docs) const = 0;
};

/// Seeded Gaussian random projection of tf-idf weights.
///
/// The d x V projection is filled row-major from one std::mt19937_64 seeded
/// with `seed`, drawing through a single std::normal_distribution<double>(0, 1).
/// A document's tf-idf weight for term w is log(1 + c_w) * log(1 + N / df_w).
class LocalEmbedder final : public EmbeddingProvider {
public:
  LocalEmbedder(const Vocabulary &vocabulary, std::size_t num_docs, std::uint64_t seed,
                Eigen::Index dim);

  std::string name() const override;
  Eigen::Index dim() const override { return projection_.rows(); }
  Eigen::MatrixXd embed(std::span<const Document> docs) const override;

  /// Embeds a count vector over the vocabulary. Throws on all-zero counts.
  Eigen::VectorXd embed_counts(const Eigen::Ref<const Eigen::VectorXi> &counts) const;

  const Eigen::MatrixXd &projection() const { return projection_; }
  const Eigen::VectorXd &idf() const { return idf_; }

  static Eigen::MatrixXd projection_matrix(std::uint64_t seed, Eigen::Index dim,
                                           Eigen::Index vocab_size);

private:
  std::uint64_t seed_;
  Eigen::MatrixXd projection_;
  Eigen::VectorXd idf_;
};

struct RemoteOptions {
  std::string endpoint; // e.g. http://localhost:8080
  Eigen::Index dim = 128;
  std::size_t batch_size = 32;
  std::chrono::milliseconds timeout{10000};
};

/// POSTs `{"texts": [...]}` to `{endpoint}/embed` and expects
/// `{"embeddings": [[...], ...]}` back. Vectors are renormalized on receipt.
std::vector<Eigen::VectorXd> remote_embed_batch(const std::vector<std::string> &texts,
                                                const RemoteOptions &options);

class RemoteEmbedder final : public EmbeddingProvider {
public:
  explicit RemoteEmbedder(RemoteOptions options) : options_(std::move(options)) {}

  std::string name() const override { return "remote:" + options_.endpoint; }
  Eigen::Index dim() const override { return options_.dim; }
  Eigen::MatrixXd embed(std::span<const Document> docs) const override;

private:
  RemoteOptions options_;
};

/// Embeds the corpus in batches of `batch_size`, preserving corpus order.
/// Provider failures are rethrown with the failing document id range.
EmbeddingMatrix embed_corpus(const Corpus &corpus, const EmbeddingProvider &provider,
                             std::size_t batch_size = 32);

std::unique_ptr<EmbeddingProvider> make_provider(const Config &config, const Corpus &corpus);

} // namespace tempora

#endif // TEMPORA_EMBED_HPP_
