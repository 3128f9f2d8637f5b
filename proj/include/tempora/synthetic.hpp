#ifndef TEMPORA_SYNTHETIC_HPP_
#define TEMPORA_SYNTHETIC_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "tempora/corpus.hpp"

namespace tempora {

/// Generator settings. a_true and phi_true are filled by make_synthetic_spec
/// unless given explicitly.
struct SyntheticSpec {
  std::size_t k = 3;
  std::size_t v = 50;
  std::size_t num_slices = 40;
  std::size_t docs_per_slice = 20;
  std::size_t doc_length = 30;
  double sigma = 0.01;
  std::uint64_t seed = 11;
  Eigen::MatrixXd a_true;   // K x K, columns sum to 1 for a stochastic map
  Eigen::MatrixXd phi_true; // K x V, rows on the simplex

  void validate() const;
};

/// How the default transition matrix spreads its off-diagonal mass.
enum class TransitionPattern { cyclic, uniform };

struct SyntheticDefaults {
  double off_diagonal = 0.2;
  TransitionPattern pattern = TransitionPattern::uniform;
  double phi_alpha = 0.1; // symmetric Dirichlet concentration for phi_true
};

/// Column-stochastic K x K matrix with (1 - off_diagonal) on the diagonal.
/// cyclic: column j sends off_diagonal to topic (j + 1) mod K.
/// uniform: column j spreads off_diagonal evenly over the other topics.
Eigen::MatrixXd stochastic_transition(std::size_t k, double off_diagonal, TransitionPattern pattern);

/// Fills a_true and phi_true (Dirichlet rows drawn from the seed) when they
/// are empty.
SyntheticSpec make_synthetic_spec(SyntheticSpec spec, const SyntheticDefaults &defaults = {});

/// Parses a flat `key = value` spec file: k, v, num_slices, docs_per_slice,
/// doc_length, sigma, seed, off_diagonal, transition (cyclic|uniform),
/// phi_alpha, a_true (row-major, comma separated).
/// `seed`, when given, replaces the file's seed before a_true/phi_true are
/// drawn.
SyntheticSpec parse_synthetic_spec(std::string_view text,
                                   std::optional<std::uint64_t> seed = std::nullopt);
SyntheticSpec load_synthetic_spec(const std::filesystem::path &path,
                                  std::optional<std::uint64_t> seed = std::nullopt);

struct SyntheticCorpus {
  std::vector<TextRecord> records; // generation order: slice by slice
  Eigen::MatrixXd theta;           // T x K ground-truth slice trajectory
  std::vector<std::size_t> doc_topics;
  SyntheticSpec spec;

  /// Tokenized, sorted corpus (default tokenizer and vocabulary settings).
  Corpus corpus() const;
};

/// theta_1 uniform on the simplex, theta_{t+1} = project(A theta_t + eps);
/// each document draws one topic from theta_t and doc_length i.i.d. tokens
/// `w000`... from that topic's row of phi_true. Timestamps are slice indices.
SyntheticCorpus generate_synthetic(const SyntheticSpec &spec);

std::string term_name(std::size_t index, std::size_t v);

void write_jsonl(const std::vector<TextRecord> &records, const std::filesystem::path &path);
nlohmann::ordered_json truth_json(const SyntheticCorpus &synthetic);

/// Re-indexes phi columns from a corpus vocabulary onto the generator's
/// `w###` term order. Terms absent from the corpus get zero mass.
Eigen::MatrixXd phi_over_synthetic_terms(const Eigen::MatrixXd &phi, const Vocabulary &vocabulary,
                                         std::size_t v);

struct RecoveryScore {
  double frobenius_error = 0.0;
  std::vector<std::size_t> permutation; // permutation[k] = estimated topic matched to true k
  double phi_match = 0.0;
};

/// Greedy best-cosine topic matching, then ||P A_est P^T - A_true||_F.
RecoveryScore recovery_score(const Eigen::MatrixXd &a_est, const Eigen::MatrixXd &phi_est,
                             const Eigen::MatrixXd &a_true, const Eigen::MatrixXd &phi_true);

} // namespace tempora

#endif // TEMPORA_SYNTHETIC_HPP_
