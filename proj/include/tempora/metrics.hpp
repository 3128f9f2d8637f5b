#ifndef TEMPORA_METRICS_HPP_
#define TEMPORA_METRICS_HPP_

#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "tempora/corpus.hpp"

namespace tempora {

using TopWords = std::vector<std::vector<TermId>>;

inline constexpr std::size_t kDiversityTopN = 25;
inline constexpr std::size_t kCoherenceTopN = 10;

/// Per-token perplexity exp(-sum c log p(w|d) / sum c), p(w|d) = theta_d . phi_w.
double perplexity(const CountMatrix &counts, const Eigen::MatrixXd &theta_doc,
                  const Eigen::MatrixXd &phi);

/// Indices of the n largest entries of each phi row; ties go to the lower
/// index.
TopWords top_words(const Eigen::MatrixXd &phi, std::size_t n);

/// Unique terms across all lists divided by the total list length.
double topic_diversity(const TopWords &top);

/// log(p_ij / (p_i p_j)) / -log p_ij; defined as 1 when p_ij = 1.
double npmi(double p_i, double p_j, double p_ij);

struct Coherence {
  double mean = 0.0;
  std::vector<double> per_topic;
  std::vector<bool> flagged; // fewer than two top words occur in the corpus
};

/// NPMI over unordered pairs of each topic's first n top words, with
/// document co-occurrence as the window. A pair that never co-occurs gets
/// p_ij = 1/N.
Coherence topic_coherence_npmi(const TopWords &top, const Corpus &corpus,
                               std::size_t n = kCoherenceTopN);

/// Mean cosine similarity of consecutive slice topic distributions.
double topic_stability(const Eigen::MatrixXd &theta_slice);

struct MetricsReport {
  double perplexity = 0.0;
  double diversity = 0.0;
  double coherence = 0.0;
  double stability = 0.0;
  std::vector<double> per_topic_coherence;
  std::vector<bool> flagged_topics;
  std::vector<std::vector<std::string>> top_words;
};

MetricsReport evaluation_report(const Corpus &corpus, const Eigen::MatrixXd &theta_doc,
                                const Eigen::MatrixXd &theta_slice, const Eigen::MatrixXd &phi);

/// Flat object with the metric fields plus a `definitions` map.
nlohmann::ordered_json to_json(const MetricsReport &report);

/// `topic,coherence,flagged,top_words` with one row per topic.
std::string per_topic_csv(const MetricsReport &report);

/// Fixed-precision (`.6f`) formatting used by every CSV writer.
std::string format_fixed(double value);

} // namespace tempora

#endif // TEMPORA_METRICS_HPP_
