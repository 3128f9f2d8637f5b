#include "tempora/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "tempora/error.hpp"

namespace tempora {

double perplexity(const CountMatrix &counts, const Eigen::MatrixXd &theta_doc,
                  const Eigen::MatrixXd &phi) {
  if (theta_doc.rows() != counts.rows() || theta_doc.cols() != phi.rows() ||
      phi.cols() != counts.cols()) {
    throw Error("perplexity: shape mismatch");
  }
  double log_lik = 0.0;
  double tokens = 0.0;
  for (Eigen::Index d = 0; d < counts.outerSize(); ++d) {
    for (CountMatrix::InnerIterator it(counts, d); it; ++it) {
      log_lik += it.value() * std::log(theta_doc.row(d).dot(phi.col(it.col())));
      tokens += it.value();
    }
  }
  if (!(tokens > 0.0)) {
    throw Error("perplexity: zero total token count");
  }
  return std::exp(-log_lik / tokens);
}

TopWords top_words(const Eigen::MatrixXd &phi, std::size_t n) {
  const auto v = static_cast<std::size_t>(phi.cols());
  if (n > v) {
    throw Error("top_words: n = " + std::to_string(n) + " exceeds vocabulary size " +
                std::to_string(v));
  }
  TopWords out(static_cast<std::size_t>(phi.rows()));
  std::vector<TermId> order(v);
  for (Eigen::Index k = 0; k < phi.rows(); ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                      [&](TermId a, TermId b) {
                        const double pa = phi(k, a);
                        const double pb = phi(k, b);
                        return pa != pb ? pa > pb : a < b;
                      });
    out[static_cast<std::size_t>(k)].assign(order.begin(),
                                            order.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return out;
}

double topic_diversity(const TopWords &top) {
  if (top.empty()) {
    throw Error("topic_diversity: no topics");
  }
  std::set<TermId> unique;
  std::size_t total = 0;
  for (const auto &list : top) {
    unique.insert(list.begin(), list.end());
    total += list.size();
  }
  if (total == 0) {
    throw Error("topic_diversity: empty top-word lists");
  }
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

double npmi(double p_i, double p_j, double p_ij) {
  if (!(p_i > 0.0 && p_j > 0.0 && p_ij > 0.0) || p_i > 1.0 || p_j > 1.0 || p_ij > 1.0) {
    throw Error("npmi: probabilities must lie in (0, 1]");
  }
  if (p_ij == 1.0) {
    return 1.0;
  }
  return std::log(p_ij / (p_i * p_j)) / -std::log(p_ij);
}

Coherence topic_coherence_npmi(const TopWords &top, const Corpus &corpus, std::size_t n) {
  const std::size_t num_docs = corpus.size();
  if (num_docs == 0) {
    throw Error("topic_coherence_npmi: empty corpus");
  }
  // sorted document lists for every word that appears in some top list
  std::set<TermId> needed;
  for (const auto &list : top) {
    needed.insert(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(std::min(n, list.size())));
  }
  std::vector<std::vector<std::size_t>> postings(corpus.vocabulary.size());
  for (std::size_t d = 0; d < num_docs; ++d) {
    for (const auto t : corpus.documents[d].tokens) {
      if (!needed.contains(t)) {
        continue;
      }
      auto &p = postings[static_cast<std::size_t>(t)];
      if (p.empty() || p.back() != d) {
        p.push_back(d);
      }
    }
  }

  const double inv_n = 1.0 / static_cast<double>(num_docs);
  Coherence out;
  out.per_topic.reserve(top.size());
  for (const auto &list : top) {
    std::vector<TermId> present;
    for (std::size_t r = 0; r < std::min(n, list.size()); ++r) {
      const auto t = list[r];
      if (t >= 0 && static_cast<std::size_t>(t) < postings.size() &&
          !postings[static_cast<std::size_t>(t)].empty()) {
        present.push_back(t);
      }
    }
    if (present.size() < 2) {
      out.per_topic.push_back(0.0);
      out.flagged.push_back(true);
      continue;
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < present.size(); ++a) {
      const auto &pa = postings[static_cast<std::size_t>(present[a])];
      for (std::size_t b = a + 1; b < present.size(); ++b) {
        const auto &pb = postings[static_cast<std::size_t>(present[b])];
        std::size_t co = 0;
        for (std::size_t x = 0, y = 0; x < pa.size() && y < pb.size();) {
          if (pa[x] < pb[y]) {
            ++x;
          } else if (pb[y] < pa[x]) {
            ++y;
          } else {
            ++co;
            ++x;
            ++y;
          }
        }
        const double p_ij = co == 0 ? inv_n : static_cast<double>(co) * inv_n;
        sum += npmi(static_cast<double>(pa.size()) * inv_n, static_cast<double>(pb.size()) * inv_n,
                    p_ij);
        ++pairs;
      }
    }
    out.per_topic.push_back(sum / static_cast<double>(pairs));
    out.flagged.push_back(false);
  }
  out.mean = out.per_topic.empty()
                 ? 0.0
                 : std::accumulate(out.per_topic.begin(), out.per_topic.end(), 0.0) /
                       static_cast<double>(out.per_topic.size());
  return out;
}

double topic_stability(const Eigen::MatrixXd &theta_slice) {
  if (theta_slice.rows() < 2) {
    throw Error("topic_stability: need at least two slices");
  }
  double sum = 0.0;
  for (Eigen::Index t = 0; t + 1 < theta_slice.rows(); ++t) {
    const double denom = theta_slice.row(t).norm() * theta_slice.row(t + 1).norm();
    if (!(denom > 0.0)) {
      throw Error("topic_stability: zero slice distribution");
    }
    sum += theta_slice.row(t).dot(theta_slice.row(t + 1)) / denom;
  }
  return sum / static_cast<double>(theta_slice.rows() - 1);
}

MetricsReport evaluation_report(const Corpus &corpus, const Eigen::MatrixXd &theta_doc,
                                const Eigen::MatrixXd &theta_slice, const Eigen::MatrixXd &phi) {
  const CountMatrix counts = count_matrix(corpus);
  const auto v = static_cast<std::size_t>(phi.cols());
  MetricsReport report;
  report.perplexity = perplexity(counts, theta_doc, phi);
  report.diversity = topic_diversity(top_words(phi, std::min(kDiversityTopN, v)));
  const auto top = top_words(phi, std::min(kCoherenceTopN, v));
  const auto coherence = topic_coherence_npmi(top, corpus, kCoherenceTopN);
  report.coherence = coherence.mean;
  report.per_topic_coherence = coherence.per_topic;
  report.flagged_topics = coherence.flagged;
  report.stability = topic_stability(theta_slice);
  for (const auto &list : top) {
    std::vector<std::string> words;
    words.reserve(list.size());
    for (const auto t : list) {
      words.push_back(corpus.vocabulary.term(t));
    }
    report.top_words.push_back(std::move(words));
  }
  return report;
}

nlohmann::ordered_json to_json(const MetricsReport &report) {
  nlohmann::ordered_json j;
  j["perplexity"] = report.perplexity;
  j["diversity"] = report.diversity;
  j["coherence"] = report.coherence;
  j["stability"] = report.stability;
  j["per_topic_coherence"] = report.per_topic_coherence;
  j["top_words"] = report.top_words;
  j["definitions"] = {
      {"perplexity", "exp(-sum_d sum_w c_dw log p(w|d) / sum_d sum_w c_dw), "
                     "p(w|d) = sum_k theta_dk phi_kw; per-token, over the evaluated corpus"},
      {"diversity", "unique terms among all topics' top-25 words / (K * 25)"},
      {"coherence", "mean over topics of mean NPMI over unordered pairs of the top-10 words; "
                    "document co-occurrence; p_ij = 1/N when a pair never co-occurs"},
      {"stability", "mean cosine similarity between consecutive slice topic distributions"},
      {"per_topic_coherence", "per-topic NPMI means; 0 for topics with fewer than two words "
                              "present in the corpus"},
      {"top_words", "top-10 words per topic by phi, ties to the lower term index"},
  };
  return j;
}

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::string per_topic_csv(const MetricsReport &report) {
  std::string out = "topic,coherence,flagged,top_words\n";
  for (std::size_t k = 0; k < report.per_topic_coherence.size(); ++k) {
    out += std::to_string(k) + "," + format_fixed(report.per_topic_coherence[k]) + "," +
           (k < report.flagged_topics.size() && report.flagged_topics[k] ? "1" : "0") + ",";
    if (k < report.top_words.size()) {
      for (std::size_t r = 0; r < report.top_words[k].size(); ++r) {
        out += (r == 0 ? "" : " ") + report.top_words[k][r];
      }
    }
    out += "\n";
  }
  return out;
}

} // namespace tempora
