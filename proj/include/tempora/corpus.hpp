#ifndef TEMPORA_CORPUS_HPP_
#define TEMPORA_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace tempora {

struct Config;

using TermId = std::int32_t;
using CountMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct TokenizerConfig {
  std::size_t min_token_len = 2;
  std::unordered_set<std::string> stopwords;

  /// Reads `min_token_len` and, when set, the one-word-per-line
  /// `stopword_file`.
  static TokenizerConfig from(const Config &config);
};

/// Lowercases ASCII, splits on runs of non-alphanumeric ASCII characters,
/// then drops short tokens and stopwords. Bytes >= 0x80 are kept inside
/// tokens so UTF-8 letters never split a word.
std::vector<std::string> tokenize(std::string_view raw_text,
                                  const TokenizerConfig &cfg);

struct Document {
  std::string id;
  std::int64_t timestamp = 0;
  std::optional<std::string> label;
  std::vector<TermId> tokens;
  std::string raw_text;

  bool operator==(const Document &) const = default;
};

class Vocabulary {
public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df);

  std::size_t size() const { return terms_.size(); }
  const std::string &term(TermId id) const { return terms_.at(static_cast<std::size_t>(id)); }
  std::size_t df(TermId id) const { return df_.at(static_cast<std::size_t>(id)); }
  std::optional<TermId> find(std::string_view term) const;

  const std::vector<std::string> &terms() const { return terms_; }
  const std::vector<std::size_t> &df() const { return df_; }

  bool operator==(const Vocabulary &other) const {
    return terms_ == other.terms_ && df_ == other.df_;
  }

private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, TermId> index_;
};

struct LoadReport {
  std::size_t records = 0;
  std::size_t dropped_empty = 0;      // no tokens left after tokenizing
  std::size_t dropped_vocabulary = 0; // no tokens left after vocabulary filtering

  bool operator==(const LoadReport &) const = default;
};

/// Documents sorted by (timestamp, id); every token id < vocabulary.size().
struct Corpus {
  std::vector<Document> documents;
  Vocabulary vocabulary;
  LoadReport report;

  std::size_t size() const { return documents.size(); }
  bool has_labels() const;

  bool operator==(const Corpus &) const = default;
};

struct VocabularyConfig {
  std::size_t min_df = 1;
  double max_df_frac = 1.0;
  std::size_t max_size = 0; // 0 = unlimited

  static VocabularyConfig from(const Config &config);
};

/// One unparsed input record. `tokens` is filled by the caller.
struct TextRecord {
  std::string id;
  std::int64_t timestamp = 0;
  std::optional<std::string> label;
  std::string raw_text;
  std::vector<std::string> tokens;
};

/// Sorts the records, drops empty ones and builds the vocabulary. Throws
/// when nothing survives.
Corpus assemble_corpus(std::vector<TextRecord> records,
                       const VocabularyConfig &vocab_cfg = {});

/// Parses line-delimited JSON records (`id`, `timestamp`, `text`, optional
/// `label`). `source` names the stream in error messages.
Corpus parse_corpus(std::istream &in, const TokenizerConfig &cfg,
                    std::string_view source = "<stream>");

/// Loads a JSONL corpus or a binary corpus written by save_corpus_binary
/// (detected by its magic header). The vocabulary holds every surviving
/// token, ranked by (df desc, term asc).
Corpus load_corpus(const std::filesystem::path &path, const TokenizerConfig &cfg);

void save_corpus_binary(const Corpus &corpus, const std::filesystem::path &path);

/// Applies df filtering and size truncation, remapping token ids. Documents
/// left without tokens are dropped and counted in the report.
Corpus build_vocabulary(const Corpus &corpus, const VocabularyConfig &cfg);

/// `YYYY-MM-DD` or `YYYY-MM-DDTHH:MM[:SS[.fff]][Z|+HH:MM|-HH:MM]` to Unix
/// seconds. Throws on anything else.
std::int64_t iso8601_to_epoch_seconds(std::string_view text);

struct TimeSliceIndex {
  std::size_t num_slices = 0;
  std::vector<std::size_t> slice_of;
  std::vector<double> boundaries; // num_slices + 1 ascending tick values

  std::vector<std::size_t> populations() const;
  /// Document indices of each slice, ascending.
  std::vector<std::vector<std::size_t>> members() const;
};

/// Equal-width slicing of [min, max] timestamp. The last slice includes max.
TimeSliceIndex slice_by_time(std::span<const std::int64_t> timestamps,
                             std::size_t num_slices);
TimeSliceIndex slice_by_time(const Corpus &corpus, std::size_t num_slices);

/// Number of distinct timestamps, the default slice count.
std::size_t distinct_timestamps(const Corpus &corpus);

Eigen::VectorXi bow_counts(const Document &doc, const Vocabulary &vocabulary);

/// N x V sparse counts, one row per document.
CountMatrix count_matrix(const Corpus &corpus);

} // namespace tempora

#endif // TEMPORA_CORPUS_HPP_
