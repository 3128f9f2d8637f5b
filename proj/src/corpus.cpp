#include "tempora/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <chrono>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tempora/config.hpp"
#include "tempora/detail/binary_io.hpp"
#include "tempora/error.hpp"

namespace tempora {

namespace {

constexpr char kCorpusMagic[16] = {'T', 'E', 'M', 'P', 'O', 'R', 'A', '-',
                                   'C', 'O', 'R', 'P', 'U', 'S', '\0', '\0'};
constexpr std::uint32_t kCorpusVersion = 1;

bool is_token_char(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

bool record_less(const TextRecord &a, const TextRecord &b) {
  if (a.timestamp != b.timestamp) {
    return a.timestamp < b.timestamp;
  }
  return a.id < b.id;
}

} // namespace

TokenizerConfig TokenizerConfig::from(const Config &config) {
  TokenizerConfig cfg;
  cfg.min_token_len = static_cast<std::size_t>(config.min_token_len);
  if (!config.stopword_file.empty()) {
    std::ifstream in(config.stopword_file);
    if (!in) {
      throw Error("cannot open stopword file '" + config.stopword_file + "'");
    }
    std::string line;
    while (std::getline(in, line)) {
      for (auto &w : tokenize(line, TokenizerConfig{1, {}})) {
        cfg.stopwords.insert(std::move(w));
      }
    }
  }
  return cfg;
}

std::vector<std::string> tokenize(std::string_view raw_text,
                                  const TokenizerConfig &cfg) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (current.size() >= cfg.min_token_len && !cfg.stopwords.contains(current)) {
      out.push_back(current);
    }
    current.clear();
  };
  for (const char ch : raw_text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_char(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!current.empty()) {
      flush();
    }
  }
  if (!current.empty()) {
    flush();
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df)
    : terms_(std::move(terms)), df_(std::move(df)) {
  if (terms_.size() != df_.size()) {
    throw Error("vocabulary: terms and df differ in length");
  }
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], static_cast<TermId>(i)).second) {
      throw Error("vocabulary: duplicate term '" + terms_[i] + "'");
    }
  }
}

std::optional<TermId> Vocabulary::find(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

bool Corpus::has_labels() const {
  return !documents.empty() &&
         std::all_of(documents.begin(), documents.end(),
                     [](const Document &d) { return d.label.has_value(); });
}

VocabularyConfig VocabularyConfig::from(const Config &config) {
  return VocabularyConfig{static_cast<std::size_t>(config.min_df), config.max_df_frac,
                          config.max_vocab};
}

Corpus assemble_corpus(std::vector<TextRecord> records,
                       const VocabularyConfig &vocab_cfg) {
  Corpus corpus;
  corpus.report.records = records.size();

  std::erase_if(records, [&](const TextRecord &r) {
    if (r.tokens.empty()) {
      ++corpus.report.dropped_empty;
      return true;
    }
    return false;
  });
  if (records.empty()) {
    throw Error("corpus: zero documents after filtering");
  }
  std::stable_sort(records.begin(), records.end(), record_less);

  // document frequencies over the surviving records
  std::map<std::string, std::size_t> df;
  for (const auto &r : records) {
    std::vector<std::string_view> unique(r.tokens.begin(), r.tokens.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (const auto t : unique) {
      ++df[std::string(t)];
    }
  }

  const double n_docs = static_cast<double>(records.size());
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto &[term, count] : df) {
    if (count < vocab_cfg.min_df ||
        static_cast<double>(count) > vocab_cfg.max_df_frac * n_docs) {
      continue;
    }
    ranked.emplace_back(term, count);
  }
  // std::map iteration is already term-ascending; stable sort keeps that
  // order among equal df.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  if (vocab_cfg.max_size > 0 && ranked.size() > vocab_cfg.max_size) {
    ranked.resize(vocab_cfg.max_size);
  }
  if (ranked.empty()) {
    throw Error("corpus: empty vocabulary after filtering");
  }

  std::vector<std::string> terms;
  std::vector<std::size_t> dfs;
  terms.reserve(ranked.size());
  dfs.reserve(ranked.size());
  for (auto &[term, count] : ranked) {
    terms.push_back(std::move(term));
    dfs.push_back(count);
  }
  corpus.vocabulary = Vocabulary(std::move(terms), std::move(dfs));

  corpus.documents.reserve(records.size());
  for (auto &r : records) {
    Document doc{std::move(r.id), r.timestamp, std::move(r.label), {}, std::move(r.raw_text)};
    doc.tokens.reserve(r.tokens.size());
    for (const auto &t : r.tokens) {
      if (const auto id = corpus.vocabulary.find(t)) {
        doc.tokens.push_back(*id);
      }
    }
    if (doc.tokens.empty()) {
      ++corpus.report.dropped_vocabulary;
      continue;
    }
    corpus.documents.push_back(std::move(doc));
  }
  if (corpus.documents.empty()) {
    throw Error("corpus: zero documents after vocabulary filtering");
  }
  return corpus;
}

Corpus build_vocabulary(const Corpus &corpus, const VocabularyConfig &cfg) {
  if (corpus.documents.empty()) {
    throw Error("build_vocabulary: empty corpus");
  }
  std::vector<TextRecord> records;
  records.reserve(corpus.size());
  for (const auto &d : corpus.documents) {
    TextRecord r{d.id, d.timestamp, d.label, d.raw_text, {}};
    r.tokens.reserve(d.tokens.size());
    for (const auto t : d.tokens) {
      r.tokens.push_back(corpus.vocabulary.term(t));
    }
    records.push_back(std::move(r));
  }
  Corpus out = assemble_corpus(std::move(records), cfg);
  out.report.records = corpus.report.records;
  out.report.dropped_empty = corpus.report.dropped_empty;
  out.report.dropped_vocabulary += corpus.report.dropped_vocabulary;
  return out;
}

std::int64_t iso8601_to_epoch_seconds(std::string_view text) {
  auto fail = [&] {
    throw Error("invalid ISO-8601 timestamp '" + std::string(text) + "'");
  };
  auto number = [&](std::size_t pos, std::size_t len) {
    if (pos + len > text.size()) {
      fail();
    }
    int v = 0;
    const auto *first = text.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + len, v);
    if (ec != std::errc{} || ptr != first + len) {
      fail();
    }
    return v;
  };
  auto expect = [&](std::size_t pos, char c) {
    if (pos >= text.size() || text[pos] != c) {
      fail();
    }
  };

  const int year = number(0, 4);
  expect(4, '-');
  const int month = number(5, 2);
  expect(7, '-');
  const int day = number(8, 2);
  const std::chrono::year_month_day ymd{std::chrono::year{year},
                                        std::chrono::month{static_cast<unsigned>(month)},
                                        std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) {
    fail();
  }
  std::int64_t seconds = std::chrono::sys_days{ymd}.time_since_epoch().count() * 86400ll;
  std::size_t pos = 10;
  if (pos == text.size()) {
    return seconds;
  }
  if (text[pos] != 'T' && text[pos] != ' ') {
    fail();
  }
  const int hh = number(pos + 1, 2);
  expect(pos + 3, ':');
  const int mm = number(pos + 4, 2);
  int ss = 0;
  pos += 6;
  if (pos < text.size() && text[pos] == ':') {
    ss = number(pos + 1, 2);
    pos += 3;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        ++pos; // fractional seconds truncated
      }
    }
  }
  if (hh > 23 || mm > 59 || ss > 60) {
    fail();
  }
  seconds += hh * 3600 + mm * 60 + ss;
  if (pos == text.size()) {
    return seconds;
  }
  if (text[pos] == 'Z' && pos + 1 == text.size()) {
    return seconds;
  }
  if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size()) {
    const int oh = number(pos + 1, 2);
    expect(pos + 3, ':');
    const int om = number(pos + 4, 2);
    const int offset = oh * 3600 + om * 60;
    return text[pos] == '+' ? seconds - offset : seconds + offset;
  }
  fail();
  return 0;
}

Corpus parse_corpus(std::istream &in, const TokenizerConfig &cfg,
                    std::string_view source) {
  using nlohmann::json;
  std::vector<TextRecord> records;
  std::string line;
  std::size_t line_no = 0;
  const std::string where(source);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const std::string prefix = where + ":" + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw Error(prefix + "malformed record (" + e.what() + ")");
    }
    if (!j.is_object()) {
      throw Error(prefix + "malformed record (expected a JSON object)");
    }
    auto field = [&](const char *name) -> const json & {
      const auto it = j.find(name);
      if (it == j.end() || it->is_null()) {
        throw Error(prefix + "missing required field '" + name + "'");
      }
      return *it;
    };
    TextRecord r;
    const auto &id = field("id");
    const auto &ts = field("timestamp");
    const auto &text = field("text");
    if (!id.is_string() || !text.is_string()) {
      throw Error(prefix + "malformed record ('id' and 'text' must be strings)");
    }
    r.id = id.get<std::string>();
    r.raw_text = text.get<std::string>();
    if (ts.is_number_integer()) {
      r.timestamp = ts.get<std::int64_t>();
    } else if (ts.is_string()) {
      try {
        r.timestamp = iso8601_to_epoch_seconds(ts.get<std::string>());
      } catch (const Error &e) {
        throw Error(prefix + "malformed record (" + e.what() + ")");
      }
    } else {
      throw Error(prefix + "malformed record ('timestamp' must be an integer or ISO-8601 string)");
    }
    if (const auto it = j.find("label"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) {
        throw Error(prefix + "malformed record ('label' must be a string)");
      }
      r.label = it->get<std::string>();
    }
    r.tokens = tokenize(r.raw_text, cfg);
    records.push_back(std::move(r));
  }
  return assemble_corpus(std::move(records));
}

Corpus load_corpus(const std::filesystem::path &path, const TokenizerConfig &cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open corpus file '" + path.string() + "'");
  }
  char head[16] = {};
  in.read(head, 16);
  const bool binary = in.gcount() == 16 && std::memcmp(head, kCorpusMagic, 16) == 0;
  if (!binary) {
    in.clear();
    in.seekg(0);
    return parse_corpus(in, cfg, path.string());
  }

  detail::Reader rd(in, path.string());
  if (const auto version = rd.u32(); version != kCorpusVersion) {
    throw Error("'" + path.string() + "': unsupported corpus version " + std::to_string(version));
  }
  Corpus corpus;
  corpus.report.records = rd.u64();
  corpus.report.dropped_empty = rd.u64();
  corpus.report.dropped_vocabulary = rd.u64();
  const auto v = rd.count(1ull << 32);
  std::vector<std::string> terms(v);
  std::vector<std::size_t> df(v);
  for (std::size_t i = 0; i < v; ++i) {
    terms[i] = rd.string();
    df[i] = rd.u64();
  }
  corpus.vocabulary = Vocabulary(std::move(terms), std::move(df));
  const auto n = rd.count(1ull << 32);
  corpus.documents.resize(n);
  for (auto &d : corpus.documents) {
    d.id = rd.string();
    d.timestamp = static_cast<std::int64_t>(rd.u64());
    char has_label = 0;
    rd.read_bytes(&has_label, 1);
    if (has_label != 0) {
      d.label = rd.string();
    }
    d.raw_text = rd.string();
    const auto nt = rd.count(1ull << 32);
    d.tokens.resize(nt);
    for (auto &t : d.tokens) {
      const auto id = rd.u32();
      if (id >= v) {
        throw Error("'" + path.string() + "': token id out of vocabulary range");
      }
      t = static_cast<TermId>(id);
    }
  }
  return corpus;
}

void save_corpus_binary(const Corpus &corpus, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write corpus file '" + path.string() + "'");
  }
  out.write(kCorpusMagic, 16);
  detail::write_u32(out, kCorpusVersion);
  detail::write_u64(out, corpus.report.records);
  detail::write_u64(out, corpus.report.dropped_empty);
  detail::write_u64(out, corpus.report.dropped_vocabulary);
  detail::write_u64(out, corpus.vocabulary.size());
  for (std::size_t i = 0; i < corpus.vocabulary.size(); ++i) {
    detail::write_string(out, corpus.vocabulary.terms()[i]);
    detail::write_u64(out, corpus.vocabulary.df()[i]);
  }
  detail::write_u64(out, corpus.documents.size());
  for (const auto &d : corpus.documents) {
    detail::write_string(out, d.id);
    detail::write_u64(out, static_cast<std::uint64_t>(d.timestamp));
    const char has_label = d.label ? 1 : 0;
    out.write(&has_label, 1);
    if (d.label) {
      detail::write_string(out, *d.label);
    }
    detail::write_string(out, d.raw_text);
    detail::write_u64(out, d.tokens.size());
    for (const auto t : d.tokens) {
      detail::write_u32(out, static_cast<std::uint32_t>(t));
    }
  }
  if (!out) {
    throw Error("error writing corpus file '" + path.string() + "'");
  }
}

std::vector<std::size_t> TimeSliceIndex::populations() const {
  std::vector<std::size_t> pop(num_slices, 0);
  for (const auto s : slice_of) {
    ++pop[s];
  }
  return pop;
}

std::vector<std::vector<std::size_t>> TimeSliceIndex::members() const {
  std::vector<std::vector<std::size_t>> out(num_slices);
  for (std::size_t i = 0; i < slice_of.size(); ++i) {
    out[slice_of[i]].push_back(i);
  }
  return out;
}

TimeSliceIndex slice_by_time(std::span<const std::int64_t> timestamps,
                             std::size_t num_slices) {
  if (num_slices < 2) {
    throw Error("slice_by_time: num_slices must be >= 2");
  }
  if (timestamps.empty()) {
    throw Error("slice_by_time: no documents");
  }
  const auto [lo_it, hi_it] = std::minmax_element(timestamps.begin(), timestamps.end());
  const std::int64_t lo = *lo_it;
  const std::int64_t hi = *hi_it;
  if (lo == hi) {
    throw Error("slice_by_time: all documents share timestamp " + std::to_string(lo) +
                "; at least two distinct timestamps are required");
  }
  const auto span = static_cast<__int128>(hi) - lo;

  TimeSliceIndex index;
  index.num_slices = num_slices;
  index.boundaries.resize(num_slices + 1);
  for (std::size_t s = 0; s <= num_slices; ++s) {
    index.boundaries[s] = static_cast<double>(lo) +
                          static_cast<double>(span) * static_cast<double>(s) /
                              static_cast<double>(num_slices);
  }
  index.boundaries.back() = static_cast<double>(hi);

  // t lies in slice s iff s*span <= (t-lo)*T < (s+1)*span, in exact integers.
  index.slice_of.resize(timestamps.size());
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    const auto scaled = (static_cast<__int128>(timestamps[i]) - lo) *
                        static_cast<__int128>(num_slices);
    const auto s = static_cast<std::size_t>(scaled / span);
    index.slice_of[i] = std::min(s, num_slices - 1);
  }

  const auto pop = index.populations();
  for (std::size_t s = 0; s < num_slices; ++s) {
    if (pop[s] == 0) {
      throw Error("slice_by_time: slice " + std::to_string(s) + " of " +
                  std::to_string(num_slices) +
                  " contains no documents; try fewer slices");
    }
  }
  return index;
}

TimeSliceIndex slice_by_time(const Corpus &corpus, std::size_t num_slices) {
  std::vector<std::int64_t> ts;
  ts.reserve(corpus.size());
  for (const auto &d : corpus.documents) {
    ts.push_back(d.timestamp);
  }
  return slice_by_time(ts, num_slices);
}

std::size_t distinct_timestamps(const Corpus &corpus) {
  std::vector<std::int64_t> ts;
  ts.reserve(corpus.size());
  for (const auto &d : corpus.documents) {
    ts.push_back(d.timestamp);
  }
  std::sort(ts.begin(), ts.end());
  return static_cast<std::size_t>(std::unique(ts.begin(), ts.end()) - ts.begin());
}

Eigen::VectorXi bow_counts(const Document &doc, const Vocabulary &vocabulary) {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(vocabulary.size()));
  for (const auto t : doc.tokens) {
    if (t >= 0 && static_cast<std::size_t>(t) < vocabulary.size()) {
      ++counts[t];
    }
  }
  return counts;
}

CountMatrix count_matrix(const Corpus &corpus) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (const auto t : corpus.documents[d].tokens) {
      triplets.emplace_back(static_cast<int>(d), t, 1.0);
    }
  }
  CountMatrix counts(static_cast<Eigen::Index>(corpus.size()),
                     static_cast<Eigen::Index>(corpus.vocabulary.size()));
  counts.setFromTriplets(triplets.begin(), triplets.end()); // duplicates summed
  counts.makeCompressed();
  return counts;
}

} // namespace tempora
