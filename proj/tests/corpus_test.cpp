#include <doctest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "support.hpp"
#include "tempora/error.hpp"

using namespace tempora;
using testing::Row;

namespace {

std::vector<std::string> terms_of(const Corpus &c, std::size_t doc) {
  std::vector<std::string> out;
  for (TermId t : c.documents[doc].tokens) {
    out.push_back(c.vocabulary.term(t));
  }
  return out;
}

std::string error_of(const std::string &text) {
  std::istringstream in(text);
  try {
    parse_corpus(in, {}, "f.jsonl");
  } catch (const Error &e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_CASE("tokenize") {
  TokenizerConfig cfg;
  CHECK(tokenize("The CAT sat.", cfg) == std::vector<std::string>{"the", "cat", "sat"});
  CHECK(tokenize("a b c", cfg).empty());
  CHECK(tokenize("", cfg).empty());

  // tools/oracles/oracles.py
  const std::string paragraph = "The quick-brown FOX jumped over 2 lazy dogs; a dog's life "
                                "is NOT easy, e.g. in 2024 x-rays & A/B tests cost $5 each!";
  CHECK(tokenize(paragraph, cfg) ==
        std::vector<std::string>{"the", "quick", "brown", "fox", "jumped", "over", "lazy",
                                 "dogs", "dog", "life", "is", "not", "easy", "in", "2024",
                                 "rays", "tests", "cost", "each"});

  cfg.stopwords = {"the", "is"};
  cfg.min_token_len = 4;
  CHECK(tokenize("The dog is quick", cfg) == std::vector<std::string>{"quick"});
}

TEST_CASE("tokenize keeps UTF-8 letters inside words") {
  CHECK(tokenize("caf\xc3\xa9 na\xc3\xafve", {}) ==
        std::vector<std::string>{"caf\xc3\xa9", "na\xc3\xafve"});
}

TEST_CASE("load sorts by timestamp then id") {
  const Corpus c = testing::corpus_of({{"c", 5, "gamma word"}, {"a", 1, "alpha word"},
                                       {"b", 3, "beta word"}, {"a2", 3, "beta two"}});
  REQUIRE(c.size() == 4);
  CHECK(c.documents[0].timestamp == 1);
  CHECK(c.documents[1].id == "a2");
  CHECK(c.documents[2].id == "b");
  CHECK(c.documents[3].timestamp == 5);
  CHECK(terms_of(c, 0) == std::vector<std::string>{"alpha", "word"});
}

TEST_CASE("empty documents are dropped and counted") {
  const Corpus c = testing::corpus_of({{"a", 1, "some words"}, {"b", 2, ""}, {"c", 3, "x y"}});
  CHECK(c.size() == 1);
  CHECK(c.report.records == 3);
  CHECK(c.report.dropped_empty == 2);
}

TEST_CASE("malformed records name the first bad line") {
  std::string text;
  for (int i = 1; i <= 100; ++i) {
    if (i == 37 || i == 81) {
      text += "{\"id\": \"d" + std::to_string(i) + "\", \"timestamp\": \n";
    } else {
      text += testing::jsonl({{"d" + std::to_string(i), i, "token text"}});
    }
  }
  const std::string msg = error_of(text);
  CHECK(msg.find("f.jsonl:37:") != std::string::npos);
  CHECK(msg.find(":81:") == std::string::npos);
}

TEST_CASE("record validation") {
  CHECK(error_of("{\"timestamp\":1,\"text\":\"aa\"}\n").find("'id'") != std::string::npos);
  CHECK(error_of("{\"id\":\"a\",\"text\":\"aa\"}\n").find("'timestamp'") != std::string::npos);
  CHECK(error_of("{\"id\":\"a\",\"timestamp\":1}\n").find("'text'") != std::string::npos);
  CHECK(error_of("[1,2]\n").find("f.jsonl:1:") != std::string::npos);
  CHECK(error_of("{\"id\":\"a\",\"timestamp\":\"yesterday\",\"text\":\"aa\"}\n") != "");
  CHECK(error_of("").find("zero documents") != std::string::npos);
  CHECK(error_of("{\"id\":\"a\",\"timestamp\":1,\"text\":\"a\"}\n").find("zero documents") !=
        std::string::npos);
}

TEST_CASE("ISO timestamps") {
  CHECK(iso8601_to_epoch_seconds("1970-01-01") == 0);
  CHECK(iso8601_to_epoch_seconds("2000-03-01T00:00:00Z") == 951868800);
  CHECK(iso8601_to_epoch_seconds("2000-03-01T01:30:00+01:30") == 951868800);
  CHECK(iso8601_to_epoch_seconds("1969-12-31T23:59:59") == -1);
  CHECK(iso8601_to_epoch_seconds("2024-02-29T12:00") == 1709208000);
  CHECK_THROWS_AS(iso8601_to_epoch_seconds("2023-02-29"), Error);
  CHECK_THROWS_AS(iso8601_to_epoch_seconds("2023-13-01"), Error);
  CHECK_THROWS_AS(iso8601_to_epoch_seconds("01/02/2023"), Error);

  std::istringstream in("{\"id\":\"a\",\"timestamp\":\"1970-01-02\",\"text\":\"aa bb\"}\n");
  CHECK(parse_corpus(in, {}).documents[0].timestamp == 86400);
}

TEST_CASE("vocabulary filtering") {
  const Corpus c = testing::corpus_of({{"1", 1, "xx aa"}, {"2", 2, "xx bb"}, {"3", 3, "xx aa cc"},
                                       {"4", 4, "xx dd"}});
  CHECK(c.vocabulary.terms() == std::vector<std::string>{"xx", "aa", "bb", "cc", "dd"});
  CHECK(c.vocabulary.df() == std::vector<std::size_t>{4, 2, 1, 1, 1});

  const Corpus f = build_vocabulary(c, {1, 0.75, 0});
  CHECK_FALSE(f.vocabulary.find("xx").has_value());
  CHECK(f.vocabulary.size() == 4);
  CHECK(terms_of(f, 2) == std::vector<std::string>{"aa", "cc"});

  const Corpus same = build_vocabulary(c, {});
  CHECK(same.vocabulary == c.vocabulary);
  CHECK(same.documents == c.documents);

  // bb, cc and dd tie on df; truncation keeps the smaller term.
  const Corpus t = build_vocabulary(c, {1, 1.0, 3});
  CHECK(t.vocabulary.terms() == std::vector<std::string>{"xx", "aa", "bb"});

  const Corpus m = build_vocabulary(c, {2, 1.0, 0});
  CHECK(m.vocabulary.terms() == std::vector<std::string>{"xx", "aa"});

  CHECK_THROWS_AS(build_vocabulary(c, {5, 1.0, 0}), Error);
}

TEST_CASE("documents emptied by the vocabulary are dropped") {
  const Corpus c = testing::corpus_of({{"1", 1, "aa bb"}, {"2", 2, "aa cc"}, {"3", 3, "zz"}});
  const Corpus f = build_vocabulary(c, {2, 1.0, 0});
  CHECK(f.size() == 2);
  CHECK(f.report.dropped_vocabulary == 1);
}

TEST_CASE("slice_by_time") {
  std::vector<std::int64_t> ts(100);
  std::iota(ts.begin(), ts.end(), 0);
  const TimeSliceIndex idx = slice_by_time(ts, 10);
  CHECK(idx.populations() == std::vector<std::size_t>(10, 10));
  CHECK(idx.boundaries.size() == 11);
  CHECK(idx.boundaries.front() == 0.0);
  CHECK(idx.boundaries.back() == 99.0);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const std::size_t s = idx.slice_of[i];
    CHECK(idx.boundaries[s] <= static_cast<double>(ts[i]));
    if (s + 1 < idx.num_slices) {
      CHECK(static_cast<double>(ts[i]) < idx.boundaries[s + 1]);
    }
  }

  const std::vector<std::int64_t> two{0, 10};
  const TimeSliceIndex pair = slice_by_time(two, 2);
  CHECK(pair.slice_of == std::vector<std::size_t>{0, 1});

  const std::vector<std::int64_t> same{7, 7, 7};
  CHECK_THROWS_AS(slice_by_time(same, 2), Error);
  CHECK_THROWS_AS(slice_by_time(two, 1), Error);

  const std::vector<std::int64_t> gap{0, 1, 10};
  try {
    slice_by_time(gap, 5);
    FAIL("expected an empty-slice error");
  } catch (const Error &e) {
    const std::string msg = e.what();
    CHECK(msg.find("slice 1") != std::string::npos);
    CHECK(msg.find("fewer") != std::string::npos);
  }
}

TEST_CASE("slice populations sum to N on fuzzed timestamps") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<std::int64_t> tick(-1000000000000LL, 1000000000000LL);
    std::vector<std::int64_t> ts(std::uniform_int_distribution<int>(2, 60)(rng));
    for (auto &t : ts) t = tick(rng);
    ts[1] = ts[0] + 1 + trial;
    const std::size_t slices = std::uniform_int_distribution<std::size_t>(2, 4)(rng);
    try {
      const TimeSliceIndex idx = slice_by_time(ts, slices);
      const auto pops = idx.populations();
      CHECK(std::accumulate(pops.begin(), pops.end(), std::size_t{0}) == ts.size());
      const auto [lo, hi] = std::minmax_element(ts.begin(), ts.end());
      CHECK(idx.slice_of[lo - ts.begin()] == 0);
      CHECK(idx.slice_of[hi - ts.begin()] == slices - 1);
    } catch (const Error &e) {
      INFO(std::string(e.what()));
      CHECK(std::string(e.what()).find("contains no documents") != std::string::npos);
    }
  }
}

TEST_CASE("bow_counts") {
  const Corpus c = testing::corpus_of({{"1", 1, "aa bb aa"}, {"2", 2, "cc"}});
  // vocabulary ranks aa, bb, cc (df 1 each, alphabetical)
  const Eigen::VectorXi v = bow_counts(c.documents[0], c.vocabulary);
  CHECK(v == (Eigen::VectorXi(3) << 2, 1, 0).finished());

  Document empty;
  CHECK(bow_counts(empty, c.vocabulary).sum() == 0);

  // tools/oracles/oracles.py: 50 tokens, 24 distinct
  const std::string text = "alpha beta gamma delta alpha beta alpha epsilon zeta alpha "
                           "beta gamma eta theta alpha iota kappa beta gamma alpha "
                           "lambda mu alpha beta nu xi omicron alpha pi rho "
                           "sigma tau alpha upsilon phi beta chi psi omega alpha "
                           "beta gamma delta alpha beta alpha gamma delta alpha omega";
  const Corpus big = testing::corpus_of({{"x", 0, text}});
  const Eigen::VectorXi counts = bow_counts(big.documents[0], big.vocabulary);
  CHECK(counts.sum() == 50);
  CHECK(big.vocabulary.size() == 24);
  CHECK(counts[*big.vocabulary.find("alpha")] == 13);
  CHECK(counts[*big.vocabulary.find("beta")] == 8);
  CHECK(counts[*big.vocabulary.find("gamma")] == 5);
  CHECK(counts[*big.vocabulary.find("delta")] == 3);
  CHECK(counts[*big.vocabulary.find("omega")] == 2);

  const CountMatrix m = count_matrix(c);
  CHECK(m.rows() == 2);
  CHECK(m.coeff(0, 0) == 2.0);
  CHECK(m.coeff(1, 2) == 1.0);
}

TEST_CASE("fuzzed documents: counts sum to token count, loads are deterministic") {
  std::mt19937_64 rng(99);
  const std::vector<std::string> words{"red", "green", "blue", "cyan", "pink", "gold", "teal"};
  std::vector<Row> rows;
  for (int i = 0; i < 100; ++i) {
    std::string text;
    const int len = std::uniform_int_distribution<int>(1, 40)(rng);
    for (int j = 0; j < len; ++j) {
      text += words[rng() % words.size()] + (j % 3 ? " " : ", ");
    }
    rows.push_back({"doc" + std::to_string(i), static_cast<std::int64_t>(rng() % 10), text});
  }
  const Corpus a = testing::corpus_of(rows);
  const Corpus b = testing::corpus_of(rows);
  CHECK(a == b);
  for (const auto &doc : a.documents) {
    CHECK(static_cast<std::size_t>(bow_counts(doc, a.vocabulary).sum()) == doc.tokens.size());
  }
  for (std::size_t i = 1; i < a.size(); ++i) {
    const auto &p = a.documents[i - 1], &q = a.documents[i];
    CHECK((p.timestamp < q.timestamp || (p.timestamp == q.timestamp && p.id < q.id)));
  }
}

TEST_CASE("binary corpus round trip") {
  testing::TempDir dir;
  const Corpus c = testing::corpus_of({{"1", 1, "aa bb", "x"}, {"2", 2, "bb cc"}});
  save_corpus_binary(c, dir / "c.bin");
  const Corpus back = load_corpus(dir / "c.bin", TokenizerConfig{});
  CHECK(back == c);

  testing::write_file(dir / "c.jsonl", testing::jsonl({{"1", 1, "aa bb", "x"}, {"2", 2, "bb cc"}}));
  CHECK(load_corpus(dir / "c.jsonl", TokenizerConfig{}) == c);

  const std::string bytes = testing::read_file(dir / "c.bin");
  testing::write_file(dir / "cut.bin", bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(load_corpus(dir / "cut.bin", TokenizerConfig{}), Error);
  CHECK_THROWS_AS(load_corpus(dir / "missing.jsonl", TokenizerConfig{}), Error);
}
