// Eigen must precede httplib: <resolv.h> defines a `_res` macro.
#include "tempora/embed.hpp"

#include <doctest.h>

#include <atomic>
#include <numeric>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "support.hpp"
#include "tempora/config.hpp"

using namespace tempora;

TEST_CASE("projection matrix matches the reference generator") {
  // tools/oracles/oracles.py: mt19937_64(42), polar normal sampler, row-major
  const double expected[4][3] = {
      {0.7049882664208599, 1.2938204232729367, -0.5740948067202617},
      {0.39797739618378897, -1.9066853448304646, 1.1185550524574792},
      {-0.7241229319089416, -1.4922470037224242, 0.015012782590840492},
      {-0.308808671763744, 1.0477023474153664, 1.4133667356902182},
  };
  const Eigen::MatrixXd p = LocalEmbedder::projection_matrix(42, 4, 3);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 3; ++c) {
      CHECK(p(r, c) == expected[r][c]);
    }
  }
}

TEST_CASE("local embedding of a fixed count vector") {
  const Vocabulary vocab({"a", "b", "c"}, {2, 1, 1});
  const LocalEmbedder e(vocab, 3, 42, 4);
  const Eigen::VectorXd v = e.embed_counts(Eigen::Vector3i(2, 1, 0));
  const double expected[4] = {0.58815037283945557, -0.4311249007661338, -0.65137437152130983,
                              0.20957549234922322};
  for (int r = 0; r < 4; ++r) {
    CHECK(v[r] == doctest::Approx(expected[r]).epsilon(1e-13));
  }
  CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.name() == "local:seed=42,d=4");

  CHECK_THROWS_AS(e.embed_counts(Eigen::Vector3i(0, 0, 0)), Error);
  CHECK_THROWS_AS(e.embed_counts(Eigen::Vector2i(1, 0)), Error);
  CHECK_THROWS_AS(LocalEmbedder(vocab, 3, 42, 1), Error);
}

TEST_CASE("local embedding is deterministic and unit norm on fuzzed documents") {
  std::mt19937_64 rng(5);
  std::vector<testing::Row> rows;
  for (int i = 0; i < 100; ++i) {
    std::string text;
    for (int j = 0, len = 1 + static_cast<int>(rng() % 25); j < len; ++j) {
      text += "t" + std::to_string(rng() % 60) + " ";
    }
    rows.push_back({"d" + std::to_string(i), static_cast<std::int64_t>(i % 7), text});
  }
  const Corpus corpus = testing::corpus_of(rows);
  const LocalEmbedder e(corpus.vocabulary, corpus.size(), 7, 32);
  const EmbeddingMatrix a = embed_corpus(corpus, e, 9);
  const EmbeddingMatrix b = embed_corpus(corpus, e, 100);
  CHECK(a.rows == b.rows);
  CHECK(a.provider_tag == "local:seed=7,d=32");
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    CHECK(a.rows.row(i).norm() == doctest::Approx(1.0).epsilon(1e-9));
  }

  // Row-wise composition with the single-document embedding.
  for (std::size_t i = 0; i < 10; ++i) {
    const Eigen::VectorXd v = e.embed_counts(bow_counts(corpus.documents[i], corpus.vocabulary));
    CHECK(a.rows.row(static_cast<Eigen::Index>(i)) == v.transpose());
  }

  // Permutation equivariance.
  std::vector<Document> shuffled(corpus.documents.begin(), corpus.documents.end());
  std::vector<std::size_t> order(shuffled.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Document> permuted;
  for (std::size_t i : order) permuted.push_back(corpus.documents[i]);
  const Eigen::MatrixXd p = e.embed(permuted);
  const Eigen::MatrixXd q = e.embed(corpus.documents);
  for (std::size_t i = 0; i < order.size(); ++i) {
    CHECK(p.row(static_cast<Eigen::Index>(i)) == q.row(static_cast<Eigen::Index>(order[i])));
  }
}

TEST_CASE("embed_corpus shapes") {
  const Corpus one = testing::corpus_of({{"a", 0, "solo text"}});
  const LocalEmbedder e(one.vocabulary, 1, 1, 8);
  CHECK(embed_corpus(one, e).rows.rows() == 1);
  CHECK(embed_corpus(one, e).rows.cols() == 8);

  const Corpus dup = testing::corpus_of({{"a", 0, "same text"}, {"b", 0, "same text"}});
  const LocalEmbedder f(dup.vocabulary, 2, 1, 8);
  const Eigen::MatrixXd m = embed_corpus(dup, f).rows;
  CHECK(m.row(0) == m.row(1));
}

namespace {

/// Serves /embed with one fixed vector per text, chosen by text content.
class StubServer {
public:
  explicit StubServer(std::function<void(const httplib::Request &, httplib::Response &)> handler) {
    server_.Post("/embed", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

void echo_lengths(const httplib::Request &req, httplib::Response &res) {
  const auto body = nlohmann::json::parse(req.body);
  nlohmann::json out = nlohmann::json::array();
  for (const auto &t : body["texts"]) {
    const double n = static_cast<double>(t.get<std::string>().size());
    out.push_back({n, 2.0 * n, 2.0});
  }
  res.set_content(nlohmann::json{{"embeddings", out}}.dump(), "application/json");
}

} // namespace

TEST_CASE("remote embedding round trip") {
  StubServer stub(echo_lengths);
  RemoteOptions opts;
  opts.endpoint = stub.endpoint();
  opts.dim = 3;
  opts.batch_size = 4;
  const auto vs = remote_embed_batch({"a", "abcd"}, opts);
  REQUIRE(vs.size() == 2);
  // (1, 2, 2) / 3 and (4, 8, 2) / sqrt(84)
  CHECK(vs[0][0] == doctest::Approx(1.0 / 3.0));
  CHECK(vs[0][2] == doctest::Approx(2.0 / 3.0));
  CHECK(vs[1][1] == doctest::Approx(8.0 / std::sqrt(84.0)));

  const Corpus c = testing::corpus_of(
      {{"1", 0, "aa"}, {"2", 1, "aa bb"}, {"3", 2, "aa bb cc"}, {"4", 3, "aa bb cc dd"},
       {"5", 4, "aa bb cc dd ee"}});
  const RemoteEmbedder remote(opts);
  const EmbeddingMatrix m = embed_corpus(c, remote, 2);
  for (Eigen::Index i = 0; i < 5; ++i) {
    const double n = static_cast<double>(c.documents[i].raw_text.size());
    CHECK(m.rows(i, 0) == doctest::Approx(n / std::sqrt(5 * n * n + 4)));
  }
}

TEST_CASE("remote embedding errors") {
  RemoteOptions opts;
  opts.dim = 3;

  SUBCASE("count mismatch") {
    StubServer stub([](const httplib::Request &, httplib::Response &res) {
      res.set_content(R"({"embeddings": [[1,0,0],[0,1,0]]})", "application/json");
    });
    opts.endpoint = stub.endpoint();
    CHECK_THROWS_WITH_AS(remote_embed_batch({"x", "y", "z"}, opts),
                         doctest::Contains("count mismatch"), Error);
  }
  SUBCASE("dimension mismatch") {
    StubServer stub([](const httplib::Request &, httplib::Response &res) {
      res.set_content(R"({"embeddings": [[1,0]]})", "application/json");
    });
    opts.endpoint = stub.endpoint();
    CHECK_THROWS_WITH_AS(remote_embed_batch({"x"}, opts), doctest::Contains("dimension mismatch"),
                         Error);
  }
  SUBCASE("status") {
    StubServer stub([](const httplib::Request &, httplib::Response &res) { res.status = 503; });
    opts.endpoint = stub.endpoint();
    CHECK_THROWS_WITH_AS(remote_embed_batch({"x"}, opts), doctest::Contains("503"), Error);
  }
  SUBCASE("schema") {
    StubServer stub([](const httplib::Request &, httplib::Response &res) {
      res.set_content("not json", "text/plain");
    });
    opts.endpoint = stub.endpoint();
    CHECK_THROWS_AS(remote_embed_batch({"x"}, opts), Error);
  }
  SUBCASE("document range in corpus errors") {
    StubServer stub([](const httplib::Request &, httplib::Response &res) {
      res.set_content(R"({"embeddings": []})", "application/json");
    });
    opts.endpoint = stub.endpoint();
    const Corpus c = testing::corpus_of({{"first", 0, "aa"}, {"second", 1, "bb"}});
    CHECK_THROWS_WITH_AS(embed_corpus(c, RemoteEmbedder(opts)),
                         doctest::Contains("'first'..'second'"), Error);
  }
  SUBCASE("unreachable") {
    opts.endpoint = "http://127.0.0.1:1";
    opts.timeout = std::chrono::milliseconds(500);
    CHECK_THROWS_WITH_AS(remote_embed_batch({"x"}, opts), doctest::Contains("transport"), Error);
  }
}

TEST_CASE("provider selection") {
  const Corpus c = testing::corpus_of({{"1", 0, "aa bb"}, {"2", 1, "bb cc"}});
  Config cfg;
  cfg.embed_dim = 16;
  CHECK(make_provider(cfg, c)->name() == "local:seed=13,d=16");
  cfg.provider = "remote";
  cfg.endpoint = "http://localhost:9";
  CHECK(make_provider(cfg, c)->name() == "remote:http://localhost:9");
}
