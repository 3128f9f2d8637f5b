#include <doctest.h>

#include "tempora/config.hpp"
#include "tempora/error.hpp"

using namespace tempora;

TEST_CASE("config defaults") {
  const Config c = parse_config("");
  CHECK(c.min_token_len == 2);
  CHECK(c.provider == "local");
  CHECK(c.embed_dim == 128);
  CHECK(c.lambda == 0.5);
  CHECK(c.attention_window == 3);
  CHECK(c.k == 20);
  CHECK(c.beta == 1.0);
  CHECK(c.epochs == 200);
  CHECK(c.learning_rate == 0.05);
  CHECK(c.mode == "unsupervised");
}

TEST_CASE("config parsing") {
  const Config c = parse_config("# comment\n\nk = 3\n  lambda=0.25  \nmode = supervised\n"
                                "attention_window = -1\n");
  CHECK(c.k == 3);
  CHECK(c.lambda == 0.25);
  CHECK(c.mode == "supervised");
  CHECK(c.attention_window == -1);
}

TEST_CASE("config rejects bad input") {
  CHECK_THROWS_AS(parse_config("no_such_key = 1\n"), UsageError);
  CHECK_THROWS_AS(parse_config("k = three\n"), UsageError);
  CHECK_THROWS_AS(parse_config("k\n"), UsageError);
  CHECK_THROWS_AS(parse_config("k = 0\n"), UsageError);
  CHECK_THROWS_AS(parse_config("lambda = -1\n"), UsageError);
  CHECK_THROWS_AS(parse_config("mode = semi\n"), UsageError);
  CHECK_THROWS_AS(parse_config("provider = remote\n"), UsageError); // needs an endpoint
}

TEST_CASE("config text round trip") {
  Config c;
  c.k = 7;
  c.lambda = 0.1;
  c.learning_rate = 1.0 / 3.0;
  c.stopword_file = "stop.txt";
  c.embed_seed = 123456789012345ULL;
  const std::string text = to_text(c);
  const Config back = parse_config(text);
  CHECK(to_text(back) == text);
  CHECK(back.learning_rate == c.learning_rate);
  CHECK(back.embed_seed == c.embed_seed);
}

TEST_CASE("missing config file is a runtime error") {
  CHECK_THROWS_AS(load_config("/nonexistent/tempora.cfg"), Error);
}
