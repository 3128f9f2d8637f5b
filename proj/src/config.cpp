#include "tempora/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "tempora/error.hpp"

namespace tempora {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T> T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto *end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw UsageError("config key '" + std::string(key) +
                     "': cannot parse value '" + std::string(v) + "'");
  }
  return out;
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

struct Field {
  std::string_view key;
  std::function<void(Config &, std::string_view)> set;
  std::function<std::string(const Config &)> get;
};

template <typename T> Field number_field(std::string_view key, T Config::*m) {
  return Field{key,
               [key, m](Config &c, std::string_view v) {
                 c.*m = parse_number<T>(key, v);
               },
               [m](const Config &c) {
                 if constexpr (std::is_floating_point_v<T>) {
                   return format_double(c.*m);
                 } else {
                   return std::to_string(c.*m);
                 }
               }};
}

Field string_field(std::string_view key, std::string Config::*m) {
  return Field{key, [m](Config &c, std::string_view v) { c.*m = std::string(v); },
               [m](const Config &c) { return c.*m; }};
}

const std::vector<Field> &fields() {
  static const std::vector<Field> table = {
      number_field("min_token_len", &Config::min_token_len),
      string_field("stopword_file", &Config::stopword_file),
      number_field("min_df", &Config::min_df),
      number_field("max_df_frac", &Config::max_df_frac),
      number_field("max_vocab", &Config::max_vocab),
      number_field("num_slices", &Config::num_slices),
      string_field("provider", &Config::provider),
      number_field("embed_dim", &Config::embed_dim),
      number_field("embed_seed", &Config::embed_seed),
      string_field("endpoint", &Config::endpoint),
      number_field("embed_batch_size", &Config::embed_batch_size),
      number_field("embed_timeout_ms", &Config::embed_timeout_ms),
      number_field("lambda", &Config::lambda),
      number_field("attention_window", &Config::attention_window),
      number_field("k", &Config::k),
      number_field("beta", &Config::beta),
      number_field("epochs", &Config::epochs),
      number_field("learning_rate", &Config::learning_rate),
      number_field("seed", &Config::seed),
      string_field("mode", &Config::mode),
      number_field("init_scale", &Config::init_scale),
      number_field("smoothing_eta", &Config::smoothing_eta),
      number_field("sigma", &Config::sigma),
  };
  return table;
}

} // namespace

void Config::validate() const {
  auto fail = [](const std::string &msg) { throw UsageError("config: " + msg); };
  if (min_token_len < 1) fail("min_token_len must be >= 1");
  if (min_df < 1) fail("min_df must be >= 1");
  if (!(max_df_frac > 0.0 && max_df_frac <= 1.0)) fail("max_df_frac must be in (0, 1]");
  if (num_slices == 1) fail("num_slices must be >= 2 (or 0 for automatic)");
  if (provider != "local" && provider != "remote") fail("provider must be 'local' or 'remote'");
  if (provider == "remote" && endpoint.empty()) fail("remote provider requires 'endpoint'");
  if (embed_dim < 2) fail("embed_dim must be >= 2");
  if (embed_batch_size < 1) fail("embed_batch_size must be >= 1");
  if (embed_timeout_ms < 1) fail("embed_timeout_ms must be >= 1");
  if (!(lambda >= 0.0)) fail("lambda must be >= 0");
  if (attention_window < -1) fail("attention_window must be >= -1");
  if (k < 1) fail("k must be >= 1");
  if (!(beta >= 0.0)) fail("beta must be >= 0");
  if (epochs < 1) fail("epochs must be >= 1");
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (mode != "supervised" && mode != "unsupervised") fail("mode must be 'supervised' or 'unsupervised'");
  if (!(init_scale > 0.0)) fail("init_scale must be > 0");
  if (!(smoothing_eta > 0.0)) fail("smoothing_eta must be > 0");
  if (!(sigma >= 0.0)) fail("sigma must be >= 0");
}

void set_config_value(Config &config, std::string_view key,
                      std::string_view value) {
  for (const auto &f : fields()) {
    if (f.key == key) {
      f.set(config, value);
      return;
    }
  }
  throw UsageError("unknown config key '" + std::string(key) + "'");
}

Config parse_config(std::string_view text) {
  Config config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    set_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  config.validate();
  return config;
}

Config load_config(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open config file '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const Config &config) {
  std::string out;
  for (const auto &f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += '\n';
  }
  return out;
}

} // namespace tempora
