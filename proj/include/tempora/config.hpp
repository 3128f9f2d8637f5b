#ifndef TEMPORA_CONFIG_HPP_
#define TEMPORA_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace tempora {

/// Every run-time knob of the pipeline. Loaded from a flat `key = value`
/// text file; keys not listed here are rejected.
struct Config {
  // corpus
  int min_token_len = 2;
  std::string stopword_file;
  int min_df = 1;
  double max_df_frac = 1.0;
  std::size_t max_vocab = 0; // 0 = unlimited
  std::size_t num_slices = 0; // 0 = one slice per distinct timestamp

  // embed
  std::string provider = "local";
  std::size_t embed_dim = 128;
  std::uint64_t embed_seed = 13;
  std::string endpoint;
  std::size_t embed_batch_size = 32;
  int embed_timeout_ms = 10000;

  // temporal
  double lambda = 0.5;
  int attention_window = 3; // -1 = unlimited

  // model
  std::size_t k = 20;
  double beta = 1.0;
  std::size_t epochs = 200;
  double learning_rate = 0.05;
  std::uint64_t seed = 7;
  std::string mode = "unsupervised";
  double init_scale = 0.01;
  double smoothing_eta = 0.01;
  double sigma = 0.0;

  /// Throws UsageError naming the first out-of-range value.
  void validate() const;
};

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path &path);

/// Canonical text form: every key in declaration order, doubles printed
/// round-trippable. parse_config(to_text(c)) reproduces c.
std::string to_text(const Config &config);

/// Applies one `key = value` assignment; throws UsageError on unknown keys.
void set_config_value(Config &config, std::string_view key,
                      std::string_view value);

} // namespace tempora

#endif // TEMPORA_CONFIG_HPP_
