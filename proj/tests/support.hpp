#ifndef TEMPORA_TESTS_SUPPORT_HPP_
#define TEMPORA_TESTS_SUPPORT_HPP_

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tempora/corpus.hpp"

namespace tempora::testing {

struct Row {
  std::string id;
  std::int64_t timestamp;
  std::string text;
  std::string label;
};

inline std::string jsonl(const std::vector<Row> &rows) {
  std::string out;
  for (const auto &r : rows) {
    out += "{\"id\":\"" + r.id + "\",\"timestamp\":" + std::to_string(r.timestamp) +
           ",\"text\":\"" + r.text + "\"";
    if (!r.label.empty()) {
      out += ",\"label\":\"" + r.label + "\"";
    }
    out += "}\n";
  }
  return out;
}

inline Corpus corpus_of(const std::vector<Row> &rows, const TokenizerConfig &cfg = {}) {
  std::istringstream in(jsonl(rows));
  return parse_corpus(in, cfg, "fixture");
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tempora-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }
  const std::filesystem::path &path() const { return path_; }

private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path &path, const std::string &text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Derived> bool on_simplex(const Eigen::MatrixBase<Derived> &v, double tol = 1e-9) {
  return v.minCoeff() >= -tol && std::abs(v.sum() - 1.0) <= tol && v.allFinite();
}

/// Random unit-norm rows.
inline Eigen::MatrixXd unit_rows(Eigen::Index n, Eigen::Index d, std::mt19937_64 &rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd h(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      h(i, j) = normal(rng);
    }
    h.row(i).normalize();
  }
  return h;
}

} // namespace tempora::testing

#endif // TEMPORA_TESTS_SUPPORT_HPP_
