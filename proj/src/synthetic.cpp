#include "tempora/synthetic.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "tempora/error.hpp"
#include "tempora/model.hpp"

namespace tempora {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

template <typename T> T parse_value(std::string_view key, std::string_view v) {
  T out{};
  const auto *end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw UsageError("synthetic spec key '" + std::string(key) + "': cannot parse '" +
                     std::string(v) + "'");
  }
  return out;
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

} // namespace

void SyntheticSpec::validate() const {
  if (k < 1 || v < 1 || num_slices < 1 || docs_per_slice < 1 || doc_length < 1) {
    throw Error("synthetic spec: k, v, num_slices, docs_per_slice and doc_length must be >= 1");
  }
  if (!(sigma >= 0.0)) {
    throw Error("synthetic spec: sigma must be >= 0");
  }
  const auto ki = static_cast<Eigen::Index>(k);
  if (a_true.rows() != ki || a_true.cols() != ki || !a_true.allFinite()) {
    throw Error("synthetic spec: a_true must be a finite K x K matrix");
  }
  if (phi_true.rows() != ki || phi_true.cols() != static_cast<Eigen::Index>(v) ||
      (phi_true.array() < 0.0).any()) {
    throw Error("synthetic spec: phi_true must be a non-negative K x V matrix");
  }
  for (Eigen::Index r = 0; r < ki; ++r) {
    if (std::abs(phi_true.row(r).sum() - 1.0) > 1e-9) {
      throw Error("synthetic spec: phi_true row " + std::to_string(r) + " does not sum to 1");
    }
  }
}

Eigen::MatrixXd stochastic_transition(std::size_t k, double off_diagonal, TransitionPattern pattern) {
  if (!(off_diagonal >= 0.0 && off_diagonal <= 1.0)) {
    throw Error("stochastic_transition: off-diagonal mass must lie in [0, 1]");
  }
  const auto ki = static_cast<Eigen::Index>(k);
  if (k == 1) {
    return Eigen::MatrixXd::Identity(1, 1);
  }
  Eigen::MatrixXd a = (1.0 - off_diagonal) * Eigen::MatrixXd::Identity(ki, ki);
  for (Eigen::Index j = 0; j < ki; ++j) {
    if (pattern == TransitionPattern::cyclic) {
      a((j + 1) % ki, j) += off_diagonal;
    } else {
      for (Eigen::Index i = 0; i < ki; ++i) {
        if (i != j) {
          a(i, j) += off_diagonal / static_cast<double>(ki - 1);
        }
      }
    }
  }
  return a;
}

SyntheticSpec make_synthetic_spec(SyntheticSpec spec, const SyntheticDefaults &defaults) {
  if (spec.a_true.size() == 0) {
    spec.a_true = stochastic_transition(spec.k, defaults.off_diagonal, defaults.pattern);
  }
  if (spec.phi_true.size() == 0) {
    if (!(defaults.phi_alpha > 0.0)) {
      throw Error("synthetic spec: phi_alpha must be > 0");
    }
    auto rng = stream(spec.seed, 1);
    std::gamma_distribution<double> gamma(defaults.phi_alpha, 1.0);
    const auto k = static_cast<Eigen::Index>(spec.k);
    const auto v = static_cast<Eigen::Index>(spec.v);
    spec.phi_true.resize(k, v);
    for (Eigen::Index r = 0; r < k; ++r) {
      for (Eigen::Index c = 0; c < v; ++c) {
        spec.phi_true(r, c) = gamma(rng);
      }
      const double total = spec.phi_true.row(r).sum();
      if (!(total > 0.0)) {
        spec.phi_true.row(r).setConstant(1.0 / static_cast<double>(v));
      } else {
        spec.phi_true.row(r) /= total;
      }
    }
  }
  spec.validate();
  return spec;
}

SyntheticSpec parse_synthetic_spec(std::string_view text, std::optional<std::uint64_t> seed) {
  SyntheticSpec spec;
  SyntheticDefaults defaults;
  std::vector<double> a_entries;
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
      throw UsageError("synthetic spec line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "k") {
      spec.k = parse_value<std::size_t>(key, value);
    } else if (key == "v") {
      spec.v = parse_value<std::size_t>(key, value);
    } else if (key == "num_slices") {
      spec.num_slices = parse_value<std::size_t>(key, value);
    } else if (key == "docs_per_slice") {
      spec.docs_per_slice = parse_value<std::size_t>(key, value);
    } else if (key == "doc_length") {
      spec.doc_length = parse_value<std::size_t>(key, value);
    } else if (key == "sigma") {
      spec.sigma = parse_value<double>(key, value);
    } else if (key == "seed") {
      spec.seed = parse_value<std::uint64_t>(key, value);
    } else if (key == "off_diagonal") {
      defaults.off_diagonal = parse_value<double>(key, value);
    } else if (key == "phi_alpha") {
      defaults.phi_alpha = parse_value<double>(key, value);
    } else if (key == "transition") {
      if (value == "cyclic") {
        defaults.pattern = TransitionPattern::cyclic;
      } else if (value == "uniform") {
        defaults.pattern = TransitionPattern::uniform;
      } else {
        throw UsageError("synthetic spec: transition must be 'cyclic' or 'uniform'");
      }
    } else if (key == "a_true") {
      a_entries.clear();
      std::string_view rest = value;
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        a_entries.push_back(parse_value<double>(key, trim(rest.substr(0, comma))));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
    } else {
      throw UsageError("unknown synthetic spec key '" + std::string(key) + "'");
    }
  }
  if (seed) {
    spec.seed = *seed;
  }
  if (!a_entries.empty()) {
    if (a_entries.size() != spec.k * spec.k) {
      throw UsageError("synthetic spec: a_true needs k*k = " + std::to_string(spec.k * spec.k) +
                       " entries");
    }
    const auto k = static_cast<Eigen::Index>(spec.k);
    spec.a_true = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        a_entries.data(), k, k);
  }
  try {
    return make_synthetic_spec(std::move(spec), defaults);
  } catch (const UsageError &) {
    throw;
  } catch (const Error &e) {
    throw UsageError(e.what());
  }
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path &path,
                                  std::optional<std::uint64_t> seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open synthetic spec '" + path.string() + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_synthetic_spec(ss.str(), seed);
}

std::string term_name(std::size_t index, std::size_t v) {
  std::size_t width = 3;
  for (std::size_t max = v > 0 ? v - 1 : 0; max >= 1000; max /= 10) {
    ++width;
  }
  std::string digits = std::to_string(index);
  return "w" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

SyntheticCorpus generate_synthetic(const SyntheticSpec &spec) {
  spec.validate();
  const auto k = static_cast<Eigen::Index>(spec.k);
  auto rng = stream(spec.seed, 2);

  SyntheticCorpus out;
  out.spec = spec;
  out.theta.resize(static_cast<Eigen::Index>(spec.num_slices), k);

  std::exponential_distribution<double> exponential(1.0);
  Eigen::VectorXd theta(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    theta[i] = exponential(rng);
  }
  theta /= theta.sum();
  out.theta.row(0) = theta.transpose();
  for (Eigen::Index t = 1; t < out.theta.rows(); ++t) {
    theta = simplex_project(transition_step(theta, spec.a_true, spec.sigma, &rng));
    out.theta.row(t) = theta.transpose();
  }

  std::vector<std::discrete_distribution<std::size_t>> word_dists;
  for (Eigen::Index r = 0; r < k; ++r) {
    const Eigen::VectorXd row = spec.phi_true.row(r).transpose();
    word_dists.emplace_back(row.data(), row.data() + row.size());
  }
  const std::size_t id_width = std::to_string(spec.docs_per_slice).size();
  const std::size_t slice_width = std::to_string(spec.num_slices).size();
  auto padded = [](std::size_t x, std::size_t width) {
    auto s = std::to_string(x);
    return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
  };

  for (std::size_t t = 0; t < spec.num_slices; ++t) {
    const Eigen::VectorXd row = out.theta.row(static_cast<Eigen::Index>(t)).transpose();
    std::discrete_distribution<std::size_t> topic_dist(row.data(), row.data() + row.size());
    for (std::size_t j = 0; j < spec.docs_per_slice; ++j) {
      const auto z = topic_dist(rng);
      TextRecord r;
      r.id = "s" + padded(t, slice_width) + "-d" + padded(j, id_width);
      r.timestamp = static_cast<std::int64_t>(t);
      r.label = "topic" + std::to_string(z);
      for (std::size_t w = 0; w < spec.doc_length; ++w) {
        auto term = term_name(word_dists[z](rng), spec.v);
        if (!r.raw_text.empty()) {
          r.raw_text += ' ';
        }
        r.raw_text += term;
        r.tokens.push_back(std::move(term));
      }
      out.doc_topics.push_back(z);
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

Corpus SyntheticCorpus::corpus() const {
  const TokenizerConfig cfg;
  auto copy = records;
  for (auto &r : copy) {
    r.tokens = tokenize(r.raw_text, cfg);
  }
  return assemble_corpus(std::move(copy));
}

void write_jsonl(const std::vector<TextRecord> &records, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write '" + path.string() + "'");
  }
  for (const auto &r : records) {
    nlohmann::ordered_json j;
    j["id"] = r.id;
    j["timestamp"] = r.timestamp;
    if (r.label) {
      j["label"] = *r.label;
    }
    j["text"] = r.raw_text;
    out << j.dump() << '\n';
  }
  if (!out) {
    throw Error("error writing '" + path.string() + "'");
  }
}

namespace {

nlohmann::ordered_json matrix_json(const Eigen::MatrixXd &m) {
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace

nlohmann::ordered_json truth_json(const SyntheticCorpus &synthetic) {
  const auto &spec = synthetic.spec;
  nlohmann::ordered_json j;
  j["k"] = spec.k;
  j["v"] = spec.v;
  j["num_slices"] = spec.num_slices;
  j["docs_per_slice"] = spec.docs_per_slice;
  j["doc_length"] = spec.doc_length;
  j["sigma"] = spec.sigma;
  j["seed"] = spec.seed;
  j["a_true"] = matrix_json(spec.a_true);
  j["phi_true"] = matrix_json(spec.phi_true);
  j["theta"] = matrix_json(synthetic.theta);
  j["doc_topics"] = synthetic.doc_topics;
  return j;
}

Eigen::MatrixXd phi_over_synthetic_terms(const Eigen::MatrixXd &phi, const Vocabulary &vocabulary,
                                         std::size_t v) {
  if (static_cast<std::size_t>(phi.cols()) != vocabulary.size()) {
    throw Error("phi_over_synthetic_terms: phi width does not match the vocabulary");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(phi.rows(), static_cast<Eigen::Index>(v));
  for (std::size_t c = 0; c < vocabulary.size(); ++c) {
    const auto &term = vocabulary.terms()[c];
    std::size_t index = 0;
    const auto *first = term.data() + 1;
    const auto *last = term.data() + term.size();
    const auto [ptr, ec] = std::from_chars(first, last, index);
    if (term.empty() || term[0] != 'w' || ec != std::errc{} || ptr != last || index >= v) {
      throw Error("phi_over_synthetic_terms: '" + term + "' is not a generator term");
    }
    out.col(static_cast<Eigen::Index>(index)) = phi.col(static_cast<Eigen::Index>(c));
  }
  return out;
}

RecoveryScore recovery_score(const Eigen::MatrixXd &a_est, const Eigen::MatrixXd &phi_est,
                             const Eigen::MatrixXd &a_true, const Eigen::MatrixXd &phi_true) {
  const auto k = a_true.rows();
  if (a_est.rows() != k || a_est.cols() != k || a_true.cols() != k || phi_est.rows() != k ||
      phi_true.rows() != k) {
    throw Error("recovery_score: topic counts differ");
  }
  if (phi_est.cols() != phi_true.cols()) {
    throw Error("recovery_score: vocabulary sizes differ");
  }
  // cosine[i][t]: estimated topic i against true topic t
  Eigen::MatrixXd cosine(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index t = 0; t < k; ++t) {
      const double denom = phi_est.row(i).norm() * phi_true.row(t).norm();
      cosine(i, t) = denom > 0.0 ? phi_est.row(i).dot(phi_true.row(t)) / denom : 0.0;
    }
  }
  RecoveryScore score;
  score.permutation.assign(static_cast<std::size_t>(k), 0);
  std::vector<bool> est_used(static_cast<std::size_t>(k), false);
  std::vector<bool> true_used(static_cast<std::size_t>(k), false);
  for (Eigen::Index step = 0; step < k; ++step) {
    Eigen::Index best_i = -1;
    Eigen::Index best_t = -1;
    for (Eigen::Index t = 0; t < k; ++t) {
      if (true_used[static_cast<std::size_t>(t)]) continue;
      for (Eigen::Index i = 0; i < k; ++i) {
        if (est_used[static_cast<std::size_t>(i)]) continue;
        if (best_i < 0 || cosine(i, t) > cosine(best_i, best_t)) {
          best_i = i;
          best_t = t;
        }
      }
    }
    est_used[static_cast<std::size_t>(best_i)] = true;
    true_used[static_cast<std::size_t>(best_t)] = true;
    score.permutation[static_cast<std::size_t>(best_t)] = static_cast<std::size_t>(best_i);
  }
  Eigen::MatrixXd aligned(k, k);
  double match = 0.0;
  for (Eigen::Index t = 0; t < k; ++t) {
    const auto pt = static_cast<Eigen::Index>(score.permutation[static_cast<std::size_t>(t)]);
    match += cosine(pt, t);
    for (Eigen::Index u = 0; u < k; ++u) {
      aligned(t, u) = a_est(pt, static_cast<Eigen::Index>(score.permutation[static_cast<std::size_t>(u)]));
    }
  }
  score.frobenius_error = (aligned - a_true).norm();
  score.phi_match = match / static_cast<double>(k);
  return score;
}

} // namespace tempora
