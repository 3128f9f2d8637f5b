#include "tempora/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "tempora/detail/binary_io.hpp"
#include "tempora/error.hpp"

namespace tempora {

namespace {

constexpr char kMagic[16] = {'T', 'E', 'M', 'P', 'O', 'R', 'A', '-',
                             'C', 'K', 'P', 'T', '\0', '\0', '\0', '\0'};

void write_matrix(std::ostream &out, const Eigen::MatrixXd &m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      detail::write_f64(out, m(r, c));
    }
  }
}

Eigen::MatrixXd read_matrix(detail::Reader &in, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = in.f64();
    }
  }
  return m;
}

} // namespace

std::uint64_t vocabulary_fingerprint(const Vocabulary &vocabulary) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  for (const auto &term : vocabulary.terms()) {
    for (const char c : term) {
      mix(static_cast<unsigned char>(c));
    }
    mix(0);
  }
  return h;
}

void save_checkpoint(const Checkpoint &ckpt, const std::filesystem::path &path) {
  const auto &p = ckpt.params;
  const auto k = p.W.rows();
  if (p.b.size() != k || p.A.rows() != k || p.A.cols() != k || p.phi.rows() != k ||
      ckpt.theta_slice.cols() != k) {
    throw Error("save_checkpoint: inconsistent parameter shapes");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write checkpoint '" + path.string() + "'");
  }
  out.write(kMagic, 16);
  detail::write_u32(out, kCheckpointVersion);
  detail::write_u64(out, static_cast<std::uint64_t>(k));
  detail::write_u64(out, static_cast<std::uint64_t>(p.W.cols()));
  detail::write_u64(out, static_cast<std::uint64_t>(p.phi.cols()));
  write_matrix(out, p.W);
  write_matrix(out, p.b.transpose());
  write_matrix(out, p.A);
  write_matrix(out, p.phi);
  detail::write_f64(out, p.sigma);
  detail::write_f64(out, p.beta);
  detail::write_string(out, to_text(ckpt.config));
  detail::write_u64(out, ckpt.vocabulary_fingerprint);
  detail::write_u64(out, static_cast<std::uint64_t>(ckpt.theta_slice.rows()));
  write_matrix(out, ckpt.theta_slice);
  if (!out) {
    throw Error("error writing checkpoint '" + path.string() + "'");
  }
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error("cannot open checkpoint '" + path.string() + "'");
  }
  detail::Reader rd(in, path.string());
  char magic[16] = {};
  in.read(magic, 16);
  if (in.gcount() != 16 || std::memcmp(magic, kMagic, 16) != 0) {
    throw Error("'" + path.string() + "' is not a checkpoint (bad magic header)");
  }
  if (const auto version = rd.u32(); version != kCheckpointVersion) {
    throw Error("'" + path.string() + "': unsupported checkpoint version " +
                std::to_string(version));
  }
  constexpr std::uint64_t kMaxDim = 1ull << 24;
  const auto k = static_cast<Eigen::Index>(rd.count(kMaxDim));
  const auto d = static_cast<Eigen::Index>(rd.count(kMaxDim));
  const auto v = static_cast<Eigen::Index>(rd.count(kMaxDim));
  if (k < 1 || d < 1 || v < 1) {
    throw Error("'" + path.string() + "': empty model dimensions");
  }
  Checkpoint ckpt;
  ckpt.params.W = read_matrix(rd, k, d);
  ckpt.params.b = read_matrix(rd, 1, k).transpose();
  ckpt.params.A = read_matrix(rd, k, k);
  ckpt.params.phi = read_matrix(rd, k, v);
  ckpt.params.sigma = rd.f64();
  ckpt.params.beta = rd.f64();
  try {
    ckpt.config = parse_config(rd.string(1ull << 20));
  } catch (const UsageError &e) {
    throw Error("'" + path.string() + "': corrupt config echo (" + e.what() + ")");
  }
  ckpt.vocabulary_fingerprint = rd.u64();
  const auto t = static_cast<Eigen::Index>(rd.count(kMaxDim));
  ckpt.theta_slice = read_matrix(rd, t, k);
  if (!ckpt.params.W.allFinite() || !ckpt.params.b.allFinite() || !ckpt.params.A.allFinite() ||
      !ckpt.params.phi.allFinite() || !ckpt.theta_slice.allFinite()) {
    throw Error("'" + path.string() + "': non-finite parameters");
  }
  return ckpt;
}

} // namespace tempora
