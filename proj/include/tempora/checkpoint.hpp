#ifndef TEMPORA_CHECKPOINT_HPP_
#define TEMPORA_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>

#include <Eigen/Core>

#include "tempora/config.hpp"
#include "tempora/corpus.hpp"
#include "tempora/model.hpp"

namespace tempora {

/// Trained model on disk.
///
/// Layout (little-endian, matrices row-major as 64-bit floats):
///   16-byte magic "TEMPORA-CKPT\0\0\0\0", u32 format version,
///   u64 K, u64 d, u64 V, W (K x d), b (K), A (K x K), phi (K x V),
///   f64 sigma, f64 beta, config echo (u64 length + text),
///   u64 vocabulary fingerprint, u64 T, theta_slice (T x K).
struct Checkpoint {
  ModelParams params;
  Config config;
  std::uint64_t vocabulary_fingerprint = 0;
  Eigen::MatrixXd theta_slice;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint &checkpoint, const std::filesystem::path &path);

/// Throws Error naming the file on a bad magic, version or truncated body.
Checkpoint load_checkpoint(const std::filesystem::path &path);

/// FNV-1a over the ordered term list.
std::uint64_t vocabulary_fingerprint(const Vocabulary &vocabulary);

} // namespace tempora

#endif // TEMPORA_CHECKPOINT_HPP_
