#ifndef TEMPORA_PIPELINE_HPP_
#define TEMPORA_PIPELINE_HPP_

#include <filesystem>
#include <span>
#include <string>

#include "tempora/config.hpp"
#include "tempora/corpus.hpp"
#include "tempora/embed.hpp"
#include "tempora/metrics.hpp"
#include "tempora/model.hpp"
#include "tempora/synthetic.hpp"

namespace tempora {

/// Loads a corpus file with the tokenizer and vocabulary settings of `config`.
Corpus load_corpus(const std::filesystem::path &path, const Config &config);

/// `num_slices` from the config, or the number of distinct timestamps when 0.
std::size_t resolve_num_slices(const Corpus &corpus, const Config &config);

/// Everything upstream of the learnable parameters.
struct Representations {
  EmbeddingMatrix embeddings;
  TimeSliceIndex slices;
  Eigen::MatrixXd pooled; // time-aware document representations
};

Representations prepare_representations(const Corpus &corpus, const Config &config);

struct PipelineRun {
  Representations inputs;
  TrainResult trained;
  MetricsReport report;
};

/// embed -> slice -> attend -> pool -> train -> evaluate.
PipelineRun run_pipeline(const Corpus &corpus, const Config &config);

/// Metrics for a generated corpus under `config`: one sweep row.
MetricsReport synthetic_run(const SyntheticSpec &spec, const Config &config);

/// CSV `embed_dim,coherence,diversity`, one row per dimension.
std::string sweep_dim(const SyntheticSpec &spec, const Config &base,
                      std::span<const std::size_t> dims);

/// CSV `num_slices,perplexity,diversity,coherence,stability`; the sequence
/// length is the number of generated time slices.
std::string sweep_seqlen(const SyntheticSpec &spec, const Config &base,
                         std::span<const std::size_t> lengths);

} // namespace tempora

#endif // TEMPORA_PIPELINE_HPP_
