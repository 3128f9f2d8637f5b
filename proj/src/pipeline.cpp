#include "tempora/pipeline.hpp"

#include "tempora/temporal.hpp"

namespace tempora {

Corpus load_corpus(const std::filesystem::path &path, const Config &config) {
  const auto loaded = load_corpus(path, TokenizerConfig::from(config));
  const auto vocab_cfg = VocabularyConfig::from(config);
  if (vocab_cfg.min_df <= 1 && vocab_cfg.max_df_frac >= 1.0 && vocab_cfg.max_size == 0) {
    return loaded;
  }
  return build_vocabulary(loaded, vocab_cfg);
}

std::size_t resolve_num_slices(const Corpus &corpus, const Config &config) {
  return config.num_slices != 0 ? config.num_slices : distinct_timestamps(corpus);
}

Representations prepare_representations(const Corpus &corpus, const Config &config) {
  config.validate();
  Representations r;
  const auto provider = make_provider(config, corpus);
  r.embeddings = embed_corpus(corpus, *provider, config.embed_batch_size);
  r.slices = slice_by_time(corpus, resolve_num_slices(corpus, config));
  const auto attention = attention_weights(r.embeddings.rows, r.slices, DecayConfig::from(config));
  r.pooled = temporal_pool(r.embeddings.rows, attention);
  return r;
}

PipelineRun run_pipeline(const Corpus &corpus, const Config &config) {
  PipelineRun run;
  run.inputs = prepare_representations(corpus, config);
  run.trained = train(corpus, run.inputs.pooled, run.inputs.slices, TrainConfig::from(config));
  run.report = evaluation_report(corpus, run.trained.assignments.theta_doc,
                                 run.trained.assignments.theta_slice, run.trained.params.phi);
  return run;
}

MetricsReport synthetic_run(const SyntheticSpec &spec, const Config &config) {
  const auto corpus = generate_synthetic(spec).corpus();
  return run_pipeline(corpus, config).report;
}

std::string sweep_dim(const SyntheticSpec &spec, const Config &base,
                      std::span<const std::size_t> dims) {
  if (dims.empty()) {
    throw Error("sweep_dim: no dimensions given");
  }
  std::string csv = "embed_dim,coherence,diversity\n";
  for (const auto d : dims) {
    Config config = base;
    config.embed_dim = d;
    const auto report = synthetic_run(spec, config);
    csv += std::to_string(d) + "," + format_fixed(report.coherence) + "," +
           format_fixed(report.diversity) + "\n";
  }
  return csv;
}

std::string sweep_seqlen(const SyntheticSpec &spec, const Config &base,
                         std::span<const std::size_t> lengths) {
  if (lengths.empty()) {
    throw Error("sweep_seqlen: no lengths given");
  }
  std::string csv = "num_slices,perplexity,diversity,coherence,stability\n";
  for (const auto length : lengths) {
    SyntheticSpec s = spec;
    s.num_slices = length;
    Config config = base;
    config.num_slices = 0;
    const auto report = synthetic_run(s, config);
    csv += std::to_string(length) + "," + format_fixed(report.perplexity) + "," +
           format_fixed(report.diversity) + "," + format_fixed(report.coherence) + "," +
           format_fixed(report.stability) + "\n";
  }
  return csv;
}

} // namespace tempora
