#include "tempora/cli.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tempora/checkpoint.hpp"
#include "tempora/error.hpp"
#include "tempora/pipeline.hpp"

namespace tempora {
namespace {

namespace fs = std::filesystem;

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot open '" + path.string() + "' for writing");
  }
  out << text;
  if (!out.flush()) {
    throw Error("failed writing '" + path.string() + "'");
  }
}

std::vector<std::size_t> parse_values(const std::string &list) {
  std::vector<std::size_t> values;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc{} || ptr != item.data() + item.size() || v == 0) {
      throw UsageError("--values: '" + item + "' is not a positive integer");
    }
    values.push_back(v);
  }
  if (values.empty()) {
    throw UsageError("--values: empty list");
  }
  return values;
}

Config config_or_default(const std::string &path) {
  return path.empty() ? Config{} : load_config(path);
}

void apply_seed(Config &config, std::optional<std::uint64_t> seed) {
  if (seed) {
    config.seed = *seed;
    config.embed_seed = *seed;
  }
}

struct Options {
  std::string corpus, config, out, ckpt, spec, truth, csv, values;
  std::size_t steps = 0;
  std::optional<std::uint64_t> seed;
};

int run_ingest(const Options &o, std::ostream &out) {
  const Config config = config_or_default(o.config);
  const Corpus corpus = load_corpus(o.corpus, config);
  save_corpus_binary(corpus, o.out);
  out << corpus.documents.size() << " documents, " << corpus.vocabulary.size() << " terms ("
      << corpus.report.dropped_empty + corpus.report.dropped_vocabulary << " dropped)\n";
  return kExitOk;
}

int run_train(const Options &o, std::ostream &out) {
  Config config = config_or_default(o.config);
  apply_seed(config, o.seed);
  const Corpus corpus = load_corpus(o.corpus, config);
  const Representations inputs = prepare_representations(corpus, config);
  TrainResult trained = train(corpus, inputs.pooled, inputs.slices, TrainConfig::from(config));

  Checkpoint ckpt;
  ckpt.params = std::move(trained.params);
  ckpt.config = config;
  ckpt.vocabulary_fingerprint = vocabulary_fingerprint(corpus.vocabulary);
  ckpt.theta_slice = trained.assignments.theta_slice;
  save_checkpoint(ckpt, o.out);

  out << "loss " << format_fixed(trained.history.front().total) << " -> "
      << format_fixed(trained.history.back().total) << " after " << config.epochs
      << " epochs\n";
  return kExitOk;
}

int run_evaluate(const Options &o, std::ostream &out) {
  const Checkpoint ckpt = load_checkpoint(o.ckpt);
  const Corpus corpus = load_corpus(o.corpus, ckpt.config);
  if (vocabulary_fingerprint(corpus.vocabulary) != ckpt.vocabulary_fingerprint) {
    throw Error("'" + o.corpus + "' does not match the vocabulary of checkpoint '" + o.ckpt + "'");
  }
  const Representations inputs = prepare_representations(corpus, ckpt.config);
  if (inputs.pooled.cols() != ckpt.params.W.cols()) {
    throw Error("checkpoint '" + o.ckpt + "' expects embedding dimension " +
                std::to_string(ckpt.params.W.cols()));
  }
  const Eigen::MatrixXd theta_doc =
      topic_distributions(inputs.pooled, ckpt.params.W, ckpt.params.b);
  const Eigen::MatrixXd theta_slice = slice_topic_state(theta_doc, inputs.slices);
  const MetricsReport report = evaluation_report(corpus, theta_doc, theta_slice, ckpt.params.phi);

  write_text(o.out, to_json(report).dump(2) + "\n");
  fs::path csv = o.csv;
  if (csv.empty()) {
    csv = fs::path(o.out).replace_extension(".topics.csv");
  }
  write_text(csv, per_topic_csv(report));
  out << "perplexity " << format_fixed(report.perplexity) << ", coherence "
      << format_fixed(report.coherence) << ", diversity " << format_fixed(report.diversity)
      << ", stability " << format_fixed(report.stability) << "\n";
  return kExitOk;
}

int run_forecast(const Options &o, std::ostream &out) {
  const Checkpoint ckpt = load_checkpoint(o.ckpt);
  if (ckpt.theta_slice.rows() == 0) {
    throw Error("checkpoint '" + o.ckpt + "' holds no slice states");
  }
  const Eigen::VectorXd last = ckpt.theta_slice.row(ckpt.theta_slice.rows() - 1).transpose();
  const auto path = forecast(last, ckpt.params.A, o.steps);

  std::string csv = "step";
  for (Eigen::Index k = 0; k < last.size(); ++k) {
    csv += ",topic_" + std::to_string(k);
  }
  csv += "\n";
  for (std::size_t s = 0; s < path.size(); ++s) {
    csv += std::to_string(s + 1);
    for (Eigen::Index k = 0; k < path[s].size(); ++k) {
      csv += "," + format_fixed(path[s](k));
    }
    csv += "\n";
  }
  write_text(o.out, csv);
  out << o.steps << " steps written to " << o.out << "\n";
  return kExitOk;
}

int run_synth(const Options &o, std::ostream &out) {
  const SyntheticSpec spec = load_synthetic_spec(o.spec, o.seed);
  const SyntheticCorpus synthetic = generate_synthetic(spec);
  write_jsonl(synthetic.records, o.out);
  if (!o.truth.empty()) {
    write_text(o.truth, truth_json(synthetic).dump(2) + "\n");
  }
  out << synthetic.records.size() << " documents in " << spec.num_slices << " slices\n";
  return kExitOk;
}

int run_sweep(const Options &o, bool dims, std::ostream &out) {
  const std::vector<std::size_t> values = parse_values(o.values);
  SyntheticSpec spec;
  if (o.spec.empty()) {
    spec.seed = o.seed.value_or(spec.seed);
    spec = make_synthetic_spec(spec);
  } else {
    spec = load_synthetic_spec(o.spec, o.seed);
  }
  Config config = config_or_default(o.config);
  if (o.config.empty()) {
    config.k = spec.k;
  }
  apply_seed(config, o.seed);

  const std::string csv = dims ? sweep_dim(spec, config, values) : sweep_seqlen(spec, config, values);
  write_text(o.out, csv);
  out << values.size() << " rows written to " << o.out << "\n";
  return kExitOk;
}

} // namespace

int cli_dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Temporal topic modelling over time-stamped corpora", "tempora"};
  app.require_subcommand(1);
  Options o;

  auto *ingest = app.add_subcommand("ingest", "Tokenize a JSONL corpus into the binary format");
  ingest->add_option("corpus", o.corpus, "JSONL corpus")->required();
  ingest->add_option("--out", o.out, "binary corpus to write")->required();
  ingest->add_option("--config", o.config, "tokenizer and vocabulary settings");

  auto *train_cmd = app.add_subcommand("train", "Fit a model and write a checkpoint");
  train_cmd->add_option("--corpus", o.corpus)->required();
  train_cmd->add_option("--config", o.config);
  train_cmd->add_option("--out", o.out, "checkpoint to write")->required();
  train_cmd->add_option("--seed", o.seed, "overrides seed and embed_seed");

  auto *evaluate = app.add_subcommand("evaluate", "Score a checkpoint on a corpus");
  evaluate->add_option("--corpus", o.corpus)->required();
  evaluate->add_option("--ckpt", o.ckpt)->required();
  evaluate->add_option("--out", o.out, "JSON report")->required();
  evaluate->add_option("--csv", o.csv, "per-topic CSV (default: <out>.topics.csv)");

  auto *forecast_cmd = app.add_subcommand("forecast", "Roll slice topic state forward");
  forecast_cmd->add_option("--ckpt", o.ckpt)->required();
  forecast_cmd->add_option("--steps", o.steps)->required()->check(CLI::PositiveNumber);
  forecast_cmd->add_option("--out", o.out)->required();

  auto *synth = app.add_subcommand("synth", "Generate a synthetic corpus with known dynamics");
  synth->add_option("--spec", o.spec)->required();
  synth->add_option("--out", o.out, "JSONL corpus")->required();
  synth->add_option("--truth", o.truth, "ground truth JSON");
  synth->add_option("--seed", o.seed);

  CLI::App *sweeps[2];
  const char *sweep_names[2] = {"sweep-dim", "sweep-seqlen"};
  const char *sweep_help[2] = {"Vary embed_dim on a synthetic corpus",
                               "Vary the number of generated time slices"};
  for (int i = 0; i < 2; ++i) {
    sweeps[i] = app.add_subcommand(sweep_names[i], sweep_help[i]);
    sweeps[i]->add_option("--values", o.values, "comma-separated list")->required();
    sweeps[i]->add_option("--out", o.out, "CSV")->required();
    sweeps[i]->add_option("--spec", o.spec);
    sweeps[i]->add_option("--config", o.config);
    sweeps[i]->add_option("--seed", o.seed);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (ingest->parsed()) return run_ingest(o, out);
    if (train_cmd->parsed()) return run_train(o, out);
    if (evaluate->parsed()) return run_evaluate(o, out);
    if (forecast_cmd->parsed()) return run_forecast(o, out);
    if (synth->parsed()) return run_synth(o, out);
    if (sweeps[0]->parsed()) return run_sweep(o, true, out);
    if (sweeps[1]->parsed()) return run_sweep(o, false, out);
  } catch (const UsageError &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  err << app.help();
  return kExitUsage;
}

} // namespace tempora
