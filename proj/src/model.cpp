#include "tempora/model.hpp"

#include <algorithm>
#include <set>

#include "tempora/config.hpp"

namespace tempora {

TrainConfig TrainConfig::from(const Config &config) {
  TrainConfig cfg;
  cfg.epochs = config.epochs;
  cfg.learning_rate = config.learning_rate;
  cfg.seed = config.seed;
  cfg.mode = config.mode == "supervised" ? TrainMode::supervised : TrainMode::unsupervised;
  cfg.init_scale = config.init_scale;
  cfg.beta = config.beta;
  cfg.k = config.k;
  cfg.smoothing_eta = config.smoothing_eta;
  cfg.sigma = config.sigma;
  cfg.validate();
  return cfg;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error("train config: epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw Error("train config: learning_rate must be > 0");
  if (!(init_scale > 0.0)) throw Error("train config: init_scale must be > 0");
  if (!(beta >= 0.0)) throw Error("train config: beta must be >= 0");
  if (k < 1) throw Error("train config: k must be >= 1");
  if (!(smoothing_eta > 0.0)) throw Error("train config: smoothing_eta must be > 0");
  if (!(sigma >= 0.0)) throw Error("train config: sigma must be >= 0");
}

Eigen::MatrixXd topic_distributions(const Eigen::MatrixXd &pooled, const Eigen::MatrixXd &W,
                                    const Eigen::VectorXd &b) {
  if (W.cols() != pooled.cols() || W.rows() != b.size()) {
    throw Error("topic_distributions: shape mismatch");
  }
  Eigen::MatrixXd logits = pooled * W.transpose();
  logits.rowwise() += b.transpose();
  if (!logits.allFinite()) {
    throw Error("topic_distributions: non-finite logits");
  }
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    logits.row(i) = softmax(logits.row(i).transpose()).transpose();
  }
  return logits;
}

Eigen::MatrixXd slice_topic_state(const Eigen::MatrixXd &theta_doc, const TimeSliceIndex &slices) {
  if (static_cast<std::size_t>(theta_doc.rows()) != slices.slice_of.size()) {
    throw Error("slice_topic_state: row count does not match the slice index");
  }
  const auto num_slices = static_cast<Eigen::Index>(slices.num_slices);
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(num_slices, theta_doc.cols());
  std::vector<std::size_t> pop(slices.num_slices, 0);
  for (Eigen::Index i = 0; i < theta_doc.rows(); ++i) {
    const auto s = slices.slice_of[static_cast<std::size_t>(i)];
    sums.row(static_cast<Eigen::Index>(s)) += theta_doc.row(i);
    ++pop[s];
  }
  for (Eigen::Index s = 0; s < num_slices; ++s) {
    if (pop[static_cast<std::size_t>(s)] == 0) {
      throw Error("slice_topic_state: slice " + std::to_string(s) + " is empty");
    }
    sums.row(s) /= static_cast<double>(pop[static_cast<std::size_t>(s)]);
  }
  return sums;
}

Eigen::MatrixXd estimate_topic_word(const Eigen::MatrixXd &theta_doc, const CountMatrix &counts,
                                    double eta) {
  if (!(eta > 0.0)) {
    throw Error("estimate_topic_word: smoothing must be > 0");
  }
  if (theta_doc.rows() != counts.rows()) {
    throw Error("estimate_topic_word: theta and counts disagree on document count");
  }
  // (K x N) * (N x V), accumulated document by document
  Eigen::MatrixXd phi = Eigen::MatrixXd::Constant(theta_doc.cols(), counts.cols(), eta);
  for (Eigen::Index d = 0; d < counts.outerSize(); ++d) {
    for (CountMatrix::InnerIterator it(counts, d); it; ++it) {
      phi.col(it.col()) += it.value() * theta_doc.row(d).transpose();
    }
  }
  for (Eigen::Index k = 0; k < phi.rows(); ++k) {
    phi.row(k) /= phi.row(k).sum();
  }
  return phi;
}

std::vector<std::string> label_classes(const Corpus &corpus) {
  std::set<std::string> classes;
  for (const auto &d : corpus.documents) {
    if (!d.label) {
      throw Error("supervised mode: document '" + d.id + "' has no label");
    }
    classes.insert(*d.label);
  }
  return {classes.begin(), classes.end()};
}

std::vector<Eigen::Index> label_indices(const Corpus &corpus, std::size_t k) {
  const auto classes = label_classes(corpus);
  if (classes.size() != k) {
    throw Error("supervised mode: k = " + std::to_string(k) + " but the corpus has " +
                std::to_string(classes.size()) + " label classes");
  }
  std::vector<Eigen::Index> out;
  out.reserve(corpus.size());
  for (const auto &d : corpus.documents) {
    const auto it = std::lower_bound(classes.begin(), classes.end(), *d.label);
    out.push_back(static_cast<Eigen::Index>(it - classes.begin()));
  }
  return out;
}

namespace {

void check_targets(const Eigen::MatrixXd &theta_doc, const Targets &targets) {
  if (targets.mode == TrainMode::supervised) {
    if (static_cast<Eigen::Index>(targets.labels.size()) != theta_doc.rows()) {
      throw Error("joint_loss: supervised mode needs one label per document");
    }
    for (const auto y : targets.labels) {
      if (y < 0 || y >= theta_doc.cols()) {
        throw Error("joint_loss: label index outside [0, K)");
      }
    }
  } else {
    if (targets.counts == nullptr || targets.counts->rows() != theta_doc.rows()) {
      throw Error("joint_loss: unsupervised mode needs one count row per document");
    }
  }
}

} // namespace

LossTerms joint_loss(const Eigen::MatrixXd &theta_doc, const Eigen::MatrixXd &theta_slice,
                     const Targets &targets, const ModelParams &params) {
  check_targets(theta_doc, targets);
  LossTerms out;
  if (targets.mode == TrainMode::supervised) {
    for (Eigen::Index i = 0; i < theta_doc.rows(); ++i) {
      out.likelihood -= std::log(theta_doc(i, targets.labels[static_cast<std::size_t>(i)]));
    }
  } else {
    const auto &counts = *targets.counts;
    if (params.phi.rows() != theta_doc.cols() || params.phi.cols() != counts.cols()) {
      throw Error("joint_loss: phi shape does not match K x V");
    }
    for (Eigen::Index d = 0; d < counts.outerSize(); ++d) {
      for (CountMatrix::InnerIterator it(counts, d); it; ++it) {
        const double p = theta_doc.row(d).dot(params.phi.col(it.col()));
        out.likelihood -= it.value() * std::log(p);
      }
    }
  }
  for (Eigen::Index t = 0; t + 1 < theta_slice.rows(); ++t) {
    const Eigen::VectorXd r =
        theta_slice.row(t + 1).transpose() - params.A * theta_slice.row(t).transpose();
    out.consistency += r.squaredNorm();
  }
  out.consistency *= params.beta;
  out.total = out.likelihood + out.consistency;
  return out;
}

Objective::Objective(const Eigen::MatrixXd &pooled, const TimeSliceIndex &slices, Targets targets)
    : pooled_(pooled), slices_(slices), targets_(std::move(targets)) {
  if (static_cast<std::size_t>(pooled_.rows()) != slices_.slice_of.size()) {
    throw Error("objective: pooled rows do not match the slice index");
  }
  const auto pop = slices_.populations();
  inv_population_.resize(pop.size());
  for (std::size_t s = 0; s < pop.size(); ++s) {
    if (pop[s] == 0) {
      throw Error("objective: slice " + std::to_string(s) + " is empty");
    }
    inv_population_[s] = 1.0 / static_cast<double>(pop[s]);
  }
}

TopicAssignments Objective::forward(const ModelParams &params) const {
  TopicAssignments out;
  out.theta_doc = topic_distributions(pooled_, params.W, params.b);
  out.theta_slice = slice_topic_state(out.theta_doc, slices_);
  return out;
}

LossTerms Objective::loss(const ModelParams &params) const {
  const auto f = forward(params);
  return joint_loss(f.theta_doc, f.theta_slice, targets_, params);
}

Gradients Objective::gradients(const ModelParams &params) const {
  const auto f = forward(params);
  const auto &theta = f.theta_doc;
  const auto &theta_slice = f.theta_slice;
  const Eigen::Index n = theta.rows();
  const Eigen::Index k = theta.cols();

  Gradients g;
  g.loss = joint_loss(theta, theta_slice, targets_, params);

  // dL/dlogits, N x K
  Eigen::MatrixXd dz(n, k);
  if (targets_.mode == TrainMode::supervised) {
    dz = theta;
    for (Eigen::Index i = 0; i < n; ++i) {
      dz(i, targets_.labels[static_cast<std::size_t>(i)]) -= 1.0;
    }
  } else {
    // n_d theta_dk - sum_w c_dw theta_dk phi_kw / p_dw
    const auto &counts = *targets_.counts;
    Eigen::VectorXd resp(k);
    for (Eigen::Index d = 0; d < n; ++d) {
      double length = 0.0;
      resp.setZero();
      for (CountMatrix::InnerIterator it(counts, d); it; ++it) {
        const auto joint = theta.row(d).transpose().cwiseProduct(params.phi.col(it.col()));
        resp += (it.value() / joint.sum()) * joint;
        length += it.value();
      }
      dz.row(d) = length * theta.row(d) - resp.transpose();
    }
  }

  // consistency: residuals r_t = theta_{t+1} - A theta_t
  const Eigen::Index num_slices = theta_slice.rows();
  Eigen::MatrixXd d_slice = Eigen::MatrixXd::Zero(num_slices, k);
  g.A = Eigen::MatrixXd::Zero(k, k);
  if (params.beta != 0.0) {
    for (Eigen::Index t = 0; t + 1 < num_slices; ++t) {
      const Eigen::VectorXd r =
          theta_slice.row(t + 1).transpose() - params.A * theta_slice.row(t).transpose();
      d_slice.row(t + 1) += 2.0 * params.beta * r.transpose();
      d_slice.row(t) -= 2.0 * params.beta * (params.A.transpose() * r).transpose();
      g.A -= 2.0 * params.beta * r * theta_slice.row(t);
    }
    // back through the slice mean and the softmax Jacobian
    for (Eigen::Index d = 0; d < n; ++d) {
      const auto s = slices_.slice_of[static_cast<std::size_t>(d)];
      const Eigen::RowVectorXd gd =
          d_slice.row(static_cast<Eigen::Index>(s)) * inv_population_[s];
      const double centre = theta.row(d).dot(gd);
      dz.row(d) += theta.row(d).cwiseProduct((gd.array() - centre).matrix());
    }
  }

  g.W = dz.transpose() * pooled_;
  g.b = dz.colwise().sum().transpose();
  return g;
}

ModelParams initial_params(const TrainConfig &cfg, Eigen::Index dim, Eigen::Index vocab_size) {
  const auto k = static_cast<Eigen::Index>(cfg.k);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ModelParams p;
  p.W.resize(k, dim);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      p.W(r, c) = cfg.init_scale * normal(rng);
    }
  }
  p.b.resize(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    p.b[r] = cfg.init_scale * normal(rng);
  }
  p.A = Eigen::MatrixXd::Identity(k, k);
  p.phi = Eigen::MatrixXd::Constant(k, vocab_size, 1.0 / static_cast<double>(vocab_size));
  p.sigma = cfg.sigma;
  p.beta = cfg.beta;
  return p;
}

TrainResult train(const Corpus &corpus, const Eigen::MatrixXd &pooled,
                  const TimeSliceIndex &slices, const TrainConfig &cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(pooled.rows()) != corpus.size()) {
    throw Error("train: representation rows do not match the corpus size");
  }
  const CountMatrix counts = count_matrix(corpus);
  Targets targets;
  targets.mode = cfg.mode;
  targets.counts = &counts;
  if (cfg.mode == TrainMode::supervised) {
    targets.labels = label_indices(corpus, cfg.k);
  }
  const Objective objective(pooled, slices, targets);

  TrainResult result;
  result.params = initial_params(cfg, pooled.cols(), counts.cols());
  auto &params = result.params;
  result.history.reserve(cfg.epochs + 1);

  auto check_finite = [](const LossTerms &loss, std::size_t epoch) {
    if (!std::isfinite(loss.total)) {
      throw Error("train: loss diverged (non-finite) at epoch " + std::to_string(epoch));
    }
  };

  // W and b step along the per-document mean gradient, A along the
  // per-transition mean; the objective itself stays a sum.
  const double step_theta = cfg.learning_rate / static_cast<double>(pooled.rows());
  const double step_a =
      cfg.learning_rate / static_cast<double>(std::max<std::size_t>(1, slices.num_slices - 1));

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.mode == TrainMode::unsupervised) {
      const auto theta = topic_distributions(pooled, params.W, params.b);
      params.phi = estimate_topic_word(theta, counts, cfg.smoothing_eta);
    }
    const auto g = objective.gradients(params);
    check_finite(g.loss, epoch);
    result.history.push_back(g.loss);
    params.W -= step_theta * g.W;
    params.b -= step_theta * g.b;
    params.A -= step_a * g.A;
    if (!params.W.allFinite() || !params.b.allFinite() || !params.A.allFinite()) {
      throw Error("train: parameters diverged (non-finite) at epoch " + std::to_string(epoch));
    }
  }

  result.assignments = objective.forward(params);
  params.phi = estimate_topic_word(result.assignments.theta_doc, counts, cfg.smoothing_eta);
  const auto final_loss = joint_loss(result.assignments.theta_doc,
                                     result.assignments.theta_slice, targets, params);
  check_finite(final_loss, cfg.epochs);
  result.history.push_back(final_loss);
  return result;
}

std::vector<Eigen::VectorXd> forecast(const Eigen::VectorXd &theta_last, const Eigen::MatrixXd &A,
                                      std::size_t steps) {
  if (steps < 1) {
    throw Error("forecast: steps must be >= 1");
  }
  if (A.rows() != A.cols() || A.cols() != theta_last.size()) {
    throw Error("forecast: A must be K x K with K = theta size");
  }
  std::vector<Eigen::VectorXd> out;
  out.reserve(steps);
  Eigen::VectorXd theta = theta_last;
  for (std::size_t s = 0; s < steps; ++s) {
    theta = simplex_project(transition_step(theta, A, 0.0));
    out.push_back(theta);
  }
  return out;
}

} // namespace tempora
