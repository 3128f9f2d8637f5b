#ifndef TEMPORA_TESTS_GRADCHECK_HPP_
#define TEMPORA_TESTS_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "support.hpp"
#include "tempora/model.hpp"

namespace tempora::testing {

/// A random objective instance: K <= 5, d <= 16, N <= 30.
struct GradInstance {
  Eigen::MatrixXd pooled;
  TimeSliceIndex slices;
  CountMatrix counts;
  std::vector<Eigen::Index> labels;
  ModelParams params;
  TrainMode mode = TrainMode::unsupervised;
};

inline GradInstance random_instance(std::mt19937_64 &rng, TrainMode mode, double beta) {
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  std::normal_distribution<double> normal;
  GradInstance g;
  g.mode = mode;
  const int k = uniform_int(2, 5);
  const int d = uniform_int(2, 16);
  const int n = uniform_int(4, 30);
  const int t = uniform_int(2, std::min(n, 6));
  const int v = uniform_int(3, 12);

  // Every slice gets at least one document.
  std::vector<std::int64_t> ts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ts[static_cast<std::size_t>(i)] = i < t ? i : uniform_int(0, t - 1);
  std::sort(ts.begin(), ts.end());
  g.slices = slice_by_time(std::span<const std::int64_t>(ts), static_cast<std::size_t>(t));

  g.pooled = 0.5 * unit_rows(n, d, rng);
  g.params.W = Eigen::MatrixXd::NullaryExpr(k, d, [&] { return normal(rng); });
  g.params.b = Eigen::VectorXd::NullaryExpr(k, [&] { return 0.5 * normal(rng); });
  g.params.A = Eigen::MatrixXd::NullaryExpr(k, k, [&] { return 0.5 * normal(rng); });
  g.params.beta = beta;
  g.params.phi = Eigen::MatrixXd::NullaryExpr(k, v, [&] {
    return std::uniform_real_distribution<double>(0.05, 1.0)(rng);
  });
  for (Eigen::Index r = 0; r < k; ++r) g.params.phi.row(r) /= g.params.phi.row(r).sum();

  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < n; ++i) {
    for (int w = 0; w < v; ++w) {
      if (rng() % 3 == 0) trips.emplace_back(i, w, uniform_int(1, 4));
    }
    trips.emplace_back(i, uniform_int(0, v - 1), 1);
    g.labels.push_back(uniform_int(0, k - 1));
  }
  g.counts.resize(n, v);
  g.counts.setFromTriplets(trips.begin(), trips.end());
  return g;
}

inline Targets targets_of(const GradInstance &g) {
  Targets t;
  t.mode = g.mode;
  t.labels = g.labels;
  t.counts = &g.counts;
  return t;
}

/// Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over
/// every entry of W, b and A, with central differences of step h.
inline double gradient_check(const GradInstance &g, double h = 1e-5, double floor = 1e-8) {
  const Objective obj(g.pooled, g.slices, targets_of(g));
  const Gradients an = obj.gradients(g.params);
  double worst = 0.0;
  auto probe = [&](auto &&entry, double analytic) {
    ModelParams p = g.params;
    double &x = entry(p);
    const double x0 = x;
    x = x0 + h;
    const double up = obj.loss(p).total;
    x = x0 - h;
    const double down = obj.loss(p).total;
    const double numeric = (up - down) / (2 * h);
    const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  };
  for (Eigen::Index r = 0; r < g.params.W.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.params.W.cols(); ++c) {
      probe([&](ModelParams &p) -> double & { return p.W(r, c); }, an.W(r, c));
    }
    probe([&](ModelParams &p) -> double & { return p.b[r]; }, an.b[r]);
    for (Eigen::Index c = 0; c < g.params.A.cols(); ++c) {
      probe([&](ModelParams &p) -> double & { return p.A(r, c); }, an.A(r, c));
    }
  }
  return worst;
}

} // namespace tempora::testing

#endif // TEMPORA_TESTS_GRADCHECK_HPP_
