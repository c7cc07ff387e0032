#pragma once

// Independent oracles and fixtures shared by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "osim/datasets.hpp"
#include "osim/metrics.hpp"
#include "osim/random.hpp"
#include "osim/trainer.hpp"

namespace osim::testing {

/// ROC by enumerating every distinct threshold (predict OOD iff score >= tau),
/// integrated with the trapezoid rule.
inline double oracle_auroc(const ScoredTestSet& s) {
  std::set<double, std::greater<>> taus(s.in_scores.begin(), s.in_scores.end());
  taus.insert(s.out_scores.begin(), s.out_scores.end());
  const auto n_in = static_cast<double>(s.in_scores.size());
  const auto n_out = static_cast<double>(s.out_scores.size());
  double prev_fpr = 0.0;
  double prev_tpr = 0.0;
  double area = 0.0;
  for (const double tau : taus) {
    const auto tp = static_cast<double>(
        std::count_if(s.out_scores.begin(), s.out_scores.end(), [&](double v) { return v >= tau; }));
    const auto fp = static_cast<double>(
        std::count_if(s.in_scores.begin(), s.in_scores.end(), [&](double v) { return v >= tau; }));
    const double tpr = tp / n_out;
    const double fpr = fp / n_in;
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
    prev_fpr = fpr;
    prev_tpr = tpr;
  }
  return area;
}

/// Average precision: sum over distinct thresholds of (recall gain) x precision.
inline double oracle_aupr(const ScoredTestSet& s, Positive positive) {
  const auto& pos = positive == Positive::out ? s.out_scores : s.in_scores;
  const auto& neg = positive == Positive::out ? s.in_scores : s.out_scores;
  const double sign = positive == Positive::out ? 1.0 : -1.0;
  std::set<double, std::greater<>> taus;
  for (const double v : pos) taus.insert(sign * v);
  for (const double v : neg) taus.insert(sign * v);
  double prev_recall = 0.0;
  double area = 0.0;
  for (const double tau : taus) {
    const auto tp = static_cast<double>(
        std::count_if(pos.begin(), pos.end(), [&](double v) { return sign * v >= tau; }));
    const auto fp = static_cast<double>(
        std::count_if(neg.begin(), neg.end(), [&](double v) { return sign * v >= tau; }));
    const double recall = tp / static_cast<double>(pos.size());
    if (tp + fp > 0.0) area += (recall - prev_recall) * tp / (tp + fp);
    prev_recall = recall;
  }
  return area;
}

/// Random scored set with sides of size [1, max_side]; scores drawn from a
/// small grid so that ties are frequent.
inline ScoredTestSet random_scored_set(Rng& rng, std::size_t max_side) {
  ScoredTestSet s;
  const auto n_in = 1 + rng.below(max_side);
  const auto n_out = 1 + rng.below(max_side);
  const auto levels = 2 + rng.below(8);
  auto draw = [&] { return static_cast<double>(rng.below(levels)) / static_cast<double>(levels); };
  for (std::uint64_t i = 0; i < n_in; ++i) s.in_scores.push_back(draw());
  for (std::uint64_t i = 0; i < n_out; ++i) s.out_scores.push_back(draw() + 0.1 * rng.uniform());
  return s;
}

/// Randomly initialized model with non-trivial normalization statistics.
inline TrainedModel random_model(std::uint64_t seed, std::size_t dims, std::size_t classes,
                                 std::vector<std::size_t> hidden, double dropout = 0.0) {
  ModelConfig cfg;
  cfg.hidden_widths = std::move(hidden);
  cfg.dropout_rate = dropout;
  std::vector<ClassId> ids(classes);
  for (std::size_t c = 0; c < classes; ++c) ids[c] = static_cast<ClassId>(10 + c);
  TrainedModel m = init_model(dims, ids, cfg, seed);
  Rng rng(seed ^ 0x5eedULL);
  for (std::size_t d = 0; d < dims; ++d) {
    m.norm_mean[d] = rng.uniform(-1.0, 1.0);
    m.norm_std[d] = rng.uniform(0.5, 2.0);
  }
  // Larger weights than the default init so logits are far from uniform.
  for (auto& layer : m.layers) {
    for (auto& w : layer.weights.data()) w *= 2.0;
    for (auto& b : layer.bias) b = rng.uniform(-0.5, 0.5);
  }
  return m;
}

inline std::vector<double> random_input(Rng& rng, std::size_t dims, double scale = 2.0) {
  std::vector<double> x(dims);
  for (auto& v : x) v = rng.uniform(-scale, scale);
  return x;
}

/// max |a - b| / max(|a|, |b|, floor).
inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Central finite difference of f at x along coordinate i.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x, std::size_t i, double h = 1e-5) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double fp = f(x);
  x[i] = x0 - h;
  const double fm = f(x);
  return (fp - fm) / (2.0 * h);
}

}  // namespace osim::testing
