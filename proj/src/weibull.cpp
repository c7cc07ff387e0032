#include "osim/weibull.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "osim/error.hpp"

namespace osim {

namespace {

// Profile-likelihood equation for the shape k on data y = x / max(x):
//   g(k) = sum(y^k ln y) / sum(y^k) - 1/k - mean(ln y)
// g is strictly increasing in k; its root is the MLE shape.
struct ShapeEquation {
  std::vector<double> log_y;
  double mean_log = 0.0;

  void eval(double k, double& g, double& dg) const {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (const double ly : log_y) {
      const double w = std::exp(k * ly);
      s0 += w;
      s1 += w * ly;
      s2 += w * ly * ly;
    }
    const double ratio = s1 / s0;
    g = ratio - 1.0 / k - mean_log;
    dg = s2 / s0 - ratio * ratio + 1.0 / (k * k);
  }
};

}  // namespace

double Weibull::cdf(double x) const noexcept {
  if (x <= location) return 0.0;
  return -std::expm1(-std::pow((x - location) / scale, shape));
}

Weibull fit_weibull_mle(std::span<const double> samples) {
  if (samples.size() < 2) throw DataError("weibull fit: at least two samples are required");
  const double x_max = *std::max_element(samples.begin(), samples.end());
  const double x_min = *std::min_element(samples.begin(), samples.end());
  if (!(x_min > 0.0)) throw DataError("weibull fit: samples must be strictly positive");
  if (x_min == x_max) throw DataError("weibull fit: samples have no spread");

  ShapeEquation eq;
  eq.log_y.reserve(samples.size());
  for (const double x : samples) eq.log_y.push_back(std::log(x / x_max));
  double sum_log = 0.0;
  for (const double ly : eq.log_y) sum_log += ly;
  eq.mean_log = sum_log / static_cast<double>(samples.size());

  double g = 0.0;
  double dg = 0.0;
  double lo = 1.0;
  double hi = 1.0;
  for (eq.eval(lo, g, dg); g > 0.0; eq.eval(lo, g, dg)) lo *= 0.5;
  for (eq.eval(hi, g, dg); g < 0.0; eq.eval(hi, g, dg)) hi *= 2.0;

  double k = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    eq.eval(k, g, dg);
    if (g > 0.0) {
      hi = k;
    } else {
      lo = k;
    }
    double next = k - g / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool done = std::abs(next - k) <= 1e-10 * k;
    k = next;
    if (done || (hi - lo) <= 1e-10 * k) break;
  }

  double s0 = 0.0;
  for (const double ly : eq.log_y) s0 += std::exp(k * ly);
  Weibull w;
  w.shape = k;
  w.scale = x_max * std::pow(s0 / static_cast<double>(samples.size()), 1.0 / k);
  w.location = 0.0;
  return w;
}

Weibull fit_weibull_tail(std::span<const double> tail) {
  if (tail.empty()) throw DataError("weibull tail fit: empty tail");
  const double lo = *std::min_element(tail.begin(), tail.end());
  const double hi = *std::max_element(tail.begin(), tail.end());
  if (!(hi > lo)) {
    return Weibull{1.0, 1e-12 * std::max(1.0, lo), lo};
  }
  const double location = lo - 0.01 * (hi - lo);
  std::vector<double> shifted(tail.size());
  for (std::size_t i = 0; i < tail.size(); ++i) shifted[i] = tail[i] - location;
  Weibull w = fit_weibull_mle(shifted);
  w.location = location;
  return w;
}

}  // namespace osim
