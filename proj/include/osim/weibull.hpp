#pragma once

#include <span>

namespace osim {

/// Three-parameter Weibull distribution.
struct Weibull {
  double shape = 1.0;
  double scale = 1.0;
  double location = 0.0;

  /// 0 for x <= location, else 1 - exp(-((x - location) / scale)^shape).
  double cdf(double x) const noexcept;
};

/// Two-parameter (location 0) maximum-likelihood fit. Solves the profile
/// likelihood equation for the shape by safeguarded Newton iteration inside a
/// bisection bracket (relative tolerance 1e-10), then the scale in closed form.
/// Requires at least two strictly positive, not all equal samples.
Weibull fit_weibull_mle(std::span<const double> samples);

/// Fit used for OpenMax tails: location 1% of the tail range below the tail
/// minimum, then the two-parameter MLE on the shifted tail. A tail without
/// spread becomes a near-step at its value: location = value, shape 1,
/// scale 1e-12 * max(1, value).
Weibull fit_weibull_tail(std::span<const double> tail);

}  // namespace osim
