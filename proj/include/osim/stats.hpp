#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace osim {

double mean(std::span<const double> v);
/// Unbiased sample variance (n - 1 denominator); 0 for fewer than two values.
double sample_variance(std::span<const double> v);

/// Regularized incomplete beta I_x(a, b) (continued fraction, modified Lentz).
double incomplete_beta(double a, double b, double x);

/// Student-t distribution function with `dof` > 0 degrees of freedom.
double student_t_cdf(double t, double dof);

double normal_cdf(double x);
/// Inverse standard normal CDF, p in (0, 1).
double normal_quantile(double p);

struct StatResult {
  double t = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
};

/// Two-sided Welch's t-test (unequal variances, Welch-Satterthwaite dof).
/// Both samples need at least two values. When both variances are zero the
/// result is t = 0, p = 1 for equal means and t = +-inf, p = 0 otherwise,
/// with dof = n_a + n_b - 2.
StatResult welch_t_test(std::span<const double> a, std::span<const double> b);

/// Silverman's rule of thumb: 0.9 * min(sd, IQR / 1.34) * n^(-1/5).
/// Returns kMinBandwidth when the samples have no spread.
double silverman_bandwidth(std::span<const double> samples);

inline constexpr double kMinBandwidth = 1e-3;

/// Gaussian kernel density estimate.
class KernelDensity {
 public:
  /// `bandwidth` nullopt selects Silverman's rule.
  KernelDensity(std::vector<double> samples, std::optional<double> bandwidth = std::nullopt);

  double bandwidth() const noexcept { return bandwidth_; }
  const std::vector<double>& samples() const noexcept { return samples_; }

  double density(double x) const;
  std::vector<double> evaluate(std::span<const double> grid) const;
  /// `points` equally spaced grid values over [lo, hi].
  static std::vector<double> grid(double lo, double hi, std::size_t points);

 private:
  std::vector<double> samples_;
  double bandwidth_ = kMinBandwidth;
};

}  // namespace osim
