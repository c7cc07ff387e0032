#include "osim/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "osim/error.hpp"
#include "osim/metrics.hpp"
#include "osim/splitgen.hpp"

namespace osim {

namespace {

double one_minus_max(std::span<const double> p) {
  return 1.0 - *std::max_element(p.begin(), p.end());
}

double one_minus_max_softmax(std::span<const double> z) {
  const auto p = softmax(z);
  return one_minus_max(p);
}

std::vector<double> scaled(std::span<const double> z, double temperature) {
  std::vector<double> out(z.begin(), z.end());
  for (auto& v : out) v /= temperature;
  return out;
}

void require_temperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("temperature must be a finite value > 0");
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::msp: return "msp";
    case Method::tscaling: return "tscaling";
    case Method::odin: return "odin";
    case Method::openmax: return "openmax";
    case Method::mcd: return "mcd";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (const auto m : {Method::msp, Method::tscaling, Method::odin, Method::openmax, Method::mcd}) {
    if (method_name(m) == name) return m;
  }
  return std::nullopt;
}

void DetectorConfig::validate() const {
  const std::string who = "detector '" + display_name() + "'";
  if (method == Method::tscaling || method == Method::odin) {
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
      throw ConfigError(who + ": temperature must be > 0");
    }
  }
  if (method == Method::odin && epsilon && !(*epsilon >= 0.0)) {
    throw ConfigError(who + ": epsilon must be >= 0");
  }
  if (method == Method::openmax) {
    if (tail_size == 0) throw ConfigError(who + ": tail_size must be positive");
    if (alpha && *alpha == 0) throw ConfigError(who + ": alpha must be positive");
  }
  if (method == Method::mcd && n_passes == 0) throw ConfigError(who + ": n_passes must be positive");
}

std::string DetectorConfig::display_name() const {
  return name.empty() ? std::string(method_name(method)) : name;
}

double msp_score(const TrainedModel& model, std::span<const double> x) {
  return one_minus_max_softmax(forward(model, x));
}

double tscale_score(const TrainedModel& model, std::span<const double> x, double temperature) {
  require_temperature(temperature);
  return one_minus_max_softmax(scaled(forward(model, x), temperature));
}

std::vector<double> odin_preprocess(const TrainedModel& model, std::span<const double> x,
                                    double temperature, double epsilon) {
  require_temperature(temperature);
  if (!(epsilon >= 0.0)) throw ConfigError("odin: epsilon must be >= 0");
  const auto z = scaled(forward(model, x), temperature);
  const auto y_hat = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
  const auto grad = input_gradient(model, x, y_hat, temperature);
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double g = -grad[i];
    const double sign = g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0);
    out[i] = x[i] - epsilon * sign;
  }
  return out;
}

double odin_score(const TrainedModel& model, std::span<const double> x, double temperature,
                  double epsilon) {
  const auto perturbed = odin_preprocess(model, x, temperature, epsilon);
  return tscale_score(model, perturbed, temperature);
}

OpenMaxModel openmax_fit(const TrainedModel& model, const Dataset& in_train,
                         std::size_t tail_size, std::size_t alpha) {
  if (tail_size == 0) throw ConfigError("openmax: tail_size must be positive");
  const std::size_t k = model.num_classes();
  if (alpha == 0 || alpha > k) {
    throw ConfigError("openmax: alpha must be in [1, " + std::to_string(k) + "]");
  }
  std::vector<std::vector<LogitVector>> correct(k);
  for (std::size_t i = 0; i < in_train.size(); ++i) {
    auto z = forward(model, in_train.features.row(i));
    const auto pred = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
    const auto label = model.class_index(in_train.labels[i]);
    if (label && *label == pred) correct[pred].push_back(std::move(z));
  }

  OpenMaxModel om;
  om.alpha = alpha;
  om.tail_size = tail_size;
  for (std::size_t c = 0; c < k; ++c) {
    const auto& logits = correct[c];
    if (logits.size() < tail_size) {
      throw DataError("openmax: class " + std::to_string(model.class_ids[c]) + " has " +
                      std::to_string(logits.size()) +
                      " correctly classified training samples, tail_size is " +
                      std::to_string(tail_size));
    }
    std::vector<double> center(k, 0.0);
    for (const auto& z : logits) {
      for (std::size_t j = 0; j < k; ++j) center[j] += z[j];
    }
    for (auto& v : center) v /= static_cast<double>(logits.size());

    std::vector<double> dist;
    dist.reserve(logits.size());
    for (const auto& z : logits) dist.push_back(euclidean(z, center));
    std::sort(dist.begin(), dist.end(), std::greater<>());
    dist.resize(tail_size);

    om.centers.push_back(std::move(center));
    om.weibull.push_back(fit_weibull_tail(dist));
  }
  return om;
}

double openmax_score(const OpenMaxModel& om, const TrainedModel& model, std::span<const double> x) {
  const auto z = forward(model, x);
  const std::size_t k = z.size();
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });

  // Revised logits with the "other" pseudo-logit in slot 0.
  std::vector<double> revised(k + 1, 0.0);
  for (std::size_t i = 0; i < k; ++i) revised[i + 1] = z[i];
  const std::size_t alpha = std::min(om.alpha, k);
  for (std::size_t rank = 0; rank < alpha; ++rank) {
    const std::size_t c = order[rank];
    const double rank_weight =
        static_cast<double>(alpha - rank) / static_cast<double>(alpha);
    const double w = om.weibull[c].cdf(euclidean(z, om.centers[c])) * rank_weight;
    revised[c + 1] = z[c] * (1.0 - w);
    revised[0] += z[c] * w;
  }
  return softmax(revised)[0];
}

double mcd_score(const TrainedModel& model, std::span<const double> x, std::size_t n_passes,
                 std::uint64_t seed) {
  if (n_passes == 0) throw ConfigError("mcd: n_passes must be positive");
  std::vector<double> mean;
  for (std::size_t p = 0; p < n_passes; ++p) {
    const auto probs = softmax(forward(model, x, derive_subseed(seed, p)));
    if (mean.empty()) mean.assign(probs.size(), 0.0);
    // Incremental mean: identical passes leave the mean bit-for-bit unchanged.
    const double n = static_cast<double>(p + 1);
    for (std::size_t i = 0; i < probs.size(); ++i) mean[i] += (probs[i] - mean[i]) / n;
  }
  return one_minus_max(mean);
}

Detector Detector::fit(const DetectorConfig& config, const TrainedModel& model,
                       const Dataset& in_train, const Dataset& in_val, const Dataset& out_val,
                       std::uint64_t detector_seed) {
  config.validate();
  Detector d;
  d.config_ = config;
  d.seed_ = detector_seed;
  switch (config.method) {
    case Method::openmax: {
      const std::size_t alpha = config.alpha.value_or(std::min<std::size_t>(3, model.num_classes()));
      d.openmax_ = openmax_fit(model, in_train, config.tail_size, alpha);
      break;
    }
    case Method::odin: {
      if (config.epsilon) {
        d.epsilon_ = *config.epsilon;
      } else if (!in_val.empty() && !out_val.empty()) {
        double best = -1.0;
        for (const double eps : kOdinEpsilonGrid) {
          ScoredTestSet val;
          for (std::size_t i = 0; i < in_val.size(); ++i) {
            val.in_scores.push_back(odin_score(model, in_val.features.row(i), config.temperature, eps));
          }
          for (std::size_t i = 0; i < out_val.size(); ++i) {
            val.out_scores.push_back(
                odin_score(model, out_val.features.row(i), config.temperature, eps));
          }
          const double a = auroc(val);
          if (a > best) {
            best = a;
            d.epsilon_ = eps;
          }
        }
      } else {
        d.epsilon_ = kOdinDefaultEpsilon;
      }
      break;
    }
    default:
      break;
  }
  return d;
}

double Detector::score(const TrainedModel& model, std::span<const double> x,
                       std::uint64_t sample_key) const {
  switch (config_.method) {
    case Method::msp: return msp_score(model, x);
    case Method::tscaling: return tscale_score(model, x, config_.temperature);
    case Method::odin: return odin_score(model, x, config_.temperature, epsilon_);
    case Method::openmax: return openmax_score(*openmax_, model, x);
    case Method::mcd:
      return mcd_score(model, x, config_.n_passes, derive_subseed(seed_, sample_key));
  }
  throw ConfigError("unknown detector method");
}

std::vector<double> Detector::score_all(const TrainedModel& model, const Matrix& rows) const {
  std::vector<double> out(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = score(model, rows.row(i), i);
  return out;
}

std::optional<ClassId> classify_with_reject(const TrainedModel& model, const Detector& detector,
                                            std::span<const double> x, double threshold,
                                            std::uint64_t sample_key) {
  if (detector.score(model, x, sample_key) > threshold) return std::nullopt;
  return model.class_ids[predict_index(model, x)];
}

}  // namespace osim
