#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osim/datasets.hpp"
#include "osim/matrix.hpp"
#include "osim/trainer.hpp"
#include "osim/weibull.hpp"

namespace osim {

// All scores follow one orientation: higher means more likely OOD.

enum class Method { msp, tscaling, odin, openmax, mcd };

std::string_view method_name(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;

/// ODIN step sizes searched on the OOD validation split.
inline constexpr double kOdinEpsilonGrid[] = {0.0, 0.0005, 0.001, 0.002, 0.005};
inline constexpr double kOdinDefaultEpsilon = 0.001;

struct DetectorConfig {
  /// Key under which results are recorded; defaults to the method name.
  std::string name;
  Method method = Method::msp;
  double temperature = 1000.0;          ///< tscaling, odin
  std::optional<double> epsilon;        ///< odin; nullopt = tune on validation data
  std::size_t tail_size = 20;           ///< openmax
  std::optional<std::size_t> alpha;     ///< openmax; nullopt = min(3, K)
  std::size_t n_passes = 32;            ///< mcd

  void validate() const;
  std::string display_name() const;
};

/// Per-class logit centers and Weibull tail models.
struct OpenMaxModel {
  std::vector<std::vector<double>> centers;
  std::vector<Weibull> weibull;
  std::size_t alpha = 1;
  std::size_t tail_size = 0;
};

double msp_score(const TrainedModel& model, std::span<const double> x);
double tscale_score(const TrainedModel& model, std::span<const double> x, double temperature);

/// x - epsilon * sign(-grad_x softmax(f(x)/T)[y_hat]), sign(0) = 0.
std::vector<double> odin_preprocess(const TrainedModel& model, std::span<const double> x,
                                    double temperature, double epsilon);
double odin_score(const TrainedModel& model, std::span<const double> x, double temperature,
                  double epsilon);

/// Fits centers on correctly classified training samples and Weibull models
/// on the `tail_size` largest center distances of each class.
OpenMaxModel openmax_fit(const TrainedModel& model, const Dataset& in_train,
                         std::size_t tail_size, std::size_t alpha);

/// Recalibrated "other"-class probability.
double openmax_score(const OpenMaxModel& om, const TrainedModel& model, std::span<const double> x);

/// 1 - max of the mean softmax over `n_passes` dropout-active forward passes.
/// Pass p uses the mask seed derive_subseed(seed, p).
double mcd_score(const TrainedModel& model, std::span<const double> x, std::size_t n_passes,
                 std::uint64_t seed);

/// A detector with everything it learned from the simulation (OpenMax
/// tails, tuned ODIN step). Immutable and safe to share across threads.
class Detector {
 public:
  /// Fits method-specific state. ODIN with unset epsilon is tuned for
  /// validation AUROC on (in_val, out_val) when out_val is non-empty.
  static Detector fit(const DetectorConfig& config, const TrainedModel& model,
                      const Dataset& in_train, const Dataset& in_val, const Dataset& out_val,
                      std::uint64_t detector_seed);

  const DetectorConfig& config() const noexcept { return config_; }
  const std::optional<OpenMaxModel>& openmax() const noexcept { return openmax_; }
  /// Effective ODIN step (tuned or configured).
  double epsilon() const noexcept { return epsilon_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Score of one sample; `sample_key` selects the MCD sub-stream.
  double score(const TrainedModel& model, std::span<const double> x,
               std::uint64_t sample_key = 0) const;
  /// Scores of all rows, row i using sample_key i.
  std::vector<double> score_all(const TrainedModel& model, const Matrix& rows) const;

 private:
  DetectorConfig config_;
  std::optional<OpenMaxModel> openmax_;
  double epsilon_ = 0.0;
  std::uint64_t seed_ = 0;
};

/// Reject-option classifier: nullopt (REJECT) iff score > threshold,
/// otherwise the argmax class ID.
std::optional<ClassId> classify_with_reject(const TrainedModel& model, const Detector& detector,
                                            std::span<const double> x, double threshold,
                                            std::uint64_t sample_key = 0);

}  // namespace osim
