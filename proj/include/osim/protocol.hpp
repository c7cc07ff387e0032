#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "osim/config.hpp"
#include "osim/datasets.hpp"
#include "osim/splitgen.hpp"

namespace osim {

struct MethodScores {
  double auroc = 0.0;
  double aupr_in = 0.0;
  double aupr_out = 0.0;
  bool operator==(const MethodScores&) const = default;
};

struct SubsetSizes {
  std::size_t in_train = 0;
  std::size_t out_train = 0;
  std::size_t in_val = 0;
  std::size_t out_val = 0;
  std::size_t in_test = 0;
  std::size_t out_test = 0;
  std::size_t dropped = 0;
  bool operator==(const SubsetSizes&) const = default;
};

struct TrainingSummary {
  std::size_t epochs_trained = 0;
  std::size_t restored_epoch = 0;
  std::optional<double> best_val_loss;
  std::size_t clamped_dims = 0;
  bool operator==(const TrainingSummary&) const = default;
};

/// Outcome of one open set simulation, with full seed provenance.
struct TrialRecord {
  std::size_t trial_index = 0;
  std::uint64_t master_seed = 0;
  std::string config_hash;
  /// Derived seed per stream name.
  std::map<std::string, std::uint64_t> seeds;
  /// Class split group under a fixed-split (variance) design.
  std::optional<std::size_t> split_group;
  ClassSplit class_split;
  SubsetSizes subsets;
  std::map<std::string, MethodScores> methods;
  double accuracy = 0.0;
  /// Values chosen during fitting, e.g. "odin.epsilon".
  std::map<std::string, double> detector_params;
  TrainingSummary training;
  /// External OOD source name -> method -> scores (in-distribution side is
  /// the trial's own in_test set).
  std::map<std::string, std::map<std::string, MethodScores>> sources;
  double wall_time_s = 0.0;

  /// Equality ignoring wall_time_s.
  bool same_outcome(const TrialRecord& other) const;
};

/// Name of the in-dataset OOD result inside cross-dataset outputs.
inline constexpr std::string_view kInDatasetSource = "in_dataset";

/// A validated config together with its loaded dataset and sources.
/// Immutable after construction; trials may run concurrently.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const noexcept { return config_; }
  const Dataset& dataset() const noexcept { return dataset_; }
  const std::string& config_hash() const noexcept { return hash_; }

  /// Split group of a trial under the variance design, else nullopt.
  std::optional<std::size_t> split_group(std::size_t trial_index) const;
  std::uint64_t seed(std::size_t trial_index, Stream stream) const;
  ClassSplit class_split_for(std::size_t trial_index) const;
  /// The class split shared by all trials of `group` under the variance design.
  ClassSplit class_split_for_group(std::size_t group) const;
  OpenSetSimulation simulation_for(std::size_t trial_index,
                                   const std::optional<ClassSplit>& class_split = std::nullopt) const;

  /// split -> train -> fit detectors -> score -> metrics (plus OOD sources).
  /// A class split override pins the class roles; every other random draw
  /// still derives from (master_seed, trial_index).
  TrialRecord run_trial(std::size_t trial_index,
                        const std::optional<ClassSplit>& class_split = std::nullopt) const;

 private:
  ExperimentConfig config_;
  Dataset dataset_;
  std::string hash_;
  std::map<std::string, Matrix> csv_sources_;
};

TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial_index);

struct TrialFailure {
  std::size_t trial_index = 0;
  std::string message;
};

using TrialOutcome = std::variant<TrialRecord, TrialFailure>;

/// Runs `task(i)` for i in [0, n_tasks) on up to `workers` threads. Outcomes
/// reach `sink` on the calling thread, in completion order.
void run_parallel(std::size_t n_tasks, std::size_t workers,
                  const std::function<TrialOutcome(std::size_t)>& task,
                  const std::function<void(TrialOutcome&&)>& sink);

/// Runs the given trial indices and returns successful records sorted by
/// trial_index; the first failure is rethrown as a TrialError.
std::vector<TrialRecord> run_trials(const Experiment& experiment,
                                    std::span<const std::size_t> indices, std::size_t workers = 1);

/// Trial records keyed by trial_index, plus the config they came from.
struct ExperimentPool {
  std::string config_hash;
  std::vector<TrialRecord> trials;
};

/// Sorted method names present in every trial of the pool.
std::vector<std::string> pool_methods(const ExperimentPool& pool);

/// Per-trial values of (method, metric) in pool order. Metric "accuracy" is
/// per trial and ignores `method`. Unknown keys raise ConfigError listing the
/// available ones.
std::vector<double> metric_values(const ExperimentPool& pool, std::string_view method,
                                  std::string_view metric);

struct McEstimate {
  std::size_t n = 0;
  double mean = 0.0;
  /// Absent for a single trial.
  std::optional<double> standard_error;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  double confidence = 0.95;
};

/// mean = (1/N) sum of values, SE = sample sd / sqrt(N), normal-approximation CI.
McEstimate mc_estimate(std::span<const double> values, double confidence = 0.95);
McEstimate mc_estimate(const ExperimentPool& pool, std::string_view method,
                       std::string_view metric, double confidence = 0.95);

/// Smallest N in [2, min(|a|, |b|)] for which Welch's test on the first N
/// values of both sequences gives p < alpha; nullopt means not reached.
std::optional<std::size_t> convergence_n(std::span<const double> a, std::span<const double> b,
                                         double alpha);

/// Win frequency of each method when comparing k-trial means over R
/// resampled experiments. Each replication draws k trial positions without
/// replacement, shared by all methods; ties split the credit equally.
/// `per_method[m][i]` is method m's value on trial i.
std::vector<double> win_probability(const std::vector<std::vector<double>>& per_method,
                                    std::size_t k, std::size_t replications,
                                    std::uint64_t resample_seed);
std::map<std::string, double> win_probability(const ExperimentPool& pool,
                                              const std::vector<std::string>& methods,
                                              std::string_view metric, std::size_t k,
                                              std::size_t replications,
                                              std::uint64_t resample_seed);

struct GroupSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
  double bandwidth = 0.0;
};

/// Mean, sample standard deviation and Silverman bandwidth of one group.
GroupSummary summarize_group(std::span<const double> values);

/// Trials grouped by a fixed class split.
struct VarianceStudy {
  std::vector<ClassSplit> splits;
  std::vector<std::vector<TrialRecord>> records;  ///< records[g] has seeds_per_split entries

  std::vector<std::vector<double>> values(std::string_view method, std::string_view metric) const;
};

/// Holds each class split fixed while varying every other seed stream.
/// Split g, seed s runs as trial index g * seeds_per_split + s.
VarianceStudy variance_study(const Experiment& experiment, const std::vector<ClassSplit>& splits,
                             std::size_t seeds_per_split, std::size_t workers = 1);

struct SourceRecord {
  std::size_t trial_index = 0;
  std::string source;
  std::map<std::string, MethodScores> methods;
};

/// Replaces the OOD test set with each source in turn; the in-dataset result
/// is kept under kInDatasetSource. Records are ordered by trial, then source.
std::vector<SourceRecord> cross_dataset_eval(const ExperimentConfig& config,
                                             const std::vector<OodSourceConfig>& sources,
                                             std::span<const std::size_t> trial_indices,
                                             std::size_t workers = 1);

/// Flattens the per-source results stored in trial records.
std::vector<SourceRecord> source_records(std::span<const TrialRecord> trials);

}  // namespace osim
