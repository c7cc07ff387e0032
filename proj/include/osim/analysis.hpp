#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "osim/protocol.hpp"

namespace osim {

/// Shortest round-trip decimal form, as written to every CSV and SVG.
std::string format_number(double v);

/// A CSV table with a fixed header row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

/// Sampling scheme recorded next to win probabilities.
inline constexpr std::string_view kWinSampling = "without_replacement_shared_indices";

/// Resample seed used by `analyze winprob` for a given master seed.
std::uint64_t winprob_seed(std::uint64_t master_seed);

/// config_hash, method, metric, n, mean, se, ci_low, ci_high, confidence,
/// se_flag. One row per (method, metric) plus one "accuracy" row.
/// se_flag is "insufficient_n" when the pool has a single trial.
Table estimate_table(const ExperimentPool& pool, double confidence);

/// config_hash, metric, method, win_probability, k, replications,
/// resample_seed, sampling.
Table winprob_table(const ExperimentPool& pool, const std::vector<std::string>& methods,
                    std::string_view metric, std::size_t k, std::size_t replications,
                    std::uint64_t resample_seed);

/// config_hash, metric, method_a, method_b, n_required, alpha, pool_size.
/// Every unordered method pair including self pairs; n_required is
/// "NOT-REACHED" when no prefix reaches significance.
Table convergence_table(const ExperimentPool& pool, const std::vector<std::string>& methods,
                        std::string_view metric, double alpha);

/// Trial values grouped by class split group, ascending group order.
struct SplitGroups {
  std::vector<std::size_t> groups;
  std::vector<std::string> in_classes;  ///< space-separated class IDs per group
  std::vector<std::vector<double>> values;
};
SplitGroups split_groups(const ExperimentPool& pool, std::string_view method,
                         std::string_view metric);

/// config_hash, method, metric, split_group, in_classes, n, mean, std, bandwidth.
Table variance_table(const ExperimentPool& pool, std::string_view method, std::string_view metric);

/// config_hash, method, metric, group_a, group_b, t, dof, p_value.
Table variance_pairs_table(const ExperimentPool& pool, std::string_view method,
                           std::string_view metric);

/// Values of (method, metric) per OOD source, in_dataset first.
std::vector<std::pair<std::string, std::vector<double>>> source_values(
    const ExperimentPool& pool, std::string_view method, std::string_view metric);

/// config_hash, source, method, metric, n, mean, se, ci_low, ci_high.
Table crossdataset_table(const ExperimentPool& pool, std::string_view metric, double confidence);

}  // namespace osim
