#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "osim/datasets.hpp"
#include "osim/detectors.hpp"
#include "osim/splitgen.hpp"
#include "osim/trainer.hpp"

namespace osim {

struct CsvSource {
  std::string path;
  std::string label_column = "label";
};

using DatasetSource = std::variant<SyntheticSpec, CsvSource>;

struct SplitConfig {
  ClassSplitSizes sizes{4, 0, 0, 4};
  SplitFractions fractions;
  bool stratify = true;
};

/// Fixed-class-split design: trial t uses class split group t / seeds_per_split.
struct VarianceDesign {
  std::size_t n_splits = 5;
  std::size_t seeds_per_split = 40;
};

struct ProtocolConfig {
  std::size_t n_trials = 100;
  std::uint64_t master_seed = 0;
  std::size_t k = 5;
  std::size_t replications = 10000;
  double alpha = 0.05;
  double confidence = 0.95;
  std::optional<VarianceDesign> variance;
};

enum class SourceKind {
  uniform_noise,    ///< U(0, 255)
  gaussian_noise,   ///< N(128, 128^2) clipped to [0, 255]
  gaussian,         ///< N(mean, std^2), optionally clipped
  resample_in,      ///< fresh draws of the trial's in-classes (synthetic datasets only)
  csv,              ///< rows of an external CSV file
};

/// An external OOD sample source replacing the in-dataset OOD test set.
struct OodSourceConfig {
  std::string name;
  SourceKind kind = SourceKind::uniform_noise;
  std::size_t n = 1000;
  double mean = 0.0;
  double std = 1.0;
  std::optional<ValueRange> clip;
  std::string path;
  std::string label_column = "label";
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats = {"csv", "svg"};
};

struct ExperimentConfig {
  DatasetSource dataset = SyntheticSpec{};
  SplitConfig split;
  ModelConfig model;
  std::vector<DetectorConfig> detectors;
  ProtocolConfig protocol;
  std::vector<OodSourceConfig> ood_sources;
  OutputConfig output;

  /// Throws ConfigError on the first inconsistency.
  void validate() const;
};

/// Parses a config tree. Unknown keys and type mismatches are ConfigErrors
/// naming the JSON path (e.g. "/model/lr0"). Relative CSV paths are resolved
/// against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& tree,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical tree with every default made explicit.
nlohmann::json to_json(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical (sorted-key, compact) serialization, 16 hex digits.
std::string config_hash(const ExperimentConfig& config);
std::string fnv1a_hex(std::string_view bytes);

std::string_view source_kind_name(SourceKind k) noexcept;

}  // namespace osim
