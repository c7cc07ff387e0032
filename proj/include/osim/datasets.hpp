#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osim/matrix.hpp"

namespace osim {

using ClassId = std::int32_t;

/// Label carried by externally generated OOD samples; never a member of a class set.
inline constexpr ClassId kSyntheticOodLabel = -1;

struct ValueRange {
  double low = 0.0;
  double high = 0.0;
  bool operator==(const ValueRange&) const = default;
};

/// A labeled sample collection over a real feature space.
///
/// `labels[i]` is the class of row `i` of `features`. `class_set` is sorted and
/// unique. `class_names` maps a ClassId (its index) back to the label text it
/// was read from and is shared unchanged by every subset of a dataset.
struct Dataset {
  std::string name;
  Matrix features;
  std::vector<ClassId> labels;
  std::vector<ClassId> class_set;
  std::vector<std::string> class_names;
  ValueRange value_range;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dims() const noexcept { return features.cols(); }
  bool empty() const noexcept { return labels.empty(); }

  /// Rows `indices` (in the given order); class_set becomes `subset_classes`.
  Dataset subset(std::span<const std::size_t> indices,
                 std::vector<ClassId> subset_classes) const;

  /// Throws DataError when any invariant fails (label outside class_set,
  /// non-finite feature, feature outside value_range, row/label mismatch).
  void validate() const;
};

/// Min/max over all entries; {0,0} for an empty matrix.
ValueRange compute_value_range(const Matrix& features);

/// Reads a CSV with a header row. Every column except `label_column` must be
/// numeric. Class IDs are assigned in order of first appearance.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column);

/// Writes features (shortest round-trip decimal form) followed by the label column.
void save_csv(const Dataset& dataset, const std::filesystem::path& path,
              const std::string& label_column = "label");

struct SyntheticSpec {
  std::size_t n_classes = 8;
  std::size_t n_dims = 16;
  std::size_t samples_per_class = 100;
  double separation = 1.0;  ///< std of the Gaussian the class means are drawn from
  double within_std = 1.0;  ///< isotropic within-class standard deviation
  std::uint64_t seed = 0;

  void validate() const;
};

/// Class means (n_classes x n_dims) drawn i.i.d. N(0, separation^2) from `spec.seed`.
Matrix synthetic_class_means(const SyntheticSpec& spec);

/// Isotropic Gaussian mixture with labels 0..n_classes-1, class-major row order.
Dataset gen_gaussian_mixture(const SyntheticSpec& spec);

/// Fresh draws from the mixture components `classes` of `spec`, `per_class`
/// rows each, using `seed` for the draws (the means still come from spec.seed).
Dataset sample_gaussian_mixture(const SyntheticSpec& spec, std::span<const ClassId> classes,
                                std::size_t per_class, std::uint64_t seed);

enum class NoiseKind { uniform, gaussian };

/// Image-range noise: uniform U(0,255), or N(128, 128^2) clipped to [0,255].
Matrix gen_noise(NoiseKind kind, std::size_t n, std::size_t n_dims, std::uint64_t seed);

/// N(mean, stddev^2) i.i.d. entries, optionally clipped to `clip`.
Matrix gen_gaussian_noise(std::size_t n, std::size_t n_dims, double mean, double stddev,
                          std::uint64_t seed, std::optional<ValueRange> clip = std::nullopt);

/// Wraps a raw feature matrix as a dataset labeled kSyntheticOodLabel.
Dataset wrap_ood_samples(std::string name, Matrix features);

}  // namespace osim
