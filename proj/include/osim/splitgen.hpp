#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "osim/datasets.hpp"

namespace osim {

/// Purpose tag of a random stream. The ordinal values are part of the seed
/// derivation and must never be renumbered.
enum class Stream : std::uint8_t {
  class_split = 0,
  sample_split = 1,
  param_init = 2,
  shuffle = 3,
  dropout = 4,
  detector = 5,
  resample = 6,
};

inline constexpr std::array<Stream, 7> kAllStreams = {
    Stream::class_split, Stream::sample_split, Stream::param_init, Stream::shuffle,
    Stream::dropout,     Stream::detector,     Stream::resample};

std::string_view stream_name(Stream s) noexcept;

struct SeedContext {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
  Stream stream = Stream::class_split;
};

/// Identifier of the derivation function, persisted with every experiment pool.
inline constexpr std::string_view kSeedDerivationId = "splitmix64-chain-v1";

/// Chained SplitMix64 finalizer over (master_seed, trial_index, stream ordinal):
///
///   h0 = mix(master_seed ^ K0)
///   h1 = mix(h0 ^ (trial_index * K1))
///   h2 = mix(h1 ^ ((ordinal + 1) * K2))
///
/// Each mix step is a bijection with full avalanche, so distinct contexts
/// collide only by chance (about n^2 / 2^65 expected collisions for n contexts).
std::uint64_t derive_seed(const SeedContext& ctx) noexcept;

/// Child seed `index` of an already derived seed (used for per-source or
/// per-pass sub-streams).
std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t index) noexcept;

struct ClassSplitSizes {
  std::size_t n_in = 0;
  std::size_t n_out_train = 0;
  std::size_t n_out_val = 0;
  std::size_t n_out_test = 0;
};

/// Assignment of class IDs to the four roles. Each vector is sorted.
struct ClassSplit {
  std::vector<ClassId> in_classes;
  std::vector<ClassId> out_train;
  std::vector<ClassId> out_val;
  std::vector<ClassId> out_test;

  bool operator==(const ClassSplit&) const = default;
};

/// Shuffles the sorted class list with `seed` and takes contiguous blocks
/// for in / out_train / out_val / out_test.
ClassSplit split_classes(std::span<const ClassId> class_set, const ClassSplitSizes& sizes,
                         std::uint64_t seed);

struct SplitFractions {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

/// Sample-index partition. Each vector is sorted.
struct SampleSplit {
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> val_ids;
  std::vector<std::size_t> test_ids;

  bool operator==(const SampleSplit&) const = default;
};

/// Largest-remainder apportionment of `n` items over the three fractions.
std::array<std::size_t, 3> apportion(std::size_t n, const SplitFractions& f);

SampleSplit split_samples(const Dataset& dataset, const SplitFractions& fractions,
                          std::uint64_t seed, bool stratify_by_class);

/// The six role x split subsets of an open set simulation.
struct OpenSetSimulation {
  Dataset in_train;
  Dataset out_train;
  Dataset in_val;
  Dataset out_val;
  Dataset in_test;
  Dataset out_test;
  /// Samples whose class has no role.
  std::size_t dropped = 0;
};

OpenSetSimulation build_simulation(const Dataset& dataset, const ClassSplit& class_split,
                                   const SampleSplit& sample_split);

/// log10 of the binomial coefficient C(n_total, n_in), via log-gamma.
double count_class_splits(std::size_t n_total, std::size_t n_in);

}  // namespace osim
