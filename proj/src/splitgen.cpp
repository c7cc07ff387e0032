#include "osim/splitgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "osim/error.hpp"
#include "osim/random.hpp"

namespace osim {

namespace {

constexpr std::uint64_t kMasterKey = 0x6A09E667F3BCC909ULL;
constexpr std::uint64_t kTrialKey = 0xBB67AE8584CAA73BULL;
constexpr std::uint64_t kStreamKey = 0x3C6EF372FE94F82BULL;
constexpr std::uint64_t kSubseedKey = 0xA54FF53A5F1D36F1ULL;

bool contains(const std::vector<ClassId>& sorted, ClassId c) {
  return std::binary_search(sorted.begin(), sorted.end(), c);
}

std::string sizes_text(const ClassSplitSizes& s) {
  return "(n_in=" + std::to_string(s.n_in) + ", n_out_train=" + std::to_string(s.n_out_train) +
         ", n_out_val=" + std::to_string(s.n_out_val) +
         ", n_out_test=" + std::to_string(s.n_out_test) + ")";
}

}  // namespace

std::string_view stream_name(Stream s) noexcept {
  switch (s) {
    case Stream::class_split: return "class_split";
    case Stream::sample_split: return "sample_split";
    case Stream::param_init: return "param_init";
    case Stream::shuffle: return "shuffle";
    case Stream::dropout: return "dropout";
    case Stream::detector: return "detector";
    case Stream::resample: return "resample";
  }
  return "unknown";
}

std::uint64_t derive_seed(const SeedContext& ctx) noexcept {
  std::uint64_t h = mix64(ctx.master_seed ^ kMasterKey);
  h = mix64(h ^ (ctx.trial_index * kTrialKey));
  h = mix64(h ^ ((static_cast<std::uint64_t>(ctx.stream) + 1) * kStreamKey));
  return h;
}

std::uint64_t derive_subseed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed ^ kSubseedKey) ^ ((index + 1) * kTrialKey));
}

ClassSplit split_classes(std::span<const ClassId> class_set, const ClassSplitSizes& sizes,
                         std::uint64_t seed) {
  const std::size_t total = sizes.n_in + sizes.n_out_train + sizes.n_out_val + sizes.n_out_test;
  if (sizes.n_in < 1) throw ConfigError("class split " + sizes_text(sizes) + ": n_in must be >= 1");
  if (sizes.n_out_test < 1) {
    throw ConfigError("class split " + sizes_text(sizes) + ": n_out_test must be >= 1");
  }
  std::vector<ClassId> classes(class_set.begin(), class_set.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (total > classes.size()) {
    throw ConfigError("class split " + sizes_text(sizes) + " needs " + std::to_string(total) +
                      " classes but only " + std::to_string(classes.size()) + " exist");
  }

  Rng rng(seed);
  rng.shuffle(std::span<ClassId>(classes));

  ClassSplit out;
  auto take = [&, pos = std::size_t{0}](std::size_t n) mutable {
    std::vector<ClassId> block(classes.begin() + static_cast<std::ptrdiff_t>(pos),
                               classes.begin() + static_cast<std::ptrdiff_t>(pos + n));
    std::sort(block.begin(), block.end());
    pos += n;
    return block;
  };
  out.in_classes = take(sizes.n_in);
  out.out_train = take(sizes.n_out_train);
  out.out_val = take(sizes.n_out_val);
  out.out_test = take(sizes.n_out_test);
  return out;
}

std::array<std::size_t, 3> apportion(std::size_t n, const SplitFractions& f) {
  const std::array<double, 3> fr = {f.train, f.val, f.test};
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = static_cast<double>(n) * fr[i];
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  // Clamp rounding overshoot before handing out the leftover items.
  for (std::size_t i = 3; assigned > n && i-- > 0;) {
    const auto cut = std::min(counts[i], assigned - n);
    counts[i] -= cut;
    assigned -= cut;
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < n; k = (k + 1) % 3) {
    if (fr[order[k]] > 0.0) {
      ++counts[order[k]];
      ++assigned;
    }
  }
  return counts;
}

SampleSplit split_samples(const Dataset& dataset, const SplitFractions& fractions,
                          std::uint64_t seed, bool stratify_by_class) {
  if (dataset.empty()) throw DataError("split_samples: dataset '" + dataset.name + "' is empty");
  const double sum = fractions.train + fractions.val + fractions.test;
  if (fractions.train < 0.0 || fractions.val < 0.0 || fractions.test < 0.0 ||
      std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError("split_samples: fractions must be non-negative and sum to 1 (got " +
                      std::to_string(fractions.train) + ", " + std::to_string(fractions.val) +
                      ", " + std::to_string(fractions.test) + ")");
  }

  // Groups of sample indices to apportion independently.
  std::vector<std::vector<std::size_t>> groups;
  if (stratify_by_class) {
    std::map<ClassId, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < dataset.size(); ++i) by_class[dataset.labels[i]].push_back(i);
    for (auto& [cls, ids] : by_class) groups.push_back(std::move(ids));
  } else {
    groups.emplace_back(dataset.size());
    std::iota(groups.back().begin(), groups.back().end(), std::size_t{0});
  }

  Rng rng(seed);
  SampleSplit out;
  for (auto& ids : groups) {
    rng.shuffle(std::span<std::size_t>(ids));
    const auto counts = apportion(ids.size(), fractions);
    auto it = ids.begin();
    out.train_ids.insert(out.train_ids.end(), it, it + static_cast<std::ptrdiff_t>(counts[0]));
    it += static_cast<std::ptrdiff_t>(counts[0]);
    out.val_ids.insert(out.val_ids.end(), it, it + static_cast<std::ptrdiff_t>(counts[1]));
    it += static_cast<std::ptrdiff_t>(counts[1]);
    out.test_ids.insert(out.test_ids.end(), it, ids.end());
  }
  std::sort(out.train_ids.begin(), out.train_ids.end());
  std::sort(out.val_ids.begin(), out.val_ids.end());
  std::sort(out.test_ids.begin(), out.test_ids.end());
  return out;
}

OpenSetSimulation build_simulation(const Dataset& dataset, const ClassSplit& class_split,
                                   const SampleSplit& sample_split) {
  for (const auto* role : {&class_split.in_classes, &class_split.out_train, &class_split.out_val,
                           &class_split.out_test}) {
    for (const ClassId c : *role) {
      if (!contains(dataset.class_set, c)) {
        throw ConfigError("build_simulation: class " + std::to_string(c) +
                          " is not in dataset '" + dataset.name + "'");
      }
    }
  }

  std::vector<std::size_t> in_ids[3];
  std::vector<std::size_t> out_ids[3];
  const std::vector<ClassId>* out_roles[3] = {&class_split.out_train, &class_split.out_val,
                                              &class_split.out_test};
  const std::vector<std::size_t>* splits[3] = {&sample_split.train_ids, &sample_split.val_ids,
                                               &sample_split.test_ids};
  std::size_t kept = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    for (const std::size_t i : *splits[s]) {
      const ClassId y = dataset.labels.at(i);
      if (contains(class_split.in_classes, y)) {
        in_ids[s].push_back(i);
        ++kept;
      } else if (contains(*out_roles[s], y)) {
        out_ids[s].push_back(i);
        ++kept;
      }
    }
  }

  OpenSetSimulation sim;
  sim.in_train = dataset.subset(in_ids[0], class_split.in_classes);
  sim.in_val = dataset.subset(in_ids[1], class_split.in_classes);
  sim.in_test = dataset.subset(in_ids[2], class_split.in_classes);
  sim.out_train = dataset.subset(out_ids[0], class_split.out_train);
  sim.out_val = dataset.subset(out_ids[1], class_split.out_val);
  sim.out_test = dataset.subset(out_ids[2], class_split.out_test);
  sim.dropped = sample_split.train_ids.size() + sample_split.val_ids.size() +
                sample_split.test_ids.size() - kept;

  if (sim.in_train.empty()) throw DataError("build_simulation: in-distribution training set is empty");
  if (sim.out_test.empty()) throw DataError("build_simulation: out-of-distribution test set is empty");
  return sim;
}

double count_class_splits(std::size_t n_total, std::size_t n_in) {
  if (n_in > n_total) throw ConfigError("count_class_splits: n_in > n_total");
  const std::size_t a = std::min(n_in, n_total - n_in);
  const std::size_t b = n_total - a;
  const double ln = std::lgamma(static_cast<double>(n_total) + 1.0) -
                    std::lgamma(static_cast<double>(a) + 1.0) -
                    std::lgamma(static_cast<double>(b) + 1.0);
  return ln / std::log(10.0);
}

}  // namespace osim
