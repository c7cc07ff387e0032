#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "osim/error.hpp"
#include "osim/random.hpp"
#include "osim/splitgen.hpp"

namespace osim {
namespace {

// Dataset whose single feature is the sample index, so subsets reveal
// exactly which samples they hold.
Dataset indexed_dataset(const std::vector<ClassId>& labels) {
  Dataset d;
  d.name = "indexed";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    d.features.append_row(std::vector<double>{static_cast<double>(i)});
  }
  d.labels = labels;
  d.class_set = labels;
  std::sort(d.class_set.begin(), d.class_set.end());
  d.class_set.erase(std::unique(d.class_set.begin(), d.class_set.end()), d.class_set.end());
  d.value_range = compute_value_range(d.features);
  return d;
}

std::set<std::size_t> members(const Dataset& d) {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < d.size(); ++i) out.insert(static_cast<std::size_t>(d.features(i, 0)));
  return out;
}

bool contains(const std::vector<ClassId>& v, ClassId c) {
  return std::find(v.begin(), v.end(), c) != v.end();
}

TEST(DeriveSeed, PureAndStreamSeparated) {
  const SeedContext a{0, 0, Stream::class_split};
  EXPECT_EQ(derive_seed(a), derive_seed(a));
  std::set<std::uint64_t> seen;
  for (const auto s : kAllStreams) seen.insert(derive_seed({0, 0, s}));
  EXPECT_EQ(seen.size(), kAllStreams.size());
  EXPECT_NE(derive_seed({0, 0, Stream::class_split}), derive_seed({0, 0, Stream::sample_split}));
  EXPECT_NE(derive_seed({0, 0, Stream::class_split}), derive_seed({1, 0, Stream::class_split}));
  EXPECT_NE(derive_seed({0, 0, Stream::class_split}), derive_seed({0, 1, Stream::class_split}));
}

TEST(DeriveSeed, FrozenValues) {
  // Guards the derivation function against accidental changes: persisted
  // pools depend on these exact values.
  EXPECT_EQ(derive_seed({0, 0, Stream::class_split}), 6278874154388311936ULL);
  EXPECT_EQ(derive_seed({0, 0, Stream::resample}), 17899379058849638247ULL);
}

TEST(DeriveSeed, NoCollisionsOverAMillionContexts) {
  // Expected collisions for 1e6 uniform 64-bit values is ~2.7e-8.
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1'100'000);
  std::size_t n = 0;
  for (std::uint64_t m = 0; m < 10; ++m) {
    for (std::size_t t = 0; t < 14286; ++t) {
      for (const auto s : kAllStreams) {
        seen.insert(derive_seed({m * 0x9E3779B97F4A7C15ULL, t, s}));
        ++n;
      }
    }
  }
  EXPECT_GE(n, 1'000'000u);
  EXPECT_EQ(seen.size(), n);
}

TEST(DeriveSeed, AvalancheOnMasterSeedBit) {
  // Flipping one master-seed bit flips about half of the output bits.
  Rng rng(1);
  double total = 0.0;
  constexpr int kReps = 2000;
  for (int i = 0; i < kReps; ++i) {
    const std::uint64_t m = rng.next_u64();
    const int bit = static_cast<int>(rng.below(64));
    const auto x = derive_seed({m, 3, Stream::shuffle}) ^ derive_seed({m ^ (1ULL << bit), 3, Stream::shuffle});
    total += std::popcount(x);
  }
  EXPECT_NEAR(total / kReps, 32.0, 0.5);
}

TEST(SplitClasses, CardinalityAndDisjointness) {
  std::vector<ClassId> classes(10);
  for (int i = 0; i < 10; ++i) classes[i] = i;
  const auto cs = split_classes(classes, {6, 0, 0, 4}, 99);
  EXPECT_EQ(cs.in_classes.size(), 6u);
  EXPECT_EQ(cs.out_test.size(), 4u);
  std::set<ClassId> all(cs.in_classes.begin(), cs.in_classes.end());
  all.insert(cs.out_test.begin(), cs.out_test.end());
  EXPECT_EQ(all.size(), 10u);
  EXPECT_TRUE(std::is_sorted(cs.in_classes.begin(), cs.in_classes.end()));
  EXPECT_EQ(split_classes(classes, {6, 0, 0, 4}, 99), cs);
}

TEST(SplitClasses, AllRolesDisjoint) {
  std::vector<ClassId> classes = {3, 5, 8, 13, 21, 34, 55, 89, 144};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto cs = split_classes(classes, {3, 2, 1, 2}, seed);
    std::multiset<ClassId> all;
    for (const auto* v : {&cs.in_classes, &cs.out_train, &cs.out_val, &cs.out_test}) {
      all.insert(v->begin(), v->end());
    }
    EXPECT_EQ(all.size(), 8u);
    EXPECT_EQ(std::set<ClassId>(all.begin(), all.end()).size(), 8u);
    for (const auto c : all) EXPECT_TRUE(contains(classes, c));
  }
}

TEST(SplitClasses, UniformOverInSets) {
  // C(5,2) = 10 possible in-sets, enumerated by brute force.
  const std::vector<ClassId> classes = {0, 1, 2, 3, 4};
  std::map<std::vector<ClassId>, int> counts;
  for (ClassId a = 0; a < 5; ++a) {
    for (ClassId b = a + 1; b < 5; ++b) counts[{a, b}] = 0;
  }
  ASSERT_EQ(counts.size(), 10u);
  constexpr int kDraws = 10000;
  for (int t = 0; t < kDraws; ++t) {
    const auto seed = derive_seed({0, static_cast<std::size_t>(t), Stream::class_split});
    const auto cs = split_classes(classes, {2, 0, 0, 3}, seed);
    ASSERT_TRUE(counts.count(cs.in_classes));
    ++counts[cs.in_classes];
  }
  double chi2 = 0.0;
  for (const auto& [set, n] : counts) {
    EXPECT_NEAR(n / static_cast<double>(kDraws), 0.1, 0.01);
    chi2 += (n - 1000.0) * (n - 1000.0) / 1000.0;
  }
  // chi-square(9) upper 0.001 quantile.
  EXPECT_LT(chi2, 27.877164871256568);
}

TEST(SplitClasses, SizeErrorsNameCounts) {
  const std::vector<ClassId> classes = {0, 1, 2, 3};
  try {
    split_classes(classes, {3, 0, 0, 2}, 1);
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('5'), std::string::npos) << msg;
    EXPECT_NE(msg.find('4'), std::string::npos) << msg;
  }
  EXPECT_THROW(split_classes(classes, {0, 0, 0, 2}, 1), ConfigError);
  EXPECT_THROW(split_classes(classes, {2, 0, 0, 0}, 1), ConfigError);
}

TEST(SplitSamples, AllTrain) {
  const auto d = indexed_dataset(std::vector<ClassId>(17, 0));
  const auto s = split_samples(d, {1.0, 0.0, 0.0}, 4, false);
  EXPECT_EQ(s.train_ids.size(), 17u);
  EXPECT_TRUE(s.val_ids.empty());
  EXPECT_TRUE(s.test_ids.empty());
}

TEST(SplitSamples, ExactSizes) {
  const auto d = indexed_dataset(std::vector<ClassId>(100, 0));
  for (const bool stratify : {false, true}) {
    const auto s = split_samples(d, {0.6, 0.2, 0.2}, 5, stratify);
    EXPECT_EQ(s.train_ids.size(), 60u);
    EXPECT_EQ(s.val_ids.size(), 20u);
    EXPECT_EQ(s.test_ids.size(), 20u);
  }
}

TEST(SplitSamples, DisjointCoverProperty) {
  Rng rng(8);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<ClassId> labels(1 + rng.below(300));
    const auto k = 1 + rng.below(6);
    for (auto& l : labels) l = static_cast<ClassId>(rng.below(k));
    const auto d = indexed_dataset(labels);
    const double a = rng.uniform(0.05, 0.9);
    const double b = rng.uniform(0.0, 1.0 - a);
    const SplitFractions f{a, b, 1.0 - a - b};
    const auto s = split_samples(d, f, rng.next_u64(), rep % 2 == 0);
    std::vector<std::size_t> all;
    for (const auto* v : {&s.train_ids, &s.val_ids, &s.test_ids}) all.insert(all.end(), v->begin(), v->end());
    std::sort(all.begin(), all.end());
    ASSERT_EQ(all.size(), labels.size());
    for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);
  }
}

TEST(SplitSamples, StratifiedPerClassDeviationBelowOne) {
  Rng rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<ClassId> labels(50 + rng.below(200));
    for (auto& l : labels) l = static_cast<ClassId>(rng.below(4));
    const auto d = indexed_dataset(labels);
    const SplitFractions f{0.7, 0.15, 0.15};
    const auto s = split_samples(d, f, rng.next_u64(), true);
    for (const auto c : d.class_set) {
      const auto n_c = static_cast<double>(std::count(labels.begin(), labels.end(), c));
      const std::pair<const std::vector<std::size_t>*, double> parts[] = {
          {&s.train_ids, f.train}, {&s.val_ids, f.val}, {&s.test_ids, f.test}};
      for (const auto& [ids, frac] : parts) {
        const auto got = static_cast<double>(
            std::count_if(ids->begin(), ids->end(), [&](std::size_t i) { return labels[i] == c; }));
        EXPECT_LT(std::abs(got - frac * n_c), 1.0);
      }
    }
  }
}

TEST(SplitSamples, BalancedTwoClass) {
  std::vector<ClassId> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(i % 2);
  const auto d = indexed_dataset(labels);
  const auto s = split_samples(d, {0.8, 0.1, 0.1}, 10, true);
  for (const auto* ids : {&s.train_ids, &s.val_ids, &s.test_ids}) {
    const auto ones = std::count_if(ids->begin(), ids->end(), [&](std::size_t i) { return labels[i] == 1; });
    const auto zeros = static_cast<std::ptrdiff_t>(ids->size()) - ones;
    EXPECT_LE(std::abs(ones - zeros), 1);
  }
}

TEST(SplitSamples, Errors) {
  EXPECT_THROW(split_samples(Dataset{}, {0.6, 0.2, 0.2}, 1, false), DataError);
  const auto d = indexed_dataset({0, 1, 0, 1});
  EXPECT_THROW(split_samples(d, {0.6, 0.2, 0.3}, 1, false), ConfigError);
  EXPECT_THROW(split_samples(d, {1.2, -0.1, -0.1}, 1, false), ConfigError);
}

TEST(SplitSamples, Deterministic) {
  std::vector<ClassId> labels(80);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<ClassId>(i % 3);
  const auto d = indexed_dataset(labels);
  EXPECT_EQ(split_samples(d, {0.6, 0.2, 0.2}, 77, true), split_samples(d, {0.6, 0.2, 0.2}, 77, true));
  EXPECT_NE(split_samples(d, {0.6, 0.2, 0.2}, 77, true), split_samples(d, {0.6, 0.2, 0.2}, 78, true));
}

TEST(BuildSimulation, ToyProductOfRoleCounts) {
  // 4 classes x 8 samples, 2 in / 2 out_test, fractions (0.5, 0.25, 0.25).
  std::vector<ClassId> labels;
  for (ClassId c = 0; c < 4; ++c) labels.insert(labels.end(), 8, c);
  const auto d = indexed_dataset(labels);
  const ClassSplit cs{{0, 2}, {}, {}, {1, 3}};
  const auto ss = split_samples(d, {0.5, 0.25, 0.25}, 3, true);
  const auto sim = build_simulation(d, cs, ss);
  EXPECT_EQ(sim.in_train.size(), 2u * 4u);
  EXPECT_EQ(sim.in_val.size(), 2u * 2u);
  EXPECT_EQ(sim.in_test.size(), 2u * 2u);
  EXPECT_EQ(sim.out_test.size(), 2u * 2u);
  EXPECT_EQ(sim.out_train.size(), 0u);
  EXPECT_EQ(sim.out_val.size(), 0u);
  EXPECT_EQ(sim.dropped, 2u * 4u + 2u * 2u);
}

TEST(BuildSimulation, PartitionMatchesSetBuilderDefinition) {
  Rng rng(10);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t k = 4 + rng.below(6);
    std::vector<ClassId> labels(200 + rng.below(2000));
    for (auto& l : labels) l = static_cast<ClassId>(rng.below(k));
    const auto d = indexed_dataset(labels);
    if (d.class_set.size() < 4) continue;
    const std::size_t n = d.class_set.size();
    const std::size_t n_in = 1 + rng.below(n - 3);
    const std::size_t n_ot = 1 + rng.below(n - n_in - 2);
    const std::size_t n_tr = rng.below(n - n_in - n_ot);
    const std::size_t n_va = rng.below(n - n_in - n_ot - n_tr + 1);
    const auto cs = split_classes(d.class_set, {n_in, n_tr, n_va, n_ot}, rng.next_u64());
    const auto ss = split_samples(d, {0.5, 0.25, 0.25}, rng.next_u64(), rep % 2 == 1);
    const auto sim = build_simulation(d, cs, ss);

    auto expected = [&](const std::vector<std::size_t>& ids, const std::vector<ClassId>& roles) {
      std::set<std::size_t> out;
      for (const auto i : ids) {
        if (contains(roles, labels[i])) out.insert(i);
      }
      return out;
    };
    EXPECT_EQ(members(sim.in_train), expected(ss.train_ids, cs.in_classes));
    EXPECT_EQ(members(sim.in_val), expected(ss.val_ids, cs.in_classes));
    EXPECT_EQ(members(sim.in_test), expected(ss.test_ids, cs.in_classes));
    EXPECT_EQ(members(sim.out_train), expected(ss.train_ids, cs.out_train));
    EXPECT_EQ(members(sim.out_val), expected(ss.val_ids, cs.out_val));
    EXPECT_EQ(members(sim.out_test), expected(ss.test_ids, cs.out_test));

    std::size_t kept = 0;
    std::set<std::size_t> seen;
    for (const auto* part : {&sim.in_train, &sim.out_train, &sim.in_val, &sim.out_val, &sim.in_test, &sim.out_test}) {
      const auto m = members(*part);
      kept += m.size();
      seen.insert(m.begin(), m.end());
    }
    EXPECT_EQ(seen.size(), kept);
    EXPECT_EQ(kept + sim.dropped, labels.size());
  }
}

TEST(BuildSimulation, HatchedCellIsDropped) {
  // Sample 1 (class 1 = out_train) lands in val: it belongs to no subset.
  const auto d = indexed_dataset({0, 1, 2, 0, 2});
  const ClassSplit cs{{0}, {1}, {}, {2}};
  const SampleSplit ss{{0, 3}, {1}, {2, 4}};
  const auto sim = build_simulation(d, cs, ss);
  EXPECT_EQ(sim.dropped, 1u);
  for (const auto* part : {&sim.in_train, &sim.out_train, &sim.in_val, &sim.out_val, &sim.in_test, &sim.out_test}) {
    EXPECT_FALSE(members(*part).count(1));
  }
}

TEST(BuildSimulation, Errors) {
  const auto d = indexed_dataset({0, 1, 0, 1, 0, 1});
  const SampleSplit ss{{0, 1, 2, 3}, {}, {4, 5}};
  EXPECT_THROW(build_simulation(d, {{0, 1}, {}, {}, {}}, ss), DataError);
  EXPECT_THROW(build_simulation(d, {{0}, {}, {}, {7}}, ss), ConfigError);
  // No in-class sample in train.
  EXPECT_THROW(build_simulation(d, {{0}, {}, {}, {1}}, SampleSplit{{1, 3}, {}, {0, 2, 4, 5}}), DataError);
}

TEST(CountClassSplits, Values) {
  // Exact: log10(comb(1000, 600)) from integer arithmetic.
  EXPECT_NEAR(count_class_splits(1000, 600), 290.695943078128952, 1e-12 * 290.7);
  EXPECT_EQ(count_class_splits(10, 10), 0.0);
  EXPECT_NEAR(count_class_splits(5, 2), 1.0, 1e-14);
  EXPECT_NEAR(count_class_splits(52, 5), std::log10(2598960.0), 1e-13);
}

TEST(CountClassSplits, Symmetric) {
  for (std::size_t n = 0; n < 200; n += 7) {
    for (std::size_t k = 0; k <= n; ++k) EXPECT_EQ(count_class_splits(n, k), count_class_splits(n, n - k));
  }
}

}  // namespace
}  // namespace osim
