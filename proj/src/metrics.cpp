#include "osim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "osim/error.hpp"

namespace osim {

namespace {

struct Tagged {
  double score;
  bool positive;
};

void check(const ScoredTestSet& s, const char* what) {
  if (s.in_scores.empty() || s.out_scores.empty()) {
    throw DataError(std::string(what) + ": both in- and out-of-distribution scores are required");
  }
  for (const auto* v : {&s.in_scores, &s.out_scores}) {
    for (const double x : *v) {
      if (!std::isfinite(x)) throw DataError(std::string(what) + ": non-finite score");
    }
  }
}

}  // namespace

double auroc(const ScoredTestSet& s) {
  check(s, "auroc");
  std::vector<Tagged> all;
  all.reserve(s.in_scores.size() + s.out_scores.size());
  for (const double v : s.in_scores) all.push_back({v, false});
  for (const double v : s.out_scores) all.push_back({v, true});
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.score < b.score; });

  // Sum of out-sample ranks with mid-ranks for ties. Ranks are half-integers,
  // so the sum is exact for any realistic sample size.
  double out_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    std::size_t n_out = 0;
    while (j < all.size() && all[j].score == all[i].score) {
      n_out += all[j].positive ? 1 : 0;
      ++j;
    }
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    out_rank_sum += mid_rank * static_cast<double>(n_out);
    i = j;
  }
  const auto n_in = static_cast<double>(s.in_scores.size());
  const auto n_out = static_cast<double>(s.out_scores.size());
  const double u = out_rank_sum - n_out * (n_out + 1.0) / 2.0;
  return u / (n_in * n_out);
}

double aupr(const ScoredTestSet& s, Positive positive) {
  check(s, "aupr");
  std::vector<Tagged> all;
  all.reserve(s.in_scores.size() + s.out_scores.size());
  const double sign = positive == Positive::out ? 1.0 : -1.0;
  for (const double v : s.in_scores) all.push_back({sign * v, positive == Positive::in});
  for (const double v : s.out_scores) all.push_back({sign * v, positive == Positive::out});
  // Descending: the highest scores are predicted positive first.
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.score > b.score; });

  const auto n_pos = static_cast<double>(positive == Positive::out ? s.out_scores.size()
                                                                   : s.in_scores.size());
  double tp = 0.0;
  double fp = 0.0;
  double area = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    double block_pos = 0.0;
    while (j < all.size() && all[j].score == all[i].score) {
      if (all[j].positive) {
        block_pos += 1.0;
      } else {
        fp += 1.0;
      }
      ++j;
    }
    tp += block_pos;
    if (block_pos > 0.0) area += (block_pos / n_pos) * (tp / (tp + fp));
    i = j;
  }
  return area;
}

double accuracy(const TrainedModel& model, const Dataset& in_test) {
  if (in_test.empty()) throw DataError("accuracy: test set is empty");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < in_test.size(); ++i) {
    if (model.class_ids[predict_index(model, in_test.features.row(i))] == in_test.labels[i]) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(in_test.size());
}

}  // namespace osim
