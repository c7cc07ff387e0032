#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "osim/datasets.hpp"
#include "osim/trainer.hpp"

namespace osim {

/// OOD scores on the in- and out-of-distribution test samples. Higher score
/// means more likely out-of-distribution.
struct ScoredTestSet {
  std::vector<double> in_scores;
  std::vector<double> out_scores;
};

enum class Positive { in, out };

/// Mann-Whitney estimate of P(out > in) + P(out = in) / 2, via mid-ranks.
double auroc(const ScoredTestSet& s);

/// Step-wise (non-interpolated) area under the precision-recall curve. Equal
/// scores form one threshold block. Positive::in ranks by negated score.
double aupr(const ScoredTestSet& s, Positive positive);

/// Fraction of samples whose eval-mode argmax equals their label.
double accuracy(const TrainedModel& model, const Dataset& in_test);

/// Persisted metric names.
inline constexpr std::string_view kMetricAuroc = "auroc";
inline constexpr std::string_view kMetricAuprIn = "aupr_in";
inline constexpr std::string_view kMetricAuprOut = "aupr_out";
inline constexpr std::string_view kMetricAccuracy = "accuracy";

}  // namespace osim
