#pragma once

// Small experiment configurations that run in well under a second per trial.

#include "osim/config.hpp"

namespace osim::testing {

inline ExperimentConfig small_config(std::uint64_t master_seed = 0) {
  ExperimentConfig c;
  SyntheticSpec spec;
  spec.n_classes = 6;
  spec.n_dims = 6;
  spec.samples_per_class = 40;
  spec.separation = 1.5;
  spec.seed = 11;
  c.dataset = spec;
  c.split.sizes = {3, 1, 0, 2};
  c.model.hidden_widths = {16};
  c.model.dropout_rate = 0.2;
  c.model.lr0 = 0.1;
  c.model.batch_size = 16;
  c.model.max_epochs = 15;
  c.model.patience = 5;
  c.detectors = {DetectorConfig{.method = Method::msp},
                 DetectorConfig{.method = Method::tscaling},
                 DetectorConfig{.method = Method::odin},
                 DetectorConfig{.method = Method::openmax, .tail_size = 5},
                 DetectorConfig{.method = Method::mcd, .n_passes = 4}};
  c.protocol.n_trials = 6;
  c.protocol.master_seed = master_seed;
  c.protocol.k = 2;
  c.protocol.replications = 200;
  return c;
}

}  // namespace osim::testing
