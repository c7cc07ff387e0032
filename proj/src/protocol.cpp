#include "osim/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <set>
#include <thread>

#include "osim/detectors.hpp"
#include "osim/error.hpp"
#include "osim/metrics.hpp"
#include "osim/random.hpp"
#include "osim/stats.hpp"
#include "osim/trainer.hpp"

namespace osim {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

MethodScores score_metrics(const ScoredTestSet& s) {
  return {auroc(s), aupr(s, Positive::in), aupr(s, Positive::out)};
}

std::size_t sources_samples_before(const std::vector<Matrix>& mats, std::size_t j) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < j; ++i) n += mats[i].rows();
  return n;
}

}  // namespace

bool TrialRecord::same_outcome(const TrialRecord& o) const {
  return trial_index == o.trial_index && master_seed == o.master_seed &&
         config_hash == o.config_hash && seeds == o.seeds && split_group == o.split_group &&
         class_split == o.class_split && subsets == o.subsets && methods == o.methods &&
         accuracy == o.accuracy && detector_params == o.detector_params &&
         training == o.training && sources == o.sources;
}

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) {
  config_.validate();
  if (const auto* spec = std::get_if<SyntheticSpec>(&config_.dataset)) {
    dataset_ = gen_gaussian_mixture(*spec);
  } else {
    const auto& csv = std::get<CsvSource>(config_.dataset);
    dataset_ = load_csv(csv.path, csv.label_column);
  }
  dataset_.validate();
  const auto& z = config_.split.sizes;
  const std::size_t need = z.n_in + z.n_out_train + z.n_out_val + z.n_out_test;
  if (need > dataset_.class_set.size()) {
    throw ConfigError("config /split: class roles need " + std::to_string(need) +
                      " classes, dataset '" + dataset_.name + "' has " +
                      std::to_string(dataset_.class_set.size()));
  }
  for (const auto& src : config_.ood_sources) {
    if (src.kind != SourceKind::csv) continue;
    auto ds = load_csv(src.path, src.label_column);
    if (ds.dims() != dataset_.dims()) {
      throw DataError("OOD source '" + src.name + "' has " + std::to_string(ds.dims()) +
                      " dimensions, dataset has " + std::to_string(dataset_.dims()));
    }
    csv_sources_.emplace(src.name, std::move(ds.features));
  }
  hash_ = osim::config_hash(config_);
}

std::optional<std::size_t> Experiment::split_group(std::size_t trial_index) const {
  if (!config_.protocol.variance) return std::nullopt;
  return trial_index / config_.protocol.variance->seeds_per_split;
}

std::uint64_t Experiment::seed(std::size_t trial_index, Stream stream) const {
  std::uint64_t index = trial_index;
  if (stream == Stream::class_split) {
    if (const auto g = split_group(trial_index)) index = *g;
  }
  return derive_seed({config_.protocol.master_seed, index, stream});
}

ClassSplit Experiment::class_split_for(std::size_t trial_index) const {
  return split_classes(dataset_.class_set, config_.split.sizes,
                       seed(trial_index, Stream::class_split));
}

ClassSplit Experiment::class_split_for_group(std::size_t group) const {
  return split_classes(dataset_.class_set, config_.split.sizes,
                       derive_seed({config_.protocol.master_seed, group, Stream::class_split}));
}

OpenSetSimulation Experiment::simulation_for(std::size_t trial_index,
                                             const std::optional<ClassSplit>& class_split) const {
  const ClassSplit cs = class_split ? *class_split : class_split_for(trial_index);
  const SampleSplit ss = split_samples(dataset_, config_.split.fractions,
                                       seed(trial_index, Stream::sample_split),
                                       config_.split.stratify);
  return build_simulation(dataset_, cs, ss);
}

TrialRecord Experiment::run_trial(std::size_t trial_index,
                                  const std::optional<ClassSplit>& class_split) const {
  const auto started = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.trial_index = trial_index;
  rec.master_seed = config_.protocol.master_seed;
  rec.config_hash = hash_;
  rec.split_group = split_group(trial_index);
  for (const auto s : kAllStreams) rec.seeds[std::string(stream_name(s))] = seed(trial_index, s);

  try {
    rec.class_split = class_split ? *class_split : class_split_for(trial_index);
    const OpenSetSimulation sim = simulation_for(trial_index, rec.class_split);
    rec.subsets = {sim.in_train.size(), sim.out_train.size(), sim.in_val.size(),
                   sim.out_val.size(),  sim.in_test.size(),  sim.out_test.size(),
                   sim.dropped};
    if (sim.in_test.empty()) throw DataError("in-distribution test set is empty");

    const TrainSeeds seeds{seed(trial_index, Stream::param_init),
                           seed(trial_index, Stream::shuffle),
                           seed(trial_index, Stream::dropout)};
    const TrainedModel model = train(config_.model, sim.in_train, sim.in_val, seeds);
    rec.training.epochs_trained = model.trace.size();
    rec.training.restored_epoch = model.restored_epoch;
    rec.training.best_val_loss = model.trace.at(model.restored_epoch).val_loss;
    rec.training.clamped_dims = model.clamped_dims;
    rec.accuracy = accuracy(model, sim.in_test);

    // External OOD sources, drawn from sub-streams of the sample-split seed.
    const std::uint64_t source_seed = seed(trial_index, Stream::sample_split);
    std::vector<Matrix> source_rows;
    for (std::size_t j = 0; j < config_.ood_sources.size(); ++j) {
      const auto& src = config_.ood_sources[j];
      const std::uint64_t s = derive_subseed(source_seed, j);
      Matrix rows;
      switch (src.kind) {
        case SourceKind::uniform_noise:
          rows = gen_noise(NoiseKind::uniform, src.n, dataset_.dims(), s);
          break;
        case SourceKind::gaussian_noise:
          rows = gen_noise(NoiseKind::gaussian, src.n, dataset_.dims(), s);
          break;
        case SourceKind::gaussian:
          rows = gen_gaussian_noise(src.n, dataset_.dims(), src.mean, src.std, s, src.clip);
          break;
        case SourceKind::resample_in: {
          const auto& spec = std::get<SyntheticSpec>(config_.dataset);
          const std::size_t k = rec.class_split.in_classes.size();
          const std::size_t per_class = (src.n + k - 1) / k;
          rows = sample_gaussian_mixture(spec, rec.class_split.in_classes, per_class, s).features;
          break;
        }
        case SourceKind::csv:
          rows = csv_sources_.at(src.name);
          break;
      }
      if (rows.cols() != dataset_.dims()) {
        throw DataError("OOD source '" + src.name + "' has " + std::to_string(rows.cols()) +
                        " dimensions, dataset has " + std::to_string(dataset_.dims()));
      }
      source_rows.push_back(std::move(rows));
    }

    const std::uint64_t detector_seed = seed(trial_index, Stream::detector);
    const std::size_t n_in = sim.in_test.size();
    const std::size_t n_out = sim.out_test.size();
    for (std::size_t i = 0; i < config_.detectors.size(); ++i) {
      const auto& dc = config_.detectors[i];
      const Detector det = Detector::fit(dc, model, sim.in_train, sim.in_val, sim.out_val,
                                         derive_subseed(detector_seed, i));
      const std::string name = dc.display_name();
      if (dc.method == Method::odin) rec.detector_params[name + ".epsilon"] = det.epsilon();

      ScoredTestSet scored;
      for (std::size_t r = 0; r < n_in; ++r) {
        scored.in_scores.push_back(det.score(model, sim.in_test.features.row(r), r));
      }
      for (std::size_t r = 0; r < n_out; ++r) {
        scored.out_scores.push_back(det.score(model, sim.out_test.features.row(r), n_in + r));
      }
      rec.methods[name] = score_metrics(scored);

      for (std::size_t j = 0; j < source_rows.size(); ++j) {
        const std::size_t key0 = n_in + n_out + sources_samples_before(source_rows, j);
        ScoredTestSet ext;
        ext.in_scores = scored.in_scores;
        for (std::size_t r = 0; r < source_rows[j].rows(); ++r) {
          ext.out_scores.push_back(det.score(model, source_rows[j].row(r), key0 + r));
        }
        rec.sources[config_.ood_sources[j].name][name] = score_metrics(ext);
      }
    }
  } catch (const TrialError&) {
    throw;
  } catch (const Error& e) {
    throw TrialError(trial_index, e.what());
  }

  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rec;
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t trial_index) {
  return Experiment(config).run_trial(trial_index);
}

void run_parallel(std::size_t n_tasks, std::size_t workers,
                  const std::function<TrialOutcome(std::size_t)>& task,
                  const std::function<void(TrialOutcome&&)>& sink) {
  auto guarded = [&task](std::size_t i) -> TrialOutcome {
    try {
      return task(i);
    } catch (const std::exception& e) {
      return TrialFailure{i, e.what()};
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n_tasks));
  if (workers == 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) sink(guarded(i));
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::condition_variable ready;
  std::deque<TrialOutcome> done;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n_tasks; i = next++) {
        auto outcome = guarded(i);
        {
          std::lock_guard lock(mu);
          done.push_back(std::move(outcome));
        }
        ready.notify_one();
      }
    });
  }
  for (std::size_t received = 0; received < n_tasks; ++received) {
    TrialOutcome outcome;
    {
      std::unique_lock lock(mu);
      ready.wait(lock, [&] { return !done.empty(); });
      outcome = std::move(done.front());
      done.pop_front();
    }
    sink(std::move(outcome));
  }
}

std::vector<TrialRecord> run_trials(const Experiment& experiment,
                                    std::span<const std::size_t> indices, std::size_t workers) {
  std::vector<TrialRecord> records;
  std::optional<TrialFailure> first_failure;
  run_parallel(
      indices.size(), workers,
      [&](std::size_t i) -> TrialOutcome { return experiment.run_trial(indices[i]); },
      [&](TrialOutcome&& o) {
        if (auto* rec = std::get_if<TrialRecord>(&o)) {
          records.push_back(std::move(*rec));
        } else {
          auto& f = std::get<TrialFailure>(o);
          f.trial_index = indices[f.trial_index];
          if (!first_failure || f.trial_index < first_failure->trial_index) first_failure = f;
        }
      });
  if (first_failure) throw TrialError(first_failure->trial_index, first_failure->message);
  std::sort(records.begin(), records.end(),
            [](const TrialRecord& a, const TrialRecord& b) { return a.trial_index < b.trial_index; });
  return records;
}

std::vector<std::string> pool_methods(const ExperimentPool& pool) {
  if (pool.trials.empty()) return {};
  std::vector<std::string> out;
  for (const auto& [name, scores] : pool.trials.front().methods) {
    const bool everywhere = std::all_of(pool.trials.begin(), pool.trials.end(),
                                        [&](const TrialRecord& r) { return r.methods.count(name); });
    if (everywhere) out.push_back(name);
  }
  return out;
}

std::vector<double> metric_values(const ExperimentPool& pool, std::string_view method,
                                  std::string_view metric) {
  std::vector<double> out;
  out.reserve(pool.trials.size());
  if (metric == kMetricAccuracy) {
    for (const auto& r : pool.trials) out.push_back(r.accuracy);
    return out;
  }
  const std::vector<std::string> metrics = {std::string(kMetricAuroc), std::string(kMetricAuprIn),
                                            std::string(kMetricAuprOut),
                                            std::string(kMetricAccuracy)};
  if (std::find(metrics.begin(), metrics.end(), metric) == metrics.end()) {
    throw ConfigError("unknown metric '" + std::string(metric) + "'; available: " + join(metrics));
  }
  const auto methods = pool_methods(pool);
  if (std::find(methods.begin(), methods.end(), method) == methods.end()) {
    throw ConfigError("unknown method '" + std::string(method) +
                      "'; available: " + join(methods));
  }
  for (const auto& r : pool.trials) {
    const auto& s = r.methods.at(std::string(method));
    out.push_back(metric == kMetricAuroc ? s.auroc : metric == kMetricAuprIn ? s.aupr_in : s.aupr_out);
  }
  return out;
}

McEstimate mc_estimate(std::span<const double> values, double confidence) {
  if (values.empty()) throw DataError("mc_estimate: no trials");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ConfigError("mc_estimate: confidence must be in (0, 1)");
  McEstimate e;
  e.n = values.size();
  e.confidence = confidence;
  double sum = 0.0;
  for (const double v : values) sum += v;
  e.mean = sum / static_cast<double>(e.n);
  if (e.n >= 2) {
    const double se = std::sqrt(sample_variance(values) / static_cast<double>(e.n));
    const double z = normal_quantile(0.5 + confidence / 2.0);
    e.standard_error = se;
    e.ci_low = e.mean - z * se;
    e.ci_high = e.mean + z * se;
  }
  return e;
}

McEstimate mc_estimate(const ExperimentPool& pool, std::string_view method,
                       std::string_view metric, double confidence) {
  const auto values = metric_values(pool, method, metric);
  return mc_estimate(values, confidence);
}

std::optional<std::size_t> convergence_n(std::span<const double> a, std::span<const double> b,
                                         double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("convergence_n: alpha must be in (0, 1)");
  const std::size_t limit = std::min(a.size(), b.size());
  if (limit < 2) throw DataError("convergence_n: both pools need at least two trials");
  for (std::size_t n = 2; n <= limit; ++n) {
    if (welch_t_test(a.first(n), b.first(n)).p_value < alpha) return n;
  }
  return std::nullopt;
}

std::vector<double> win_probability(const std::vector<std::vector<double>>& per_method,
                                    std::size_t k, std::size_t replications,
                                    std::uint64_t resample_seed) {
  if (per_method.empty()) throw ConfigError("win_probability: no methods");
  if (k == 0 || replications == 0) throw ConfigError("win_probability: k and R must be positive");
  const std::size_t n = per_method.front().size();
  for (const auto& v : per_method) {
    if (v.size() != n) throw DataError("win_probability: methods have different trial counts");
  }
  if (n < k) {
    throw DataError("win_probability: pool has " + std::to_string(n) + " trials, k = " +
                    std::to_string(k));
  }
  const std::size_t m = per_method.size();
  std::vector<double> wins(m, 0.0);
  std::vector<double> means(m);
  std::vector<std::size_t> positions(n);
  Rng rng(resample_seed);
  for (std::size_t r = 0; r < replications; ++r) {
    // Partial Fisher-Yates over a persistent permutation buffer.
    for (std::size_t i = 0; i < n; ++i) positions[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(positions[i], positions[j]);
    }
    for (std::size_t mi = 0; mi < m; ++mi) {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += per_method[mi][positions[i]];
      means[mi] = s / static_cast<double>(k);
    }
    const double best = *std::max_element(means.begin(), means.end());
    const auto tied = static_cast<double>(std::count(means.begin(), means.end(), best));
    for (std::size_t mi = 0; mi < m; ++mi) {
      if (means[mi] == best) wins[mi] += 1.0 / tied;
    }
  }
  for (auto& w : wins) w /= static_cast<double>(replications);
  return wins;
}

std::map<std::string, double> win_probability(const ExperimentPool& pool,
                                              const std::vector<std::string>& methods,
                                              std::string_view metric, std::size_t k,
                                              std::size_t replications,
                                              std::uint64_t resample_seed) {
  std::vector<std::vector<double>> values;
  for (const auto& m : methods) values.push_back(metric_values(pool, m, metric));
  const auto p = win_probability(values, k, replications, resample_seed);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < methods.size(); ++i) out[methods[i]] = p[i];
  return out;
}

GroupSummary summarize_group(std::span<const double> values) {
  GroupSummary g;
  g.n = values.size();
  if (values.empty()) return g;
  g.mean = mean(values);
  g.std = std::sqrt(sample_variance(values));
  g.bandwidth = values.size() >= 2 ? silverman_bandwidth(values) : kMinBandwidth;
  return g;
}

std::vector<std::vector<double>> VarianceStudy::values(std::string_view method,
                                                       std::string_view metric) const {
  std::vector<std::vector<double>> out;
  for (const auto& group : records) {
    ExperimentPool p;
    p.trials = group;
    out.push_back(metric_values(p, method, metric));
  }
  return out;
}

VarianceStudy variance_study(const Experiment& experiment, const std::vector<ClassSplit>& splits,
                             std::size_t seeds_per_split, std::size_t workers) {
  if (splits.size() < 2) throw ConfigError("variance_study: at least two class splits are required");
  if (seeds_per_split < 2) throw ConfigError("variance_study: seeds_per_split must be >= 2");
  VarianceStudy study;
  study.splits = splits;
  study.records.resize(splits.size());
  std::optional<TrialFailure> failure;
  run_parallel(
      splits.size() * seeds_per_split, workers,
      [&](std::size_t t) -> TrialOutcome {
        auto rec = experiment.run_trial(t, splits[t / seeds_per_split]);
        rec.split_group = t / seeds_per_split;
        return rec;
      },
      [&](TrialOutcome&& o) {
        if (auto* rec = std::get_if<TrialRecord>(&o)) {
          study.records[*rec->split_group].push_back(std::move(*rec));
        } else if (!failure) {
          failure = std::get<TrialFailure>(o);
        }
      });
  if (failure) throw TrialError(failure->trial_index, failure->message);
  for (auto& group : study.records) {
    std::sort(group.begin(), group.end(), [](const TrialRecord& a, const TrialRecord& b) {
      return a.trial_index < b.trial_index;
    });
  }
  return study;
}

std::vector<SourceRecord> source_records(std::span<const TrialRecord> trials) {
  std::vector<SourceRecord> out;
  for (const auto& t : trials) {
    out.push_back({t.trial_index, std::string(kInDatasetSource), t.methods});
    for (const auto& [name, methods] : t.sources) out.push_back({t.trial_index, name, methods});
  }
  return out;
}

std::vector<SourceRecord> cross_dataset_eval(const ExperimentConfig& config,
                                             const std::vector<OodSourceConfig>& sources,
                                             std::span<const std::size_t> trial_indices,
                                             std::size_t workers) {
  ExperimentConfig c = config;
  c.ood_sources = sources;
  const Experiment experiment(std::move(c));
  const auto trials = run_trials(experiment, trial_indices, workers);
  return source_records(trials);
}

}  // namespace osim
