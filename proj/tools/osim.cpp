// osim: command-line driver for open set simulation experiments.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "osim/analysis.hpp"
#include "osim/config.hpp"
#include "osim/error.hpp"
#include "osim/metrics.hpp"
#include "osim/pool.hpp"
#include "osim/protocol.hpp"
#include "osim/report.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::string pool;
  std::size_t workers = 1;
  std::string trials;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string kind;
  std::string metric = "auroc";
  std::string method;
  std::vector<std::string> methods;
  std::optional<std::size_t> k;
  std::optional<std::size_t> replications;
  std::optional<std::uint64_t> resample_seed;
  std::optional<double> alpha;
  std::optional<double> confidence;
  std::string by;
};

struct TrialRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

TrialRange parse_range(const std::string& text, std::size_t n_trials) {
  if (text.empty()) return {0, n_trials};
  try {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return {0, std::stoul(text)};
    const TrialRange r{std::stoul(text.substr(0, colon)), std::stoul(text.substr(colon + 1))};
    if (r.end < r.begin) throw osim::ConfigError("--trials: range end precedes start");
    return r;
  } catch (const std::logic_error&) {
    throw osim::ConfigError("--trials: expected N or A:B, got '" + text + "'");
  }
}

osim::ExperimentConfig load(const Options& o) {
  auto config = osim::load_config(o.config);
  if (o.seed) config.protocol.master_seed = *o.seed;
  config.validate();
  return config;
}

fs::path default_pool(const Options& o, const osim::ExperimentConfig& config) {
  if (!o.pool.empty()) return o.pool;
  const fs::path dir = o.out.empty() ? fs::path(config.output.directory) : fs::path(o.out);
  return dir / "pool.ndjson";
}

fs::path output_dir(const Options& o) {
  const fs::path dir = o.out.empty() ? fs::path(o.pool).parent_path() : fs::path(o.out);
  if (!dir.empty()) fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw osim::DataError("cannot write " + path.string());
  std::cout << path.string() << '\n';
}

int cmd_run(const Options& o) {
  const auto config = load(o);
  const osim::Experiment experiment(config);
  const fs::path pool_path = default_pool(o, config);
  osim::PoolWriter writer(pool_path, config);

  const auto range = parse_range(o.trials, config.protocol.n_trials);
  const std::set<std::size_t> done(writer.completed().begin(), writer.completed().end());
  std::vector<std::size_t> todo;
  for (std::size_t t = range.begin; t < range.end; ++t) {
    if (!done.count(t)) todo.push_back(t);
  }
  std::cerr << "pool " << pool_path.string() << ": " << todo.size() << " trial(s) to run, "
            << (range.end - range.begin - todo.size()) << " already present\n";

  std::size_t finished = 0;
  std::size_t failed = 0;
  osim::run_parallel(
      todo.size(), o.workers,
      [&](std::size_t i) -> osim::TrialOutcome {
        try {
          return experiment.run_trial(todo[i]);
        } catch (const std::exception& e) {
          return osim::TrialFailure{todo[i], e.what()};
        }
      },
      [&](osim::TrialOutcome&& outcome) {
        ++finished;
        if (const auto* rec = std::get_if<osim::TrialRecord>(&outcome)) {
          writer.append(*rec);
          auto msp = rec->methods.find("msp");
          if (msp == rec->methods.end()) msp = rec->methods.begin();
          std::cerr << "[" << finished << "/" << todo.size() << "] trial " << rec->trial_index
                    << " " << msp->first << " auroc " << msp->second.auroc << " ("
                    << rec->wall_time_s << " s)\n";
        } else {
          const auto& f = std::get<osim::TrialFailure>(outcome);
          writer.append(f);
          ++failed;
          std::cerr << "[" << finished << "/" << todo.size() << "] FAILED: " << f.message << '\n';
        }
      });
  if (failed > 0) {
    std::cerr << failed << " trial(s) failed\n";
    return kExitFailure;
  }
  return kExitOk;
}

struct LoadedPool {
  osim::PoolFile file;
  osim::ExperimentConfig config;
};

LoadedPool open_pool(const Options& o) {
  if (o.pool.empty()) throw osim::ConfigError("--pool is required");
  LoadedPool p{osim::read_pool(o.pool), {}};
  p.config = osim::pool_config(p.file);
  if (p.file.pool.trials.empty()) throw osim::DataError("pool " + o.pool + " has no successful trials");
  return p;
}

std::vector<std::string> selected_methods(const Options& o, const osim::ExperimentPool& pool) {
  return o.methods.empty() ? osim::pool_methods(pool) : o.methods;
}

std::string selected_method(const Options& o, const osim::ExperimentPool& pool) {
  if (!o.method.empty()) return o.method;
  const auto all = osim::pool_methods(pool);
  if (std::find(all.begin(), all.end(), "msp") != all.end()) return "msp";
  return all.front();
}

osim::Table winprob(const Options& o, const LoadedPool& p) {
  const auto& proto = p.config.protocol;
  return osim::winprob_table(p.file.pool, selected_methods(o, p.file.pool), o.metric,
                             o.k.value_or(proto.k), o.replications.value_or(proto.replications),
                             o.resample_seed.value_or(osim::winprob_seed(proto.master_seed)));
}

osim::Table convergence(const Options& o, const LoadedPool& p) {
  return osim::convergence_table(p.file.pool, selected_methods(o, p.file.pool), o.metric,
                                 o.alpha.value_or(p.config.protocol.alpha));
}

int cmd_analyze(const Options& o) {
  const auto p = open_pool(o);
  const auto dir = output_dir(o);
  const auto& pool = p.file.pool;
  const double conf = o.confidence.value_or(p.config.protocol.confidence);
  if (!p.file.failures.empty()) {
    std::cerr << "note: " << p.file.failures.size() << " failed trial(s) excluded\n";
  }
  if (o.kind == "estimate") {
    write_file(dir / "estimate.csv", osim::estimate_table(pool, conf).to_csv());
  } else if (o.kind == "winprob") {
    write_file(dir / "winprob.csv", winprob(o, p).to_csv());
  } else if (o.kind == "convergence") {
    write_file(dir / "convergence.csv", convergence(o, p).to_csv());
  } else if (o.kind == "variance") {
    const auto method = selected_method(o, pool);
    write_file(dir / "variance.csv", osim::variance_table(pool, method, o.metric).to_csv());
    write_file(dir / "variance_pairs.csv",
               osim::variance_pairs_table(pool, method, o.metric).to_csv());
  } else if (o.kind == "crossdataset") {
    write_file(dir / "crossdataset.csv", osim::crossdataset_table(pool, o.metric, conf).to_csv());
  }
  return kExitOk;
}

int cmd_report(const Options& o) {
  const auto p = open_pool(o);
  const auto dir = output_dir(o);
  const auto& pool = p.file.pool;
  if (o.kind == "winprob") {
    write_file(dir / "winprob.svg", osim::winprob_svg(winprob(o, p)));
  } else if (o.kind == "convergence") {
    write_file(dir / "convergence.svg", osim::convergence_svg(convergence(o, p)));
  } else {
    std::string by = o.by;
    if (by.empty()) {
      const bool grouped = std::all_of(pool.trials.begin(), pool.trials.end(),
                                       [](const auto& r) { return r.split_group.has_value(); });
      by = grouped ? "split" : !pool.trials.front().sources.empty() ? "source" : "method";
    }
    std::vector<osim::Series> series;
    const auto method = selected_method(o, pool);
    std::string title;
    if (by == "split") {
      const auto g = osim::split_groups(pool, method, o.metric);
      for (std::size_t i = 0; i < g.groups.size(); ++i) {
        series.push_back({"split " + std::to_string(g.groups[i]), g.values[i]});
      }
      title = method + " " + o.metric + " by class split";
    } else if (by == "source") {
      for (auto& [name, values] : osim::source_values(pool, method, o.metric)) {
        series.push_back({name, std::move(values)});
      }
      title = method + " " + o.metric + " by OOD source";
    } else {
      for (const auto& m : selected_methods(o, pool)) {
        series.push_back({m, osim::metric_values(pool, m, o.metric)});
      }
      title = o.metric + " by method";
    }
    write_file(dir / ("density_" + by + ".svg"), osim::density_svg(series, title, o.metric));
  }
  return kExitOk;
}

int cmd_describe(const Options& o) {
  const auto config = load(o);
  const osim::Experiment experiment(config);
  const auto& ds = experiment.dataset();
  const auto& z = config.split.sizes;
  std::printf("dataset %s: %zu samples, %zu dims, %zu classes\n", ds.name.c_str(), ds.size(),
              ds.dims(), ds.class_set.size());
  std::printf("class roles: in %zu, out_train %zu, out_val %zu, out_test %zu\n", z.n_in,
              z.n_out_train, z.n_out_val, z.n_out_test);
  std::printf("log10 number of in-class choices: %.3f\n",
              osim::count_class_splits(ds.class_set.size(), z.n_in));
  std::printf("config hash %s\n", experiment.config_hash().c_str());
  const auto range = parse_range(o.trials.empty() ? "1" : o.trials, config.protocol.n_trials);
  std::printf("trial,in_classes,in_train,out_train,in_val,out_val,in_test,out_test,dropped\n");
  for (std::size_t t = range.begin; t < range.end; ++t) {
    const auto cs = experiment.class_split_for(t);
    const auto sim = experiment.simulation_for(t, cs);
    std::string classes;
    for (const auto c : cs.in_classes) classes += (classes.empty() ? "" : " ") + std::to_string(c);
    std::printf("%zu,%s,%zu,%zu,%zu,%zu,%zu,%zu,%zu\n", t, classes.c_str(), sim.in_train.size(),
                sim.out_train.size(), sim.in_val.size(), sim.out_val.size(), sim.in_test.size(),
                sim.out_test.size(), sim.dropped);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open set simulation experiments for OOD detection"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "Run trials and append them to a pool");
  run->add_option("--config", o.config, "Experiment config (JSON)")->required();
  run->add_option("--pool", o.pool, "Pool file (default <out>/pool.ndjson)");
  run->add_option("--workers", o.workers, "Concurrent trials")->check(CLI::PositiveNumber);
  run->add_option("--trials", o.trials, "N or A:B (default 0:n_trials)");
  run->add_option("--seed", o.seed, "Override protocol.master_seed");
  run->add_option("--out", o.out, "Output directory (default output.directory)");

  const std::vector<std::string> analyses = {"estimate", "winprob", "convergence", "variance",
                                             "crossdataset"};
  auto* analyze = app.add_subcommand("analyze", "Write CSV summaries of a pool");
  analyze->add_option("kind", o.kind, "estimate | winprob | convergence | variance | crossdataset")
      ->required()
      ->check(CLI::IsMember(analyses));
  const std::vector<std::string> reports = {"density", "winprob", "convergence"};
  auto* report = app.add_subcommand("report", "Write SVG figures of a pool");
  report->add_option("kind", o.kind, "density | winprob | convergence")
      ->required()
      ->check(CLI::IsMember(reports));
  report->add_option("--by", o.by, "density grouping: split | source | method")
      ->check(CLI::IsMember({"split", "source", "method"}));
  for (auto* sub : {analyze, report}) {
    sub->add_option("--pool", o.pool, "Pool file")->required();
    sub->add_option("--out", o.out, "Output directory (default: pool directory)");
    sub->add_option("--metric", o.metric, "auroc | aupr_in | aupr_out | accuracy");
    sub->add_option("--method", o.method, "Method for variance/density (default msp)");
    sub->add_option("--methods", o.methods, "Methods to compare (default all)")->delimiter(',');
    sub->add_option("--k", o.k, "Trials per resampled experiment");
    sub->add_option("--replications", o.replications, "Resampling replications");
    sub->add_option("--resample-seed", o.resample_seed, "Win-probability resample seed");
    sub->add_option("--alpha", o.alpha, "Significance level");
    sub->add_option("--confidence", o.confidence, "Confidence level of intervals");
  }

  auto* describe = app.add_subcommand("describe-splits", "Print class and sample splits");
  describe->add_option("--config", o.config, "Experiment config (JSON)")->required();
  describe->add_option("--trials", o.trials, "N or A:B (default 1)");
  describe->add_option("--seed", o.seed, "Override protocol.master_seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(o);
    if (analyze->parsed()) return cmd_analyze(o);
    if (report->parsed()) return cmd_report(o);
    return cmd_describe(o);
  } catch (const osim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
