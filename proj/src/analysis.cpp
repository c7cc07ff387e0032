#include "osim/analysis.hpp"

#include <array>
#include <charconv>
#include <map>

#include "osim/error.hpp"
#include "osim/metrics.hpp"
#include "osim/splitgen.hpp"
#include "osim/stats.hpp"

namespace osim {

namespace {

constexpr std::array<std::string_view, 3> kScoreMetrics = {kMetricAuroc, kMetricAuprIn,
                                                          kMetricAuprOut};

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double pick(const MethodScores& s, std::string_view metric) {
  if (metric == kMetricAuroc) return s.auroc;
  if (metric == kMetricAuprIn) return s.aupr_in;
  if (metric == kMetricAuprOut) return s.aupr_out;
  throw ConfigError("unknown metric '" + std::string(metric) + "'; available: auroc, aupr_in, aupr_out");
}

}  // namespace

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_field(columns[i]);
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += '\n';
  }
  return out;
}

std::uint64_t winprob_seed(std::uint64_t master_seed) {
  return derive_seed({master_seed, 0, Stream::resample});
}

Table estimate_table(const ExperimentPool& pool, double confidence) {
  if (pool.trials.empty()) throw DataError("estimate: pool has no successful trials");
  Table t{{"config_hash", "method", "metric", "n", "mean", "se", "ci_low", "ci_high", "confidence",
           "se_flag"},
          {}};
  auto add = [&](const std::string& method, std::string_view metric) {
    const auto e = mc_estimate(pool, method, metric, confidence);
    t.rows.push_back({pool.config_hash, method, std::string(metric), std::to_string(e.n),
                      format_number(e.mean), opt_number(e.standard_error), opt_number(e.ci_low),
                      opt_number(e.ci_high), format_number(confidence),
                      e.standard_error ? "" : "insufficient_n"});
  };
  for (const auto& m : pool_methods(pool)) {
    for (const auto metric : kScoreMetrics) add(m, metric);
  }
  add("", kMetricAccuracy);
  return t;
}

Table winprob_table(const ExperimentPool& pool, const std::vector<std::string>& methods,
                    std::string_view metric, std::size_t k, std::size_t replications,
                    std::uint64_t resample_seed) {
  const auto p = win_probability(pool, methods, metric, k, replications, resample_seed);
  Table t{{"config_hash", "metric", "method", "win_probability", "k", "replications",
           "resample_seed", "sampling"},
          {}};
  for (const auto& m : methods) {
    t.rows.push_back({pool.config_hash, std::string(metric), m, format_number(p.at(m)),
                      std::to_string(k), std::to_string(replications),
                      std::to_string(resample_seed), std::string(kWinSampling)});
  }
  return t;
}

Table convergence_table(const ExperimentPool& pool, const std::vector<std::string>& methods,
                        std::string_view metric, double alpha) {
  Table t{{"config_hash", "metric", "method_a", "method_b", "n_required", "alpha", "pool_size"},
          {}};
  for (std::size_t i = 0; i < methods.size(); ++i) {
    const auto a = metric_values(pool, methods[i], metric);
    for (std::size_t j = i; j < methods.size(); ++j) {
      const auto b = metric_values(pool, methods[j], metric);
      const auto n = convergence_n(a, b, alpha);
      t.rows.push_back({pool.config_hash, std::string(metric), methods[i], methods[j],
                        n ? std::to_string(*n) : "NOT-REACHED", format_number(alpha),
                        std::to_string(pool.trials.size())});
    }
  }
  return t;
}

SplitGroups split_groups(const ExperimentPool& pool, std::string_view method,
                         std::string_view metric) {
  const auto values = metric_values(pool, method, metric);
  std::map<std::size_t, std::pair<std::string, std::vector<double>>> by_group;
  for (std::size_t i = 0; i < pool.trials.size(); ++i) {
    const auto& r = pool.trials[i];
    if (!r.split_group) {
      throw ConfigError("trial " + std::to_string(r.trial_index) +
                        " has no split group; run with a protocol.variance design");
    }
    auto& entry = by_group[*r.split_group];
    if (entry.second.empty()) {
      for (const auto c : r.class_split.in_classes) {
        entry.first += (entry.first.empty() ? "" : " ") + std::to_string(c);
      }
    }
    entry.second.push_back(values[i]);
  }
  SplitGroups out;
  for (auto& [g, entry] : by_group) {
    out.groups.push_back(g);
    out.in_classes.push_back(std::move(entry.first));
    out.values.push_back(std::move(entry.second));
  }
  return out;
}

Table variance_table(const ExperimentPool& pool, std::string_view method, std::string_view metric) {
  const auto g = split_groups(pool, method, metric);
  Table t{{"config_hash", "method", "metric", "split_group", "in_classes", "n", "mean", "std",
           "bandwidth"},
          {}};
  for (std::size_t i = 0; i < g.groups.size(); ++i) {
    const auto s = summarize_group(g.values[i]);
    t.rows.push_back({pool.config_hash, std::string(method), std::string(metric),
                      std::to_string(g.groups[i]), g.in_classes[i], std::to_string(s.n),
                      format_number(s.mean), format_number(s.std), format_number(s.bandwidth)});
  }
  return t;
}

Table variance_pairs_table(const ExperimentPool& pool, std::string_view method,
                           std::string_view metric) {
  const auto g = split_groups(pool, method, metric);
  Table t{{"config_hash", "method", "metric", "group_a", "group_b", "t", "dof", "p_value"}, {}};
  for (std::size_t a = 0; a < g.groups.size(); ++a) {
    for (std::size_t b = a + 1; b < g.groups.size(); ++b) {
      if (g.values[a].size() < 2 || g.values[b].size() < 2) continue;
      const auto r = welch_t_test(g.values[a], g.values[b]);
      t.rows.push_back({pool.config_hash, std::string(method), std::string(metric),
                        std::to_string(g.groups[a]), std::to_string(g.groups[b]),
                        format_number(r.t), format_number(r.dof), format_number(r.p_value)});
    }
  }
  return t;
}

std::vector<std::pair<std::string, std::vector<double>>> source_values(
    const ExperimentPool& pool, std::string_view method, std::string_view metric) {
  std::vector<std::pair<std::string, std::vector<double>>> out;
  out.emplace_back(std::string(kInDatasetSource), metric_values(pool, method, metric));
  if (pool.trials.empty()) return out;
  for (const auto& [name, methods] : pool.trials.front().sources) {
    std::vector<double> v;
    for (const auto& r : pool.trials) {
      const auto s = r.sources.find(name);
      if (s == r.sources.end()) throw DataError("trial " + std::to_string(r.trial_index) + " lacks source " + name);
      const auto m = s->second.find(std::string(method));
      if (m == s->second.end()) throw ConfigError("unknown method '" + std::string(method) + "'");
      v.push_back(pick(m->second, metric));
    }
    out.emplace_back(name, std::move(v));
  }
  return out;
}

Table crossdataset_table(const ExperimentPool& pool, std::string_view metric, double confidence) {
  if (pool.trials.empty()) throw DataError("crossdataset: pool has no successful trials");
  Table t{{"config_hash", "source", "method", "metric", "n", "mean", "se", "ci_low", "ci_high"},
          {}};
  for (const auto& method : pool_methods(pool)) {
    for (const auto& [source, values] : source_values(pool, method, metric)) {
      const auto e = mc_estimate(values, confidence);
      t.rows.push_back({pool.config_hash, source, method, std::string(metric), std::to_string(e.n),
                        format_number(e.mean), opt_number(e.standard_error), opt_number(e.ci_low),
                        opt_number(e.ci_high)});
    }
  }
  return t;
}

}  // namespace osim
