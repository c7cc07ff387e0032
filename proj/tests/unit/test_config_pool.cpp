#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>

#include "fixtures.hpp"
#include "osim/analysis.hpp"
#include "osim/config.hpp"
#include "osim/error.hpp"
#include "osim/pool.hpp"
#include "osim/protocol.hpp"
#include "osim/report.hpp"

namespace osim {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::small_config;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "osim_test_config_pool";
  fs::create_directories(dir);
  const auto p = dir / name;
  fs::remove(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error(const json& tree) {
  try {
    parse_config(tree);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const std::vector<TrialRecord>& records() {
  static const auto r = [] {
    const Experiment e(small_config());
    std::vector<std::size_t> idx(4);
    std::iota(idx.begin(), idx.end(), 0);
    return run_trials(e, idx, 2);
  }();
  return r;
}

TEST(Config, CanonicalTreeRoundTrips) {
  const auto c = small_config();
  const json tree = to_json(c);
  const auto back = parse_config(tree);
  EXPECT_EQ(to_json(back), tree);
  EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(Config, BenchmarkFileLoads) {
  const auto c = load_config(fs::path(OSIM_SOURCE_DIR) / "configs" / "benchmark.json");
  EXPECT_EQ(c.detectors.size(), 5u);
  EXPECT_EQ(std::get<SyntheticSpec>(c.dataset).n_classes, 8u);
  EXPECT_FALSE(c.detectors[2].epsilon.has_value());
}

TEST(Config, ErrorsNameTheJsonPath) {
  json tree = to_json(small_config());
  tree["model"]["lr"] = 0.1;
  EXPECT_NE(config_error(tree).find("/model/lr"), std::string::npos) << config_error(tree);

  tree = to_json(small_config());
  tree["model"]["lr0"] = "fast";
  EXPECT_NE(config_error(tree).find("/model/lr0"), std::string::npos) << config_error(tree);

  tree = to_json(small_config());
  tree["detectors"][1]["method"] = "energy";
  EXPECT_NE(config_error(tree).find("/detectors/1"), std::string::npos) << config_error(tree);

  tree = to_json(small_config());
  tree["protocol"]["alpha"] = 1.5;
  EXPECT_NE(config_error(tree).find("/protocol/alpha"), std::string::npos);

  tree = to_json(small_config());
  tree["split"]["n_out_test"] = 0;
  EXPECT_NE(config_error(tree).find("/split/n_out_test"), std::string::npos);

  tree = to_json(small_config());
  tree["detectors"].push_back(tree["detectors"][0]);
  EXPECT_NE(config_error(tree).find("duplicate"), std::string::npos);

  EXPECT_THROW(load_config(scratch("missing.json")), ConfigError);
}

TEST(Config, Fnv1aKnownValues) {
  // Reference values of the 64-bit FNV-1a test suite.
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Config, HashIgnoresOutputOnly) {
  const auto base = small_config();
  auto c = base;
  c.output.directory = "elsewhere";
  c.output.formats = {"csv"};
  EXPECT_EQ(config_hash(c), config_hash(base));
  c = base;
  c.model.lr0 = 0.2;
  EXPECT_NE(config_hash(c), config_hash(base));
  c = base;
  c.protocol.master_seed = 1;
  EXPECT_NE(config_hash(c), config_hash(base));
  EXPECT_EQ(config_hash(base).size(), 16u);
}

TEST(PoolFormat, RecordLinesAreByteStable) {
  for (const auto& r : records()) {
    const auto line = record_line(r);
    const auto back = record_from_json(json::parse(line));
    EXPECT_EQ(record_line(back), line);
    EXPECT_TRUE(back.same_outcome(r));
    EXPECT_EQ(line.find('\n'), std::string::npos);
  }
}

TEST(PoolFormat, HeaderCarriesProvenance) {
  const auto h = json::parse(header_line(small_config()));
  EXPECT_EQ(h["type"], "header");
  EXPECT_EQ(h["config_hash"], config_hash(small_config()));
  EXPECT_EQ(h["artifact_version"], kArtifactVersion);
  EXPECT_EQ(h["seed_derivation"], kSeedDerivationId);
  EXPECT_EQ(config_hash(parse_config(h["config"])), config_hash(small_config()));
}

TEST(PoolWriter, WriteReadResume) {
  const auto path = scratch("pool.ndjson");
  const auto c = small_config();
  {
    PoolWriter w(path, c);
    EXPECT_TRUE(w.completed().empty());
    w.append(records()[0]);
    w.append(TrialFailure{1, "diverged"});
    w.append(records()[2]);
  }
  auto file = read_pool(path);
  EXPECT_EQ(file.pool.trials.size(), 2u);
  ASSERT_EQ(file.failures.size(), 1u);
  EXPECT_EQ(file.failures[0].trial_index, 1u);
  EXPECT_EQ(file.failures[0].message, "diverged");
  EXPECT_EQ(config_hash(pool_config(file)), config_hash(c));

  // Simulate an interrupted append.
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << record_line(records()[3]).substr(0, 40);
  }
  file = read_pool(path);
  EXPECT_EQ(file.incomplete_bytes, 40u);
  EXPECT_EQ(file.pool.trials.size(), 2u);
  {
    PoolWriter w(path, c);
    EXPECT_EQ(w.completed(), (std::vector<std::size_t>{0, 2}));
    w.append(records()[1]);
    w.append(records()[3]);
  }
  file = read_pool(path);
  EXPECT_EQ(file.incomplete_bytes, 0u);
  EXPECT_TRUE(file.failures.empty());
  ASSERT_EQ(file.pool.trials.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(file.pool.trials[i].same_outcome(records()[i]));
}

TEST(PoolWriter, RejectsOtherConfig) {
  const auto path = scratch("other.ndjson");
  { PoolWriter w(path, small_config()); }
  EXPECT_THROW(PoolWriter(path, small_config(9)), ConfigError);
}

TEST(PoolReader, MalformedLineIsNamed) {
  const auto path = scratch("bad.ndjson");
  {
    std::ofstream out(path, std::ios::binary);
    out << header_line(small_config()) << '\n' << record_line(records()[0]) << '\n' << "{not json\n";
  }
  try {
    read_pool(path);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  {
    std::ofstream out(path, std::ios::binary);
    out << record_line(records()[0]) << '\n';
  }
  EXPECT_THROW(read_pool(path), DataError);
}

ExperimentPool pool_of(const std::vector<TrialRecord>& r) { return {config_hash(small_config()), r}; }

std::size_t column(const Table& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  EXPECT_NE(it, t.columns.end()) << name;
  return static_cast<std::size_t>(it - t.columns.begin());
}

TEST(Analysis, FormatNumber) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.8125), "0.8125");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Analysis, EstimateTable) {
  const auto pool = pool_of(records());
  const auto t = estimate_table(pool, 0.95);
  EXPECT_EQ(t.rows.size(), 5u * 3u + 1u);
  const auto mean = column(t, "mean");
  const auto method = column(t, "method");
  const auto metric = column(t, "metric");
  for (const auto& row : t.rows) {
    if (row[metric] == "accuracy") continue;
    EXPECT_EQ(row[mean], format_number(mc_estimate(pool, row[method], row[metric]).mean));
  }
  const auto csv = t.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "config_hash,method,metric,n,mean,se,ci_low,ci_high,confidence,se_flag");

  const auto single = estimate_table(pool_of({records()[0]}), 0.95);
  for (const auto& row : single.rows) {
    EXPECT_EQ(row[column(single, "se_flag")], "insufficient_n");
    EXPECT_EQ(row[column(single, "se")], "");
  }
}

TEST(Analysis, WinprobAndConvergenceTables) {
  const auto pool = pool_of(records());
  const std::vector<std::string> methods{"msp", "odin", "mcd"};
  const auto w = winprob_table(pool, methods, "auroc", 2, 500, winprob_seed(0));
  ASSERT_EQ(w.rows.size(), 3u);
  double total = 0.0;
  for (const auto& row : w.rows) {
    total += std::stod(row[column(w, "win_probability")]);
    EXPECT_EQ(row[column(w, "sampling")], kWinSampling);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);

  const auto c = convergence_table(pool, methods, "auroc", 0.05);
  EXPECT_EQ(c.rows.size(), 6u);  // 3 pairs + 3 self pairs
  for (const auto& row : c.rows) {
    if (row[column(c, "method_a")] == row[column(c, "method_b")]) {
      EXPECT_EQ(row[column(c, "n_required")], "NOT-REACHED");
    }
    EXPECT_EQ(row[column(c, "pool_size")], "4");
  }
}

TEST(Analysis, VarianceTablesNeedSplitGroups) {
  EXPECT_THROW(variance_table(pool_of(records()), "msp", "auroc"), ConfigError);
  auto grouped = records();
  for (std::size_t i = 0; i < grouped.size(); ++i) grouped[i].split_group = i / 2;
  const auto pool = pool_of(grouped);
  const auto v = variance_table(pool, "msp", "auroc");
  ASSERT_EQ(v.rows.size(), 2u);
  EXPECT_EQ(v.rows[1][column(v, "split_group")], "1");
  EXPECT_EQ(v.rows[1][column(v, "n")], "2");
  const auto p = variance_pairs_table(pool, "msp", "auroc");
  ASSERT_EQ(p.rows.size(), 1u);
  const double pv = std::stod(p.rows[0][column(p, "p_value")]);
  EXPECT_GE(pv, 0.0);
  EXPECT_LE(pv, 1.0);
}

TEST(Report, SvgOutputIsDeterministic) {
  const std::vector<Series> series{{"a", {0.8, 0.82, 0.85, 0.79}}, {"b", {0.7, 0.75, 0.72}}};
  const auto svg = density_svg(series, "AUROC density", "AUROC");
  EXPECT_EQ(svg, density_svg(series, "AUROC density", "AUROC"));
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_THROW(density_svg({{"a", {0.5}}}, "t", "x"), DataError);
  EXPECT_THROW(density_svg({}, "t", "x"), DataError);
}

TEST(Report, WinprobBarsMatchTable) {
  const auto pool = pool_of(records());
  const auto w = winprob_table(pool, {"msp", "tscaling", "mcd"}, "auroc", 2, 300, 5);
  const auto svg = winprob_svg(w);
  const std::regex attr("data-value=\"([^\"]*)\"");
  std::vector<std::string> values;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), attr); it != std::sregex_iterator(); ++it) {
    values.push_back((*it)[1]);
  }
  ASSERT_EQ(values.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(values[i], w.rows[i][column(w, "win_probability")]);

  const auto conv = convergence_table(pool, {"msp", "mcd"}, "auroc", 0.05);
  const auto svg2 = convergence_svg(conv);
  EXPECT_EQ(svg2, convergence_svg(conv));
  EXPECT_NE(svg2.find("NOT-REACHED"), std::string::npos);
}

}  // namespace
}  // namespace osim
