#include "osim/pool.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "osim/error.hpp"
#include "osim/splitgen.hpp"

namespace osim {

using nlohmann::json;

namespace {

json scores_to_json(const std::map<std::string, MethodScores>& methods) {
  json j = json::object();
  for (const auto& [name, s] : methods) {
    j[name] = {{"auroc", s.auroc}, {"aupr_in", s.aupr_in}, {"aupr_out", s.aupr_out}};
  }
  return j;
}

std::map<std::string, MethodScores> scores_from_json(const json& j) {
  std::map<std::string, MethodScores> out;
  for (const auto& [name, s] : j.items()) {
    out[name] = {s.at("auroc").get<double>(), s.at("aupr_in").get<double>(),
                 s.at("aupr_out").get<double>()};
  }
  return out;
}

}  // namespace

json record_to_json(const TrialRecord& r) {
  json sources = json::object();
  for (const auto& [name, methods] : r.sources) sources[name] = scores_to_json(methods);
  const auto& t = r.training;
  return {
      {"type", "trial"},
      {"trial_index", r.trial_index},
      {"master_seed", r.master_seed},
      {"config_hash", r.config_hash},
      {"seeds", r.seeds},
      {"split_group", r.split_group ? json(*r.split_group) : json(nullptr)},
      {"class_split",
       {{"in", r.class_split.in_classes},
        {"out_train", r.class_split.out_train},
        {"out_val", r.class_split.out_val},
        {"out_test", r.class_split.out_test}}},
      {"subsets",
       {{"in_train", r.subsets.in_train},
        {"out_train", r.subsets.out_train},
        {"in_val", r.subsets.in_val},
        {"out_val", r.subsets.out_val},
        {"in_test", r.subsets.in_test},
        {"out_test", r.subsets.out_test},
        {"dropped", r.subsets.dropped}}},
      {"methods", scores_to_json(r.methods)},
      {"accuracy", r.accuracy},
      {"detector_params", r.detector_params},
      {"training",
       {{"epochs_trained", t.epochs_trained},
        {"restored_epoch", t.restored_epoch},
        {"best_val_loss", t.best_val_loss ? json(*t.best_val_loss) : json(nullptr)},
        {"clamped_dims", t.clamped_dims}}},
      {"sources", sources},
      {"wall_time_s", r.wall_time_s},
  };
}

TrialRecord record_from_json(const json& j) {
  try {
    TrialRecord r;
    r.trial_index = j.at("trial_index").get<std::size_t>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seeds = j.at("seeds").get<std::map<std::string, std::uint64_t>>();
    if (!j.at("split_group").is_null()) r.split_group = j.at("split_group").get<std::size_t>();
    const auto& cs = j.at("class_split");
    r.class_split.in_classes = cs.at("in").get<std::vector<ClassId>>();
    r.class_split.out_train = cs.at("out_train").get<std::vector<ClassId>>();
    r.class_split.out_val = cs.at("out_val").get<std::vector<ClassId>>();
    r.class_split.out_test = cs.at("out_test").get<std::vector<ClassId>>();
    const auto& ss = j.at("subsets");
    r.subsets = {ss.at("in_train").get<std::size_t>(), ss.at("out_train").get<std::size_t>(),
                 ss.at("in_val").get<std::size_t>(),   ss.at("out_val").get<std::size_t>(),
                 ss.at("in_test").get<std::size_t>(),  ss.at("out_test").get<std::size_t>(),
                 ss.at("dropped").get<std::size_t>()};
    r.methods = scores_from_json(j.at("methods"));
    r.accuracy = j.at("accuracy").get<double>();
    r.detector_params = j.at("detector_params").get<std::map<std::string, double>>();
    const auto& t = j.at("training");
    r.training.epochs_trained = t.at("epochs_trained").get<std::size_t>();
    r.training.restored_epoch = t.at("restored_epoch").get<std::size_t>();
    if (!t.at("best_val_loss").is_null()) r.training.best_val_loss = t.at("best_val_loss").get<double>();
    r.training.clamped_dims = t.at("clamped_dims").get<std::size_t>();
    for (const auto& [name, methods] : j.at("sources").items()) {
      r.sources[name] = scores_from_json(methods);
    }
    r.wall_time_s = j.at("wall_time_s").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed trial record: ") + e.what());
  }
}

std::string record_line(const TrialRecord& record) { return record_to_json(record).dump(); }

std::string failure_line(const TrialFailure& f, std::string_view config_hash) {
  return json{{"type", "failed"},
              {"trial_index", f.trial_index},
              {"error", f.message},
              {"config_hash", config_hash}}
      .dump();
}

std::string header_line(const ExperimentConfig& config) {
  return json{{"type", "header"},
              {"config_hash", config_hash(config)},
              {"artifact_version", kArtifactVersion},
              {"seed_derivation", kSeedDerivationId},
              {"config", to_json(config)}}
      .dump();
}

PoolFile read_pool(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open pool " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  PoolFile out;
  std::map<std::size_t, TrialRecord> latest;
  std::map<std::size_t, TrialFailure> failed;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool have_header = false;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) {
      out.incomplete_bytes = text.size() - pos;
      break;
    }
    ++line_no;
    const std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const std::string type = j.value("type", "");
    const auto where = [&] { return path.string() + ":" + std::to_string(line_no) + ": "; };
    if (!have_header) {
      if (type != "header") throw DataError(where() + "first record must be the header");
      if (j.value("seed_derivation", "") != kSeedDerivationId) {
        throw DataError(where() + "unsupported seed derivation " + j.value("seed_derivation", ""));
      }
      out.header = j;
      out.pool.config_hash = j.at("config_hash").get<std::string>();
      have_header = true;
      continue;
    }
    if (type == "trial") {
      TrialRecord r;
      try {
        r = record_from_json(j);
      } catch (const DataError& e) {
        throw DataError(where() + e.what());
      }
      if (r.config_hash != out.pool.config_hash) throw DataError(where() + "config hash mismatch");
      failed.erase(r.trial_index);
      latest[r.trial_index] = std::move(r);
    } else if (type == "failed") {
      const auto t = j.at("trial_index").get<std::size_t>();
      if (!latest.count(t)) failed[t] = {t, j.value("error", "")};
    } else {
      throw DataError(where() + "unknown record type '" + type + "'");
    }
  }
  if (!have_header) throw DataError("pool " + path.string() + " has no header");
  for (auto& [t, r] : latest) out.pool.trials.push_back(std::move(r));
  for (auto& [t, f] : failed) out.failures.push_back(std::move(f));
  return out;
}

ExperimentConfig pool_config(const PoolFile& file) {
  return parse_config(file.header.at("config"));
}

PoolWriter::PoolWriter(const std::filesystem::path& path, const ExperimentConfig& config)
    : hash_(config_hash(config)) {
  const bool exists = std::filesystem::exists(path) && std::filesystem::file_size(path) > 0;
  if (exists) {
    const PoolFile existing = read_pool(path);
    if (existing.pool.config_hash != hash_) {
      throw ConfigError("pool " + path.string() + " was written by config " +
                        existing.pool.config_hash + ", current config is " + hash_);
    }
    if (existing.incomplete_bytes > 0) {
      std::filesystem::resize_file(path,
                                   std::filesystem::file_size(path) - existing.incomplete_bytes);
    }
    for (const auto& r : existing.pool.trials) completed_.push_back(r.trial_index);
  } else if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  file_ = std::fopen(path.string().c_str(), "ab");
  if (file_ == nullptr) throw DataError("cannot open pool " + path.string() + " for writing");
  if (!exists) write_line(header_line(config));
}

PoolWriter::~PoolWriter() {
  if (file_ != nullptr) std::fclose(file_);
}

void PoolWriter::append(const TrialRecord& record) {
  write_line(record_line(record));
  completed_.push_back(record.trial_index);
}

void PoolWriter::append(const TrialFailure& failure) { write_line(failure_line(failure, hash_)); }

void PoolWriter::write_line(const std::string& line) {
  const std::string full = line + '\n';
  if (std::fwrite(full.data(), 1, full.size(), file_) != full.size() || std::fflush(file_) != 0) {
    throw DataError("failed writing pool record");
  }
}

}  // namespace osim
