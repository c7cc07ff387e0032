#include "osim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "osim/error.hpp"

namespace osim {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering its path for error messages and
// rejecting keys that were never consumed.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config " + (path.empty() ? std::string("/") : path) + ": " + what);
  }

  std::string child_path(const std::string& key) const { return path_ + "/" + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (const json* v = find(key)) out = convert<T>(*v, child_path(key));
  }

  template <typename T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(path, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(path, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_unsigned()) fail(path, "expected a non-negative integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(path, "expected a number");
      return v.get<T>();
    } else {
      static_assert(sizeof(T) == 0, "unsupported config value type");
    }
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) fail(child_path(key), "unknown key");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename T>
std::vector<T> read_array(const json& v, const std::string& path) {
  if (!v.is_array()) ObjectReader::fail(path, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(ObjectReader::convert<T>(v[i], path + "/" + std::to_string(i)));
  }
  return out;
}

SyntheticSpec parse_synthetic(const json& node, const std::string& path) {
  ObjectReader r(node, path);
  SyntheticSpec s;
  r.get("n_classes", s.n_classes);
  r.get("n_dims", s.n_dims);
  r.get("samples_per_class", s.samples_per_class);
  r.get("separation", s.separation);
  r.get("within_std", s.within_std);
  r.get("seed", s.seed);
  r.finish();
  return s;
}

DatasetSource parse_dataset(const json& node, const std::string& path,
                            const std::filesystem::path& base_dir) {
  ObjectReader r(node, path);
  const json* synthetic = r.find("synthetic");
  const json* csv = r.find("csv");
  r.finish();
  if ((synthetic == nullptr) == (csv == nullptr)) {
    ObjectReader::fail(path, "exactly one of 'synthetic' or 'csv' is required");
  }
  if (synthetic) return parse_synthetic(*synthetic, path + "/synthetic");
  ObjectReader c(*csv, path + "/csv");
  CsvSource src;
  c.get("path", src.path);
  c.get("label_column", src.label_column);
  c.finish();
  if (src.path.empty()) ObjectReader::fail(path + "/csv/path", "required");
  if (!base_dir.empty() && std::filesystem::path(src.path).is_relative()) {
    src.path = (base_dir / src.path).lexically_normal().string();
  }
  return src;
}

SplitConfig parse_split(const json& node, const std::string& path) {
  ObjectReader r(node, path);
  SplitConfig s;
  r.get("n_in", s.sizes.n_in);
  r.get("n_out_train", s.sizes.n_out_train);
  r.get("n_out_val", s.sizes.n_out_val);
  r.get("n_out_test", s.sizes.n_out_test);
  if (const json* f = r.find("fractions")) {
    const auto v = read_array<double>(*f, r.child_path("fractions"));
    if (v.size() != 3) ObjectReader::fail(r.child_path("fractions"), "expected [train, val, test]");
    s.fractions = {v[0], v[1], v[2]};
  }
  r.get("stratify", s.stratify);
  r.finish();
  return s;
}

ModelConfig parse_model(const json& node, const std::string& path) {
  ObjectReader r(node, path);
  ModelConfig m;
  if (const json* h = r.find("hidden_widths")) {
    m.hidden_widths = read_array<std::size_t>(*h, r.child_path("hidden_widths"));
  }
  r.get("dropout_rate", m.dropout_rate);
  r.get("weight_decay", m.weight_decay);
  r.get("lr0", m.lr0);
  r.get("batch_size", m.batch_size);
  r.get("max_epochs", m.max_epochs);
  r.get("patience", m.patience);
  r.finish();
  return m;
}

DetectorConfig parse_detector(const json& node, const std::string& path) {
  ObjectReader r(node, path);
  DetectorConfig d;
  std::string method;
  r.get("method", method);
  const auto m = parse_method(method);
  if (!m) ObjectReader::fail(r.child_path("method"), "unknown method '" + method + "'");
  d.method = *m;
  r.get("name", d.name);
  r.get("temperature", d.temperature);
  if (const json* e = r.find("epsilon")) {
    if (!(e->is_string() && e->get<std::string>() == "auto")) {
      d.epsilon = ObjectReader::convert<double>(*e, r.child_path("epsilon"));
    }
  }
  r.get("tail_size", d.tail_size);
  if (const json* a = r.find("alpha")) {
    if (!(a->is_string() && a->get<std::string>() == "auto")) {
      d.alpha = ObjectReader::convert<std::size_t>(*a, r.child_path("alpha"));
    }
  }
  r.get("n_passes", d.n_passes);
  r.finish();
  return d;
}

ProtocolConfig parse_protocol(const json& node, const std::string& path) {
  ObjectReader r(node, path);
  ProtocolConfig p;
  r.get("n_trials", p.n_trials);
  r.get("master_seed", p.master_seed);
  r.get("k", p.k);
  r.get("replications", p.replications);
  r.get("alpha", p.alpha);
  r.get("confidence", p.confidence);
  if (const json* v = r.find("variance")) {
    ObjectReader vr(*v, r.child_path("variance"));
    VarianceDesign d;
    vr.get("n_splits", d.n_splits);
    vr.get("seeds_per_split", d.seeds_per_split);
    vr.finish();
    p.variance = d;
    if (!r.has("n_trials")) p.n_trials = d.n_splits * d.seeds_per_split;
  }
  r.finish();
  return p;
}

std::optional<SourceKind> parse_source_kind(const std::string& s) {
  for (const auto k : {SourceKind::uniform_noise, SourceKind::gaussian_noise, SourceKind::gaussian,
                       SourceKind::resample_in, SourceKind::csv}) {
    if (source_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

OodSourceConfig parse_source(const json& node, const std::string& path,
                             const std::filesystem::path& base_dir) {
  ObjectReader r(node, path);
  OodSourceConfig s;
  r.get("name", s.name);
  std::string kind;
  r.get("kind", kind);
  const auto k = parse_source_kind(kind);
  if (!k) ObjectReader::fail(r.child_path("kind"), "unknown source kind '" + kind + "'");
  s.kind = *k;
  r.get("n", s.n);
  r.get("mean", s.mean);
  r.get("std", s.std);
  if (const json* c = r.find("clip")) {
    const auto v = read_array<double>(*c, r.child_path("clip"));
    if (v.size() != 2) ObjectReader::fail(r.child_path("clip"), "expected [low, high]");
    s.clip = ValueRange{v[0], v[1]};
  }
  r.get("path", s.path);
  r.get("label_column", s.label_column);
  r.finish();
  if (s.name.empty()) ObjectReader::fail(r.child_path("name"), "required");
  if (s.kind == SourceKind::csv && !base_dir.empty() && !s.path.empty() &&
      std::filesystem::path(s.path).is_relative()) {
    s.path = (base_dir / s.path).lexically_normal().string();
  }
  return s;
}

json detector_json(const DetectorConfig& d) {
  json j;
  j["name"] = d.display_name();
  j["method"] = std::string(method_name(d.method));
  switch (d.method) {
    case Method::tscaling: j["temperature"] = d.temperature; break;
    case Method::odin:
      j["temperature"] = d.temperature;
      j["epsilon"] = d.epsilon ? json(*d.epsilon) : json("auto");
      break;
    case Method::openmax:
      j["tail_size"] = d.tail_size;
      j["alpha"] = d.alpha ? json(*d.alpha) : json("auto");
      break;
    case Method::mcd: j["n_passes"] = d.n_passes; break;
    case Method::msp: break;
  }
  return j;
}

}  // namespace

std::string_view source_kind_name(SourceKind k) noexcept {
  switch (k) {
    case SourceKind::uniform_noise: return "uniform_noise";
    case SourceKind::gaussian_noise: return "gaussian_noise";
    case SourceKind::gaussian: return "gaussian";
    case SourceKind::resample_in: return "resample_in";
    case SourceKind::csv: return "csv";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (const auto* s = std::get_if<SyntheticSpec>(&dataset)) {
    s->validate();
    const auto& z = split.sizes;
    const std::size_t need = z.n_in + z.n_out_train + z.n_out_val + z.n_out_test;
    if (need > s->n_classes) {
      throw ConfigError("config /split: class roles need " + std::to_string(need) +
                        " classes, synthetic dataset has " + std::to_string(s->n_classes));
    }
  }
  if (split.sizes.n_in < 1) throw ConfigError("config /split/n_in: must be >= 1");
  if (split.sizes.n_out_test < 1) throw ConfigError("config /split/n_out_test: must be >= 1");
  const auto& f = split.fractions;
  if (f.train < 0 || f.val < 0 || f.test < 0 || std::abs(f.train + f.val + f.test - 1.0) > 1e-9) {
    throw ConfigError("config /split/fractions: must be non-negative and sum to 1");
  }
  if (!(f.train > 0.0) || !(f.test > 0.0)) {
    throw ConfigError("config /split/fractions: train and test fractions must be positive");
  }
  model.validate();
  if (detectors.empty()) throw ConfigError("config /detectors: at least one detector is required");
  std::set<std::string> names;
  for (const auto& d : detectors) {
    d.validate();
    if (!names.insert(d.display_name()).second) {
      throw ConfigError("config /detectors: duplicate detector name '" + d.display_name() + "'");
    }
  }
  const auto& p = protocol;
  if (p.n_trials == 0) throw ConfigError("config /protocol/n_trials: must be positive");
  if (p.k == 0) throw ConfigError("config /protocol/k: must be positive");
  if (p.replications == 0) throw ConfigError("config /protocol/replications: must be positive");
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw ConfigError("config /protocol/alpha: must be in (0, 1)");
  if (!(p.confidence > 0.0 && p.confidence < 1.0)) {
    throw ConfigError("config /protocol/confidence: must be in (0, 1)");
  }
  if (p.variance) {
    if (p.variance->n_splits < 2 || p.variance->seeds_per_split < 2) {
      throw ConfigError("config /protocol/variance: n_splits and seeds_per_split must be >= 2");
    }
    if (p.n_trials != p.variance->n_splits * p.variance->seeds_per_split) {
      throw ConfigError("config /protocol/n_trials: must equal n_splits * seeds_per_split");
    }
  }
  std::set<std::string> source_names;
  for (const auto& s : ood_sources) {
    if (!source_names.insert(s.name).second) {
      throw ConfigError("config /ood_sources: duplicate source name '" + s.name + "'");
    }
    if (s.n == 0) throw ConfigError("config /ood_sources: source '" + s.name + "' needs n > 0");
    if (s.kind == SourceKind::gaussian && !(s.std >= 0.0)) {
      throw ConfigError("config /ood_sources: source '" + s.name + "' needs std >= 0");
    }
    if (s.kind == SourceKind::resample_in && !std::holds_alternative<SyntheticSpec>(dataset)) {
      throw ConfigError("config /ood_sources: source '" + s.name +
                        "' (resample_in) requires a synthetic dataset");
    }
    if (s.kind == SourceKind::csv && s.path.empty()) {
      throw ConfigError("config /ood_sources: source '" + s.name + "' needs a path");
    }
  }
}

ExperimentConfig parse_config(const json& tree, const std::filesystem::path& base_dir) {
  ObjectReader r(tree, "");
  ExperimentConfig c;
  if (const json* v = r.find("dataset")) c.dataset = parse_dataset(*v, "/dataset", base_dir);
  if (const json* v = r.find("split")) c.split = parse_split(*v, "/split");
  if (const json* v = r.find("model")) c.model = parse_model(*v, "/model");
  if (const json* v = r.find("detectors")) {
    if (!v->is_array()) ObjectReader::fail("/detectors", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.detectors.push_back(parse_detector((*v)[i], "/detectors/" + std::to_string(i)));
    }
  } else {
    for (const auto m : {Method::msp, Method::tscaling, Method::odin, Method::openmax, Method::mcd}) {
      DetectorConfig d;
      d.method = m;
      c.detectors.push_back(d);
    }
  }
  if (const json* v = r.find("protocol")) c.protocol = parse_protocol(*v, "/protocol");
  if (const json* v = r.find("ood_sources")) {
    if (!v->is_array()) ObjectReader::fail("/ood_sources", "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      c.ood_sources.push_back(parse_source((*v)[i], "/ood_sources/" + std::to_string(i), base_dir));
    }
  }
  if (const json* v = r.find("output")) {
    ObjectReader o(*v, "/output");
    o.get("directory", c.output.directory);
    if (const json* f = o.find("formats")) c.output.formats = read_array<std::string>(*f, "/output/formats");
    o.finish();
  }
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json tree;
  try {
    tree = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  return parse_config(tree, path.parent_path());
}

json to_json(const ExperimentConfig& c) {
  json j;
  if (const auto* s = std::get_if<SyntheticSpec>(&c.dataset)) {
    j["dataset"]["synthetic"] = {{"n_classes", s->n_classes},
                                 {"n_dims", s->n_dims},
                                 {"samples_per_class", s->samples_per_class},
                                 {"separation", s->separation},
                                 {"within_std", s->within_std},
                                 {"seed", s->seed}};
  } else {
    const auto& csv = std::get<CsvSource>(c.dataset);
    j["dataset"]["csv"] = {{"path", csv.path}, {"label_column", csv.label_column}};
  }
  j["split"] = {{"n_in", c.split.sizes.n_in},
                {"n_out_train", c.split.sizes.n_out_train},
                {"n_out_val", c.split.sizes.n_out_val},
                {"n_out_test", c.split.sizes.n_out_test},
                {"fractions", {c.split.fractions.train, c.split.fractions.val, c.split.fractions.test}},
                {"stratify", c.split.stratify}};
  j["model"] = {{"hidden_widths", c.model.hidden_widths},
                {"dropout_rate", c.model.dropout_rate},
                {"weight_decay", c.model.weight_decay},
                {"lr0", c.model.lr0},
                {"batch_size", c.model.batch_size},
                {"max_epochs", c.model.max_epochs},
                {"patience", c.model.patience}};
  j["detectors"] = json::array();
  for (const auto& d : c.detectors) j["detectors"].push_back(detector_json(d));
  j["protocol"] = {{"n_trials", c.protocol.n_trials},
                   {"master_seed", c.protocol.master_seed},
                   {"k", c.protocol.k},
                   {"replications", c.protocol.replications},
                   {"alpha", c.protocol.alpha},
                   {"confidence", c.protocol.confidence}};
  if (c.protocol.variance) {
    j["protocol"]["variance"] = {{"n_splits", c.protocol.variance->n_splits},
                                 {"seeds_per_split", c.protocol.variance->seeds_per_split}};
  }
  j["ood_sources"] = json::array();
  for (const auto& s : c.ood_sources) {
    json sj = {{"name", s.name}, {"kind", std::string(source_kind_name(s.kind))}, {"n", s.n}};
    if (s.kind == SourceKind::gaussian) {
      sj["mean"] = s.mean;
      sj["std"] = s.std;
      if (s.clip) sj["clip"] = {s.clip->low, s.clip->high};
    }
    if (s.kind == SourceKind::csv) {
      sj["path"] = s.path;
      sj["label_column"] = s.label_column;
    }
    j["ood_sources"].push_back(std::move(sj));
  }
  j["output"] = {{"directory", c.output.directory}, {"formats", c.output.formats}};
  return j;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ExperimentConfig& config) {
  // The output section does not influence results and is left out of the hash.
  json j = to_json(config);
  j.erase("output");
  return fnv1a_hex(j.dump());
}

}  // namespace osim
