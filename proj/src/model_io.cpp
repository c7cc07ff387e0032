#include "osim/model_io.hpp"

#include <fstream>
#include <sstream>

#include "osim/error.hpp"

namespace osim {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  Matrix m(rows, cols);
  const auto& data = j.at("data");
  if (data.size() != rows) throw DataError("model: matrix row count mismatch");
  for (std::size_t r = 0; r < rows; ++r) {
    const auto values = data[r].get<std::vector<double>>();
    if (values.size() != cols) throw DataError("model: matrix column count mismatch");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = values[c];
  }
  return m;
}

template <typename F>
auto wrap(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw DataError(std::string("model: malformed JSON: ") + e.what());
  }
}

}  // namespace

json model_to_json(const TrainedModel& model) {
  const auto& c = model.config;
  json layers = json::array();
  for (const auto& l : model.layers) {
    layers.push_back({{"weights", matrix_to_json(l.weights)}, {"bias", l.bias}});
  }
  json trace = json::array();
  for (const auto& e : model.trace) {
    trace.push_back({{"epoch", e.epoch},
                     {"train_loss", e.train_loss},
                     {"val_loss", e.val_loss ? json(*e.val_loss) : json(nullptr)},
                     {"learning_rate", e.learning_rate}});
  }
  return {{"format", kModelFormat},
          {"version", kModelFormatVersion},
          {"config",
           {{"hidden_widths", c.hidden_widths},
            {"dropout_rate", c.dropout_rate},
            {"weight_decay", c.weight_decay},
            {"lr0", c.lr0},
            {"batch_size", c.batch_size},
            {"max_epochs", c.max_epochs},
            {"patience", c.patience}}},
          {"seeds",
           {{"init", model.seeds.init}, {"shuffle", model.seeds.shuffle},
            {"dropout", model.seeds.dropout}}},
          {"class_ids", model.class_ids},
          {"norm_mean", model.norm_mean},
          {"norm_std", model.norm_std},
          {"clamped_dims", model.clamped_dims},
          {"layers", layers},
          {"trace", trace},
          {"restored_epoch", model.restored_epoch}};
}

TrainedModel model_from_json(const json& j) {
  return wrap([&] {
    if (j.at("format") != kModelFormat) throw DataError("model: unknown format");
    if (j.at("version").get<int>() != kModelFormatVersion) {
      throw DataError("model: unsupported version " + j.at("version").dump());
    }
    TrainedModel m;
    const auto& c = j.at("config");
    m.config.hidden_widths = c.at("hidden_widths").get<std::vector<std::size_t>>();
    m.config.dropout_rate = c.at("dropout_rate").get<double>();
    m.config.weight_decay = c.at("weight_decay").get<double>();
    m.config.lr0 = c.at("lr0").get<double>();
    m.config.batch_size = c.at("batch_size").get<std::size_t>();
    m.config.max_epochs = c.at("max_epochs").get<std::size_t>();
    m.config.patience = c.at("patience").get<std::size_t>();
    const auto& s = j.at("seeds");
    m.seeds = {s.at("init").get<std::uint64_t>(), s.at("shuffle").get<std::uint64_t>(),
               s.at("dropout").get<std::uint64_t>()};
    m.class_ids = j.at("class_ids").get<std::vector<ClassId>>();
    m.norm_mean = j.at("norm_mean").get<std::vector<double>>();
    m.norm_std = j.at("norm_std").get<std::vector<double>>();
    m.clamped_dims = j.at("clamped_dims").get<std::size_t>();
    for (const auto& l : j.at("layers")) {
      DenseLayer layer{matrix_from_json(l.at("weights")), l.at("bias").get<std::vector<double>>()};
      if (layer.bias.size() != layer.weights.rows()) throw DataError("model: bias size mismatch");
      m.layers.push_back(std::move(layer));
    }
    for (const auto& e : j.at("trace")) {
      EpochRecord r;
      r.epoch = e.at("epoch").get<std::size_t>();
      r.train_loss = e.at("train_loss").get<double>();
      if (!e.at("val_loss").is_null()) r.val_loss = e.at("val_loss").get<double>();
      r.learning_rate = e.at("learning_rate").get<double>();
      m.trace.push_back(r);
    }
    m.restored_epoch = j.at("restored_epoch").get<std::size_t>();
    if (m.layers.empty() || m.layers.front().in_width() != m.norm_mean.size() ||
        m.layers.back().out_width() != m.class_ids.size() ||
        m.norm_std.size() != m.norm_mean.size()) {
      throw DataError("model: inconsistent layer shapes");
    }
    return m;
  });
}

json openmax_to_json(const OpenMaxModel& model) {
  json weibull = json::array();
  for (const auto& w : model.weibull) {
    weibull.push_back({{"shape", w.shape}, {"scale", w.scale}, {"location", w.location}});
  }
  return {{"centers", model.centers},
          {"weibull", weibull},
          {"alpha", model.alpha},
          {"tail_size", model.tail_size}};
}

OpenMaxModel openmax_from_json(const json& j) {
  return wrap([&] {
    OpenMaxModel m;
    m.centers = j.at("centers").get<std::vector<std::vector<double>>>();
    for (const auto& w : j.at("weibull")) {
      m.weibull.push_back({w.at("shape").get<double>(), w.at("scale").get<double>(),
                           w.at("location").get<double>()});
    }
    m.alpha = j.at("alpha").get<std::size_t>();
    m.tail_size = j.at("tail_size").get<std::size_t>();
    if (m.centers.size() != m.weibull.size()) throw DataError("openmax: class count mismatch");
    return m;
  });
}

void save_model(const std::filesystem::path& path, const SavedModel& saved) {
  json j = model_to_json(saved.model);
  if (saved.openmax) j["openmax"] = openmax_to_json(*saved.openmax);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file " + path.string());
  out << j.dump() << '\n';
  if (!out) throw DataError("failed writing model file " + path.string());
}

SavedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const json j = wrap([&] { return json::parse(buf.str()); });
  SavedModel saved{model_from_json(j), std::nullopt};
  if (j.contains("openmax")) saved.openmax = openmax_from_json(j.at("openmax"));
  return saved;
}

}  // namespace osim
