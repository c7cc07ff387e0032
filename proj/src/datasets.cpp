#include "osim/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "osim/error.hpp"
#include "osim/random.hpp"

namespace osim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Sample draws use a stream separate from the class-mean stream.
constexpr std::uint64_t kSampleStreamSalt = 0x5A4D504C45530001ULL;

}  // namespace

Dataset Dataset::subset(std::span<const std::size_t> indices,
                        std::vector<ClassId> subset_classes) const {
  Dataset out;
  out.name = name;
  out.features = Matrix(0, dims());
  out.labels.reserve(indices.size());
  for (const auto i : indices) {
    out.features.append_row(features.row(i));
    out.labels.push_back(labels[i]);
  }
  std::sort(subset_classes.begin(), subset_classes.end());
  out.class_set = std::move(subset_classes);
  out.class_names = class_names;
  out.value_range = value_range;
  return out;
}

void Dataset::validate() const {
  if (features.rows() != labels.size()) {
    throw DataError("dataset '" + name + "': " + std::to_string(features.rows()) +
                    " feature rows but " + std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const ClassId y = labels[i];
    if (y != kSyntheticOodLabel && !std::binary_search(class_set.begin(), class_set.end(), y)) {
      throw DataError("dataset '" + name + "': row " + std::to_string(i) + " has label " +
                      std::to_string(y) + " outside the class set");
    }
    for (std::size_t j = 0; j < dims(); ++j) {
      const double v = features(i, j);
      if (!std::isfinite(v)) {
        throw DataError("dataset '" + name + "': non-finite value at row " + std::to_string(i) +
                        ", column " + std::to_string(j));
      }
      if (v < value_range.low || v > value_range.high) {
        throw DataError("dataset '" + name + "': value at row " + std::to_string(i) +
                        ", column " + std::to_string(j) + " outside the declared range");
      }
    }
  }
}

ValueRange compute_value_range(const Matrix& features) {
  if (features.data().empty()) return {};
  const auto [lo, hi] = std::minmax_element(features.data().begin(), features.data().end());
  return {*lo, *hi};
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV file '" + path.string() + "' is empty");
  const auto header = split_fields(line);
  std::size_t label_pos = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == label_column) label_pos = c;
  }
  if (label_pos == header.size()) {
    throw DataError("CSV file '" + path.string() + "' has no label column '" + label_column + "'");
  }

  Dataset ds;
  ds.name = path.stem().string();
  ds.features = Matrix(0, header.size() - 1);
  std::unordered_map<std::string, ClassId> ids;
  std::vector<double> row(header.size() - 1);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    std::size_t out_col = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto field = fields[c];
      const auto where = [&] {
        return path.string() + ":" + std::to_string(line_no) + ", column " +
               std::to_string(c + 1) + " ('" + std::string(header[c]) + "')";
      };
      if (field.empty()) throw DataError(where() + ": missing value");
      if (c == label_pos) {
        const auto [it, inserted] =
            ids.try_emplace(std::string(field), static_cast<ClassId>(ids.size()));
        if (inserted) ds.class_names.emplace_back(field);
        ds.labels.push_back(it->second);
        continue;
      }
      double v = 0.0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw DataError(where() + ": not a number: '" + std::string(field) + "'");
      }
      if (!std::isfinite(v)) throw DataError(where() + ": non-finite value");
      row[out_col++] = v;
    }
    ds.features.append_row(row);
  }

  ds.class_set.resize(ds.class_names.size());
  for (std::size_t i = 0; i < ds.class_set.size(); ++i) ds.class_set[i] = static_cast<ClassId>(i);
  ds.value_range = compute_value_range(ds.features);
  return ds;
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path,
              const std::string& label_column) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write CSV file '" + path.string() + "'");
  for (std::size_t j = 0; j < dataset.dims(); ++j) out << 'x' << j << ',';
  out << label_column << '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (const double v : dataset.features.row(i)) out << format_double(v) << ',';
    const ClassId y = dataset.labels[i];
    if (y >= 0 && static_cast<std::size_t>(y) < dataset.class_names.size()) {
      out << dataset.class_names[static_cast<std::size_t>(y)];
    } else {
      out << y;
    }
    out << '\n';
  }
}

void SyntheticSpec::validate() const {
  if (n_classes == 0 || n_dims == 0 || samples_per_class == 0) {
    throw ConfigError("synthetic dataset: n_classes, n_dims and samples_per_class must be positive");
  }
  if (!(separation > 0.0)) throw ConfigError("synthetic dataset: separation must be > 0");
  if (!(within_std >= 0.0)) throw ConfigError("synthetic dataset: within_std must be >= 0");
}

Matrix synthetic_class_means(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  Matrix means(spec.n_classes, spec.n_dims);
  for (auto& v : means.data()) v = rng.normal(0.0, spec.separation);
  return means;
}

Dataset sample_gaussian_mixture(const SyntheticSpec& spec, std::span<const ClassId> classes,
                                std::size_t per_class, std::uint64_t seed) {
  spec.validate();
  const Matrix means = synthetic_class_means(spec);
  Rng rng(seed);
  Dataset ds;
  ds.name = "gaussian_mixture";
  ds.features = Matrix(0, spec.n_dims);
  std::vector<double> row(spec.n_dims);
  for (const ClassId c : classes) {
    if (c < 0 || static_cast<std::size_t>(c) >= spec.n_classes) {
      throw ConfigError("synthetic dataset: class " + std::to_string(c) + " does not exist");
    }
    const auto mean = means.row(static_cast<std::size_t>(c));
    for (std::size_t s = 0; s < per_class; ++s) {
      for (std::size_t j = 0; j < spec.n_dims; ++j) {
        row[j] = spec.within_std == 0.0 ? mean[j] : rng.normal(mean[j], spec.within_std);
      }
      ds.features.append_row(row);
      ds.labels.push_back(c);
    }
  }
  for (std::size_t c = 0; c < spec.n_classes; ++c) ds.class_names.push_back(std::to_string(c));
  ds.class_set.assign(classes.begin(), classes.end());
  std::sort(ds.class_set.begin(), ds.class_set.end());
  ds.class_set.erase(std::unique(ds.class_set.begin(), ds.class_set.end()), ds.class_set.end());
  ds.value_range = compute_value_range(ds.features);
  return ds;
}

Dataset gen_gaussian_mixture(const SyntheticSpec& spec) {
  spec.validate();
  std::vector<ClassId> all(spec.n_classes);
  for (std::size_t c = 0; c < spec.n_classes; ++c) all[c] = static_cast<ClassId>(c);
  return sample_gaussian_mixture(spec, all, spec.samples_per_class,
                                 mix64(spec.seed ^ kSampleStreamSalt));
}

Matrix gen_gaussian_noise(std::size_t n, std::size_t n_dims, double mean, double stddev,
                          std::uint64_t seed, std::optional<ValueRange> clip) {
  Rng rng(seed);
  Matrix out(n, n_dims);
  for (auto& v : out.data()) {
    v = rng.normal(mean, stddev);
    if (clip) v = std::clamp(v, clip->low, clip->high);
  }
  return out;
}

Matrix gen_noise(NoiseKind kind, std::size_t n, std::size_t n_dims, std::uint64_t seed) {
  if (n == 0 || n_dims == 0) throw ConfigError("gen_noise: n and n_dims must be positive");
  if (kind == NoiseKind::gaussian) {
    return gen_gaussian_noise(n, n_dims, 128.0, 128.0, seed, ValueRange{0.0, 255.0});
  }
  Rng rng(seed);
  Matrix out(n, n_dims);
  for (auto& v : out.data()) v = rng.uniform(0.0, 255.0);
  return out;
}

Dataset wrap_ood_samples(std::string name, Matrix features) {
  Dataset ds;
  ds.name = std::move(name);
  ds.labels.assign(features.rows(), kSyntheticOodLabel);
  ds.value_range = compute_value_range(features);
  ds.features = std::move(features);
  return ds;
}

}  // namespace osim
