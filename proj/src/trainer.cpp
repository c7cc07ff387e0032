#include "osim/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "osim/error.hpp"
#include "osim/random.hpp"

namespace osim {

namespace {

// Activations of one forward pass, kept for backpropagation.
struct ForwardCache {
  std::vector<std::vector<double>> inputs;  // input of layer l (after dropout for the last)
  std::vector<std::vector<double>> pre;     // pre-activation of layer l
};

std::vector<double> normalize(const TrainedModel& m, std::span<const double> x) {
  if (x.size() != m.input_dims()) {
    throw DataError("input has " + std::to_string(x.size()) + " dimensions, model expects " +
                    std::to_string(m.input_dims()));
  }
  std::vector<double> u(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) u[j] = (x[j] - m.norm_mean[j]) / m.norm_std[j];
  return u;
}

void affine(const DenseLayer& layer, std::span<const double> in, std::vector<double>& out) {
  const std::size_t rows = layer.out_width();
  const std::size_t cols = layer.in_width();
  out.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto w = layer.weights.row(r);
    double acc = layer.bias[r];
    for (std::size_t c = 0; c < cols; ++c) acc += w[c] * in[c];
    out[r] = acc;
  }
}

LogitVector run_forward(const TrainedModel& m, std::vector<double> a,
                        std::span<const double> mask, ForwardCache* cache) {
  const std::size_t n_layers = m.layers.size();
  if (cache) {
    cache->inputs.resize(n_layers);
    cache->pre.resize(n_layers);
  }
  std::vector<double> z;
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (l + 1 == n_layers && !mask.empty()) {
      if (mask.size() != a.size()) throw DataError("dropout mask width mismatch");
      for (std::size_t j = 0; j < a.size(); ++j) a[j] *= mask[j];
    }
    affine(m.layers[l], a, z);
    if (cache) {
      cache->inputs[l] = a;
      cache->pre[l] = z;
    }
    if (l + 1 < n_layers) {
      a.resize(z.size());
      for (std::size_t j = 0; j < z.size(); ++j) a[j] = z[j] > 0.0 ? z[j] : 0.0;
    }
  }
  return z;
}

// Backpropagates dL/dlogits. Accumulates parameter gradients into `grads`
// when non-null; returns dL/du for the normalized input u.
std::vector<double> run_backward(const TrainedModel& m, const ForwardCache& cache,
                                 std::span<const double> mask, std::vector<double> delta,
                                 ParameterGradients* grads) {
  const std::size_t n_layers = m.layers.size();
  std::vector<double> d_in;
  for (std::size_t l = n_layers; l-- > 0;) {
    const DenseLayer& layer = m.layers[l];
    const auto& in = cache.inputs[l];
    if (grads) {
      auto& gw = grads->weights[l];
      auto& gb = grads->bias[l];
      for (std::size_t r = 0; r < layer.out_width(); ++r) {
        if (delta[r] == 0.0) continue;
        auto grow = gw.row(r);
        for (std::size_t c = 0; c < layer.in_width(); ++c) grow[c] += delta[r] * in[c];
        gb[r] += delta[r];
      }
    }
    d_in.assign(layer.in_width(), 0.0);
    for (std::size_t r = 0; r < layer.out_width(); ++r) {
      if (delta[r] == 0.0) continue;
      const auto w = layer.weights.row(r);
      for (std::size_t c = 0; c < layer.in_width(); ++c) d_in[c] += w[c] * delta[r];
    }
    if (l + 1 == n_layers && !mask.empty()) {
      for (std::size_t j = 0; j < d_in.size(); ++j) d_in[j] *= mask[j];
    }
    if (l > 0) {
      const auto& pre = cache.pre[l - 1];
      delta.resize(d_in.size());
      for (std::size_t j = 0; j < d_in.size(); ++j) delta[j] = pre[j] > 0.0 ? d_in[j] : 0.0;
    }
  }
  return d_in;
}

double log_sum_exp(std::span<const double> z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (const double v : z) s += std::exp(v - zmax);
  return zmax + std::log(s);
}

ParameterGradients zero_gradients(const TrainedModel& m) {
  ParameterGradients g;
  for (const auto& layer : m.layers) {
    g.weights.emplace_back(layer.out_width(), layer.in_width(), 0.0);
    g.bias.emplace_back(layer.out_width(), 0.0);
  }
  return g;
}

void clear(ParameterGradients& g) {
  for (auto& w : g.weights) std::fill(w.data().begin(), w.data().end(), 0.0);
  for (auto& b : g.bias) std::fill(b.begin(), b.end(), 0.0);
}

void fill_mask(Rng& rng, double rate, std::vector<double>& mask) {
  const double scale = 1.0 / (1.0 - rate);
  for (auto& v : mask) v = rng.uniform() >= rate ? scale : 0.0;
}

std::vector<std::size_t> label_indices(const TrainedModel& m, const Dataset& data) {
  std::vector<std::size_t> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto idx = m.class_index(data.labels[i]);
    if (!idx) {
      throw DataError("label " + std::to_string(data.labels[i]) + " of dataset '" + data.name +
                      "' is not a model class");
    }
    out[i] = *idx;
  }
  return out;
}

}  // namespace

void ModelConfig::validate() const {
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("model: dropout_rate must be in [0, 1)");
  }
  if (!(weight_decay >= 0.0)) throw ConfigError("model: weight_decay must be >= 0");
  if (!(lr0 > 0.0)) throw ConfigError("model: lr0 must be > 0");
  if (batch_size == 0) throw ConfigError("model: batch_size must be positive");
  if (max_epochs == 0) throw ConfigError("model: max_epochs must be positive");
  for (const auto w : hidden_widths) {
    if (w == 0) throw ConfigError("model: hidden widths must be positive");
  }
}

std::optional<std::size_t> TrainedModel::class_index(ClassId c) const noexcept {
  const auto it = std::find(class_ids.begin(), class_ids.end(), c);
  if (it == class_ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - class_ids.begin());
}

std::vector<double> softmax(std::span<const double> z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - zmax);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

double lr_schedule(std::size_t epoch, std::size_t max_epochs, double lr0) {
  const double frac = static_cast<double>(epoch) / static_cast<double>(max_epochs);
  return lr0 * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
}

TrainedModel init_model(std::size_t input_dims, std::vector<ClassId> class_ids,
                        const ModelConfig& config, std::uint64_t init_seed) {
  config.validate();
  if (input_dims == 0) throw ConfigError("model: input must have at least one dimension");
  if (class_ids.empty()) throw ConfigError("model: at least one class is required");
  TrainedModel m;
  m.config = config;
  m.seeds.init = init_seed;
  m.class_ids = std::move(class_ids);
  m.norm_mean.assign(input_dims, 0.0);
  m.norm_std.assign(input_dims, 1.0);

  std::vector<std::size_t> widths{input_dims};
  widths.insert(widths.end(), config.hidden_widths.begin(), config.hidden_widths.end());
  widths.push_back(m.class_ids.size());

  Rng rng(init_seed);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    DenseLayer layer;
    layer.weights = Matrix(widths[l + 1], widths[l]);
    layer.bias.assign(widths[l + 1], 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l]));
    for (auto& w : layer.weights.data()) w = rng.uniform(-bound, bound);
    for (auto& b : layer.bias) b = rng.uniform(-bound, bound);
    m.layers.push_back(std::move(layer));
  }
  return m;
}

std::vector<double> draw_dropout_mask(std::size_t width, double rate, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> mask(width);
  fill_mask(rng, rate, mask);
  return mask;
}

LogitVector forward(const TrainedModel& model, std::span<const double> x) {
  return run_forward(model, normalize(model, x), {}, nullptr);
}

LogitVector forward(const TrainedModel& model, std::span<const double> x,
                    std::uint64_t dropout_seed) {
  const auto mask = draw_dropout_mask(model.feature_width(), model.dropout_rate(), dropout_seed);
  return run_forward(model, normalize(model, x), mask, nullptr);
}

LogitVector forward_with_mask(const TrainedModel& model, std::span<const double> x,
                              std::span<const double> mask) {
  return run_forward(model, normalize(model, x), mask, nullptr);
}

std::vector<double> input_gradient(const TrainedModel& model, std::span<const double> x,
                                   std::size_t class_index, double temperature) {
  if (class_index >= model.num_classes()) throw DataError("input_gradient: class index out of range");
  if (!(temperature > 0.0)) throw ConfigError("input_gradient: temperature must be > 0");
  ForwardCache cache;
  const auto z = run_forward(model, normalize(model, x), {}, &cache);
  std::vector<double> scaled(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) scaled[i] = z[i] / temperature;
  const auto p = softmax(scaled);
  // d p_c / d z_j = p_c (delta_cj - p_j) / T
  std::vector<double> delta(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    delta[j] = p[class_index] * ((j == class_index ? 1.0 : 0.0) - p[j]) / temperature;
  }
  auto du = run_backward(model, cache, {}, std::move(delta), nullptr);
  for (std::size_t j = 0; j < du.size(); ++j) du[j] /= model.norm_std[j];
  return du;
}

double cross_entropy_loss(const TrainedModel& model, std::span<const double> x,
                          std::size_t label_index, std::span<const double> mask) {
  const auto z = run_forward(model, normalize(model, x), mask, nullptr);
  return log_sum_exp(z) - z.at(label_index);
}

double cross_entropy_gradients(const TrainedModel& model, std::span<const double> x,
                               std::size_t label_index, std::span<const double> mask,
                               ParameterGradients& grads) {
  if (grads.weights.size() != model.layers.size()) grads = zero_gradients(model);
  ForwardCache cache;
  const auto z = run_forward(model, normalize(model, x), mask, &cache);
  auto delta = softmax(z);
  delta.at(label_index) -= 1.0;
  run_backward(model, cache, mask, std::move(delta), &grads);
  return log_sum_exp(z) - z[label_index];
}

void apply_sgd_step(TrainedModel& model, const ParameterGradients& grads, double lr,
                    double weight_decay) {
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto w = model.layers[l].weights.data();
    const auto gw = grads.weights[l].data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      // Decoupled decay on weights only; biases are not decayed.
      w[i] = w[i] - lr * gw[i] - lr * weight_decay * w[i];
    }
    auto& b = model.layers[l].bias;
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * grads.bias[l][i];
  }
}

double mean_loss(const TrainedModel& model, const Dataset& data) {
  const auto labels = label_indices(model, data);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total += cross_entropy_loss(model, data.features.row(i), labels[i]);
  }
  return total / static_cast<double>(data.size());
}

std::size_t predict_index(const TrainedModel& model, std::span<const double> x) {
  const auto z = forward(model, x);
  return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
}

TrainedModel train(const ModelConfig& config, const Dataset& train_set, const Dataset& val_set,
                   const TrainSeeds& seeds) {
  config.validate();
  if (train_set.empty()) throw DataError("train: training set is empty");

  std::vector<ClassId> classes = train_set.labels;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  TrainedModel model = init_model(train_set.dims(), classes, config, seeds.init);
  model.seeds = seeds;

  // Per-dimension normalization over the training set (population std).
  const std::size_t n = train_set.size();
  const std::size_t d = train_set.dims();
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += train_set.features(i, j);
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = train_set.features(i, j) - mean;
      sq += dev * dev;
    }
    double sd = std::sqrt(sq / static_cast<double>(n));
    if (!(sd > 1e-12)) {
      sd = 1.0;
      ++model.clamped_dims;
    }
    model.norm_mean[j] = mean;
    model.norm_std[j] = sd;
  }

  const auto train_labels = label_indices(model, train_set);
  if (!val_set.empty()) label_indices(model, val_set);

  Rng shuffle_rng(seeds.shuffle);
  Rng dropout_rng(seeds.dropout);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> mask(model.feature_width(), 1.0);
  ParameterGradients grads = zero_gradients(model);

  std::vector<DenseLayer> best_layers = model.layers;
  std::optional<double> best_val;
  std::size_t streak = 0;

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    const double lr = lr_schedule(epoch, config.max_epochs, config.lr0);
    shuffle_rng.shuffle(std::span<std::size_t>(order));
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      clear(grads);
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        std::span<const double> active_mask;
        if (config.dropout_rate > 0.0) {
          fill_mask(dropout_rng, config.dropout_rate, mask);
          active_mask = mask;
        }
        epoch_loss +=
            cross_entropy_gradients(model, train_set.features.row(i), train_labels[i], active_mask,
                                    grads);
      }
      if (!std::isfinite(epoch_loss)) {
        throw TrainingDiverged(epoch, "training diverged (non-finite loss) in epoch " +
                                          std::to_string(epoch));
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (auto& w : grads.weights) {
        for (auto& v : w.data()) v *= inv;
      }
      for (auto& b : grads.bias) {
        for (auto& v : b) v *= inv;
      }
      apply_sgd_step(model, grads, lr, config.weight_decay);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(n);
    rec.learning_rate = lr;
    if (!val_set.empty()) {
      const double v = mean_loss(model, val_set);
      if (!std::isfinite(v)) {
        throw TrainingDiverged(epoch, "training diverged (non-finite validation loss) in epoch " +
                                          std::to_string(epoch));
      }
      rec.val_loss = v;
    }
    model.trace.push_back(rec);

    if (!rec.val_loss) {
      model.restored_epoch = epoch;
      continue;
    }
    if (!best_val || *rec.val_loss < *best_val) {
      best_val = rec.val_loss;
      best_layers = model.layers;
      model.restored_epoch = epoch;
      streak = 0;
    } else if (++streak > config.patience) {
      break;
    }
  }
  if (best_val) model.layers = std::move(best_layers);
  return model;
}

}  // namespace osim
