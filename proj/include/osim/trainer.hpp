#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osim/datasets.hpp"
#include "osim/matrix.hpp"

namespace osim {

/// Hyperparameters of the feed-forward classifier and its training loop.
struct ModelConfig {
  /// Widths of the hidden ReLU layers; input and output widths come from the data.
  std::vector<std::size_t> hidden_widths = {64, 64};
  /// Inverted-dropout rate on the input of the final (logit) layer.
  double dropout_rate = 0.2;
  double weight_decay = 5e-4;
  double lr0 = 0.01;
  std::size_t batch_size = 128;
  std::size_t max_epochs = 200;
  std::size_t patience = 10;

  void validate() const;
};

struct TrainSeeds {
  std::uint64_t init = 0;
  std::uint64_t shuffle = 0;
  std::uint64_t dropout = 0;
};

/// Affine layer: out = weights * in + bias, weights is (out x in).
struct DenseLayer {
  Matrix weights;
  std::vector<double> bias;

  std::size_t in_width() const noexcept { return weights.cols(); }
  std::size_t out_width() const noexcept { return weights.rows(); }
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  std::optional<double> val_loss;
  double learning_rate = 0.0;
};

struct TrainedModel {
  ModelConfig config;
  TrainSeeds seeds;
  /// Hidden layers use ReLU; the last layer emits logits.
  std::vector<DenseLayer> layers;
  /// Original class ID of each logit index.
  std::vector<ClassId> class_ids;
  std::vector<double> norm_mean;
  std::vector<double> norm_std;
  /// Dimensions whose training std was zero and was replaced by 1.
  std::size_t clamped_dims = 0;
  std::vector<EpochRecord> trace;
  std::size_t restored_epoch = 0;

  std::size_t input_dims() const noexcept { return norm_mean.size(); }
  std::size_t num_classes() const noexcept { return class_ids.size(); }
  double dropout_rate() const noexcept { return config.dropout_rate; }
  /// Width of the vector dropout acts on (input of the final layer).
  std::size_t feature_width() const noexcept { return layers.back().in_width(); }
  /// Logit index of a class ID, or nullopt.
  std::optional<std::size_t> class_index(ClassId c) const noexcept;
};

using LogitVector = std::vector<double>;

/// Numerically stable softmax (max subtraction).
std::vector<double> softmax(std::span<const double> z);

/// Cosine annealing: lr0 * (1 + cos(pi * epoch / max_epochs)) / 2.
double lr_schedule(std::size_t epoch, std::size_t max_epochs, double lr0);

/// Randomly initialized network with identity normalization. Weights and
/// biases of each layer are U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
TrainedModel init_model(std::size_t input_dims, std::vector<ClassId> class_ids,
                        const ModelConfig& config, std::uint64_t init_seed);

/// Inverted-dropout mask for one forward pass: each entry is 0 or 1/(1-rate).
std::vector<double> draw_dropout_mask(std::size_t width, double rate, std::uint64_t seed);

/// Eval-mode logits of a raw (un-normalized) input.
LogitVector forward(const TrainedModel& model, std::span<const double> x);
/// Train-mode logits: dropout mask drawn from `dropout_seed`.
LogitVector forward(const TrainedModel& model, std::span<const double> x,
                    std::uint64_t dropout_seed);
/// Logits with an explicit dropout mask (empty span means no dropout).
LogitVector forward_with_mask(const TrainedModel& model, std::span<const double> x,
                              std::span<const double> mask);

/// Gradient of softmax(f(x) / temperature)[class_index] with respect to raw x
/// (eval mode, chain rule through the input normalization).
std::vector<double> input_gradient(const TrainedModel& model, std::span<const double> x,
                                   std::size_t class_index, double temperature = 1.0);

/// Per-layer parameter gradients, shaped like TrainedModel::layers.
struct ParameterGradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> bias;
};

/// Cross-entropy -log softmax(z)[label_index] for one sample.
double cross_entropy_loss(const TrainedModel& model, std::span<const double> x,
                          std::size_t label_index, std::span<const double> mask = {});

/// Cross-entropy and its gradient w.r.t. all weights and biases for one sample.
double cross_entropy_gradients(const TrainedModel& model, std::span<const double> x,
                               std::size_t label_index, std::span<const double> mask,
                               ParameterGradients& grads);

/// params -= lr * grads; weights additionally -= lr * weight_decay * weights.
void apply_sgd_step(TrainedModel& model, const ParameterGradients& grads, double lr,
                    double weight_decay);

/// Mini-batch SGD with cosine-annealed learning rate and early stopping on the
/// in-distribution validation loss. Labels of `train_set` define the classes;
/// `val_set` may be empty, in which case all max_epochs run.
TrainedModel train(const ModelConfig& config, const Dataset& train_set, const Dataset& val_set,
                   const TrainSeeds& seeds);

/// Mean eval-mode cross-entropy over a dataset whose labels are model classes.
double mean_loss(const TrainedModel& model, const Dataset& data);

/// argmax of the eval-mode logits (lowest index wins ties).
std::size_t predict_index(const TrainedModel& model, std::span<const double> x);

}  // namespace osim
