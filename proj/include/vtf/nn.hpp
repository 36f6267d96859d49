/*
 * Copyright 2026 The vtf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Minimal dense feedforward engine: layers, activations, losses, analytic
// gradients and ADAM. Samples are rows; a model with input_dim d consumes an
// n x d matrix and produces an n x out matrix.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace vtf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { kIdentity, kSigmoid, kRelu };
enum class LossKind { kMse, kBinaryCrossEntropy };

std::string_view to_string(Activation a);
std::string_view to_string(LossKind k);
Activation activation_from_string(std::string_view s);
LossKind loss_kind_from_string(std::string_view s);

// Lower clamp applied to predictions before taking logs in the BCE loss;
// the upper clamp is 1 - kBceClamp.
inline constexpr double kBceClamp = 1e-12;

struct DenseLayer {
  Matrix weights;                // in_dim x out_dim
  std::optional<Vector> biases;  // out_dim, or absent
  Activation activation = Activation::kIdentity;
  bool trainable = true;

  std::size_t in_dim() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weights.cols()); }
  // Number of scalars this layer contributes to the flat parameter vector
  // when trainable.
  std::size_t parameter_count() const;
};

// An ordered chain of dense layers. Adjacent dimensions are checked on every
// insertion so a constructed model always chains.
class LayeredModel {
 public:
  LayeredModel() = default;
  LayeredModel(std::size_t input_dim, LossKind loss_kind);

  // Throws ShapeError when layer.in_dim() does not match the current output.
  void add_layer(DenseLayer layer);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const;
  LossKind loss_kind() const { return loss_kind_; }
  std::size_t num_layers() const { return layers_.size(); }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  const DenseLayer& layer(std::size_t k) const { return layers_.at(k); }
  // Mutable access keeps shapes fixed: callers may edit values and flags.
  DenseLayer& mutable_layer(std::size_t k) { return layers_.at(k); }

  bool any_trainable() const;
  std::size_t trainable_parameter_count() const;

  friend bool operator==(const LayeredModel& a, const LayeredModel& b);

 private:
  std::size_t input_dim_ = 0;
  LossKind loss_kind_ = LossKind::kMse;
  std::vector<DenseLayer> layers_;
};

struct TrainConfig {
  std::size_t epochs = 1000;
  std::size_t batch_size = 10;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 3;
  double l2_lambda = 0.0;

  // Throws ArgumentError on a violated invariant.
  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;  // empty when no validation data was given
  double final_loss = 0.0;
};

// Non-owning pair of features and target.
struct DataRef {
  const Matrix& x;
  const Vector& y;
};

double apply_activation(Activation a, double z);

Matrix forward(const LayeredModel& model, const Matrix& batch);

// MSE follows the 1/(2N) convention; BCE is the mean negative
// log-likelihood with predictions clamped to [kBceClamp, 1 - kBceClamp].
double loss(const Vector& pred, const Vector& target, LossKind kind);

// loss() plus l2_lambda times the squared norm of every trainable weight
// matrix (biases are not penalized).
double objective(const LayeredModel& model, DataRef data, double l2_lambda);

struct LayerGradient {
  std::size_t layer_index = 0;
  Matrix weights;
  std::optional<Vector> biases;
};

struct Gradients {
  // One entry per trainable layer, in layer order.
  std::vector<LayerGradient> layers;
  // dE/dX for the input batch. Always populated, even for frozen models,
  // so callers can chain gradients into a preceding (mask) layer.
  Matrix input;
};

// Gradient of objective(model, data, l2_lambda). Throws NumericalError naming
// the layer when a non-finite gradient appears.
Gradients backward(const LayeredModel& model, DataRef data, double l2_lambda = 0.0);

// Flat views over trainable parameters; the order matches Gradients.
Vector flatten_trainable(const LayeredModel& model);
void assign_trainable(LayeredModel& model, const Vector& params);
Vector flatten(const Gradients& grads);

struct AdamState {
  std::int64_t step = 0;
  Vector first_moment;
  Vector second_moment;
};

// One ADAM update with bias correction. An empty state is sized on first use.
void adam_step(Eigen::Ref<Vector> params, const Vector& grads, AdamState& state,
               const TrainConfig& config);

// Row order for one epoch, a pure function of (seed, epoch).
std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed,
                                           std::size_t epoch);

// Mini-batch ADAM. Frozen parameters are never written. Throws TrainingError
// if the loss or any parameter becomes non-finite.
TrainHistory train(LayeredModel& model, DataRef train_set,
                   std::optional<DataRef> val_set, const TrainConfig& config);

// Clears the trainable flag on every layer.
LayeredModel freeze(LayeredModel model);

// Glorot-uniform weights and zero biases for every layer.
void initialize_glorot(LayeredModel& model, std::uint64_t seed);

enum class ModelFamily { kLinear, kLogistic, kMlp };
std::string_view to_string(ModelFamily f);
ModelFamily model_family_from_string(std::string_view s);

// linear: one dense d->1 identity layer with MSE.
// logistic: one dense d->1 sigmoid layer with BCE.
// mlp: ReLU hidden layers of the given widths, then a d->1 output that is
// identity/MSE or sigmoid/BCE depending on `classification`.
LayeredModel make_model(ModelFamily family, std::size_t input_dim,
                        const std::vector<std::size_t>& hidden, bool classification,
                        std::uint64_t seed);

}  // namespace vtf
