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

#include "vtf/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "vtf/errors.hpp"

namespace vtf {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Derivative of the activation expressed through pre-activation z and
// output a.
double activation_derivative(Activation act, double z, double a) {
  switch (act) {
    case Activation::kIdentity:
      return 1.0;
    case Activation::kSigmoid:
      return a * (1.0 - a);
    case Activation::kRelu:
      return z > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

struct ForwardTrace {
  std::vector<Matrix> pre;          // z for each layer
  std::vector<Matrix> activations;  // activations[0] is the input
};

ForwardTrace forward_trace(const LayeredModel& model, const Matrix& batch) {
  if (static_cast<std::size_t>(batch.cols()) != model.input_dim()) {
    throw ShapeError("forward: batch has " + std::to_string(batch.cols()) +
                     " columns but layer 0 expects " +
                     std::to_string(model.input_dim()));
  }
  ForwardTrace trace;
  trace.activations.reserve(model.num_layers() + 1);
  trace.pre.reserve(model.num_layers());
  trace.activations.push_back(batch);
  for (std::size_t k = 0; k < model.num_layers(); ++k) {
    const DenseLayer& layer = model.layer(k);
    const Matrix& in = trace.activations.back();
    if (static_cast<std::size_t>(in.cols()) != layer.in_dim()) {
      throw ShapeError("forward: layer " + std::to_string(k) + " expects " +
                       std::to_string(layer.in_dim()) + " inputs, got " +
                       std::to_string(in.cols()));
    }
    Matrix z = in * layer.weights;
    if (layer.biases) z.rowwise() += layer.biases->transpose();
    Matrix a = z.unaryExpr([&](double v) { return apply_activation(layer.activation, v); });
    trace.pre.push_back(std::move(z));
    trace.activations.push_back(std::move(a));
  }
  return trace;
}

Vector prediction_column(const Matrix& out, const char* where) {
  if (out.cols() != 1) {
    throw ShapeError(std::string(where) + ": model output has " +
                     std::to_string(out.cols()) + " columns; exactly 1 is supported");
  }
  return out.col(0);
}

// dE/dpred for the data term of the loss.
Vector loss_derivative(const Vector& pred, const Vector& target, LossKind kind) {
  const double n = static_cast<double>(pred.size());
  Vector d(pred.size());
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    if (kind == LossKind::kMse) {
      d(i) = (pred(i) - target(i)) / n;
    } else {
      const double p = pred(i);
      if (p <= kBceClamp || p >= 1.0 - kBceClamp) {
        d(i) = 0.0;  // clamped region is flat
      } else {
        d(i) = -(target(i) / p - (1.0 - target(i)) / (1.0 - p)) / n;
      }
    }
  }
  return d;
}

void check_target(const Matrix& x, const Vector& y, const char* where) {
  if (x.rows() != y.size()) {
    throw ShapeError(std::string(where) + ": " + std::to_string(x.rows()) +
                     " rows but target has " + std::to_string(y.size()) + " entries");
  }
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kIdentity:
      return "identity";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kRelu:
      return "relu";
  }
  return "identity";
}

std::string_view to_string(LossKind k) {
  return k == LossKind::kMse ? "mse" : "binary_crossentropy";
}

Activation activation_from_string(std::string_view s) {
  if (s == "identity" || s == "linear") return Activation::kIdentity;
  if (s == "sigmoid") return Activation::kSigmoid;
  if (s == "relu") return Activation::kRelu;
  throw ArgumentError("unknown activation '" + std::string(s) + "'");
}

LossKind loss_kind_from_string(std::string_view s) {
  if (s == "mse") return LossKind::kMse;
  if (s == "binary_crossentropy" || s == "bce") return LossKind::kBinaryCrossEntropy;
  throw ArgumentError("unknown loss kind '" + std::string(s) + "'");
}

std::size_t DenseLayer::parameter_count() const {
  return static_cast<std::size_t>(weights.size()) +
         (biases ? static_cast<std::size_t>(biases->size()) : 0);
}

LayeredModel::LayeredModel(std::size_t input_dim, LossKind loss_kind)
    : input_dim_(input_dim), loss_kind_(loss_kind) {
  if (input_dim == 0) throw ArgumentError("LayeredModel: input_dim must be >= 1");
}

void LayeredModel::add_layer(DenseLayer layer) {
  const std::size_t expected = layers_.empty() ? input_dim_ : layers_.back().out_dim();
  if (layer.in_dim() != expected) {
    throw ShapeError("layer " + std::to_string(layers_.size()) + " has in_dim " +
                     std::to_string(layer.in_dim()) + " but previous output is " +
                     std::to_string(expected));
  }
  if (layer.out_dim() == 0) {
    throw ShapeError("layer " + std::to_string(layers_.size()) + " has no outputs");
  }
  if (layer.biases && static_cast<std::size_t>(layer.biases->size()) != layer.out_dim()) {
    throw ShapeError("layer " + std::to_string(layers_.size()) + " bias length " +
                     std::to_string(layer.biases->size()) + " != out_dim " +
                     std::to_string(layer.out_dim()));
  }
  layers_.push_back(std::move(layer));
}

std::size_t LayeredModel::output_dim() const {
  return layers_.empty() ? input_dim_ : layers_.back().out_dim();
}

bool LayeredModel::any_trainable() const {
  return std::any_of(layers_.begin(), layers_.end(),
                     [](const DenseLayer& l) { return l.trainable; });
}

std::size_t LayeredModel::trainable_parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) {
    if (l.trainable) n += l.parameter_count();
  }
  return n;
}

bool operator==(const LayeredModel& a, const LayeredModel& b) {
  if (a.input_dim_ != b.input_dim_ || a.loss_kind_ != b.loss_kind_ ||
      a.layers_.size() != b.layers_.size()) {
    return false;
  }
  for (std::size_t k = 0; k < a.layers_.size(); ++k) {
    const auto& la = a.layers_[k];
    const auto& lb = b.layers_[k];
    if (la.activation != lb.activation || la.trainable != lb.trainable ||
        la.weights.rows() != lb.weights.rows() || la.weights.cols() != lb.weights.cols() ||
        la.weights != lb.weights || la.biases.has_value() != lb.biases.has_value()) {
      return false;
    }
    if (la.biases && *la.biases != *lb.biases) return false;
  }
  return true;
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ArgumentError("TrainConfig: epochs must be >= 1");
  if (batch_size < 1) throw ArgumentError("TrainConfig: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ArgumentError("TrainConfig: learning_rate must be > 0");
  if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0) || !(adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
    throw ArgumentError("TrainConfig: ADAM betas must lie in (0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw ArgumentError("TrainConfig: adam_epsilon must be > 0");
  if (!(l2_lambda >= 0.0)) throw ArgumentError("TrainConfig: l2_lambda must be >= 0");
}

double apply_activation(Activation a, double z) {
  switch (a) {
    case Activation::kIdentity:
      return z;
    case Activation::kSigmoid:
      return sigmoid(z);
    case Activation::kRelu:
      return z > 0.0 ? z : 0.0;
  }
  return z;
}

Matrix forward(const LayeredModel& model, const Matrix& batch) {
  return std::move(forward_trace(model, batch).activations.back());
}

double loss(const Vector& pred, const Vector& target, LossKind kind) {
  if (pred.size() == 0 || target.size() == 0) {
    throw ArgumentError("loss: empty prediction or target vector");
  }
  if (pred.size() != target.size()) {
    throw ShapeError("loss: prediction length " + std::to_string(pred.size()) +
                     " != target length " + std::to_string(target.size()));
  }
  const double n = static_cast<double>(pred.size());
  if (kind == LossKind::kMse) {
    return (pred - target).squaredNorm() / (2.0 * n);
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(pred(i), kBceClamp, 1.0 - kBceClamp);
    sum -= target(i) * std::log(p) + (1.0 - target(i)) * std::log(1.0 - p);
  }
  return sum / n;
}

double objective(const LayeredModel& model, DataRef data, double l2_lambda) {
  check_target(data.x, data.y, "objective");
  double value = loss(prediction_column(forward(model, data.x), "objective"), data.y,
                      model.loss_kind());
  if (l2_lambda > 0.0) {
    for (const auto& l : model.layers()) {
      if (l.trainable) value += l2_lambda * l.weights.squaredNorm();
    }
  }
  return value;
}

Gradients backward(const LayeredModel& model, DataRef data, double l2_lambda) {
  check_target(data.x, data.y, "backward");
  ForwardTrace trace = forward_trace(model, data.x);
  const Vector pred = prediction_column(trace.activations.back(), "backward");
  Matrix delta = loss_derivative(pred, data.y, model.loss_kind());

  Gradients grads;
  for (std::size_t idx = model.num_layers(); idx-- > 0;) {
    const DenseLayer& layer = model.layer(idx);
    const Matrix& z = trace.pre[idx];
    const Matrix& a = trace.activations[idx + 1];
    Matrix dz(z.rows(), z.cols());
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        dz(r, c) = delta(r, c) * activation_derivative(layer.activation, z(r, c), a(r, c));
      }
    }
    if (layer.trainable) {
      LayerGradient g;
      g.layer_index = idx;
      g.weights = trace.activations[idx].transpose() * dz;
      if (l2_lambda > 0.0) g.weights += 2.0 * l2_lambda * layer.weights;
      if (layer.biases) g.biases = dz.colwise().sum().transpose();
      if (!g.weights.allFinite() || (g.biases && !g.biases->allFinite())) {
        throw NumericalError("backward: non-finite gradient in layer " + std::to_string(idx));
      }
      grads.layers.push_back(std::move(g));
    }
    delta = dz * layer.weights.transpose();
  }
  std::reverse(grads.layers.begin(), grads.layers.end());
  if (!delta.allFinite()) {
    throw NumericalError("backward: non-finite gradient flowing into the input");
  }
  grads.input = std::move(delta);
  return grads;
}

Vector flatten_trainable(const LayeredModel& model) {
  Vector flat(static_cast<Eigen::Index>(model.trainable_parameter_count()));
  Eigen::Index pos = 0;
  for (const auto& l : model.layers()) {
    if (!l.trainable) continue;
    flat.segment(pos, l.weights.size()) = l.weights.reshaped();
    pos += l.weights.size();
    if (l.biases) {
      flat.segment(pos, l.biases->size()) = *l.biases;
      pos += l.biases->size();
    }
  }
  return flat;
}

void assign_trainable(LayeredModel& model, const Vector& params) {
  if (static_cast<std::size_t>(params.size()) != model.trainable_parameter_count()) {
    throw ShapeError("assign_trainable: got " + std::to_string(params.size()) +
                     " values for " + std::to_string(model.trainable_parameter_count()) +
                     " trainable parameters");
  }
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < model.num_layers(); ++k) {
    DenseLayer& l = model.mutable_layer(k);
    if (!l.trainable) continue;
    l.weights.reshaped() = params.segment(pos, l.weights.size());
    pos += l.weights.size();
    if (l.biases) {
      *l.biases = params.segment(pos, l.biases->size());
      pos += l.biases->size();
    }
  }
}

Vector flatten(const Gradients& grads) {
  Eigen::Index total = 0;
  for (const auto& g : grads.layers) {
    total += g.weights.size() + (g.biases ? g.biases->size() : 0);
  }
  Vector flat(total);
  Eigen::Index pos = 0;
  for (const auto& g : grads.layers) {
    flat.segment(pos, g.weights.size()) = g.weights.reshaped();
    pos += g.weights.size();
    if (g.biases) {
      flat.segment(pos, g.biases->size()) = *g.biases;
      pos += g.biases->size();
    }
  }
  return flat;
}

void adam_step(Eigen::Ref<Vector> params, const Vector& grads, AdamState& state,
               const TrainConfig& config) {
  if (params.size() != grads.size()) {
    throw ArgumentError("adam_step: " + std::to_string(params.size()) + " parameters but " +
                        std::to_string(grads.size()) + " gradients");
  }
  if (state.step < 0) throw ArgumentError("adam_step: negative step counter");
  if (state.step == 0 && state.first_moment.size() == 0 && state.second_moment.size() == 0) {
    state.first_moment = Vector::Zero(params.size());
    state.second_moment = Vector::Zero(params.size());
  }
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size()) {
    throw ArgumentError("adam_step: optimizer state shape does not match parameters");
  }
  const double b1 = config.adam_beta1;
  const double b2 = config.adam_beta2;
  state.step += 1;
  state.first_moment = b1 * state.first_moment + (1.0 - b1) * grads;
  state.second_moment = b2 * state.second_moment + (1.0 - b2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double m_hat = state.first_moment(i) / c1;
    const double v_hat = state.second_moment(i) / c2;
    params(i) -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
  }
}

std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed,
                                           std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch), static_cast<std::uint32_t>(epoch >> 32),
                    0x5eedu};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

TrainHistory train(LayeredModel& model, DataRef train_set, std::optional<DataRef> val_set,
                   const TrainConfig& config) {
  config.validate();
  check_target(train_set.x, train_set.y, "train");
  if (train_set.x.rows() == 0) throw ArgumentError("train: empty training set");
  if (static_cast<std::size_t>(train_set.x.cols()) != model.input_dim()) {
    throw ShapeError("train: dataset has " + std::to_string(train_set.x.cols()) +
                     " features but model expects " + std::to_string(model.input_dim()));
  }
  if (val_set) check_target(val_set->x, val_set->y, "train (validation)");

  TrainHistory history;
  const auto n = static_cast<std::size_t>(train_set.x.rows());
  AdamState state;
  Vector params = flatten_trainable(model);
  Matrix bx;
  Vector by;
  long last_finite = -1;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (params.size() > 0) {
      const auto order = epoch_permutation(n, config.seed, epoch);
      for (std::size_t start = 0; start < n; start += config.batch_size) {
        const std::size_t stop = std::min(n, start + config.batch_size);
        const auto rows = static_cast<Eigen::Index>(stop - start);
        bx.resize(rows, train_set.x.cols());
        by.resize(rows);
        for (std::size_t i = start; i < stop; ++i) {
          const auto r = static_cast<Eigen::Index>(i - start);
          const auto src = static_cast<Eigen::Index>(order[i]);
          bx.row(r) = train_set.x.row(src);
          by(r) = train_set.y(src);
        }
        Gradients g;
        try {
          g = backward(model, DataRef{bx, by}, config.l2_lambda);
        } catch (const NumericalError& e) {
          throw TrainingError(std::string("training diverged: ") + e.what(), last_finite);
        }
        adam_step(params, flatten(g), state, config);
        if (!params.allFinite()) {
          throw TrainingError("training diverged: non-finite parameters at epoch " +
                                  std::to_string(epoch),
                              last_finite);
        }
        assign_trainable(model, params);
      }
    }
    const double train_loss =
        loss(prediction_column(forward(model, train_set.x), "train"), train_set.y,
             model.loss_kind());
    if (!std::isfinite(train_loss)) {
      throw TrainingError("training diverged: loss is not finite at epoch " +
                              std::to_string(epoch),
                          last_finite);
    }
    history.train_loss.push_back(train_loss);
    if (val_set) {
      history.val_loss.push_back(
          loss(prediction_column(forward(model, val_set->x), "train"), val_set->y,
               model.loss_kind()));
    }
    last_finite = static_cast<long>(epoch);
  }
  history.final_loss = history.train_loss.back();
  return history;
}

LayeredModel freeze(LayeredModel model) {
  for (std::size_t k = 0; k < model.num_layers(); ++k) {
    model.mutable_layer(k).trainable = false;
  }
  return model;
}

void initialize_glorot(LayeredModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < model.num_layers(); ++k) {
    DenseLayer& l = model.mutable_layer(k);
    const double limit =
        std::sqrt(6.0 / static_cast<double>(l.in_dim() + l.out_dim()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index c = 0; c < l.weights.cols(); ++c) {
      for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
        l.weights(r, c) = dist(rng);
      }
    }
    if (l.biases) l.biases->setZero();
  }
}

std::string_view to_string(ModelFamily f) {
  switch (f) {
    case ModelFamily::kLinear:
      return "linear";
    case ModelFamily::kLogistic:
      return "logistic";
    case ModelFamily::kMlp:
      return "mlp";
  }
  return "linear";
}

ModelFamily model_family_from_string(std::string_view s) {
  if (s == "linear") return ModelFamily::kLinear;
  if (s == "logistic") return ModelFamily::kLogistic;
  if (s == "mlp") return ModelFamily::kMlp;
  throw ArgumentError("unknown model family '" + std::string(s) + "'");
}

LayeredModel make_model(ModelFamily family, std::size_t input_dim,
                        const std::vector<std::size_t>& hidden, bool classification,
                        std::uint64_t seed) {
  if (family == ModelFamily::kLogistic) classification = true;
  if (family == ModelFamily::kLinear) classification = false;
  LayeredModel model(input_dim,
                     classification ? LossKind::kBinaryCrossEntropy : LossKind::kMse);
  std::size_t in = input_dim;
  if (family == ModelFamily::kMlp) {
    for (std::size_t width : hidden) {
      if (width == 0) throw ArgumentError("make_model: hidden width must be >= 1");
      model.add_layer(DenseLayer{Matrix::Zero(in, width), Vector::Zero(width),
                                 Activation::kRelu, true});
      in = width;
    }
  }
  model.add_layer(DenseLayer{Matrix::Zero(in, 1), Vector::Zero(1),
                             classification ? Activation::kSigmoid : Activation::kIdentity,
                             true});
  initialize_glorot(model, seed);
  return model;
}

}  // namespace vtf
