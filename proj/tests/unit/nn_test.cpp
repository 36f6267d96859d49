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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vtf/dataset.hpp"
#include "vtf/errors.hpp"
#include "vtf/model_io.hpp"
#include "vtf/nn.hpp"

namespace vtf {
namespace {

LayeredModel two_layer(std::uint64_t seed) {
  LayeredModel m(3, LossKind::kMse);
  m.add_layer({Matrix::Zero(3, 4), Vector::Zero(4), Activation::kSigmoid, true});
  m.add_layer({Matrix::Zero(4, 1), Vector::Zero(1), Activation::kIdentity, true});
  initialize_glorot(m, seed);
  std::mt19937_64 rng(seed + 1);
  *m.mutable_layer(0).biases = testing::random_matrix(4, 1, rng).col(0);
  *m.mutable_layer(1).biases = testing::random_matrix(1, 1, rng).col(0);
  return m;
}

TEST(Forward, IdentityLayerPassesInputThrough) {
  LayeredModel m(3, LossKind::kMse);
  m.add_layer({Matrix::Identity(3, 3), Vector::Zero(3), Activation::kIdentity, true});
  Matrix x(1, 3);
  x << 1, 2, 3;
  EXPECT_EQ(forward(m, x), x);
}

TEST(Forward, SigmoidOfZeroIsHalf) {
  LayeredModel m(2, LossKind::kBinaryCrossEntropy);
  m.add_layer({Matrix::Zero(2, 3), Vector::Zero(3), Activation::kSigmoid, true});
  Matrix x(2, 2);
  x << 5, -7, 0.3, 100;
  const Matrix out = forward(m, x);
  for (Eigen::Index i = 0; i < out.size(); ++i) EXPECT_DOUBLE_EQ(out(i), 0.5);
}

TEST(Forward, MatchesHandEvaluatedChain) {
  const LayeredModel m = two_layer(11);
  std::mt19937_64 rng(5);
  const Matrix x = testing::random_matrix(6, 3, rng);
  const Matrix out = forward(m, x);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const auto expected = testing::hand_forward(m, {x(r, 0), x(r, 1), x(r, 2)});
    EXPECT_NEAR(out(r, 0), expected[0], 1e-12);
  }
}

TEST(Forward, RejectsWrongWidth) {
  const LayeredModel m = two_layer(1);
  EXPECT_THROW(forward(m, Matrix::Zero(2, 4)), ShapeError);
}

TEST(LayeredModel, RejectsLayerThatDoesNotChain) {
  LayeredModel m(3, LossKind::kMse);
  m.add_layer({Matrix::Zero(3, 2), std::nullopt, Activation::kIdentity, true});
  EXPECT_THROW(m.add_layer({Matrix::Zero(3, 1), std::nullopt, Activation::kIdentity, true}),
               ShapeError);
}

TEST(Loss, ZeroWhenPredictionsMatch) {
  Vector p(3);
  p << 0.2, 0.7, 0.1;
  EXPECT_EQ(loss(p, p, LossKind::kMse), 0.0);
}

TEST(Loss, MseUsesHalfMeanConvention) {
  Vector p(2), t(2);
  p << 1, 1;
  t << 0, 0;
  EXPECT_DOUBLE_EQ(loss(p, t, LossKind::kMse), 0.25 * (1.0 + 1.0));
}

TEST(Loss, BinaryCrossEntropyClosedForm) {
  Vector p(1), t(1);
  p << 0.5;
  t << 1.0;
  EXPECT_NEAR(loss(p, t, LossKind::kBinaryCrossEntropy), 0.693147, 1e-6);
}

TEST(Loss, BinaryCrossEntropyClampsSaturatedPredictions) {
  Vector p(1), t(1);
  p << 0.0;
  t << 1.0;
  EXPECT_DOUBLE_EQ(loss(p, t, LossKind::kBinaryCrossEntropy), -std::log(kBceClamp));
}

TEST(Backward, FrozenModelHasNoParameterGradients) {
  const LayeredModel m = freeze(two_layer(2));
  std::mt19937_64 rng(1);
  const Matrix x = testing::random_matrix(4, 3, rng);
  const Vector y = testing::random_matrix(4, 1, rng).col(0);
  const Gradients g = backward(m, DataRef{x, y});
  EXPECT_TRUE(g.layers.empty());
  EXPECT_EQ(g.input.rows(), 4);
  EXPECT_EQ(g.input.cols(), 3);
}

TEST(Backward, SingleIdentityLayerClosedForm) {
  LayeredModel m(2, LossKind::kMse);
  Matrix w(2, 1);
  w << 0.5, -1.5;
  m.add_layer({w, std::nullopt, Activation::kIdentity, true});
  Matrix x(1, 2);
  x << 2.0, 3.0;
  Vector y(1);
  y << 1.0;
  const double yhat = 0.5 * 2.0 - 1.5 * 3.0;
  const Gradients g = backward(m, DataRef{x, y});
  ASSERT_EQ(g.layers.size(), 1u);
  EXPECT_NEAR(g.layers[0].weights(0, 0), (yhat - 1.0) * 2.0, 1e-12);
  EXPECT_NEAR(g.layers[0].weights(1, 0), (yhat - 1.0) * 3.0, 1e-12);
}

TEST(Backward, MatchesCentralDifferencesWithPenalty) {
  LayeredModel m = two_layer(7);
  std::mt19937_64 rng(9);
  const Matrix x = testing::random_matrix(8, 3, rng);
  const Vector y = testing::random_matrix(8, 1, rng).col(0);
  const double l2 = 0.01;
  const Vector analytic = flatten(backward(m, DataRef{x, y}, l2));
  LayeredModel probe = m;
  const Vector numeric = testing::central_differences(
      [&](const Vector& p) {
        assign_trainable(probe, p);
        return objective(probe, DataRef{x, y}, l2);
      },
      flatten_trainable(m), 1e-6);
  ASSERT_EQ(analytic.size(), numeric.size());
  for (Eigen::Index k = 0; k < analytic.size(); ++k) {
    EXPECT_NEAR(analytic(k), numeric(k), 1e-7 * std::max(1.0, std::abs(numeric(k)))) << k;
  }
}

TEST(Backward, InputGradientMatchesCentralDifferences) {
  const LayeredModel m = two_layer(3);
  std::mt19937_64 rng(4);
  const Matrix x = testing::random_matrix(3, 3, rng);
  const Vector y = testing::random_matrix(3, 1, rng).col(0);
  const Matrix analytic = backward(m, DataRef{x, y}).input;
  const Vector flat_x = Eigen::Map<const Vector>(x.data(), x.size());
  const Vector numeric = testing::central_differences(
      [&](const Vector& v) {
        const Matrix probe = Eigen::Map<const Matrix>(v.data(), x.rows(), x.cols());
        return loss(forward(m, probe).col(0), y, LossKind::kMse);
      },
      flat_x, 1e-6);
  for (Eigen::Index k = 0; k < x.size(); ++k) EXPECT_NEAR(analytic(k), numeric(k), 1e-8);
}

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
  Vector p(3);
  p << 1, -2, 3;
  const Vector start = p;
  AdamState s;
  TrainConfig cfg;
  for (int i = 0; i < 5; ++i) adam_step(p, Vector::Zero(3), s, cfg);
  EXPECT_EQ(p, start);
}

TEST(Adam, FirstStepClosedForm) {
  Vector p = Vector::Zero(1);
  AdamState s;
  TrainConfig cfg;
  adam_step(p, Vector::Ones(1), s, cfg);
  EXPECT_NEAR(p(0), -0.001 * (1.0 / (1.0 + cfg.adam_epsilon)), 1e-15);
}

TEST(Adam, QuadraticShrinksAgainstScalarSimulation) {
  TrainConfig cfg;
  Vector p = Vector::Ones(1);
  AdamState s;
  // Scalar re-implementation of the update rule.
  double theta = 1.0, m = 0.0, v = 0.0;
  double prev = 1.0;
  for (int t = 1; t <= 100; ++t) {
    adam_step(p, Vector::Constant(1, 2.0 * p(0)), s, cfg);
    const double g = 2.0 * theta;
    m = cfg.adam_beta1 * m + (1 - cfg.adam_beta1) * g;
    v = cfg.adam_beta2 * v + (1 - cfg.adam_beta2) * g * g;
    const double mh = m / (1 - std::pow(cfg.adam_beta1, t));
    const double vh = v / (1 - std::pow(cfg.adam_beta2, t));
    theta -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.adam_epsilon);
    EXPECT_NEAR(p(0), theta, 1e-12);
    EXPECT_LT(std::abs(p(0)), prev);
    prev = std::abs(p(0));
  }
  EXPECT_LT(std::abs(p(0)), 1.0);
}

TEST(Adam, ShapeMismatchIsRejected) {
  Vector p = Vector::Zero(2);
  AdamState s;
  TrainConfig cfg;
  adam_step(p, Vector::Ones(2), s, cfg);
  Vector q = Vector::Zero(3);
  EXPECT_THROW(adam_step(q, Vector::Ones(3), s, cfg), ArgumentError);
}

TEST(EpochPermutation, DeterministicPermutation) {
  const auto a = epoch_permutation(50, 3, 4);
  EXPECT_EQ(a, epoch_permutation(50, 3, 4));
  EXPECT_NE(a, epoch_permutation(50, 3, 5));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Train, FitsNoiselessLinearData) {
  Vector c(3);
  c << 0.1, 0.3, 0.6;
  const Dataset d = synth_linear(500, c, 0.0, 3);
  LayeredModel m = make_model(ModelFamily::kLinear, 3, {}, false, 3);
  TrainConfig cfg;
  cfg.epochs = 300;
  const TrainHistory h = train(m, d.ref(), std::nullopt, cfg);
  const Vector pred = forward(m, d.features).col(0);
  const double mse = (pred - d.target).squaredNorm() / static_cast<double>(pred.size());
  EXPECT_LT(mse, 1e-6);
  EXPECT_EQ(h.train_loss.size(), 300u);
}

TEST(Train, SameSeedIsBitIdentical) {
  Vector c(2);
  c << 1.0, -2.0;
  const Dataset d = synth_linear(40, c, 0.1, 8);
  TrainConfig cfg;
  cfg.epochs = 20;
  LayeredModel a = make_model(ModelFamily::kMlp, 2, {4}, false, 5);
  LayeredModel b = make_model(ModelFamily::kMlp, 2, {4}, false, 5);
  train(a, d.ref(), std::nullopt, cfg);
  train(b, d.ref(), std::nullopt, cfg);
  EXPECT_EQ(model_to_json(a).dump(), model_to_json(b).dump());
}

TEST(Train, RejectsZeroEpochs) {
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(cfg.validate(), ArgumentError);
}

TEST(Train, ReportsDivergence) {
  LayeredModel m = make_model(ModelFamily::kLinear, 1, {}, false, 1);
  Matrix x = Matrix::Constant(4, 1, 1e200);
  Vector y = Vector::Constant(4, -1e200);
  TrainConfig cfg;
  cfg.epochs = 3;
  EXPECT_THROW(train(m, DataRef{x, y}, std::nullopt, cfg), TrainingError);
}

TEST(Freeze, TrainingLeavesFrozenWeightsUntouched) {
  Vector c(2);
  c << 1.0, 0.5;
  const Dataset d = synth_linear(20, c, 0.0, 1);
  LayeredModel m = freeze(make_model(ModelFamily::kMlp, 2, {3}, false, 2));
  const std::string before = model_to_json(m).dump();
  TrainConfig cfg;
  cfg.epochs = 10;
  train(m, d.ref(), std::nullopt, cfg);
  EXPECT_EQ(model_to_json(m).dump(), before);
  EXPECT_EQ(freeze(freeze(m)), freeze(m));
}

TEST(Freeze, GradientSkipsFrozenLayers) {
  LayeredModel m = two_layer(4);
  m.mutable_layer(0).trainable = false;
  std::mt19937_64 rng(2);
  const Matrix x = testing::random_matrix(3, 3, rng);
  const Vector y = Vector::Zero(3);
  const Gradients g = backward(m, DataRef{x, y});
  ASSERT_EQ(g.layers.size(), 1u);
  EXPECT_EQ(g.layers[0].layer_index, 1u);
}

TEST(ModelIo, JsonRoundTrip) {
  const LayeredModel m = make_model(ModelFamily::kMlp, 3, {5, 2}, true, 4);
  EXPECT_EQ(model_from_json(model_to_json(m)), m);
}

TEST(ModelIo, MissingKeyIsSchemaError) {
  auto doc = model_to_json(make_model(ModelFamily::kLinear, 2, {}, false, 1));
  doc.erase("layers");
  EXPECT_THROW(model_from_json(doc), SchemaError);
}

}  // namespace
}  // namespace vtf
