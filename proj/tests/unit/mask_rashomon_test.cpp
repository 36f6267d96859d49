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
#include "vtf/mask_model.hpp"
#include "vtf/model_io.hpp"
#include "vtf/rashomon.hpp"

namespace vtf {
namespace {

struct Fixture {
  Dataset data;
  LayeredModel base;
};

Fixture trained_linear(std::size_t n, double noise, std::uint64_t seed,
                       std::size_t epochs = 300) {
  Vector c(3);
  c << 0.1, 0.3, 0.6;
  Fixture f{synth_linear(n, c, noise, seed), make_model(ModelFamily::kLinear, 3, {}, false, 3)};
  TrainConfig cfg;
  cfg.epochs = epochs;
  train(f.base, f.data.ref(), std::nullopt, cfg);
  f.base = freeze(f.base);
  return f;
}

TEST(FeatureModel, MaskDrawnInsideInitBand) {
  const Fixture f = trained_linear(50, 0.0, 1);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FeatureModel fm = build_feature_model(f.base, seed);
    ASSERT_EQ(fm.num_features(), 3u);
    EXPECT_LT(fm.mask.weights.cwiseAbs().maxCoeff(), kMaskInitBound);
  }
}

TEST(FeatureModel, SameSeedSameMaskAndBaseCopied) {
  const Fixture f = trained_linear(50, 0.0, 1);
  const FeatureModel a = build_feature_model(f.base, 4);
  const FeatureModel b = build_feature_model(f.base, 4);
  EXPECT_EQ(a.mask.weights, b.mask.weights);
  EXPECT_EQ(model_to_json(a.base).dump(), model_to_json(f.base).dump());
  EXPECT_FALSE(a.base.any_trainable());
}

TEST(FeatureModel, UntrainedBaseIsRejected) {
  LayeredModel zero(2, LossKind::kMse);
  zero.add_layer({Matrix::Zero(2, 1), Vector::Zero(1), Activation::kIdentity, true});
  EXPECT_THROW(build_feature_model(zero, 1), ArgumentError);
  EXPECT_THROW(build_feature_model(LayeredModel(2, LossKind::kMse), 1), ArgumentError);
}

TEST(ApplyMask, Examples) {
  Matrix x(1, 2);
  x << 3, 8;
  Vector m(2);
  m << 2, 0.5;
  Matrix expected(1, 2);
  expected << 6, 4;
  EXPECT_EQ(apply_mask(m, x), expected);
  EXPECT_EQ(apply_mask(Vector::Ones(2), x), x);
  EXPECT_EQ(apply_mask(Vector::Zero(2), x), Matrix::Zero(1, 2));
  EXPECT_THROW(apply_mask(Vector::Ones(3), x), ShapeError);
}

TEST(FeatureModel, ForwardEqualsBaseOnMaskedInput) {
  const Fixture f = trained_linear(30, 0.1, 2);
  const FeatureModel fm = build_feature_model(f.base, 3);
  EXPECT_EQ(forward(fm, f.data.features),
            forward(f.base, apply_mask(fm.mask.weights, f.data.features)));
  EXPECT_EQ(mask_weights(fm), fm.mask.weights);
}

TEST(MaskGradient, MatchesCentralDifferences) {
  LayeredModel base = make_model(ModelFamily::kMlp, 3, {5}, false, 6);
  std::mt19937_64 rng(6);
  const Matrix x = testing::random_matrix(12, 3, rng);
  const Vector y = testing::random_matrix(12, 1, rng).col(0);
  base = freeze(base);
  FeatureModel fm = build_feature_model(base, 1);
  fm.mask.weights << 0.7, -0.4, 1.3;
  const double l2 = 0.05;
  const Vector analytic = mask_gradient(fm, DataRef{x, y}, l2);
  const Vector numeric = testing::central_differences(
      [&](const Vector& m) {
        FeatureModel probe = fm;
        probe.mask.weights = m;
        return feature_loss(probe, DataRef{x, y}) + l2 * m.squaredNorm();
      },
      fm.mask.weights, 1e-6);
  for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(analytic(j), numeric(j), 1e-8);
}

TEST(TrainMask, OneEpochMovesMaskAndKeepsBase) {
  const Fixture f = trained_linear(40, 0.0, 3);
  FeatureModel fm = build_feature_model(f.base, 2);
  const Vector before = fm.mask.weights;
  const std::string base_before = model_to_json(fm.base).dump();
  TrainConfig cfg;
  cfg.epochs = 1;
  train_mask(fm, f.data.ref(), cfg, {});
  EXPECT_NE(fm.mask.weights, before);
  EXPECT_EQ(model_to_json(fm.base).dump(), base_before);
}

TEST(TrainMask, StopPredicateEndsTraining) {
  const Fixture f = trained_linear(40, 0.0, 3);
  FeatureModel fm = build_feature_model(f.base, 2);
  TrainConfig cfg;
  cfg.epochs = 50;
  const MaskTrainResult r =
      train_mask(fm, f.data.ref(), cfg, [](std::size_t epoch, double) { return epoch == 2; });
  EXPECT_EQ(r.epochs_used, 3u);
  EXPECT_TRUE(r.stopped_early);
}

TEST(InRashomon, BoundaryCases) {
  EXPECT_TRUE(in_rashomon(0.5, 0.5, 0.0));
  EXPECT_FALSE(in_rashomon(0.51, 0.5, 0.005));
  EXPECT_TRUE(in_rashomon(0.49, 0.5, 0.0));
}

TEST(RashomonConfig, RejectsNegativeEpsilonAndZeroRetrains) {
  RashomonConfig c;
  c.epsilon = {Tolerance::Mode::kAbsolute, -1.0};
  EXPECT_THROW(c.validate(), ArgumentError);
  RashomonConfig d;
  d.n_retrains = 0;
  EXPECT_THROW(d.validate(), ArgumentError);
}

TEST(RetrainOnce, HugeEpsilonAcceptsWithinOneEpoch) {
  const Fixture f = trained_linear(40, 0.1, 4);
  RashomonConfig c;
  c.epsilon = {Tolerance::Mode::kAbsolute, 1e9};
  const double base_loss = loss(forward(f.base, f.data.features).col(0), f.data.target,
                                LossKind::kMse);
  const RetrainRecord r = retrain_once(f.base, f.data.ref(), base_loss, c, 7, 0);
  EXPECT_TRUE(r.accepted);
  EXPECT_LE(r.epochs_used, 1u);
}

TEST(RetrainOnce, NoiselessLinearIsAcceptedAndReplays) {
  const Fixture f = trained_linear(200, 0.0, 5, 1000);
  RashomonConfig c;
  c.epsilon = {Tolerance::Mode::kAbsolute, 1e-3};
  const double base_loss = loss(forward(f.base, f.data.features).col(0), f.data.target,
                                LossKind::kMse);
  const RetrainRecord r = retrain_once(f.base, f.data.ref(), base_loss, c, 3, 0);
  ASSERT_TRUE(r.accepted) << r.diagnostic << " loss " << r.final_loss << " base " << base_loss;
  const double replay = loss(forward(f.base, apply_mask(r.final_mask, f.data.features)).col(0),
                             f.data.target, LossKind::kMse);
  EXPECT_LE(replay, base_loss + c.epsilon.resolve(base_loss));
}

TEST(Explore, SingleRetrainGivesOneRow) {
  const Fixture f = trained_linear(60, 0.05, 6);
  RashomonConfig c;
  c.n_retrains = 1;
  const WeightMatrix wm = explore(f.base, f.data.ref(), f.data.feature_names, c);
  EXPECT_EQ(wm.rows().rows(), 1);
  EXPECT_EQ(wm.rows().cols(), 3);
}

TEST(Explore, ParallelMatchesSerialAndRowsReplay) {
  const Fixture f = trained_linear(80, 0.05, 7);
  RashomonConfig c;
  c.n_retrains = 6;
  const WeightMatrix serial = explore(f.base, f.data.ref(), f.data.feature_names, c);
  c.jobs = 3;
  std::size_t calls = 0;
  const WeightMatrix parallel = explore(f.base, f.data.ref(), f.data.feature_names, c,
                                        [&](const RetrainRecord&) { ++calls; });
  EXPECT_EQ(calls, 6u);
  EXPECT_EQ(weight_matrix_to_json(serial).dump(), weight_matrix_to_json(parallel).dump());
  const Matrix rows = serial.rows();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double l = loss(forward(f.base, apply_mask(rows.row(i).transpose(), f.data.features)).col(0),
                          f.data.target, LossKind::kMse);
    EXPECT_LE(l, serial.base_loss + serial.epsilon);
  }
}

TEST(Explore, ImpossibleTargetRaisesExplorationError) {
  const Fixture f = trained_linear(40, 0.3, 8);
  LayeredModel shifted = f.base;
  RashomonConfig c;
  c.n_retrains = 2;
  c.max_epochs_per_retrain = 2;
  c.epsilon = {Tolerance::Mode::kAbsolute, 0.0};
  c.train_config.l2_lambda = 10.0;
  EXPECT_THROW(explore(shifted, f.data.ref(), f.data.feature_names, c), ExplorationError);
}

TEST(Explore, RunningMeanSettles) {
  const Fixture f = trained_linear(300, 0.05, 9);
  RashomonConfig c;
  c.n_retrains = 250;
  const WeightMatrix wm = explore(f.base, f.data.ref(), f.data.feature_names, c);
  ASSERT_EQ(wm.num_rows(), 250u);
  const Matrix rows = wm.rows();
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const double head = rows.col(j).head(200).mean();
    const double all = rows.col(j).mean();
    const double spread = rows.col(j).maxCoeff() - rows.col(j).minCoeff();
    EXPECT_LT(std::abs(head - all), 0.1 * spread) << j;
  }
}

TEST(StabilityCurve, MatchesBruteForcePrefixMeans) {
  std::mt19937_64 rng(10);
  const Matrix w = testing::random_matrix(9, 4, rng);
  const Matrix curve = stability_curve(w);
  ASSERT_EQ(curve.rows(), 9);
  for (Eigen::Index k = 0; k < 9; ++k) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      double s = 0.0;
      for (Eigen::Index i = 0; i <= k; ++i) s += w(i, j);
      EXPECT_NEAR(curve(k, j), s / static_cast<double>(k + 1), 1e-14);
    }
  }
}

TEST(StabilityCurve, SingleAndIdenticalRows) {
  Matrix one(1, 3);
  one << 0.2, 0.4, 0.9;
  EXPECT_EQ(stability_curve(one), one);
  const Matrix same = one.replicate(5, 1);
  const Matrix curve = stability_curve(same);
  for (Eigen::Index k = 0; k < 5; ++k) {
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(curve(k, j), one(0, j), 1e-15);
  }
}

TEST(WeightMatrix, JsonRoundTrip) {
  const Fixture f = trained_linear(60, 0.05, 11);
  RashomonConfig c;
  c.n_retrains = 3;
  const WeightMatrix wm = explore(f.base, f.data.ref(), f.data.feature_names, c);
  const auto doc = weight_matrix_to_json(wm);
  EXPECT_EQ(weight_matrix_to_json(weight_matrix_from_json(doc)).dump(), doc.dump());
  EXPECT_EQ(weight_matrix_from_json(doc).rows(), wm.rows());
}

TEST(RetrainCount, DefaultRule) {
  EXPECT_EQ(default_retrain_count(13), 250u);
  EXPECT_EQ(default_retrain_count(30), 250u);
  EXPECT_EQ(default_retrain_count(784), 794u);
}

}  // namespace
}  // namespace vtf
