// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gruwatch/error.hpp"
#include "gruwatch/features/registry.hpp"
#include "gruwatch/model/serialize.hpp"
#include "gruwatch/model/trainer.hpp"
#include "support/oracles.hpp"

using namespace gruwatch;
using namespace gruwatch::model;

namespace {

TrainingConfig small_config(std::size_t L = 4, std::size_t H = 5) {
  TrainingConfig c;
  c.lookback = L;
  c.encoderHidden = H;
  c.decoderHidden = H;
  c.epochs = 5;
  c.batchSize = 4;
  c.learningRate = 0.1;
  c.seed = 3;
  return c;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& v : m.data) v = u(rng);
  return m;
}

Matrix sine_rows(std::size_t n, std::size_t d) {
  Matrix rows(n, d);
  for (std::size_t t = 0; t < n; ++t) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(t) / 24.0;
    for (std::size_t c = 0; c < d; ++c) {
      rows(t, c) = 0.5 + 0.4 * std::sin(a + 0.7 * static_cast<double>(c));
    }
  }
  return rows;
}

}  // namespace

TEST(ReconstructionError, IdentityIsZero) {
  Matrix s = random_matrix(4, 3, 1);
  auto err = reconstruction_error(s, s);
  EXPECT_EQ(err.mse, 0.0);
  for (double v : err.perFeature) EXPECT_EQ(v, 0.0);
}

TEST(ReconstructionError, HandArithmetic) {
  Matrix s(1, 2, 0.0);
  Matrix r(1, 2);
  r(0, 0) = 1.0;
  r(0, 1) = 3.0;
  auto err = reconstruction_error(s, r);
  EXPECT_DOUBLE_EQ(err.perFeature[0], 1.0);
  EXPECT_DOUBLE_EQ(err.perFeature[1], 9.0);
  EXPECT_DOUBLE_EQ(err.mse, 5.0);
}

TEST(ReconstructionError, MatchesDoubleLoopOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Matrix s = random_matrix(7, 5, seed);
    Matrix r = random_matrix(7, 5, seed + 100);
    auto err = reconstruction_error(s, r);
    auto oracle = testsupport::brute_force_reconstruction_error(s.data, r.data, 7, 5);
    for (std::size_t d = 0; d < 5; ++d) EXPECT_NEAR(err.perFeature[d], oracle.perFeature[d], 1e-12);
    EXPECT_NEAR(err.mse, oracle.mse, 1e-12);
  }
}

TEST(ReconstructionError, ShapeMismatch) {
  try {
    reconstruction_error(Matrix(2, 3), Matrix(3, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(InitModel, DeterministicForSeed) {
  auto a = init_model(small_config(), 3, 11);
  auto b = init_model(small_config(), 3, 11);
  auto c = init_model(small_config(), 3, 12);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.parameters()[0], c.parameters()[0]);
  EXPECT_FALSE(std::equal(a.parameters().begin(), a.parameters().end(), c.parameters().begin()));
}

TEST(InitModel, ProjectionShapeFollowsRegistry) {
  std::vector<features::FeatureKey> keys{{{"", "a", "GET", 200}, features::Statistic::Min},
                                         {{"", "a", "GET", 200}, features::Statistic::Max}};
  features::FeatureRegistry reg(4, keys, {{0, 1}, {0, 1}});
  ASSERT_EQ(reg.column_count(), 10u);
  TrainingConfig c = small_config();
  c.decoderHidden = 8;
  auto m = init_model(c, reg, 1);
  EXPECT_EQ(m.input_width(), 10u);
  EXPECT_EQ(m.registryVersion, 4);
  const auto& w = m.slot("output.W");
  EXPECT_EQ(w.rows, 10u);
  EXPECT_EQ(w.cols, 8u);
}

TEST(InitModel, RejectsBadConfig) {
  TrainingConfig c = small_config();
  c.lookback = 1;
  EXPECT_THROW(init_model(c, 3, 1), Error);
}

TEST(Forward, ShapeAndPurity) {
  auto m = init_model(small_config(), 3, 5);
  Matrix s = random_matrix(4, 3, 9);
  Matrix a = m.forward(s);
  Matrix b = m.forward(s);
  EXPECT_EQ(a.rows, 4u);
  EXPECT_EQ(a.cols, 3u);
  EXPECT_EQ(a.data, b.data);  // bit-exact, no state carried between calls
}

TEST(Forward, RejectsMismatchedShapes) {
  auto m = init_model(small_config(), 3, 5);
  for (auto [r, c] : {std::pair{3, 3}, std::pair{4, 2}, std::pair{5, 3}}) {
    try {
      m.forward(Matrix(r, c));
      FAIL() << r << "x" << c;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
    }
  }
  EXPECT_THROW(online_step(m, Matrix(4, 4)), Error);
}

// Analytic BPTT gradients against central finite differences of the
// forward-pass loss, on every parameter of a D=3, L=4, hidden=5 model.
TEST(Gradient, MatchesCentralFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto m = init_model(small_config(4, 5), 3, seed);
    Matrix s = random_matrix(4, 3, seed * 31);
    std::vector<double> grad(m.parameter_count(), 0.0);
    m.loss_and_gradient(s, grad);
    auto numeric = testsupport::finite_difference_gradient(m, s, 1e-5);
    double worst = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      worst = std::max(worst, testsupport::relative_error(grad[i], numeric[i]));
    }
    EXPECT_LT(worst, 1e-4) << "seed " << seed;
  }
}

TEST(Gradient, LossMatchesForwardRoute) {
  auto m = init_model(small_config(), 3, 2);
  Matrix s = random_matrix(4, 3, 8);
  std::vector<double> grad(m.parameter_count(), 0.0);
  const double loss = m.loss_and_gradient(s, grad);
  EXPECT_NEAR(loss, reconstruction_error(s, m.forward(s)).mse, 1e-14);
}

TEST(TrainingRows, NineThousandAndFifteenPercentRules) {
  EXPECT_EQ(initial_training_rows(9000, 12), 9000u);
  EXPECT_EQ(initial_training_rows(20000, 12), 9000u);
  EXPECT_EQ(initial_training_rows(1000, 12), 150u);
  EXPECT_EQ(initial_training_rows(50, 12), 13u);  // L + 1 floor
  EXPECT_EQ(initial_training_rows(10, 12), 10u);
}

TEST(TrainBatch, InsufficientData) {
  auto m = init_model(small_config(), 3, 1);
  try {
    train_batch(m, Matrix(4, 3), small_config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
}

TEST(TrainBatch, SineWaveConverges) {
  TrainingConfig c = small_config(12, 16);
  c.epochs = 50;
  c.batchSize = 8;
  c.learningRate = 0.2;
  c.seed = 7;
  Matrix rows = sine_rows(300, 4);
  auto r = train_batch(init_model(c, 4, 7), rows, c);
  ASSERT_EQ(r.lossCurve.size(), 50u);
  EXPECT_LT(r.lossCurve.back(), 0.1 * r.initialLoss);
  EXPECT_LT(r.lossCurve.back(), r.lossCurve.front());
  EXPECT_TRUE(r.model.all_finite());
}

TEST(TrainBatch, ConstantStreamReconstructed) {
  TrainingConfig c = small_config(4, 8);
  c.epochs = 60;
  c.learningRate = 0.3;
  Matrix rows(60, 3, 0.6);
  auto r = train_batch(init_model(c, 3, 4), rows, c);
  Matrix sample(4, 3, 0.6);
  EXPECT_LT(reconstruction_error(sample, r.model.forward(sample)).mse, 1e-3);
}

TEST(TrainBatch, ReproducibleRunToRun) {
  TrainingConfig c = small_config(6, 6);
  Matrix rows = sine_rows(80, 3);
  auto a = train_batch(init_model(c, 3, 9), rows, c);
  auto b = train_batch(init_model(c, 3, 9), rows, c);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.lossCurve, b.lossCurve);
}

TEST(OnlineStep, ZeroLearningRateIsNoop) {
  TrainingConfig c = small_config();
  c.learningRate = 0.0;
  auto m = init_model(c, 3, 1);
  auto m2 = online_step(m, random_matrix(4, 3, 2));
  EXPECT_EQ(m, m2);
}

TEST(OnlineStep, ReducesErrorOnSameSampleMostOfTheTime) {
  int improved = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    TrainingConfig c = small_config();
    c.learningRate = 0.01;
    auto m = init_model(c, 3, 1000 + trial);
    Matrix s = random_matrix(4, 3, 5000 + trial);
    const double before = reconstruction_error(s, m.forward(s)).mse;
    auto m2 = online_step(m, s);
    const double after = reconstruction_error(s, m2.forward(s)).mse;
    if (after <= before) ++improved;
  }
  EXPECT_GE(improved, 90);
}

TEST(OnlineStep, ExtremeMagnitudeKeepsWeightsFinite) {
  auto m = init_model(small_config(), 3, 1);
  Matrix s(4, 3, 1e6);
  auto m2 = online_step(m, s);
  EXPECT_TRUE(m2.all_finite());
  auto m3 = online_step(m2, s);
  EXPECT_TRUE(m3.all_finite());
}

TEST(ClipGradient, BoundsNorm) {
  std::vector<double> g{3.0, 4.0};
  EXPECT_DOUBLE_EQ(clip_gradient(g, 1.0), 5.0);
  EXPECT_NEAR(std::hypot(g[0], g[1]), 1.0, 1e-15);
  std::vector<double> small{0.3, 0.4};
  clip_gradient(small, 1.0);
  EXPECT_DOUBLE_EQ(small[0], 0.3);
}

TEST(GridSearch, SingleConfigWins) {
  TrainingConfig c = small_config(4, 4);
  Matrix rows = sine_rows(60, 3);
  auto r = grid_search(std::vector<TrainingConfig>{c}, rows.slice(0, 40), rows.slice(40, 20));
  EXPECT_EQ(r.bestIndex, 0u);
  EXPECT_EQ(r.best, c);
}

TEST(GridSearch, TrainedBeatsUntrained) {
  TrainingConfig untrained = small_config(6, 8);
  untrained.epochs = 0;
  TrainingConfig trained = untrained;
  trained.epochs = 30;
  trained.learningRate = 0.3;
  Matrix rows = sine_rows(200, 3);
  auto r = grid_search(std::vector<TrainingConfig>{untrained, trained}, rows.slice(0, 150),
                       rows.slice(150, 50));
  EXPECT_EQ(r.bestIndex, 1u);
  EXPECT_LT(r.validationScores[1], r.validationScores[0]);
}

TEST(GridSearch, IdenticalConfigsTieToFirst) {
  TrainingConfig c = small_config(4, 4);
  Matrix rows = sine_rows(60, 3);
  auto r = grid_search(std::vector<TrainingConfig>{c, c, c}, rows.slice(0, 40), rows.slice(40, 20));
  EXPECT_EQ(r.validationScores[0], r.validationScores[1]);
  EXPECT_EQ(r.bestIndex, 0u);
}

TEST(GridSearch, EmptyGrid) {
  try {
    grid_search({}, Matrix(10, 3), Matrix(10, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyGrid);
  }
}

TEST(Serialize, RoundTripIsExact) {
  auto m = init_model(small_config(), 3, 77);
  m.modelVersion = 5;
  m.registryVersion = 2;
  m.trainedAt = 1601824200000;
  auto back = deserialize_model(serialize_model(m));
  EXPECT_EQ(back, m);
  Matrix s = random_matrix(4, 3, 1);
  EXPECT_EQ(back.forward(s).data, m.forward(s).data);
}

TEST(Serialize, RejectsTamperedShapes) {
  auto j = to_json(init_model(small_config(), 3, 1));
  j["tensors"][0]["shape"][0] = 99;
  EXPECT_THROW(model_from_json(j), Error);
}
