// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gruwatch/model/gru_autoencoder.hpp"
#include "gruwatch/model/matrix.hpp"

namespace gruwatch::model {

inline constexpr std::size_t kInitialTrainingRows = 9'000;
inline constexpr double kSmallDatasetFraction = 0.15;

/// Rows used for initial training out of `available`: the first 9,000 when
/// there are that many, otherwise max(ceil(0.15 * available), lookback + 1),
/// capped at `available`.
std::size_t initial_training_rows(std::size_t available, std::size_t lookback);

/// The L x D sample ending at row `last` (inclusive).
Matrix sample_ending_at(const Matrix& rows, std::size_t last, std::size_t lookback);

struct TrainingResult {
  GruAutoencoder model;
  double initialLoss = 0.0;       // mean sample MSE before the first update
  std::vector<double> lossCurve;  // mean sample MSE after each epoch
};

/// Mean sample MSE over every sliding L-row window of `rows`.
double evaluate_loss(const GruAutoencoder& model, const Matrix& rows);

/// Mini-batch SGD with gradient-norm clipping over all sliding samples,
/// shuffled per epoch from the config seed. Throws InsufficientData when
/// rows < L + 1, ShapeMismatch on width mismatch.
TrainingResult train_batch(GruAutoencoder model, const Matrix& rows, const TrainingConfig& config);

/// One clipped gradient step on a single sample. Non-finite gradients leave
/// the model unchanged.
GruAutoencoder online_step(const GruAutoencoder& model, const Matrix& sample);

/// Scales `grad` in place so its L2 norm is at most `max_norm`. Returns the
/// norm before clipping.
double clip_gradient(std::span<double> grad, double max_norm);

struct GridSearchResult {
  std::size_t bestIndex = 0;
  TrainingConfig best;
  std::vector<double> validationScores;
  std::vector<std::size_t> parameterCounts;
};

/// Trains every config on `train` and picks the lowest validation MSE; ties
/// go to fewer parameters, then smaller lookback, then grid order.
/// Throws EmptyGrid.
GridSearchResult grid_search(std::span<const TrainingConfig> grid, const Matrix& train,
                             const Matrix& validation);

}  // namespace gruwatch::model
