// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/model/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "gruwatch/error.hpp"
#include "gruwatch/simd/kernels.hpp"

namespace gruwatch::model {

std::size_t initial_training_rows(std::size_t available, std::size_t lookback) {
  if (available >= kInitialTrainingRows) return kInitialTrainingRows;
  const auto fraction = static_cast<std::size_t>(std::ceil(kSmallDatasetFraction * static_cast<double>(available)));
  return std::min(available, std::max(fraction, lookback + 1));
}

Matrix sample_ending_at(const Matrix& rows, std::size_t last, std::size_t lookback) {
  if (last + 1 < lookback || last >= rows.rows) {
    throw Error(ErrorCode::InsufficientData, "not enough rows for a sample ending at " + std::to_string(last));
  }
  return rows.slice(last + 1 - lookback, lookback);
}

double evaluate_loss(const GruAutoencoder& model, const Matrix& rows) {
  const std::size_t L = model.lookback();
  if (rows.rows < L) throw Error(ErrorCode::InsufficientData, "fewer rows than the lookback");
  if (rows.cols != model.input_width()) throw Error(ErrorCode::ShapeMismatch, "row width differs from model");
  double total = 0.0;
  const std::size_t samples = rows.rows - L + 1;
  for (std::size_t i = 0; i < samples; ++i) {
    const Matrix sample = rows.slice(i, L);
    total += reconstruction_error(sample, model.forward(sample)).mse;
  }
  return total / static_cast<double>(samples);
}

double clip_gradient(std::span<double> grad, double max_norm) {
  const auto& k = simd::kernels();
  const double norm = std::sqrt(k.dot(grad.data(), grad.data(), grad.size()));
  if (norm > max_norm && std::isfinite(norm)) {
    const double scale = max_norm / norm;
    for (double& g : grad) g *= scale;
  }
  return norm;
}

namespace {

// w -= lr * clip(grad / batch). Skips the step when the gradient is not finite.
bool apply_step(GruAutoencoder& model, std::vector<double>& grad, std::size_t batch) {
  const auto& cfg = model.config();
  if (batch > 1) {
    const double inv = 1.0 / static_cast<double>(batch);
    for (double& g : grad) g *= inv;
  }
  const double norm = clip_gradient(grad, cfg.gradClip);
  if (!std::isfinite(norm)) return false;
  if (cfg.learningRate == 0.0) return true;
  auto params = model.parameters();
  simd::kernels().axpy(-cfg.learningRate, grad.data(), params.data(), params.size());
  return true;
}

}  // namespace

TrainingResult train_batch(GruAutoencoder model, const Matrix& rows, const TrainingConfig& config) {
  config.validate();
  const std::size_t L = model.lookback();
  if (config.lookback != L) throw Error(ErrorCode::ShapeMismatch, "config lookback differs from model");
  if (rows.cols != model.input_width()) throw Error(ErrorCode::ShapeMismatch, "row width differs from model");
  if (rows.rows < L + 1) {
    throw Error(ErrorCode::InsufficientData,
                "need at least " + std::to_string(L + 1) + " rows, got " + std::to_string(rows.rows));
  }
  model.set_learning_rate(config.learningRate);

  TrainingResult result;
  result.initialLoss = evaluate_loss(model, rows);

  const std::size_t samples = rows.rows - L + 1;
  std::vector<std::size_t> order(samples);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<double> grad(model.parameter_count(), 0.0);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates with an explicit draw keeps the order library-independent.
    for (std::size_t i = samples; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    for (std::size_t start = 0; start < samples; start += config.batchSize) {
      const std::size_t end = std::min(samples, start + config.batchSize);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = start; i < end; ++i) {
        model.loss_and_gradient(rows.slice(order[i], L), grad);
      }
      apply_step(model, grad, end - start);
    }
    result.lossCurve.push_back(evaluate_loss(model, rows));
  }
  result.model = std::move(model);
  return result;
}

GruAutoencoder online_step(const GruAutoencoder& model, const Matrix& sample) {
  model.check_sample(sample);
  GruAutoencoder updated = model;
  std::vector<double> grad(model.parameter_count(), 0.0);
  updated.loss_and_gradient(sample, grad);
  apply_step(updated, grad, 1);
  return updated;
}

GridSearchResult grid_search(std::span<const TrainingConfig> grid, const Matrix& train,
                             const Matrix& validation) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "grid search needs at least one config");
  GridSearchResult result;
  for (const auto& config : grid) {
    GruAutoencoder model = init_model(config, train.cols, config.seed);
    TrainingResult trained = train_batch(std::move(model), train, config);
    result.validationScores.push_back(evaluate_loss(trained.model, validation));
    result.parameterCounts.push_back(trained.model.parameter_count());
  }
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (result.validationScores[a] != result.validationScores[b]) {
      return result.validationScores[a] < result.validationScores[b];
    }
    if (result.parameterCounts[a] != result.parameterCounts[b]) {
      return result.parameterCounts[a] < result.parameterCounts[b];
    }
    return grid[a].lookback < grid[b].lookback;
  });
  result.bestIndex = order.front();
  result.best = grid[result.bestIndex];
  return result;
}

}  // namespace gruwatch::model
