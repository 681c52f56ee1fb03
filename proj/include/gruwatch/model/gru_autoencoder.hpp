// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gruwatch/model/matrix.hpp"

namespace gruwatch::features {
class FeatureRegistry;
}

namespace gruwatch::model {

struct TrainingConfig {
  std::size_t lookback = 12;
  std::size_t encoderHidden = 64;
  std::size_t decoderHidden = 64;
  std::size_t epochs = 20;
  std::size_t batchSize = 16;
  double learningRate = 0.05;
  double gradClip = 1.0;
  std::uint64_t seed = 42;

  /// L >= 2 and positive sizes; epochs may be zero. Throws InvalidConfig.
  void validate() const;

  nlohmann::json to_json() const;
  static TrainingConfig from_json(const nlohmann::json& j);
  bool operator==(const TrainingConfig&) const = default;
};

/// A named block of the flat parameter vector.
struct TensorSlot {
  std::string name;
  std::size_t rows;
  std::size_t cols;
  std::size_t offset;

  std::size_t size() const { return rows * cols; }
  bool operator==(const TensorSlot&) const = default;
};

/// Offsets of one GRU layer's tensors inside the flat parameter vector.
struct GruLayerLayout {
  std::size_t input = 0;
  std::size_t hidden = 0;
  std::size_t wz = 0, wr = 0, wn = 0;  // hidden x input
  std::size_t uz = 0, ur = 0, un = 0;  // hidden x hidden
  std::size_t bz = 0, br = 0, bn = 0;  // hidden
  bool operator==(const GruLayerLayout&) const = default;
};

struct ReconstructionError {
  std::vector<double> perFeature;  // D values: mean over timesteps of squared error
  double mse = 0.0;                // mean of perFeature
};

/// perFeature[d] = mean_t (s[t,d] - r[t,d])^2; mse = mean_d perFeature[d].
/// Throws ShapeMismatch.
ReconstructionError reconstruction_error(const Matrix& sample, const Matrix& reconstruction);

/// Sequence autoencoder: a GRU encoder folds L input vectors into its final
/// hidden state; a GRU decoder is fed that latent at each of L steps and a
/// linear projection maps each decoder state back to D features.
///
/// All weights live in one flat vector so optimisation, clipping,
/// finite-difference checks and serialisation see a single buffer.
class GruAutoencoder {
 public:
  GruAutoencoder() = default;
  GruAutoencoder(TrainingConfig config, std::size_t input_width);

  const TrainingConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learningRate = lr; }
  std::size_t input_width() const { return inputWidth_; }
  std::size_t lookback() const { return config_.lookback; }

  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }
  std::size_t parameter_count() const { return params_.size(); }
  const std::vector<TensorSlot>& layout() const { return slots_; }
  const TensorSlot& slot(const std::string& name) const;

  std::int64_t registryVersion = 0;
  std::int64_t modelVersion = 0;
  std::int64_t trainedAt = 0;

  /// L x D reconstruction of an L x D sample. Pure. Throws ShapeMismatch.
  Matrix forward(const Matrix& sample) const;

  /// MSE over all L x D outputs; adds d(loss)/d(params) into `grad`.
  double loss_and_gradient(const Matrix& sample, std::span<double> grad) const;

  /// Throws ShapeMismatch unless the sample is L x D.
  void check_sample(const Matrix& sample) const;

  bool all_finite() const;

  bool operator==(const GruAutoencoder&) const = default;

 private:
  void build_layout();

  TrainingConfig config_;
  std::size_t inputWidth_ = 0;
  std::vector<TensorSlot> slots_;
  GruLayerLayout encoder_;
  GruLayerLayout decoder_;
  std::size_t outW_ = 0;
  std::size_t outB_ = 0;
  std::vector<double> params_;
};

/// Seeded uniform initialisation, U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
GruAutoencoder init_model(const TrainingConfig& config, std::size_t input_width, std::uint64_t seed);
GruAutoencoder init_model(const TrainingConfig& config, const features::FeatureRegistry& registry,
                          std::uint64_t seed);

}  // namespace gruwatch::model
