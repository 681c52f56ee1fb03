// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/model/gru_autoencoder.hpp"

#include <cmath>
#include <random>

#include "gruwatch/error.hpp"
#include "gruwatch/features/registry.hpp"
#include "gruwatch/simd/linalg.hpp"

namespace gruwatch::model {

using simd::MatrixView;
using simd::MutableMatrixView;

void TrainingConfig::validate() const {
  if (lookback < 2) throw Error(ErrorCode::InvalidConfig, "lookback must be at least 2");
  if (encoderHidden == 0 || decoderHidden == 0) {
    throw Error(ErrorCode::InvalidConfig, "hidden sizes must be positive");
  }
  if (batchSize == 0) throw Error(ErrorCode::InvalidConfig, "batch size must be positive");
  if (!(learningRate >= 0.0) || !std::isfinite(learningRate)) {
    throw Error(ErrorCode::InvalidConfig, "learning rate must be finite and non-negative");
  }
  if (!(gradClip > 0.0)) throw Error(ErrorCode::InvalidConfig, "grad clip must be positive");
}

nlohmann::json TrainingConfig::to_json() const {
  return {{"lookback", lookback},     {"encoderHidden", encoderHidden},
          {"decoderHidden", decoderHidden}, {"epochs", epochs},
          {"batchSize", batchSize},   {"learningRate", learningRate},
          {"gradClip", gradClip},     {"seed", seed}};
}

TrainingConfig TrainingConfig::from_json(const nlohmann::json& j) {
  TrainingConfig c;
  c.lookback = j.value("lookback", c.lookback);
  c.encoderHidden = j.value("encoderHidden", c.encoderHidden);
  c.decoderHidden = j.value("decoderHidden", c.decoderHidden);
  c.epochs = j.value("epochs", c.epochs);
  c.batchSize = j.value("batchSize", c.batchSize);
  c.learningRate = j.value("learningRate", c.learningRate);
  c.gradClip = j.value("gradClip", c.gradClip);
  c.seed = j.value("seed", c.seed);
  return c;
}

ReconstructionError reconstruction_error(const Matrix& sample, const Matrix& reconstruction) {
  if (sample.rows != reconstruction.rows || sample.cols != reconstruction.cols || sample.rows == 0 ||
      sample.cols == 0) {
    throw Error(ErrorCode::ShapeMismatch, "sample and reconstruction shapes differ");
  }
  ReconstructionError err;
  err.perFeature.assign(sample.cols, 0.0);
  for (std::size_t t = 0; t < sample.rows; ++t) {
    for (std::size_t d = 0; d < sample.cols; ++d) {
      const double diff = sample(t, d) - reconstruction(t, d);
      err.perFeature[d] += diff * diff;
    }
  }
  double total = 0.0;
  for (double& v : err.perFeature) {
    v /= static_cast<double>(sample.rows);
    total += v;
  }
  err.mse = total / static_cast<double>(sample.cols);
  return err;
}

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Per-timestep activations kept for back-propagation through time.
struct LayerTrace {
  Matrix hPrev, z, r, n, rh;  // steps x hidden

  LayerTrace(std::size_t steps, std::size_t hidden)
      : hPrev(steps, hidden), z(steps, hidden), r(steps, hidden), n(steps, hidden), rh(steps, hidden) {}
};

MatrixView view(const double* p, std::size_t offset, std::size_t rows, std::size_t cols) {
  return {p + offset, rows, cols};
}

void gru_step(const GruLayerLayout& g, const double* p, std::span<const double> x,
              std::span<const double> h_prev, LayerTrace& trace, std::size_t t, std::span<double> h_out) {
  const std::size_t H = g.hidden;
  const auto& k = simd::kernels();
  auto az = trace.z.row(t);
  auto ar = trace.r.row(t);
  auto an = trace.n.row(t);
  auto rh = trace.rh.row(t);
  std::copy(h_prev.begin(), h_prev.end(), trace.hPrev.row(t).begin());

  std::copy(p + g.bz, p + g.bz + H, az.begin());
  std::copy(p + g.br, p + g.br + H, ar.begin());
  std::copy(p + g.bn, p + g.bn + H, an.begin());
  simd::gemv_add(view(p, g.wz, H, g.input), x, az, k);
  simd::gemv_add(view(p, g.uz, H, H), h_prev, az, k);
  simd::gemv_add(view(p, g.wr, H, g.input), x, ar, k);
  simd::gemv_add(view(p, g.ur, H, H), h_prev, ar, k);
  for (std::size_t i = 0; i < H; ++i) {
    az[i] = sigmoid(az[i]);
    ar[i] = sigmoid(ar[i]);
  }
  k.hadamard(ar.data(), h_prev.data(), rh.data(), H);
  simd::gemv_add(view(p, g.wn, H, g.input), x, an, k);
  simd::gemv_add(view(p, g.un, H, H), rh, an, k);
  for (std::size_t i = 0; i < H; ++i) {
    an[i] = std::tanh(an[i]);
    h_out[i] = (1.0 - az[i]) * an[i] + az[i] * h_prev[i];
  }
}

// Back-propagates dh through step t. Adds parameter gradients into `grad`,
// input gradients into `dx` (skipped when empty) and writes dh_prev.
void gru_step_backward(const GruLayerLayout& g, const double* p, double* grad, std::span<const double> x,
                       const LayerTrace& trace, std::size_t t, std::span<const double> dh,
                       std::span<double> dx, std::span<double> dh_prev, std::vector<double>& scratch) {
  const std::size_t H = g.hidden;
  const auto& k = simd::kernels();
  auto h_prev = trace.hPrev.row(t);
  auto z = trace.z.row(t);
  auto r = trace.r.row(t);
  auto n = trace.n.row(t);
  auto rh = trace.rh.row(t);

  scratch.assign(4 * H, 0.0);
  std::span<double> dan(scratch.data(), H);
  std::span<double> daz(scratch.data() + H, H);
  std::span<double> dar(scratch.data() + 2 * H, H);
  std::span<double> drh(scratch.data() + 3 * H, H);

  for (std::size_t i = 0; i < H; ++i) {
    const double dn = dh[i] * (1.0 - z[i]);
    const double dz = dh[i] * (h_prev[i] - n[i]);
    dh_prev[i] = dh[i] * z[i];
    dan[i] = dn * (1.0 - n[i] * n[i]);
    daz[i] = dz * z[i] * (1.0 - z[i]);
  }

  simd::outer_add(dan, x, {grad + g.wn, H, g.input}, k);
  simd::outer_add(dan, rh, {grad + g.un, H, H}, k);
  k.axpy(1.0, dan.data(), grad + g.bn, H);
  if (!dx.empty()) simd::gemv_transposed_add(view(p, g.wn, H, g.input), dan, dx, k);
  simd::gemv_transposed_add(view(p, g.un, H, H), dan, drh, k);

  for (std::size_t i = 0; i < H; ++i) {
    const double dr = drh[i] * h_prev[i];
    dh_prev[i] += drh[i] * r[i];
    dar[i] = dr * r[i] * (1.0 - r[i]);
  }

  simd::outer_add(dar, x, {grad + g.wr, H, g.input}, k);
  simd::outer_add(dar, h_prev, {grad + g.ur, H, H}, k);
  k.axpy(1.0, dar.data(), grad + g.br, H);
  if (!dx.empty()) simd::gemv_transposed_add(view(p, g.wr, H, g.input), dar, dx, k);
  simd::gemv_transposed_add(view(p, g.ur, H, H), dar, dh_prev, k);

  simd::outer_add(daz, x, {grad + g.wz, H, g.input}, k);
  simd::outer_add(daz, h_prev, {grad + g.uz, H, H}, k);
  k.axpy(1.0, daz.data(), grad + g.bz, H);
  if (!dx.empty()) simd::gemv_transposed_add(view(p, g.wz, H, g.input), daz, dx, k);
  simd::gemv_transposed_add(view(p, g.uz, H, H), daz, dh_prev, k);
}

// Forward pass keeping everything back-propagation needs.
struct ForwardTrace {
  LayerTrace encoder;
  LayerTrace decoder;
  std::vector<double> latent;
  Matrix decoderStates;  // L x Hd
  Matrix output;         // L x D

  ForwardTrace(std::size_t L, std::size_t He, std::size_t Hd, std::size_t D)
      : encoder(L, He), decoder(L, Hd), latent(He, 0.0), decoderStates(L, Hd), output(L, D) {}
};

}  // namespace

GruAutoencoder::GruAutoencoder(TrainingConfig config, std::size_t input_width)
    : config_(std::move(config)), inputWidth_(input_width) {
  config_.validate();
  if (inputWidth_ == 0) throw Error(ErrorCode::ShapeMismatch, "input width must be positive");
  build_layout();
  params_.assign(slots_.empty() ? 0 : slots_.back().offset + slots_.back().size(), 0.0);
}

void GruAutoencoder::build_layout() {
  slots_.clear();
  std::size_t offset = 0;
  auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
    slots_.push_back(TensorSlot{std::move(name), rows, cols, offset});
    offset += rows * cols;
    return slots_.back().offset;
  };
  auto add_layer = [&](const std::string& prefix, std::size_t input, std::size_t hidden) {
    GruLayerLayout g;
    g.input = input;
    g.hidden = hidden;
    g.wz = add(prefix + ".Wz", hidden, input);
    g.wr = add(prefix + ".Wr", hidden, input);
    g.wn = add(prefix + ".Wn", hidden, input);
    g.uz = add(prefix + ".Uz", hidden, hidden);
    g.ur = add(prefix + ".Ur", hidden, hidden);
    g.un = add(prefix + ".Un", hidden, hidden);
    g.bz = add(prefix + ".bz", hidden, 1);
    g.br = add(prefix + ".br", hidden, 1);
    g.bn = add(prefix + ".bn", hidden, 1);
    return g;
  };
  encoder_ = add_layer("encoder", inputWidth_, config_.encoderHidden);
  decoder_ = add_layer("decoder", config_.encoderHidden, config_.decoderHidden);
  outW_ = add("output.W", inputWidth_, config_.decoderHidden);
  outB_ = add("output.b", inputWidth_, 1);
}

const TensorSlot& GruAutoencoder::slot(const std::string& name) const {
  for (const auto& s : slots_) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::NotFound, "no tensor named " + name);
}

void GruAutoencoder::check_sample(const Matrix& sample) const {
  if (sample.rows != config_.lookback || sample.cols != inputWidth_ ||
      sample.data.size() != sample.rows * sample.cols) {
    throw Error(ErrorCode::ShapeMismatch,
                "expected " + std::to_string(config_.lookback) + "x" + std::to_string(inputWidth_) +
                    " sample, got " + std::to_string(sample.rows) + "x" + std::to_string(sample.cols));
  }
}

bool GruAutoencoder::all_finite() const {
  for (double v : params_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

namespace {

void run_forward(const GruLayerLayout& enc, const GruLayerLayout& dec, std::size_t outW, std::size_t outB,
                 const std::vector<double>& params, const Matrix& sample, ForwardTrace& tr) {
  const double* p = params.data();
  const std::size_t L = sample.rows;
  const std::size_t D = sample.cols;
  const auto& k = simd::kernels();

  std::vector<double> h(enc.hidden, 0.0);
  std::vector<double> next(enc.hidden, 0.0);
  for (std::size_t t = 0; t < L; ++t) {
    gru_step(enc, p, sample.row(t), h, tr.encoder, t, next);
    h.swap(next);
  }
  tr.latent = h;

  std::vector<double> s(dec.hidden, 0.0);
  for (std::size_t t = 0; t < L; ++t) {
    gru_step(dec, p, tr.latent, s, tr.decoder, t, tr.decoderStates.row(t));
    std::copy(tr.decoderStates.row(t).begin(), tr.decoderStates.row(t).end(), s.begin());
    auto y = tr.output.row(t);
    std::copy(p + outB, p + outB + D, y.begin());
    simd::gemv_add({p + outW, D, dec.hidden}, tr.decoderStates.row(t), y, k);
  }
}

}  // namespace

Matrix GruAutoencoder::forward(const Matrix& sample) const {
  check_sample(sample);
  ForwardTrace tr(config_.lookback, encoder_.hidden, decoder_.hidden, inputWidth_);
  run_forward(encoder_, decoder_, outW_, outB_, params_, sample, tr);
  return std::move(tr.output);
}

double GruAutoencoder::loss_and_gradient(const Matrix& sample, std::span<double> grad) const {
  check_sample(sample);
  if (grad.size() != params_.size()) throw Error(ErrorCode::ShapeMismatch, "gradient buffer size");

  const std::size_t L = config_.lookback;
  const std::size_t D = inputWidth_;
  const std::size_t He = encoder_.hidden;
  const std::size_t Hd = decoder_.hidden;
  const double* p = params_.data();
  double* g = grad.data();
  const auto& k = simd::kernels();

  ForwardTrace tr(L, He, Hd, D);
  run_forward(encoder_, decoder_, outW_, outB_, params_, sample, tr);

  const double scale = 1.0 / static_cast<double>(L * D);
  double loss = 0.0;
  Matrix dy(L, D);
  for (std::size_t t = 0; t < L; ++t) {
    for (std::size_t d = 0; d < D; ++d) {
      const double diff = tr.output(t, d) - sample(t, d);
      loss += diff * diff;
      dy(t, d) = 2.0 * diff * scale;
    }
  }
  loss *= scale;

  std::vector<double> scratch;
  std::vector<double> ds(Hd, 0.0);
  std::vector<double> ds_prev(Hd, 0.0);
  std::vector<double> dlatent(He, 0.0);
  for (std::size_t t = L; t-- > 0;) {
    simd::outer_add(dy.row(t), tr.decoderStates.row(t), {g + outW_, D, Hd}, k);
    k.axpy(1.0, dy.row(t).data(), g + outB_, D);
    simd::gemv_transposed_add({p + outW_, D, Hd}, dy.row(t), ds, k);
    gru_step_backward(decoder_, p, g, tr.latent, tr.decoder, t, ds, dlatent, ds_prev, scratch);
    ds.swap(ds_prev);
  }

  std::vector<double> dh = dlatent;
  std::vector<double> dh_prev(He, 0.0);
  for (std::size_t t = L; t-- > 0;) {
    gru_step_backward(encoder_, p, g, sample.row(t), tr.encoder, t, dh, {}, dh_prev, scratch);
    dh.swap(dh_prev);
  }
  return loss;
}

GruAutoencoder init_model(const TrainingConfig& config, std::size_t input_width, std::uint64_t seed) {
  GruAutoencoder model(config, input_width);
  std::mt19937_64 rng(seed);
  // 53-bit mantissa draw so the stream does not depend on the library's
  // distribution implementation.
  auto uniform = [&rng](double bound) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * u - 1.0) * bound;
  };
  auto params = model.parameters();
  for (const auto& slot : model.layout()) {
    const bool is_bias = slot.cols == 1;
    // Recurrent and bias tensors scale by the layer's hidden size, input
    // tensors by their own fan-in.
    const double fan_in = is_bias ? static_cast<double>(slot.rows) : static_cast<double>(slot.cols);
    const double bound = 1.0 / std::sqrt(fan_in);
    for (std::size_t i = 0; i < slot.size(); ++i) params[slot.offset + i] = uniform(bound);
  }
  return model;
}

GruAutoencoder init_model(const TrainingConfig& config, const features::FeatureRegistry& registry,
                          std::uint64_t seed) {
  GruAutoencoder model = init_model(config, registry.column_count(), seed);
  model.registryVersion = registry.version();
  return model;
}

}  // namespace gruwatch::model
