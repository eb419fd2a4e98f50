#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "peakcast/error.hpp"
#include "peakcast/features.hpp"

namespace peakcast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Gate blocks are stacked in this order inside every layer's W, U and b.
enum class Gate : int { Forget = 0, Input = 1, Output = 2, Cell = 3 };

struct LstmLayerParams {
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
  Matrix W;  // 4H x I
  Matrix U;  // 4H x H
  Vector b;  // 4H

  static LstmLayerParams zeros(std::size_t input_size, std::size_t hidden_size) {
    const auto I = static_cast<Eigen::Index>(input_size), H = static_cast<Eigen::Index>(hidden_size);
    return {input_size, hidden_size, Matrix::Zero(4 * H, I), Matrix::Zero(4 * H, H), Vector::Zero(4 * H)};
  }

  auto W_gate(Gate g) { return W.middleRows(static_cast<int>(g) * rows(), rows()); }
  auto W_gate(Gate g) const { return W.middleRows(static_cast<int>(g) * rows(), rows()); }
  auto U_gate(Gate g) { return U.middleRows(static_cast<int>(g) * rows(), rows()); }
  auto U_gate(Gate g) const { return U.middleRows(static_cast<int>(g) * rows(), rows()); }
  auto b_gate(Gate g) { return b.segment(static_cast<int>(g) * rows(), rows()); }
  auto b_gate(Gate g) const { return b.segment(static_cast<int>(g) * rows(), rows()); }

  bool consistent() const {
    const auto I = static_cast<Eigen::Index>(input_size), H = static_cast<Eigen::Index>(hidden_size);
    return H > 0 && I > 0 && W.rows() == 4 * H && W.cols() == I && U.rows() == 4 * H && U.cols() == H &&
           b.size() == 4 * H;
  }

 private:
  Eigen::Index rows() const { return static_cast<Eigen::Index>(hidden_size); }
};

struct Architecture {
  std::size_t input_size = kFeatureDim;
  std::vector<std::size_t> hidden_sizes{100, 90, 80, 70};
  std::size_t output_size = kHorizon;

  static Architecture four_layer() { return {}; }
  static Architecture two_layer() { return {kFeatureDim, {100, 80}, kHorizon}; }

  bool operator==(const Architecture&) const = default;
};

/// Stacked LSTM plus an affine head reading the top layer's final hidden state.
struct ModelParams {
  std::vector<LstmLayerParams> layers;
  Matrix head_weights;  // output x H_top
  Vector head_bias;     // output
  std::uint16_t feature_layout_version = kFeatureLayoutVersion;
  NormalizationParams normalization;

  std::size_t input_size() const { return layers.empty() ? 0 : layers.front().input_size; }
  std::size_t output_size() const { return static_cast<std::size_t>(head_bias.size()); }

  Architecture architecture() const {
    Architecture a{input_size(), {}, output_size()};
    for (const auto& l : layers) a.hidden_sizes.push_back(l.hidden_size);
    return a;
  }

  void validate() const {
    if (layers.empty()) fail(ErrorCode::DimensionMismatch, "model has no LSTM layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      if (!layers[l].consistent())
        fail(ErrorCode::DimensionMismatch, "layer " + std::to_string(l) + " tensors disagree with its sizes");
      if (l > 0 && layers[l].input_size != layers[l - 1].hidden_size)
        fail(ErrorCode::DimensionMismatch, "layer " + std::to_string(l) + " input_size != previous hidden_size");
    }
    if (head_bias.size() == 0 || head_weights.rows() != head_bias.size() ||
        head_weights.cols() != static_cast<Eigen::Index>(layers.back().hidden_size))
      fail(ErrorCode::DimensionMismatch, "head dimensions disagree with the top layer");
  }

  /// Every trainable tensor in storage order: per layer W, U, b; then head W, head b.
  std::vector<std::span<double>> tensors() {
    std::vector<std::span<double>> out;
    for (auto& l : layers) {
      out.emplace_back(l.W.data(), static_cast<std::size_t>(l.W.size()));
      out.emplace_back(l.U.data(), static_cast<std::size_t>(l.U.size()));
      out.emplace_back(l.b.data(), static_cast<std::size_t>(l.b.size()));
    }
    out.emplace_back(head_weights.data(), static_cast<std::size_t>(head_weights.size()));
    out.emplace_back(head_bias.data(), static_cast<std::size_t>(head_bias.size()));
    return out;
  }
  std::vector<std::span<const double>> tensors() const {
    std::vector<std::span<const double>> out;
    for (auto s : const_cast<ModelParams*>(this)->tensors()) out.emplace_back(s.data(), s.size());
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (auto s : tensors()) n += s.size();
    return n;
  }
};

/// Closed-form trainable parameter count: 4(H(I+H)+H) per layer plus O*H+O for the head.
inline std::size_t parameter_count(const Architecture& a) {
  std::size_t n = 0, in = a.input_size;
  for (auto h : a.hidden_sizes) {
    n += 4 * (h * (in + h) + h);
    in = h;
  }
  return n + a.output_size * in + a.output_size;
}

inline ModelParams zero_model(const Architecture& a, const NormalizationParams& norm = {}) {
  if (a.hidden_sizes.empty() || a.input_size == 0 || a.output_size == 0)
    fail(ErrorCode::DimensionMismatch, "architecture needs >= 1 layer and non-zero input/output sizes");
  ModelParams m;
  std::size_t in = a.input_size;
  for (auto h : a.hidden_sizes) {
    if (h == 0) fail(ErrorCode::DimensionMismatch, "hidden size must be > 0");
    m.layers.push_back(LstmLayerParams::zeros(in, h));
    in = h;
  }
  m.head_weights = Matrix::Zero(static_cast<Eigen::Index>(a.output_size), static_cast<Eigen::Index>(in));
  m.head_bias = Vector::Zero(static_cast<Eigen::Index>(a.output_size));
  m.normalization = norm;
  return m;
}

namespace detail {
// 53-bit uniform in [0,1) from the raw engine output, identical on every platform.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
}  // namespace detail

/// Weights uniform in [-s, s] with s = 1/sqrt(fan_in) per matrix; biases zero.
inline ModelParams init_model(const Architecture& a, const NormalizationParams& norm, std::uint64_t seed) {
  ModelParams m = zero_model(a, norm);
  std::mt19937_64 rng(seed);
  auto fill = [&](Matrix& mat, std::size_t fan_in) {
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < mat.size(); ++i) mat.data()[i] = s * (2.0 * detail::unit_uniform(rng) - 1.0);
  };
  for (auto& l : m.layers) {
    fill(l.W, l.input_size);
    fill(l.U, l.hidden_size);
  }
  fill(m.head_weights, m.layers.back().hidden_size);
  return m;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct LstmState {
  Vector h;
  Vector c;

  static LstmState zeros(std::size_t hidden) {
    return {Vector::Zero(static_cast<Eigen::Index>(hidden)), Vector::Zero(static_cast<Eigen::Index>(hidden))};
  }
};

struct CellStep {
  LstmState state;
  Vector forget, input, output, candidate;
};

/// One LSTM time step:
///   f = sig(W_f x + U_f h + b_f), i = sig(...), o = sig(...), g = tanh(W_c x + U_c h + b_c)
///   c' = f*c + i*g,  h' = o*tanh(c')
inline CellStep lstm_cell_step(const LstmLayerParams& layer, const Vector& x, const LstmState& state) {
  const auto H = static_cast<Eigen::Index>(layer.hidden_size);
  if (!layer.consistent() || x.size() != static_cast<Eigen::Index>(layer.input_size) || state.h.size() != H ||
      state.c.size() != H)
    fail(ErrorCode::DimensionMismatch, "lstm_cell_step: input or state size disagrees with the layer");
  const Vector z = layer.W * x + layer.U * state.h + layer.b;
  CellStep s;
  auto sig = [](double v) { return sigmoid(v); };
  s.forget = z.segment(0 * H, H).unaryExpr(sig);
  s.input = z.segment(1 * H, H).unaryExpr(sig);
  s.output = z.segment(2 * H, H).unaryExpr(sig);
  s.candidate = z.segment(3 * H, H).array().tanh().matrix();
  s.state.c = (s.forget.array() * state.c.array() + s.input.array() * s.candidate.array()).matrix();
  s.state.h = (s.output.array() * s.state.c.array().tanh()).matrix();
  return s;
}

struct ForwardMode {
  bool training = false;
  double dropout_rate = 0.0;
  std::uint64_t seed = 0;

  static ForwardMode infer() { return {}; }
  static ForwardMode train(double dropout_rate, std::uint64_t seed) { return {true, dropout_rate, seed}; }
};

/// Activations saved by a training-mode forward pass over a batch. Column t*B + b of
/// every per-layer matrix holds time step t of batch element b.
struct ForwardCache {
  struct Layer {
    Matrix x;       // I x TB, layer input (already masked)
    Matrix gates;   // 4H x TB, activated f, i, o, g
    Matrix c;       // H x TB
    Matrix tanh_c;  // H x TB
    Matrix h;       // H x TB, unmasked output
    Matrix mask;    // H x TB inverted-dropout scale, empty when dropout is off
  };
  std::size_t steps = 0;
  std::size_t batch = 0;
  std::vector<Layer> layers;
  Matrix head_input;  // H_top x B
};

/// Packs per-sample sequences into one I x (T*B) matrix with column t*B + b.
inline Matrix pack_batch(std::span<const std::vector<FeatureVector>* const> sequences) {
  const std::size_t B = sequences.size();
  const std::size_t T = B ? sequences[0]->size() : 0;
  Matrix x(static_cast<Eigen::Index>(kFeatureDim), static_cast<Eigen::Index>(T * B));
  for (std::size_t b = 0; b < B; ++b) {
    if (sequences[b]->size() != T) fail(ErrorCode::DimensionMismatch, "sequences in a batch differ in length");
    for (std::size_t t = 0; t < T; ++t)
      x.col(static_cast<Eigen::Index>(t * B + b)) =
          Eigen::Map<const Vector>((*sequences[b])[t].data(), static_cast<Eigen::Index>(kFeatureDim));
  }
  return x;
}

inline Matrix pack_sequence(std::span<const FeatureVector> steps) {
  Matrix x(static_cast<Eigen::Index>(kFeatureDim), static_cast<Eigen::Index>(steps.size()));
  for (std::size_t t = 0; t < steps.size(); ++t)
    x.col(static_cast<Eigen::Index>(t)) =
        Eigen::Map<const Vector>(steps[t].data(), static_cast<Eigen::Index>(kFeatureDim));
  return x;
}

struct BatchForward {
  Matrix prediction;  // output x B, normalized
  std::optional<ForwardCache> cache;
};

/// Runs the stack over `steps` time steps of a batch packed as I x (steps*B).
/// Zero initial states; inverted dropout on each layer's output (including the
/// connection into the head) when training with a non-zero rate.
inline BatchForward forward_batch(const ModelParams& model, const Matrix& inputs, std::size_t steps,
                                  const ForwardMode& mode) {
  model.validate();
  if (steps == 0 || inputs.cols() % static_cast<Eigen::Index>(steps) != 0 ||
      inputs.rows() != static_cast<Eigen::Index>(model.input_size()))
    fail(ErrorCode::DimensionMismatch, "forward: input matrix does not match model input size / step count");
  if (mode.training && !(mode.dropout_rate >= 0.0 && mode.dropout_rate < 1.0))
    fail(ErrorCode::ConfigError, "dropout_rate must be in [0,1)");

  const auto T = static_cast<Eigen::Index>(steps);
  const auto B = inputs.cols() / T;
  const bool drop = mode.training && mode.dropout_rate > 0.0;
  std::mt19937_64 rng(mode.seed);
  const double keep_scale = drop ? 1.0 / (1.0 - mode.dropout_rate) : 1.0;

  BatchForward out;
  ForwardCache cache;
  cache.steps = steps;
  cache.batch = static_cast<std::size_t>(B);

  Matrix x = inputs;
  for (const auto& layer : model.layers) {
    const auto H = static_cast<Eigen::Index>(layer.hidden_size);
    Matrix gates(4 * H, T * B);
    gates.noalias() = layer.W * x;
    gates.colwise() += layer.b;
    Matrix c(H, T * B), tanh_c(H, T * B), h(H, T * B);
    Matrix rec(4 * H, B);
    for (Eigen::Index t = 0; t < T; ++t) {
      auto z = gates.middleCols(t * B, B);
      if (t > 0) {
        rec.noalias() = layer.U * h.middleCols((t - 1) * B, B);
        z += rec;
      }
      z.topRows(3 * H) = (1.0 / (1.0 + (-z.topRows(3 * H).array()).exp())).matrix();
      z.bottomRows(H) = z.bottomRows(H).array().tanh().matrix();
      auto ct = c.middleCols(t * B, B);
      ct = (z.middleRows(H, H).array() * z.bottomRows(H).array()).matrix();
      if (t > 0) ct.array() += z.topRows(H).array() * c.middleCols((t - 1) * B, B).array();
      tanh_c.middleCols(t * B, B) = ct.array().tanh().matrix();
      h.middleCols(t * B, B) = (z.middleRows(2 * H, H).array() * tanh_c.middleCols(t * B, B).array()).matrix();
    }
    Matrix mask;
    Matrix next = h;
    if (drop) {
      mask.resize(H, T * B);
      for (Eigen::Index i = 0; i < mask.size(); ++i)
        mask.data()[i] = detail::unit_uniform(rng) < mode.dropout_rate ? 0.0 : keep_scale;
      next.array() *= mask.array();
    }
    if (mode.training)
      cache.layers.push_back({std::move(x), std::move(gates), std::move(c), std::move(tanh_c), std::move(h), std::move(mask)});
    x = std::move(next);
  }
  Matrix head_input = x.rightCols(B);
  out.prediction.noalias() = model.head_weights * head_input;
  out.prediction.colwise() += model.head_bias;
  if (mode.training) {
    cache.head_input = std::move(head_input);
    out.cache = std::move(cache);
  }
  return out;
}

struct ForwardResult {
  Vector prediction;  // normalized
  std::optional<ForwardCache> cache;
};

inline ForwardResult forward(const ModelParams& model, std::span<const FeatureVector> inputs, const ForwardMode& mode) {
  if (model.input_size() != kFeatureDim)
    fail(ErrorCode::DimensionMismatch, "model input size is not the feature dimension");
  auto r = forward_batch(model, pack_sequence(inputs), inputs.size(), mode);
  return {r.prediction.col(0), std::move(r.cache)};
}

/// Inference-mode forecast in kW (no clamping of the de-normalized output).
inline DayProfile predict_day(const ModelParams& model, std::span<const FeatureVector> inputs) {
  if (inputs.size() != kInputHours)
    fail(ErrorCode::DimensionMismatch, "predict_day expects " + std::to_string(kInputHours) + " input hours");
  if (model.output_size() != kHorizon) fail(ErrorCode::DimensionMismatch, "model output size is not 24");
  const Vector y = forward(model, inputs, ForwardMode::infer()).prediction;
  DayProfile out{};
  const auto& n = model.normalization;
  for (std::size_t h = 0; h < kHorizon; ++h)
    out[h] = denormalize(y[static_cast<Eigen::Index>(h)], n.demand_min, n.demand_max);
  return out;
}

}  // namespace peakcast
