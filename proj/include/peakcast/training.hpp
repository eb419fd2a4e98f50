#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "peakcast/error.hpp"
#include "peakcast/features.hpp"
#include "peakcast/lstm.hpp"
#include "peakcast/metrics.hpp"

namespace peakcast {

struct TrainConfig {
  int epochs = 200;
  int batch_size = 32;
  double lr_start = 0.1;
  double lr_end = 0.005;
  double dropout_rate = 0.2;
  double grad_clip_norm = 5.0;
  std::uint64_t seed = 42;
  bool shuffle = true;
  // Early stopping on validation MAPE; 0 disables. Needs a validation set.
  int patience = 20;
};

inline void validate(const TrainConfig& c) {
  auto bad = [](const std::string& what) { fail(ErrorCode::ConfigError, "train config: " + what); };
  if (c.epochs < 1) bad("epochs must be >= 1");
  if (c.batch_size < 1) bad("batch_size must be >= 1");
  if (!(c.lr_end > 0.0 && c.lr_end <= c.lr_start)) bad("need 0 < lr_end <= lr_start");
  if (!(c.dropout_rate >= 0.0 && c.dropout_rate < 1.0)) bad("dropout_rate must be in [0,1)");
  if (!(c.grad_clip_norm > 0.0)) bad("grad_clip_norm must be > 0 (inf disables clipping)");
  if (c.patience < 0) bad("patience must be >= 0");
}

/// `key = value` lines using the TrainConfig field names; `#` comments; unknown keys rejected.
/// Keys absent from the text keep the values of `base`.
inline TrainConfig parse_train_config(std::string_view content, TrainConfig base = {}) {
  std::istringstream in{std::string(content)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto where = "train config line " + std::to_string(line_no);
    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::ConfigError, where + ": expected key = value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    double num = 0.0;
    auto number = [&] {
      if (!detail::parse_real(value, num)) {
        if (value == "inf") return std::numeric_limits<double>::infinity();
        fail(ErrorCode::ConfigError, where + ": '" + key + "' needs a number");
      }
      return num;
    };
    auto integer = [&] {
      const double v = number();
      if (v != std::floor(v) || std::abs(v) > 9.0e15) fail(ErrorCode::ConfigError, where + ": '" + key + "' needs an integer");
      return v;
    };
    if (key == "epochs") base.epochs = static_cast<int>(integer());
    else if (key == "batch_size") base.batch_size = static_cast<int>(integer());
    else if (key == "lr_start") base.lr_start = number();
    else if (key == "lr_end") base.lr_end = number();
    else if (key == "dropout_rate") base.dropout_rate = number();
    else if (key == "grad_clip_norm") base.grad_clip_norm = number();
    else if (key == "seed") base.seed = static_cast<std::uint64_t>(integer());
    else if (key == "patience") base.patience = static_cast<int>(integer());
    else if (key == "shuffle") {
      if (value == "true" || value == "1") base.shuffle = true;
      else if (value == "false" || value == "0") base.shuffle = false;
      else fail(ErrorCode::ConfigError, where + ": 'shuffle' must be true or false");
    } else {
      fail(ErrorCode::ConfigError, where + ": unknown key '" + key + "'");
    }
  }
  validate(base);
  return base;
}

inline double mse_loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size() || pred.empty())
    fail(ErrorCode::LengthMismatch, "mse_loss needs equal non-zero lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - target[i]) * (pred[i] - target[i]);
  return s / static_cast<double>(pred.size());
}

/// Zero tensors shaped like `model`, used for gradients and optimizer moments.
inline ModelParams zeros_like(const ModelParams& model) {
  ModelParams z = model;
  for (auto t : z.tensors()) std::fill(t.begin(), t.end(), 0.0);
  return z;
}

inline bool same_shape(const ModelParams& a, const ModelParams& b) {
  auto ta = a.tensors();
  auto tb = b.tensors();
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i)
    if (ta[i].size() != tb[i].size()) return false;
  return a.architecture() == b.architecture();
}

/// Exact gradient of the batch-mean MSE (each sample's loss averaged over its outputs)
/// by backpropagation through time. `targets` is output x B, normalized.
inline ModelParams backward_batch(const ModelParams& model, const ForwardCache& cache, const Matrix& targets) {
  const auto T = static_cast<Eigen::Index>(cache.steps);
  const auto B = static_cast<Eigen::Index>(cache.batch);
  if (cache.layers.size() != model.layers.size() || targets.cols() != B ||
      targets.rows() != static_cast<Eigen::Index>(model.output_size()) ||
      cache.head_input.rows() != model.head_weights.cols())
    fail(ErrorCode::ShapeMismatch, "backward: cache or targets do not match the model");

  ModelParams grad = zeros_like(model);
  Matrix y = model.head_weights * cache.head_input;
  y.colwise() += model.head_bias;
  const Matrix dy = (2.0 / static_cast<double>(y.rows() * B)) * (y - targets);
  grad.head_weights.noalias() = dy * cache.head_input.transpose();
  grad.head_bias = dy.rowwise().sum();

  // Gradient w.r.t. the top layer's masked output at the last step.
  Matrix d_in = Matrix::Zero(model.head_weights.cols(), T * B);
  d_in.rightCols(B).noalias() = model.head_weights.transpose() * dy;

  for (std::size_t li = model.layers.size(); li-- > 0;) {
    const auto& layer = model.layers[li];
    const auto& lc = cache.layers[li];
    auto& lg = grad.layers[li];
    const auto H = static_cast<Eigen::Index>(layer.hidden_size);
    if (lc.h.rows() != H || lc.h.cols() != T * B) fail(ErrorCode::ShapeMismatch, "backward: cached layer shape");

    Matrix dh_ext = std::move(d_in);
    if (lc.mask.size() != 0) dh_ext.array() *= lc.mask.array();

    Matrix dz(4 * H, T * B);
    Matrix dh_next = Matrix::Zero(H, B);
    Matrix dc_next = Matrix::Zero(H, B);
    for (Eigen::Index t = T - 1; t >= 0; --t) {
      const auto cols = [&](const Matrix& m) { return m.middleCols(t * B, B); };
      const auto g = cols(lc.gates);
      const auto f = g.topRows(H).array();
      const auto i = g.middleRows(H, H).array();
      const auto o = g.middleRows(2 * H, H).array();
      const auto cand = g.bottomRows(H).array();
      const auto tc = cols(lc.tanh_c).array();

      const Matrix dh = cols(dh_ext) + dh_next;
      const Matrix dc = (dc_next.array() + dh.array() * o * (1.0 - tc * tc)).matrix();
      auto dzt = dz.middleCols(t * B, B);
      if (t > 0) dzt.topRows(H) = (dc.array() * lc.c.middleCols((t - 1) * B, B).array() * f * (1.0 - f)).matrix();
      else dzt.topRows(H).setZero();
      dzt.middleRows(H, H) = (dc.array() * cand * i * (1.0 - i)).matrix();
      dzt.middleRows(2 * H, H) = (dh.array() * tc * o * (1.0 - o)).matrix();
      dzt.bottomRows(H) = (dc.array() * i * (1.0 - cand * cand)).matrix();
      dc_next = (dc.array() * f).matrix();
      dh_next.noalias() = layer.U.transpose() * dzt;
    }
    lg.W.noalias() = dz * lc.x.transpose();
    if (T > 1) lg.U.noalias() = dz.rightCols((T - 1) * B) * lc.h.leftCols((T - 1) * B).transpose();
    lg.b = dz.rowwise().sum();
    if (li > 0) {
      d_in.resize(layer.input_size, T * B);
      d_in.noalias() = layer.W.transpose() * dz;
    }
  }
  return grad;
}

/// Single-sample form: gradient of mse_loss(forward(...), target_norm).
inline ModelParams backward(const ModelParams& model, const ForwardCache& cache, std::span<const double> target_norm) {
  if (cache.batch != 1 || target_norm.size() != model.output_size())
    fail(ErrorCode::ShapeMismatch, "backward: expected a single-sample cache and output-sized target");
  Matrix t = Eigen::Map<const Vector>(target_norm.data(), static_cast<Eigen::Index>(target_norm.size()));
  return backward_batch(model, cache, t);
}

inline double global_norm(const ModelParams& grads) {
  double s = 0.0;
  for (auto t : grads.tensors())
    for (double v : t) s += v * v;
  return std::sqrt(s);
}

/// Rescales in place so the global L2 norm is at most `max_norm`; returns the norm before clipping.
inline double clip_global_norm(ModelParams& grads, double max_norm) {
  const double n = global_norm(grads);
  if (std::isfinite(max_norm) && n > max_norm) {
    const double scale = max_norm / n;
    for (auto t : grads.tensors())
      for (double& v : t) v *= scale;
  }
  return n;
}

struct AdamState {
  ModelParams m;
  ModelParams v;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_model(const ModelParams& params) { return {zeros_like(params), zeros_like(params)}; }
};

/// Bias-corrected Adam update, in place.
inline void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, double lr) {
  if (!same_shape(params, grads) || !same_shape(params, state.m) || !same_shape(params, state.v))
    fail(ErrorCode::ShapeMismatch, "adam_step: parameter, gradient and moment shapes differ");
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  for (std::size_t t = 0; t < p.size(); ++t) {
    for (std::size_t i = 0; i < p[t].size(); ++i) {
      m[t][i] = state.beta1 * m[t][i] + (1.0 - state.beta1) * g[t][i];
      v[t][i] = state.beta2 * v[t][i] + (1.0 - state.beta2) * g[t][i] * g[t][i];
      const double mhat = m[t][i] / c1;
      const double vhat = v[t][i] / c2;
      p[t][i] -= lr * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

/// Exponential decay from lr_start at epoch 0 to lr_end at the last epoch.
inline double lr_schedule(int epoch, int total_epochs, double lr_start, double lr_end) {
  if (total_epochs < 1 || epoch < 0 || epoch >= total_epochs)
    fail(ErrorCode::RangeError, "epoch " + std::to_string(epoch) + " outside [0, " + std::to_string(total_epochs) + ")");
  if (total_epochs == 1) return lr_start;
  if (epoch == total_epochs - 1) return lr_end;
  return lr_start * std::pow(lr_end / lr_start, static_cast<double>(epoch) / (total_epochs - 1));
}

struct TrainReport {
  std::vector<double> epoch_loss;
  std::vector<double> validation_mape;  // empty without a validation set
  double final_lr = 0.0;
  double wall_seconds = 0.0;
  int best_epoch = -1;  // epoch whose weights were returned when validating
  bool stopped_early = false;
};

struct TrainResult {
  ModelParams model;
  TrainReport report;
};

inline double validation_mape(const ModelParams& model, std::span<const WindowSample> samples) {
  std::vector<double> actual, pred;
  actual.reserve(samples.size() * kHorizon);
  pred.reserve(samples.size() * kHorizon);
  for (const auto& s : samples) {
    auto p = predict_day(model, s.inputs);
    actual.insert(actual.end(), s.target_kw.begin(), s.target_kw.end());
    pred.insert(pred.end(), p.begin(), p.end());
  }
  return mape(actual, pred);
}

inline Matrix normalized_targets(const ModelParams& model, std::span<const WindowSample* const> batch) {
  const auto& n = model.normalization;
  Matrix t(static_cast<Eigen::Index>(kHorizon), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b)
    for (std::size_t h = 0; h < kHorizon; ++h)
      t(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(b)) =
          normalize(batch[b]->target_kw[h], n.demand_min, n.demand_max);
  return t;
}

/// Mini-batch Adam with global-norm clipping. Fully determined by (init, samples, config).
inline TrainResult train(const ModelParams& init, std::span<const WindowSample> samples, const TrainConfig& config,
                         std::span<const WindowSample> validation = {}) {
  validate(config);
  if (samples.empty()) fail(ErrorCode::EmptyDataset, "no training samples");
  init.validate();
  if (init.output_size() != kHorizon || init.input_size() != kFeatureDim)
    fail(ErrorCode::DimensionMismatch, "model is not shaped for 39-feature / 24-hour samples");

  const auto t0 = std::chrono::steady_clock::now();
  TrainResult result{init, {}};
  ModelParams& model = result.model;
  AdamState adam = AdamState::for_model(model);
  std::mt19937_64 shuffle_rng(config.seed);
  std::mt19937_64 dropout_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::optional<ModelParams> best;
  double best_mape = std::numeric_limits<double>::infinity();
  int since_best = 0;
  const bool early_stop = config.patience > 0 && !validation.empty();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = lr_schedule(epoch, config.epochs, config.lr_start, config.lr_end);
    if (config.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(detail::unit_uniform(shuffle_rng) * static_cast<double>(i));
        std::swap(order[i - 1], order[std::min(j, i - 1)]);
      }
    }
    double loss_sum = 0.0;
    for (std::size_t first = 0; first < order.size(); first += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t last = std::min(order.size(), first + static_cast<std::size_t>(config.batch_size));
      std::vector<const WindowSample*> batch;
      std::vector<const std::vector<FeatureVector>*> seqs;
      for (std::size_t i = first; i < last; ++i) {
        batch.push_back(&samples[order[i]]);
        seqs.push_back(&samples[order[i]].inputs);
      }
      const Matrix x = pack_batch(seqs);
      const Matrix targets = normalized_targets(model, batch);
      auto fwd = forward_batch(model, x, kInputHours, ForwardMode::train(config.dropout_rate, dropout_rng()));
      loss_sum += (fwd.prediction - targets).squaredNorm() / static_cast<double>(kHorizon);
      ModelParams grads = backward_batch(model, *fwd.cache, targets);
      clip_global_norm(grads, config.grad_clip_norm);
      adam_step(model, grads, adam, lr);
    }
    result.report.epoch_loss.push_back(loss_sum / static_cast<double>(samples.size()));
    result.report.final_lr = lr;

    if (!validation.empty()) {
      const double vm = validation_mape(model, validation);
      result.report.validation_mape.push_back(vm);
      if (vm < best_mape) {
        best_mape = vm;
        result.report.best_epoch = epoch;
        since_best = 0;
        if (early_stop) best = model;
      } else if (early_stop && ++since_best >= config.patience) {
        result.report.stopped_early = true;
        break;
      }
    }
  }
  if (early_stop && best) model = std::move(*best);
  result.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

namespace detail {

// Loss of the stacked LSTM evaluated cell by cell in extended precision. Parameters are
// passed as flat column-major copies (same order as ModelParams::tensors()) so individual
// entries can be perturbed without touching the double-precision model.
inline long double reference_loss(const ModelParams& shape, const std::vector<std::vector<long double>>& p,
                                  const Matrix& inputs, std::size_t steps, const Vector& target) {
  using LD = long double;
  const std::size_t L = shape.layers.size();
  const auto B = static_cast<std::size_t>(inputs.cols()) / steps;
  LD total = 0.0L;
  for (std::size_t b = 0; b < B; ++b) {
    std::vector<std::vector<LD>> h(L), c(L);
    for (std::size_t l = 0; l < L; ++l) {
      h[l].assign(shape.layers[l].hidden_size, 0.0L);
      c[l].assign(shape.layers[l].hidden_size, 0.0L);
    }
    for (std::size_t t = 0; t < steps; ++t) {
      std::vector<LD> x(static_cast<std::size_t>(inputs.rows()));
      for (std::size_t r = 0; r < x.size(); ++r)
        x[r] = inputs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t * B + b));
      for (std::size_t l = 0; l < L; ++l) {
        const std::size_t H = shape.layers[l].hidden_size, I = shape.layers[l].input_size, R = 4 * H;
        const auto& W = p[3 * l];
        const auto& U = p[3 * l + 1];
        const auto& bias = p[3 * l + 2];
        std::vector<LD> hn(H), cn(H);
        for (std::size_t j = 0; j < H; ++j) {
          LD z[4];
          for (std::size_t g = 0; g < 4; ++g) {
            const std::size_t row = g * H + j;
            LD s = bias[row];
            for (std::size_t k = 0; k < I; ++k) s += W[row + k * R] * x[k];
            for (std::size_t k = 0; k < H; ++k) s += U[row + k * R] * h[l][k];
            z[g] = s;
          }
          const LD f = 1.0L / (1.0L + std::exp(-z[0]));
          const LD i = 1.0L / (1.0L + std::exp(-z[1]));
          const LD o = 1.0L / (1.0L + std::exp(-z[2]));
          cn[j] = f * c[l][j] + i * std::tanh(z[3]);
          hn[j] = o * std::tanh(cn[j]);
        }
        h[l] = hn;
        c[l] = std::move(cn);
        x = std::move(hn);
      }
    }
    const auto& HW = p[3 * L];
    const auto& hb = p[3 * L + 1];
    const std::size_t O = hb.size(), H = h[L - 1].size();
    for (std::size_t o = 0; o < O; ++o) {
      LD y = hb[o];
      for (std::size_t k = 0; k < H; ++k) y += HW[o + k * O] * h[L - 1][k];
      const LD d = y - static_cast<LD>(target[static_cast<Eigen::Index>(o)]);
      total += d * d / static_cast<LD>(O);
    }
  }
  return total / static_cast<LD>(B);
}

}  // namespace detail

/// Worst disagreement between backward() and central differences over every parameter.
/// The numeric side re-evaluates the loss cell by cell in extended precision, so it shares
/// no code with the batched forward/backward path. Per component the error is
/// |a - n| / max(|a|, |n|, 1e-8); the floor keeps components that are zero up to rounding
/// from dominating.
inline double grad_check(const ModelParams& model, const Matrix& inputs, std::size_t steps, const Vector& target_norm,
                         double epsilon) {
  model.validate();
  const Matrix targets = target_norm;
  auto fwd = forward_batch(model, inputs, steps, ForwardMode::train(0.0, 0));
  const ModelParams analytic = backward_batch(model, *fwd.cache, targets);

  std::vector<std::vector<long double>> p;
  for (auto t : model.tensors()) p.emplace_back(t.begin(), t.end());
  auto a = analytic.tensors();
  const long double eps = epsilon;
  double worst = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    for (std::size_t i = 0; i < p[t].size(); ++i) {
      const long double saved = p[t][i];
      p[t][i] = saved + eps;
      const long double up = detail::reference_loss(model, p, inputs, steps, target_norm);
      p[t][i] = saved - eps;
      const long double down = detail::reference_loss(model, p, inputs, steps, target_norm);
      p[t][i] = saved;
      const auto numeric = static_cast<double>((up - down) / (2.0L * eps));
      const double scale = std::max({std::abs(numeric), std::abs(a[t][i]), 1e-8});
      worst = std::max(worst, std::abs(numeric - a[t][i]) / scale);
    }
  }
  return worst;
}

inline double grad_check(const ModelParams& model, const WindowSample& sample, double epsilon) {
  Vector target(static_cast<Eigen::Index>(kHorizon));
  const auto& n = model.normalization;
  for (std::size_t h = 0; h < kHorizon; ++h)
    target[static_cast<Eigen::Index>(h)] = normalize(sample.target_kw[h], n.demand_min, n.demand_max);
  return grad_check(model, pack_sequence(sample.inputs), sample.inputs.size(), target, epsilon);
}

struct GridCandidate {
  std::string name;
  Architecture architecture;
  TrainConfig config;
};

struct GridResult {
  std::size_t best_index = 0;
  std::vector<double> validation_mape;
  ModelParams best_model;
};

/// Trains every candidate from a seeded init and keeps the lowest validation MAPE;
/// the earlier candidate wins ties.
inline GridResult grid_search(std::span<const GridCandidate> candidates, std::span<const WindowSample> train_set,
                              std::span<const WindowSample> validation_set, const NormalizationParams& norm) {
  if (candidates.empty()) fail(ErrorCode::EmptyCandidates, "grid_search needs at least one candidate");
  if (validation_set.empty()) fail(ErrorCode::EmptyDataset, "grid_search needs a validation set");
  GridResult out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const auto& cand = candidates[c];
    auto trained = train(init_model(cand.architecture, norm, cand.config.seed), train_set, cand.config);
    const double score = validation_mape(trained.model, validation_set);
    out.validation_mape.push_back(score);
    if (score < best) {
      best = score;
      out.best_index = c;
      out.best_model = std::move(trained.model);
    }
  }
  return out;
}

}  // namespace peakcast
