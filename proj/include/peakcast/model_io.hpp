#pragma once

#include <bit>
#include <cmath>
#include <limits>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "peakcast/baselines.hpp"
#include "peakcast/error.hpp"
#include "peakcast/features.hpp"
#include "peakcast/lstm.hpp"

namespace peakcast {

// Model container, little-endian:
//
//   "PKFC" | u16 format_version | u16 feature_layout_version | u8 precision | u8 model_type
//   | u32 parameter_count | body | 6 x f64 normalization (demand, temp, humidity min/max)
//
// LSTM body:   u32 layers | per layer u32 input_size, u32 hidden_size | u32 outputs
//              | per layer W_f,U_f,b_f, W_i,U_i,b_i, W_o,U_o,b_o, W_c,U_c,b_c (row-major)
//              | head W (outputs x H_top, row-major) | head b
// Linear body: u32 inputs | u32 outputs | f64 ridge_lambda | W (row-major) | intercept
//
// Weights are f64 (precision 0) or IEEE binary16 (precision 1).
inline constexpr std::uint16_t kModelFormatVersion = 1;

enum class Precision : std::uint8_t { Full = 0, Half = 1 };
enum class ModelType : std::uint8_t { Lstm = 0, LinearRegression = 1 };

/// double -> binary16 bits, round to nearest even, saturating to infinity on overflow.
inline std::uint16_t to_half_bits(double value) {
  const auto f = std::bit_cast<std::uint32_t>(static_cast<float>(value));
  const std::uint32_t sign = (f >> 16) & 0x8000u;
  const std::uint32_t abs = f & 0x7fffffffu;
  if (abs >= 0x7f800000u) return static_cast<std::uint16_t>(sign | 0x7c00u | (abs > 0x7f800000u ? 0x200u : 0u));
  if (abs >= 0x477ff000u) return static_cast<std::uint16_t>(sign | 0x7c00u);  // rounds past 65504
  if (abs < 0x38800000u) {                                                    // subnormal half
    if (abs < 0x33000000u) return static_cast<std::uint16_t>(sign);
    const std::uint32_t mant = (abs & 0x7fffffu) | 0x800000u;
    const int shift = 126 - static_cast<int>(abs >> 23);
    std::uint32_t h = mant >> shift;
    const std::uint32_t rem = mant & ((1u << shift) - 1u);
    const std::uint32_t half = 1u << (shift - 1);
    if (rem > half || (rem == half && (h & 1u))) ++h;
    return static_cast<std::uint16_t>(sign | h);
  }
  std::uint32_t h = ((abs >> 13) - (112u << 10));
  const std::uint32_t rem = abs & 0x1fffu;
  if (rem > 0x1000u || (rem == 0x1000u && (h & 1u))) ++h;
  return static_cast<std::uint16_t>(sign | h);
}

inline double from_half_bits(std::uint16_t bits) {
  const int sign = (bits & 0x8000) ? -1 : 1;
  const int exp = (bits >> 10) & 0x1f;
  const int mant = bits & 0x3ff;
  if (exp == 0) return sign * std::ldexp(static_cast<double>(mant), -24);
  if (exp == 31) return mant ? std::numeric_limits<double>::quiet_NaN() : sign * std::numeric_limits<double>::infinity();
  return sign * std::ldexp(static_cast<double>(mant | 0x400), exp - 25);
}

namespace detail {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void real(double v, Precision p) {
    if (p == Precision::Full) f64(v);
    else u16(to_half_bits(v));
  }
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  double f64() { return std::bit_cast<double>(get(8)); }
  double real(Precision p) { return p == Precision::Full ? f64() : from_half_bits(u16()); }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void need(std::size_t n) const {
    if (remaining() < n) fail(ErrorCode::TruncatedFile, "model file ends early at byte " + std::to_string(pos_));
  }

 private:
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

template <typename M>
void write_row_major(ByteWriter& w, const M& m, Precision p) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.real(m(r, c), p);
}

template <typename M>
void read_row_major(ByteReader& in, M&& m, Precision p) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = in.real(p);
}

inline void write_header(ByteWriter& w, std::uint16_t layout, Precision p, ModelType type, std::size_t params) {
  w.raw("PKFC");
  w.u16(kModelFormatVersion);
  w.u16(layout);
  w.u8(static_cast<std::uint8_t>(p));
  w.u8(static_cast<std::uint8_t>(type));
  w.u32(static_cast<std::uint32_t>(params));
}

inline void write_norm(ByteWriter& w, const NormalizationParams& n) {
  for (double v : {n.demand_min, n.demand_max, n.temp_min, n.temp_max, n.humidity_min, n.humidity_max}) w.f64(v);
}

inline NormalizationParams read_norm(ByteReader& in) {
  NormalizationParams n;
  n.demand_min = in.f64();
  n.demand_max = in.f64();
  n.temp_min = in.f64();
  n.temp_max = in.f64();
  n.humidity_min = in.f64();
  n.humidity_max = in.f64();
  return n;
}

struct Header {
  std::uint16_t layout = 0;
  Precision precision = Precision::Full;
  ModelType type = ModelType::Lstm;
  std::uint32_t parameter_count = 0;
};

inline Header read_header(ByteReader& in) {
  in.need(4);
  char magic[4];
  for (char& c : magic) c = static_cast<char>(in.u8());
  if (std::string_view(magic, 4) != "PKFC") fail(ErrorCode::BadMagic, "not a peak-forecast model file");
  if (const auto v = in.u16(); v != kModelFormatVersion)
    fail(ErrorCode::VersionMismatch, "model format version " + std::to_string(v) + ", expected " +
                                         std::to_string(kModelFormatVersion));
  Header h;
  h.layout = in.u16();
  if (h.layout != kFeatureLayoutVersion)
    fail(ErrorCode::VersionMismatch, "feature layout version " + std::to_string(h.layout) + ", expected " +
                                         std::to_string(kFeatureLayoutVersion));
  const auto p = in.u8();
  if (p > 1) fail(ErrorCode::VersionMismatch, "unknown precision flag " + std::to_string(p));
  h.precision = static_cast<Precision>(p);
  const auto t = in.u8();
  if (t > 1) fail(ErrorCode::VersionMismatch, "unknown model type " + std::to_string(t));
  h.type = static_cast<ModelType>(t);
  h.parameter_count = in.u32();
  return h;
}

inline std::uint32_t read_dim(ByteReader& in, const char* what) {
  const auto v = in.u32();
  if (v == 0 || v > 1'000'000) fail(ErrorCode::DimensionMismatch, std::string("implausible ") + what);
  return v;
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize(const ModelParams& model, Precision precision = Precision::Full) {
  model.validate();
  detail::ByteWriter w;
  detail::write_header(w, model.feature_layout_version, precision, ModelType::Lstm, model.parameter_count());
  w.u32(static_cast<std::uint32_t>(model.layers.size()));
  for (const auto& l : model.layers) {
    w.u32(static_cast<std::uint32_t>(l.input_size));
    w.u32(static_cast<std::uint32_t>(l.hidden_size));
  }
  w.u32(static_cast<std::uint32_t>(model.output_size()));
  for (const auto& l : model.layers) {
    for (Gate g : {Gate::Forget, Gate::Input, Gate::Output, Gate::Cell}) {
      detail::write_row_major(w, l.W_gate(g), precision);
      detail::write_row_major(w, l.U_gate(g), precision);
      for (Eigen::Index i = 0; i < l.b_gate(g).size(); ++i) w.real(l.b_gate(g)[i], precision);
    }
  }
  detail::write_row_major(w, model.head_weights, precision);
  for (Eigen::Index i = 0; i < model.head_bias.size(); ++i) w.real(model.head_bias[i], precision);
  detail::write_norm(w, model.normalization);
  return w.take();
}

inline std::vector<std::uint8_t> serialize(const LinRegModel& model, Precision precision = Precision::Full) {
  detail::ByteWriter w;
  detail::write_header(w, model.feature_layout_version, precision, ModelType::LinearRegression,
                       model.parameter_count());
  w.u32(static_cast<std::uint32_t>(model.weights.cols()));
  w.u32(static_cast<std::uint32_t>(model.weights.rows()));
  w.f64(model.ridge_lambda);
  detail::write_row_major(w, model.weights, precision);
  for (Eigen::Index i = 0; i < model.intercept.size(); ++i) w.real(model.intercept[i], precision);
  detail::write_norm(w, model.normalization);
  return w.take();
}

using AnyModel = std::variant<ModelParams, LinRegModel>;

struct ModelFileInfo {
  ModelType type = ModelType::Lstm;
  Precision precision = Precision::Full;
  std::uint32_t parameter_count = 0;
};

inline AnyModel deserialize_any(std::span<const std::uint8_t> bytes, ModelFileInfo* info = nullptr) {
  detail::ByteReader in(bytes);
  const auto h = detail::read_header(in);
  if (info) *info = {h.type, h.precision, h.parameter_count};
  const std::size_t width = h.precision == Precision::Full ? 8 : 2;

  auto finish = [&](auto model, std::size_t params) -> AnyModel {
    model.normalization = detail::read_norm(in);
    if (in.remaining() != 0) fail(ErrorCode::TruncatedFile, "trailing bytes after model payload");
    if (params != h.parameter_count)
      fail(ErrorCode::DimensionMismatch, "stored parameter count " + std::to_string(h.parameter_count) +
                                             " disagrees with dimensions (" + std::to_string(params) + ")");
    return model;
  };

  if (h.type == ModelType::LinearRegression) {
    LinRegModel m;
    const auto inputs = detail::read_dim(in, "input count");
    const auto outputs = detail::read_dim(in, "output count");
    m.ridge_lambda = in.f64();
    in.need((static_cast<std::size_t>(inputs) + 1) * outputs * width);
    m.weights.resize(outputs, inputs);
    m.intercept.resize(outputs);
    detail::read_row_major(in, m.weights, h.precision);
    for (Eigen::Index i = 0; i < m.intercept.size(); ++i) m.intercept[i] = in.real(h.precision);
    return finish(std::move(m), static_cast<std::size_t>(inputs + 1) * outputs);
  }

  const auto count = detail::read_dim(in, "layer count");
  Architecture arch;
  arch.hidden_sizes.clear();
  for (std::uint32_t l = 0; l < count; ++l) {
    const auto input = detail::read_dim(in, "layer input size");
    if (l == 0) arch.input_size = input;
    else if (input != arch.hidden_sizes.back()) fail(ErrorCode::DimensionMismatch, "layer sizes do not chain");
    arch.hidden_sizes.push_back(detail::read_dim(in, "hidden size"));
  }
  arch.output_size = detail::read_dim(in, "output size");
  const std::size_t params = parameter_count(arch);
  in.need(params * width);
  ModelParams m = zero_model(arch);
  m.feature_layout_version = h.layout;
  for (auto& l : m.layers) {
    for (Gate g : {Gate::Forget, Gate::Input, Gate::Output, Gate::Cell}) {
      detail::read_row_major(in, l.W_gate(g), h.precision);
      detail::read_row_major(in, l.U_gate(g), h.precision);
      auto b = l.b_gate(g);
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = in.real(h.precision);
    }
  }
  detail::read_row_major(in, m.head_weights, h.precision);
  for (Eigen::Index i = 0; i < m.head_bias.size(); ++i) m.head_bias[i] = in.real(h.precision);
  return finish(std::move(m), params);
}

inline ModelParams deserialize(std::span<const std::uint8_t> bytes) {
  auto any = deserialize_any(bytes);
  if (auto* m = std::get_if<ModelParams>(&any)) return std::move(*m);
  fail(ErrorCode::ConfigError, "model file holds a linear regression model, not an LSTM");
}

inline void save_model(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

inline std::vector<std::uint8_t> load_bytes(const std::string& path) {
  const auto s = read_file(path);
  return {s.begin(), s.end()};
}

}  // namespace peakcast
