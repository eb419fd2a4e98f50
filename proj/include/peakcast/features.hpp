#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "peakcast/calendar.hpp"
#include "peakcast/error.hpp"
#include "peakcast/trace.hpp"

namespace peakcast {

// Per-timestep feature layout (version 1):
//   [0]       normalized demand
//   [1..24]   hour-of-day one-hot
//   [25..31]  day-of-week one-hot (Monday first)
//   [32..35]  season one-hot (Fall, Winter, Spring, Summer)
//   [36]      holiday flag
//   [37]      normalized temperature
//   [38]      normalized humidity
inline constexpr std::uint16_t kFeatureLayoutVersion = 1;
inline constexpr std::size_t kFeatureDim = 39;
inline constexpr std::size_t kDemandIndex = 0;
inline constexpr std::size_t kHourOffset = 1;
inline constexpr std::size_t kWeekdayOffset = 25;
inline constexpr std::size_t kSeasonOffset = 32;
inline constexpr std::size_t kHolidayIndex = 36;
inline constexpr std::size_t kTempIndex = 37;
inline constexpr std::size_t kHumidityIndex = 38;

inline constexpr std::size_t kInputHours = 48;
inline constexpr std::size_t kHorizon = 24;

using FeatureVector = std::array<double, kFeatureDim>;
using DayProfile = std::array<double, kHorizon>;

struct NormalizationParams {
  double demand_min = 0.0;
  double demand_max = 1.0;
  double temp_min = 0.0;
  double temp_max = 1.0;
  double humidity_min = 0.0;
  double humidity_max = 1.0;

  bool operator==(const NormalizationParams&) const = default;
};

inline double normalize(double value, double min, double max) {
  return std::clamp((value - min) / (max - min), 0.0, 1.0);
}

inline double denormalize(double scaled, double min, double max) { return min + scaled * (max - min); }

inline NormalizationParams fit_normalizer(const DemandTrace& train) {
  if (train.empty()) fail(ErrorCode::DegenerateChannel, "cannot fit a normalizer on an empty trace");
  NormalizationParams p{train[0].demand_kw, train[0].demand_kw, train[0].temp_f,
                        train[0].temp_f,    train[0].humidity_pct, train[0].humidity_pct};
  for (const auto& r : train) {
    p.demand_min = std::min(p.demand_min, r.demand_kw);
    p.demand_max = std::max(p.demand_max, r.demand_kw);
    p.temp_min = std::min(p.temp_min, r.temp_f);
    p.temp_max = std::max(p.temp_max, r.temp_f);
    p.humidity_min = std::min(p.humidity_min, r.humidity_pct);
    p.humidity_max = std::max(p.humidity_max, r.humidity_pct);
  }
  if (!(p.demand_min < p.demand_max)) fail(ErrorCode::DegenerateChannel, "demand_kw is constant in training data");
  if (!(p.temp_min < p.temp_max)) fail(ErrorCode::DegenerateChannel, "temp_f is constant in training data");
  if (!(p.humidity_min < p.humidity_max))
    fail(ErrorCode::DegenerateChannel, "humidity_pct is constant in training data");
  return p;
}

inline FeatureVector encode_timestep(const DemandRecord& r, const CalendarSpec& cal, const NormalizationParams& p) {
  FeatureVector v{};
  const Date date = r.timestamp.date();
  v[kDemandIndex] = normalize(r.demand_kw, p.demand_min, p.demand_max);
  v[kHourOffset + static_cast<std::size_t>(r.timestamp.hour())] = 1.0;
  v[kWeekdayOffset + static_cast<std::size_t>(weekday_index(date))] = 1.0;
  v[kSeasonOffset + static_cast<std::size_t>(cal.season(date))] = 1.0;
  v[kHolidayIndex] = cal.is_holiday(date) ? 1.0 : 0.0;
  v[kTempIndex] = normalize(r.temp_f, p.temp_min, p.temp_max);
  v[kHumidityIndex] = normalize(r.humidity_pct, p.humidity_min, p.humidity_max);
  return v;
}

struct WindowSample {
  std::vector<FeatureVector> inputs;  // kInputHours, oldest first
  DayProfile target_kw{};
  Date target_date;
};

struct WindowOptions {
  // 24 gives one midnight-aligned sample per day; 1 slides hourly (augmentation only).
  std::size_t stride = 24;
};

/// One sample per day from the third day on; inputs are the 48 hours ending at 23:00
/// of the previous day.
inline std::vector<WindowSample> build_windows(const DemandTrace& trace, const CalendarSpec& cal,
                                               const NormalizationParams& p, WindowOptions opts = {}) {
  constexpr std::size_t span = kInputHours + kHorizon;
  if (trace.size() < span)
    fail(ErrorCode::TooShort, "need at least " + std::to_string(span) + " hours, trace has " +
                                  std::to_string(trace.size()));
  if (!trace.start().at_midnight())
    fail(ErrorCode::BoundaryError, "trace must start at midnight, starts at " + format_date_hour(trace.start()));
  if (opts.stride == 0) fail(ErrorCode::ConfigError, "window stride must be >= 1");

  std::vector<FeatureVector> encoded;
  encoded.reserve(trace.size());
  for (const auto& r : trace) encoded.push_back(encode_timestep(r, cal, p));

  std::vector<WindowSample> out;
  for (std::size_t first = 0; first + span <= trace.size(); first += opts.stride) {
    WindowSample s;
    s.inputs.assign(encoded.begin() + static_cast<std::ptrdiff_t>(first),
                    encoded.begin() + static_cast<std::ptrdiff_t>(first + kInputHours));
    for (std::size_t h = 0; h < kHorizon; ++h) s.target_kw[h] = trace[first + kInputHours + h].demand_kw;
    s.target_date = trace[first + kInputHours].timestamp.date();
    out.push_back(std::move(s));
  }
  return out;
}

/// Encodes the 48 hours preceding `target_date` for a forecast of that day. Only data
/// strictly before the target day's midnight is read.
inline std::vector<FeatureVector> history_inputs(const DemandTrace& trace, Date target_date, const CalendarSpec& cal,
                                                 const NormalizationParams& p) {
  const DateHour midnight{target_date, 0};
  const auto end = trace.index_of(midnight + -1);
  if (end < 0 || end + 1 < static_cast<std::ptrdiff_t>(kInputHours))
    fail(ErrorCode::MissingHistory, "trace lacks the 48 hours before " + format_date(target_date));
  std::vector<FeatureVector> inputs;
  inputs.reserve(kInputHours);
  for (std::ptrdiff_t i = end + 1 - static_cast<std::ptrdiff_t>(kInputHours); i <= end; ++i)
    inputs.push_back(encode_timestep(trace[static_cast<std::size_t>(i)], cal, p));
  return inputs;
}

}  // namespace peakcast
