#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "peakcast/error.hpp"
#include "peakcast/features.hpp"

namespace peakcast {

enum class HourLabel : char { Top = 'T', Bottom = 'B', Neither = 'N' };

inline constexpr int kMaxK = 12;

struct DayLabeling {
  int k = 0;
  std::array<HourLabel, kHorizon> labels{};
  std::vector<int> top_hours;     // ascending
  std::vector<int> bottom_hours;  // ascending
};

/// Min-max layer. Top hours are the k largest demands, bottom hours the k smallest
/// among the remaining hours. Equal demands rank the earlier hour first, and top ranks
/// are allocated before bottom ranks, so the two sets are always disjoint.
inline DayLabeling label_day(std::span<const double> demand, int k) {
  if (demand.size() != kHorizon)
    fail(ErrorCode::LengthMismatch, "label_day expects 24 hourly values, got " + std::to_string(demand.size()));
  if (k < 1 || k > kMaxK) fail(ErrorCode::KOutOfRange, "k must be in 1..12, got " + std::to_string(k));

  std::array<int, kHorizon> order;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return demand[a] > demand[b]; });

  DayLabeling out;
  out.k = k;
  out.labels.fill(HourLabel::Neither);
  out.top_hours.assign(order.begin(), order.begin() + k);
  for (int h : out.top_hours) out.labels[h] = HourLabel::Top;

  std::vector<int> rest;
  for (int h = 0; h < static_cast<int>(kHorizon); ++h)
    if (out.labels[h] != HourLabel::Top) rest.push_back(h);
  std::stable_sort(rest.begin(), rest.end(), [&](int a, int b) { return demand[a] < demand[b]; });
  out.bottom_hours.assign(rest.begin(), rest.begin() + k);
  for (int h : out.bottom_hours) out.labels[h] = HourLabel::Bottom;

  std::sort(out.top_hours.begin(), out.top_hours.end());
  std::sort(out.bottom_hours.begin(), out.bottom_hours.end());
  return out;
}

inline DayLabeling label_day(const DayProfile& demand, int k) { return label_day(std::span<const double>(demand), k); }

inline constexpr std::string_view kLabelHeader = "date,hour,label,demand_kw";

/// Label export rows: `date,hour,label,demand_kw`, demand to 4 decimals.
inline std::string format_label_rows(Date date, const DayLabeling& labeling, const DayProfile& demand) {
  std::string out;
  char buf[64];
  for (std::size_t h = 0; h < kHorizon; ++h) {
    std::snprintf(buf, sizeof buf, ",%zu,%c,%.4f\n", h, static_cast<char>(labeling.labels[h]), demand[h]);
    out += format_date(date) + buf;
  }
  return out;
}

}  // namespace peakcast
