#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "peakcast/error.hpp"
#include "peakcast/features.hpp"
#include "peakcast/peak_labeler.hpp"

namespace peakcast {

/// 100/N * sum |a - p| / a over all entries.
inline double mape(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size() || actual.empty())
    fail(ErrorCode::LengthMismatch, "mape needs equal non-zero lengths (" + std::to_string(actual.size()) + " vs " +
                                        std::to_string(predicted.size()) + ")");
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (!(actual[i] > 0.0))
      fail(ErrorCode::NonPositiveActual, "actual value at index " + std::to_string(i) + " is not positive");
    sum += std::abs(actual[i] - predicted[i]) / actual[i];
  }
  return 100.0 * sum / static_cast<double>(actual.size());
}

enum class CaptureMode { HourLevel, DayExact };

using HourSet = std::vector<int>;

/// hour_level: share of true peak hours recovered; day_exact: share of days recovered exactly.
inline double capture_accuracy(std::span<const HourSet> predicted, std::span<const HourSet> truth, int k,
                               CaptureMode mode) {
  if (predicted.size() != truth.size() || predicted.empty())
    fail(ErrorCode::CardinalityMismatch, "capture_accuracy needs the same non-zero day count on both sides");
  std::size_t hits = 0, exact = 0;
  for (std::size_t d = 0; d < predicted.size(); ++d) {
    if (predicted[d].size() != static_cast<std::size_t>(k) || truth[d].size() != static_cast<std::size_t>(k))
      fail(ErrorCode::CardinalityMismatch, "day " + std::to_string(d) + " does not hold exactly k hours");
    HourSet p = predicted[d], t = truth[d];
    std::sort(p.begin(), p.end());
    std::sort(t.begin(), t.end());
    HourSet common;
    std::set_intersection(p.begin(), p.end(), t.begin(), t.end(), std::back_inserter(common));
    hits += common.size();
    exact += common.size() == static_cast<std::size_t>(k) ? 1 : 0;
  }
  const auto days = static_cast<double>(predicted.size());
  if (mode == CaptureMode::HourLevel) return 100.0 * static_cast<double>(hits) / (k * days);
  return 100.0 * static_cast<double>(exact) / days;
}

struct AccuracyRow {
  int k = 0;
  double top_hour = 0, top_day = 0, bottom_hour = 0, bottom_day = 0;
};

struct AccuracyTable {
  std::string model;
  std::vector<AccuracyRow> rows;  // one per k
  std::size_t days = 0;
  double mape = 0.0;

  const AccuracyRow& at_k(int k) const {
    for (const auto& r : rows)
      if (r.k == k) return r;
    fail(ErrorCode::KOutOfRange, "no accuracy row for k=" + std::to_string(k));
  }
};

struct EvalDay {
  DayProfile actual;
  DayProfile predicted;
};

inline AccuracyTable score_days(std::string model, std::span<const EvalDay> days, int k_min = 1, int k_max = 5) {
  if (days.empty()) fail(ErrorCode::EmptyDataset, "no test days to evaluate");
  AccuracyTable table;
  table.model = std::move(model);
  table.days = days.size();
  std::vector<double> all_actual, all_pred;
  for (const auto& d : days) {
    all_actual.insert(all_actual.end(), d.actual.begin(), d.actual.end());
    all_pred.insert(all_pred.end(), d.predicted.begin(), d.predicted.end());
  }
  table.mape = mape(all_actual, all_pred);
  for (int k = k_min; k <= k_max; ++k) {
    std::vector<HourSet> pt, tt, pb, tb;
    for (const auto& d : days) {
      auto lp = label_day(d.predicted, k);
      auto lt = label_day(d.actual, k);
      pt.push_back(lp.top_hours);
      tt.push_back(lt.top_hours);
      pb.push_back(lp.bottom_hours);
      tb.push_back(lt.bottom_hours);
    }
    table.rows.push_back({k, capture_accuracy(pt, tt, k, CaptureMode::HourLevel),
                          capture_accuracy(pt, tt, k, CaptureMode::DayExact),
                          capture_accuracy(pb, tb, k, CaptureMode::HourLevel),
                          capture_accuracy(pb, tb, k, CaptureMode::DayExact)});
  }
  return table;
}

using PredictFn = std::function<DayProfile(const WindowSample&)>;

/// Predicts every test day, labels both forecast and truth, and tabulates capture
/// accuracy for k in [k_min, k_max] plus the MAPE over all test hours.
inline AccuracyTable evaluate_model(std::string model, const PredictFn& predict, std::span<const WindowSample> test,
                                    int k_min = 1, int k_max = 5) {
  std::vector<EvalDay> days;
  days.reserve(test.size());
  for (const auto& s : test) days.push_back({s.target_kw, predict(s)});
  return score_days(std::move(model), days, k_min, k_max);
}

inline constexpr std::string_view kAccuracyHeader = "model,k,top_acc_hour,top_acc_day,bottom_acc_hour,bottom_acc_day";

inline std::string format_accuracy_rows(const AccuracyTable& t) {
  std::string out;
  char buf[160];
  for (const auto& r : t.rows) {
    std::snprintf(buf, sizeof buf, ",%d,%.4f,%.4f,%.4f,%.4f\n", r.k, r.top_hour, r.top_day, r.bottom_hour,
                  r.bottom_day);
    out += t.model + buf;
  }
  return out;
}

}  // namespace peakcast
