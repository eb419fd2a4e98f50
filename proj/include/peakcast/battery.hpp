#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "peakcast/calendar.hpp"
#include "peakcast/error.hpp"
#include "peakcast/features.hpp"
#include "peakcast/peak_labeler.hpp"

namespace peakcast {

struct BatterySpec {
  double capacity_kwh = 4000.0;
  double max_power_kw = 4000.0;
  double unit_cost_per_kwh = 200.0;
  double round_trip_efficiency = 1.0;

  double cost() const { return capacity_kwh * unit_cost_per_kwh; }
};

struct TariffSpec {
  double demand_charge_per_kw = 22.0;  // $ per kW of monthly peak
};

inline void validate(const BatterySpec& b) {
  if (!(b.capacity_kwh > 0.0)) fail(ErrorCode::ConfigError, "battery capacity_kwh must be > 0");
  if (!(b.max_power_kw > 0.0)) fail(ErrorCode::ConfigError, "battery max_power_kw must be > 0");
  if (!(b.unit_cost_per_kwh >= 0.0)) fail(ErrorCode::ConfigError, "battery unit_cost_per_kwh must be >= 0");
  if (!(b.round_trip_efficiency > 0.0 && b.round_trip_efficiency <= 1.0))
    fail(ErrorCode::ConfigError, "battery round_trip_efficiency must be in (0,1]");
}

inline void validate(const TariffSpec& t) {
  if (!(t.demand_charge_per_kw >= 0.0)) fail(ErrorCode::ConfigError, "demand_charge_per_kw must be >= 0");
}

struct DispatchResult {
  DayProfile net_load_kw{};
  std::array<double, kHorizon + 1> soc_kwh{};  // initial, then after each hour
  double discharged_kwh = 0.0;
  double charged_kwh = 0.0;  // drawn from the grid; stored energy is charged * efficiency
};

/// Hour-by-hour dispatch for one day:
///   T hours discharge min(capacity/k, max power, soc, demand);
///   B hours charge evenly toward full over the remaining B hours (capped by max power);
///   N hours pass demand through.
inline DispatchResult dispatch_day(const DayProfile& demand, const DayLabeling& labeling, const BatterySpec& battery,
                                   double initial_soc) {
  validate(battery);
  if (labeling.k < 1) fail(ErrorCode::KOutOfRange, "labeling k must be >= 1");
  if (!(initial_soc >= 0.0 && initial_soc <= battery.capacity_kwh))
    fail(ErrorCode::SocOutOfRange, "initial soc " + std::to_string(initial_soc) + " outside [0, capacity]");

  const double per_hour = battery.capacity_kwh / labeling.k;
  const double eff = battery.round_trip_efficiency;
  int bottom_left = static_cast<int>(labeling.bottom_hours.size());

  DispatchResult r;
  double soc = initial_soc;
  r.soc_kwh[0] = soc;
  for (std::size_t h = 0; h < kHorizon; ++h) {
    double net = demand[h];
    switch (labeling.labels[h]) {
      case HourLabel::Top: {
        const double out = std::max(0.0, std::min({per_hour, battery.max_power_kw, soc, demand[h]}));
        soc -= out;
        net -= out;
        r.discharged_kwh += out;
        break;
      }
      case HourLabel::Bottom: {
        const double room = battery.capacity_kwh - soc;
        const double draw = std::max(0.0, std::min(room / eff / std::max(bottom_left, 1), battery.max_power_kw));
        soc = std::min(battery.capacity_kwh, soc + draw * eff);
        net += draw;
        r.charged_kwh += draw;
        --bottom_left;
        break;
      }
      case HourLabel::Neither:
        break;
    }
    r.net_load_kw[h] = net;
    r.soc_kwh[h + 1] = soc;
  }
  return r;
}

struct MonthDay {
  Date date;
  DayProfile demand_kw{};
  DispatchResult dispatch;
};

/// Demand-charge reduction for one calendar month: (raw peak - net peak) * rate.
inline double monthly_demand_savings(std::span<const MonthDay> days, const TariffSpec& tariff) {
  validate(tariff);
  if (days.empty()) fail(ErrorCode::IncompleteMonth, "no days supplied");
  const Date first = days.front().date;
  const std::chrono::year_month_day ymd{first};
  if (static_cast<unsigned>(ymd.day()) != 1 || days.size() != days_in_month(first))
    fail(ErrorCode::IncompleteMonth, "month starting " + format_date(first) + " is not complete");
  double raw_peak = 0.0, net_peak = 0.0;
  for (std::size_t d = 0; d < days.size(); ++d) {
    if (days[d].date != first + std::chrono::days{static_cast<int>(d)})
      fail(ErrorCode::IncompleteMonth, "days of month " + format_date(first) + " are not consecutive");
    for (std::size_t h = 0; h < kHorizon; ++h) {
      raw_peak = std::max(raw_peak, days[d].demand_kw[h]);
      net_peak = std::max(net_peak, days[d].dispatch.net_load_kw[h]);
    }
  }
  return (raw_peak - net_peak) * tariff.demand_charge_per_kw;
}

struct MonthSavings {
  Date month_start;
  double savings_usd = 0.0;
  double raw_peak_kw = 0.0;
  double net_peak_kw = 0.0;
};

struct DayPlan {
  Date date;
  DayProfile demand_kw{};
  DayLabeling labeling;
};

/// Dispatches consecutive days carrying state of charge forward, then scores every complete
/// calendar month. Partial months at either end are skipped.
inline std::vector<MonthSavings> simulate_months(std::span<const DayPlan> plan, const BatterySpec& battery,
                                                 const TariffSpec& tariff, std::vector<MonthDay>* trace_out = nullptr) {
  std::vector<MonthDay> days;
  double soc = battery.capacity_kwh;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (i > 0 && plan[i].date != plan[i - 1].date + std::chrono::days{1})
      fail(ErrorCode::GapError, "simulation days are not consecutive at " + format_date(plan[i].date));
    auto r = dispatch_day(plan[i].demand_kw, plan[i].labeling, battery, soc);
    soc = std::clamp(r.soc_kwh.back(), 0.0, battery.capacity_kwh);
    days.push_back({plan[i].date, plan[i].demand_kw, r});
  }
  std::vector<MonthSavings> months;
  std::size_t i = 0;
  while (i < days.size()) {
    const std::chrono::year_month_day ymd{days[i].date};
    std::size_t j = i;
    while (j < days.size() && std::chrono::year_month_day{days[j].date}.month() == ymd.month()) ++j;
    const std::span<const MonthDay> month(days.data() + i, j - i);
    if (static_cast<unsigned>(ymd.day()) == 1 && month.size() == days_in_month(days[i].date)) {
      MonthSavings m{days[i].date, monthly_demand_savings(month, tariff), 0.0, 0.0};
      for (const auto& d : month)
        for (std::size_t h = 0; h < kHorizon; ++h) {
          m.raw_peak_kw = std::max(m.raw_peak_kw, d.demand_kw[h]);
          m.net_peak_kw = std::max(m.net_peak_kw, d.dispatch.net_load_kw[h]);
        }
      months.push_back(m);
    }
    i = j;
  }
  if (trace_out) *trace_out = std::move(days);
  return months;
}

/// Annual savings assuming capacity/k kW is removed from every monthly peak with
/// probability `accuracy_fraction`: (capacity/k) * accuracy * rate * 12.
inline double closed_form_savings(double capacity_kwh, int k, double accuracy_fraction, const TariffSpec& tariff) {
  if (k < 1) fail(ErrorCode::RangeError, "k must be >= 1");
  if (!(accuracy_fraction >= 0.0 && accuracy_fraction <= 1.0))
    fail(ErrorCode::RangeError, "accuracy must be in [0,1]");
  if (!(capacity_kwh >= 0.0)) fail(ErrorCode::RangeError, "capacity must be >= 0");
  validate(tariff);
  return capacity_kwh / k * accuracy_fraction * tariff.demand_charge_per_kw * 12.0;
}

inline double payback_years(double battery_cost, double annual_savings) {
  if (!(annual_savings > 0.0)) fail(ErrorCode::NoSavings, "annual savings must be > 0 for a payback period");
  if (!(battery_cost >= 0.0)) fail(ErrorCode::RangeError, "battery cost must be >= 0");
  return battery_cost / annual_savings;
}

struct SavingsRow {
  double capacity_kwh = 0.0;
  int k = 0;
  double accuracy = 0.0;
  double annual_savings_usd = 0.0;
  double payback_years = 0.0;
};

using SavingsReport = std::vector<SavingsRow>;

/// Full capacity x k grid; `accuracy_by_k[k-1]` is the capture fraction for k.
inline SavingsReport savings_sweep(std::span<const double> capacities, std::span<const int> ks,
                                   std::span<const double> accuracy_by_k, const TariffSpec& tariff,
                                   double unit_cost_per_kwh) {
  SavingsReport out;
  for (double cap : capacities) {
    for (int k : ks) {
      if (k < 1 || static_cast<std::size_t>(k) > accuracy_by_k.size())
        fail(ErrorCode::RangeError, "no accuracy supplied for k=" + std::to_string(k));
      const double acc = accuracy_by_k[static_cast<std::size_t>(k - 1)];
      const double s = closed_form_savings(cap, k, acc, tariff);
      out.push_back({cap, k, acc, s, payback_years(cap * unit_cost_per_kwh, s)});
    }
  }
  return out;
}

inline constexpr std::string_view kSavingsHeader = "capacity_kwh,k,accuracy,annual_savings_usd,payback_years";

inline std::string format_savings_rows(const SavingsReport& report) {
  std::string out;
  char buf[160];
  for (const auto& r : report) {
    std::snprintf(buf, sizeof buf, "%.4f,%d,%.4f,%.4f,%.4f\n", r.capacity_kwh, r.k, r.accuracy, r.annual_savings_usd,
                  r.payback_years);
    out += buf;
  }
  return out;
}

}  // namespace peakcast
