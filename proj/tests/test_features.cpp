#include <gtest/gtest.h>

#include <numeric>

#include "peakcast/features.hpp"
#include "test_util.hpp"

using namespace peakcast;

namespace {

double block_sum(const FeatureVector& v, std::size_t offset, std::size_t n) {
  return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(offset),
                         v.begin() + static_cast<std::ptrdiff_t>(offset + n), 0.0);
}

}  // namespace

TEST(FitNormalizer, CampusExtremes) {
  std::vector<double> d(30, 15000.0);
  d[3] = 9934.0;
  d[17] = 26219.0;
  auto p = fit_normalizer(test::hourly_trace(make_date(2018, 5, 1), d));
  EXPECT_EQ(p.demand_min, 9934.0);
  EXPECT_EQ(p.demand_max, 26219.0);
}

TEST(FitNormalizer, TwoPoints) {
  auto p = fit_normalizer(test::hourly_trace(make_date(2018, 5, 1), {10.0, 20.0}));
  EXPECT_EQ(p.demand_min, 10.0);
  EXPECT_EQ(p.demand_max, 20.0);
  EXPECT_EQ(p.temp_min, 50.0);
  EXPECT_EQ(p.temp_max, 51.0);
}

TEST(FitNormalizer, ConstantChannelRejected) {
  std::vector<DemandRecord> recs;
  for (int h = 0; h < 5; ++h) recs.push_back({DateHour{make_date(2018, 5, 1), h}, 100.0 + h, 50.0 + h, 40.0});
  EXPECT_ERROR_CODE(fit_normalizer(DemandTrace{recs}), ErrorCode::DegenerateChannel);
  EXPECT_ERROR_CODE(fit_normalizer(test::hourly_trace(make_date(2018, 5, 1), {7.0, 7.0, 7.0})),
                    ErrorCode::DegenerateChannel);
}

TEST(Normalize, ExtremesAndClamp) {
  EXPECT_EQ(normalize(9934, 9934, 26219), 0.0);
  EXPECT_EQ(normalize(26219, 9934, 26219), 1.0);
  EXPECT_EQ(normalize(30000, 9934, 26219), 1.0);
  EXPECT_EQ(normalize(5000, 9934, 26219), 0.0);
  EXPECT_DOUBLE_EQ(normalize(18076.5, 9934, 26219), 0.5);
  EXPECT_DOUBLE_EQ(denormalize(normalize(12345, 9934, 26219), 9934, 26219), 12345);
}

TEST(Encode, MondayMidnightInJanuary) {
  NormalizationParams p{10, 20, 0, 100, 0, 100};
  auto v = encode_timestep({DateHour{make_date(2018, 1, 8), 0}, 15, 25, 80}, CalendarSpec{}, p);
  EXPECT_EQ(v.size(), 39u);
  EXPECT_EQ(v[0], 0.5);
  EXPECT_EQ(v[1], 1.0);
  EXPECT_EQ(v[25], 1.0);
  EXPECT_EQ(v[33], 1.0);  // Winter
  EXPECT_EQ(v[36], 0.0);
  EXPECT_EQ(v[37], 0.25);
  EXPECT_EQ(v[38], 0.8);
  EXPECT_EQ(block_sum(v, 1, 38 - 1 - 2), 3.0);
}

TEST(Encode, SeasonOrderAndWeekdaySlots) {
  NormalizationParams p{};
  const CalendarSpec cal;
  auto season_slot = [&](unsigned month) {
    auto v = encode_timestep({DateHour{make_date(2019, month, 10), 5}, 1, 0.5, 0.5}, cal, p);
    for (std::size_t i = 0; i < 4; ++i)
      if (v[kSeasonOffset + i] == 1.0) return static_cast<int>(i);
    return -1;
  };
  EXPECT_EQ(season_slot(10), 0);  // Fall
  EXPECT_EQ(season_slot(1), 1);   // Winter
  EXPECT_EQ(season_slot(4), 2);   // Spring
  EXPECT_EQ(season_slot(7), 3);   // Summer
  auto sunday = encode_timestep({DateHour{make_date(2018, 1, 14), 23}, 1, 0.5, 0.5}, cal, p);
  EXPECT_EQ(sunday[kWeekdayOffset + 6], 1.0);
  EXPECT_EQ(sunday[kHourOffset + 23], 1.0);
}

TEST(Encode, HolidayFlag) {
  CalendarSpec cal;
  cal.holidays.insert(make_date(2018, 7, 4));
  NormalizationParams p{};
  auto v = encode_timestep({DateHour{make_date(2018, 7, 4), 12}, 1, 0.5, 0.5}, cal, p);
  EXPECT_EQ(v[36], 1.0);
  auto w = encode_timestep({DateHour{make_date(2018, 7, 5), 12}, 1, 0.5, 0.5}, cal, p);
  EXPECT_EQ(w[36], 0.0);
}

TEST(BuildWindows, TenDaysGiveEightSamples) {
  auto t = generate_synthetic(test::small_synthetic(10, 1));
  auto w = build_windows(t, CalendarSpec{}, fit_normalizer(t));
  ASSERT_EQ(w.size(), 8u);
  EXPECT_EQ(w.front().target_date, t.start().date() + std::chrono::days{2});
  EXPECT_EQ(w.back().target_date, t.start().date() + std::chrono::days{9});
}

TEST(BuildWindows, ThreeDaysGiveOneSample) {
  auto t = generate_synthetic(test::small_synthetic(3, 1));
  auto w = build_windows(t, CalendarSpec{}, fit_normalizer(t));
  ASSERT_EQ(w.size(), 1u);
  EXPECT_EQ(w[0].target_date, make_date(2018, 1, 3));
  EXPECT_EQ(w[0].inputs.size(), 48u);
  for (std::size_t h = 0; h < 24; ++h) EXPECT_EQ(w[0].target_kw[h], t[48 + h].demand_kw);
}

TEST(BuildWindows, Errors) {
  auto t = generate_synthetic(test::small_synthetic(3, 1));
  auto p = fit_normalizer(t);
  EXPECT_ERROR_CODE(build_windows(t.slice(0, 71), CalendarSpec{}, p), ErrorCode::TooShort);
  EXPECT_ERROR_CODE(build_windows(t.slice(1, 71), CalendarSpec{}, p), ErrorCode::TooShort);
  auto longer = generate_synthetic(test::small_synthetic(4, 1));
  EXPECT_ERROR_CODE(build_windows(longer.slice(5, 80), CalendarSpec{}, p), ErrorCode::BoundaryError);
}

TEST(BuildWindows, DecodingAndOneHotProperties) {
  auto t = generate_synthetic(test::small_synthetic(12, 9));
  // Fit on a prefix so later hours can fall outside the range and get clamped.
  auto p = fit_normalizer(t.slice(0, 100));
  const auto cal = default_calendar(2018, 2018);
  auto w = build_windows(t, cal, p);
  for (std::size_t s = 0; s < w.size(); ++s) {
    for (std::size_t h = 0; h < kInputHours; ++h) {
      const auto& v = w[s].inputs[h];
      const auto& r = t[s * 24 + h];
      const double expect = std::clamp((r.demand_kw - p.demand_min) / (p.demand_max - p.demand_min), 0.0, 1.0);
      EXPECT_NEAR(v[0], expect, 1e-15);
      EXPECT_EQ(block_sum(v, kHourOffset, 24), 1.0);
      EXPECT_EQ(block_sum(v, kWeekdayOffset, 7), 1.0);
      EXPECT_EQ(block_sum(v, kSeasonOffset, 4), 1.0);
      EXPECT_TRUE(v[kHolidayIndex] == 0.0 || v[kHolidayIndex] == 1.0);
      for (std::size_t i : {kDemandIndex, kTempIndex, kHumidityIndex}) {
        EXPECT_GE(v[i], 0.0);
        EXPECT_LE(v[i], 1.0);
      }
    }
  }
}

TEST(BuildWindows, InputsEndAtPriorDay2300) {
  auto t = generate_synthetic(test::small_synthetic(8, 2));
  auto p = fit_normalizer(t);
  auto w = build_windows(t, CalendarSpec{}, p);
  for (const auto& s : w) {
    EXPECT_EQ(s.inputs.back()[kHourOffset + 23], 1.0);
    EXPECT_EQ(s.inputs.front()[kHourOffset + 0], 1.0);
    // Changing the target day's data must not change the inputs.
    std::vector<DemandRecord> recs(t.begin(), t.end());
    const auto first = static_cast<std::size_t>(DateHour{s.target_date, 0} - t.start());
    for (std::size_t h = first; h < recs.size(); ++h) {
      recs[h].demand_kw *= 1.5;
      recs[h].temp_f += 10;
    }
    auto again = build_windows(DemandTrace{recs}, CalendarSpec{}, p);
    const auto idx = static_cast<std::size_t>(&s - w.data());
    EXPECT_EQ(again[idx].inputs, s.inputs);
    EXPECT_EQ(history_inputs(t, s.target_date, CalendarSpec{}, p), s.inputs);
  }
}

TEST(BuildWindows, StrideOneSlidesHourly) {
  auto t = generate_synthetic(test::small_synthetic(4, 2));
  auto w = build_windows(t, CalendarSpec{}, fit_normalizer(t), WindowOptions{1});
  EXPECT_EQ(w.size(), 96u - 72u + 1u);
  EXPECT_EQ(w[1].target_kw[0], t[49].demand_kw);
}

TEST(HistoryInputs, MissingHistory) {
  auto t = generate_synthetic(test::small_synthetic(4, 2));
  auto p = fit_normalizer(t);
  EXPECT_ERROR_CODE(history_inputs(t, t.start().date() + std::chrono::days{1}, CalendarSpec{}, p),
                    ErrorCode::MissingHistory);
  EXPECT_ERROR_CODE(history_inputs(t, t.start().date() + std::chrono::days{9}, CalendarSpec{}, p),
                    ErrorCode::MissingHistory);
  EXPECT_EQ(history_inputs(t, t.start().date() + std::chrono::days{4}, CalendarSpec{}, p).size(), 48u);
}
