#include <gtest/gtest.h>

#include <random>

#include "peakcast/metrics.hpp"
#include "test_util.hpp"

using namespace peakcast;

TEST(Mape, Examples) {
  const std::vector<double> a{100, 200};
  EXPECT_EQ(mape(a, a), 0.0);
  EXPECT_DOUBLE_EQ(mape(a, std::vector<double>{90, 220}), 10.0);
  EXPECT_ERROR_CODE(mape(std::vector<double>{0, 1}, std::vector<double>{1, 1}), ErrorCode::NonPositiveActual);
  EXPECT_ERROR_CODE(mape(a, std::vector<double>{1}), ErrorCode::LengthMismatch);
  EXPECT_ERROR_CODE(mape(std::vector<double>{}, std::vector<double>{}), ErrorCode::LengthMismatch);
}

TEST(Mape, ScaleInvariant) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(1, 100), s(0.01, 1000);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(30), p(30);
    for (std::size_t i = 0; i < 30; ++i) {
      a[i] = u(rng);
      p[i] = u(rng);
    }
    const double c = s(rng);
    std::vector<double> ac = a, pc = p;
    for (std::size_t i = 0; i < 30; ++i) {
      ac[i] *= c;
      pc[i] *= c;
    }
    EXPECT_NEAR(mape(ac, pc), mape(a, p), 1e-10);
  }
}

TEST(Capture, Examples) {
  std::vector<HourSet> p{{10, 11}}, t{{11, 12}};
  EXPECT_DOUBLE_EQ(capture_accuracy(p, t, 2, CaptureMode::HourLevel), 50.0);
  EXPECT_DOUBLE_EQ(capture_accuracy(p, t, 2, CaptureMode::DayExact), 0.0);
  EXPECT_DOUBLE_EQ(capture_accuracy(t, t, 2, CaptureMode::HourLevel), 100.0);
  EXPECT_DOUBLE_EQ(capture_accuracy(t, t, 2, CaptureMode::DayExact), 100.0);
  EXPECT_ERROR_CODE(capture_accuracy(p, std::vector<HourSet>{{1}}, 2, CaptureMode::HourLevel),
                    ErrorCode::CardinalityMismatch);
  EXPECT_ERROR_CODE(capture_accuracy(p, std::vector<HourSet>{{1, 2}, {3, 4}}, 2, CaptureMode::HourLevel),
                    ErrorCode::CardinalityMismatch);
}

TEST(Capture, NineteenDayDenominator) {
  std::vector<HourSet> p, t;
  for (int d = 0; d < 19; ++d) {
    p.push_back({14});
    t.push_back({d < 9 ? 14 : 15});
  }
  const double acc = capture_accuracy(p, t, 1, CaptureMode::DayExact);
  EXPECT_NEAR(acc, 47.37, 0.005);
  EXPECT_EQ(std::lround(acc), 47);
}

TEST(Capture, HourLevelDominatesAndIsSymmetric) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 12);
    const std::size_t days = 1 + rng() % 30;
    std::vector<HourSet> p, t;
    for (std::size_t d = 0; d < days; ++d) {
      for (auto* s : {&p, &t}) {
        std::vector<int> hours(24);
        std::iota(hours.begin(), hours.end(), 0);
        // Bias toward a small pool so exact matches actually happen.
        std::shuffle(hours.begin(), hours.begin() + std::min(24, k + 2), rng);
        s->emplace_back(hours.begin(), hours.begin() + k);
      }
    }
    for (auto mode : {CaptureMode::HourLevel, CaptureMode::DayExact})
      EXPECT_EQ(capture_accuracy(p, t, k, mode), capture_accuracy(t, p, k, mode));
    EXPECT_GE(capture_accuracy(p, t, k, CaptureMode::HourLevel), capture_accuracy(p, t, k, CaptureMode::DayExact));
  }
}

TEST(Evaluate, OraclePredictorIsPerfect) {
  auto trace = generate_synthetic(test::small_synthetic(12, 3));
  auto w = build_windows(trace, CalendarSpec{}, fit_normalizer(trace));
  auto table = evaluate_model("oracle", [](const WindowSample& s) { return s.target_kw; }, w);
  EXPECT_EQ(table.days, 10u);
  EXPECT_EQ(table.mape, 0.0);
  ASSERT_EQ(table.rows.size(), 5u);
  for (const auto& r : table.rows) {
    EXPECT_EQ(r.top_hour, 100.0);
    EXPECT_EQ(r.top_day, 100.0);
    EXPECT_EQ(r.bottom_hour, 100.0);
    EXPECT_EQ(r.bottom_day, 100.0);
  }
}

TEST(Evaluate, ConstantPredictorMatchesTieBreakOrdering) {
  auto trace = generate_synthetic(test::small_synthetic(30, 5));
  auto w = build_windows(trace, CalendarSpec{}, fit_normalizer(trace));
  auto table = evaluate_model("flat", [](const WindowSample&) { DayProfile d; d.fill(15000.0); return d; }, w);
  // A flat forecast labels hours 0..k-1 as top and k..2k-1 as bottom.
  for (int k = 1; k <= 5; ++k) {
    double top_hits = 0, bottom_hits = 0;
    for (const auto& s : w) {
      std::vector<std::pair<double, int>> by_value;
      for (int h = 0; h < 24; ++h) by_value.push_back({s.target_kw[h], h});
      std::sort(by_value.begin(), by_value.end());
      for (int i = 0; i < k; ++i) {
        if (by_value[23 - i].second < k) ++top_hits;
        const int b = by_value[i].second;
        if (b >= k && b < 2 * k) ++bottom_hits;
      }
    }
    const double denom = static_cast<double>(k * w.size());
    EXPECT_NEAR(table.at_k(k).top_hour, 100.0 * top_hits / denom, 1e-9) << k;
    EXPECT_NEAR(table.at_k(k).bottom_hour, 100.0 * bottom_hits / denom, 1e-9) << k;
  }
}

TEST(Evaluate, CsvHasFiveKRowsAndSixColumns) {
  auto trace = generate_synthetic(test::small_synthetic(5, 3));
  auto w = build_windows(trace, CalendarSpec{}, fit_normalizer(trace));
  auto table = evaluate_model("m", [](const WindowSample& s) { return s.target_kw; }, w);
  auto rows = format_accuracy_rows(table);
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 5);
  EXPECT_EQ(rows.substr(0, rows.find('\n')), "m,1,100.0000,100.0000,100.0000,100.0000");
  EXPECT_EQ(std::count(kAccuracyHeader.begin(), kAccuracyHeader.end(), ','), 5);
  EXPECT_ERROR_CODE(evaluate_model("m", [](const WindowSample& s) { return s.target_kw; }, {}),
                    ErrorCode::EmptyDataset);
}
