#include <gtest/gtest.h>

#include <random>

#include "peakcast/trace.hpp"
#include "test_util.hpp"

using namespace peakcast;

TEST(ParseTrace, ThreeRowsKeepValues) {
  const std::string csv =
      "timestamp,demand_kw,temp_f,humidity_pct\n"
      "2019-03-01T00:00,12000.5,41,60\n"
      "2019-03-01T01:00,11800,40.5,61.25\n"
      "2019-03-01T02:00,11750,40,62\n";
  auto t = parse_trace(csv);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].timestamp, (DateHour{make_date(2019, 3, 1), 0}));
  EXPECT_EQ(t[0].demand_kw, 12000.5);
  EXPECT_EQ(t[1].temp_f, 40.5);
  EXPECT_EQ(t[1].humidity_pct, 61.25);
  EXPECT_EQ(t[2].timestamp, (DateHour{make_date(2019, 3, 1), 2}));
}

TEST(ParseTrace, GapIsRejected) {
  EXPECT_ERROR_CODE(parse_trace("timestamp,demand_kw,temp_f,humidity_pct\n"
                                "2019-03-01T00:00,1,1,1\n2019-03-01T02:00,1,1,1\n"),
                    ErrorCode::GapError);
  EXPECT_ERROR_CODE(parse_trace("timestamp,demand_kw,temp_f,humidity_pct\n"
                                "2019-03-01T00:00,1,1,1\n2019-03-01T00:00,1,1,1\n"),
                    ErrorCode::GapError);
}

TEST(ParseTrace, DomainViolations) {
  const std::string h = "timestamp,demand_kw,temp_f,humidity_pct\n";
  EXPECT_ERROR_CODE(parse_trace(h + "2019-03-01T00:00,-5,1,1\n"), ErrorCode::DomainError);
  EXPECT_ERROR_CODE(parse_trace(h + "2019-03-01T00:00,0,1,1\n"), ErrorCode::DomainError);
  EXPECT_ERROR_CODE(parse_trace(h + "2019-03-01T00:00,5,1,100.5\n"), ErrorCode::DomainError);
  EXPECT_ERROR_CODE(parse_trace(h + "2019-03-01T00:00,5,1,-1\n"), ErrorCode::DomainError);
}

TEST(ParseTrace, MalformedRows) {
  const std::string h = "timestamp,demand_kw,temp_f,humidity_pct\n";
  EXPECT_ERROR_CODE(parse_trace(h), ErrorCode::MalformedRow);
  EXPECT_ERROR_CODE(parse_trace("time,demand\n2019-03-01T00:00,5\n"), ErrorCode::MalformedRow);
  EXPECT_ERROR_CODE(parse_trace(h + "2019-03-01T00:00,abc,1,1\n"), ErrorCode::MalformedRow);
  EXPECT_ERROR_CODE(parse_trace(h + "2019-03-01T00:00,5,1\n"), ErrorCode::MalformedRow);
  EXPECT_ERROR_CODE(parse_trace(h + "2019-03-01T00:00,5,1,1,9\n"), ErrorCode::MalformedRow);
  EXPECT_ERROR_CODE(parse_trace(h + "2019-03-01 00:00,5,1,1\n"), ErrorCode::MalformedRow);
  EXPECT_ERROR_CODE(parse_trace(h + "2019-02-30T00:00,5,1,1\n"), ErrorCode::MalformedRow);
  EXPECT_ERROR_CODE(parse_trace(h + "2019-03-01T24:00,5,1,1\n"), ErrorCode::MalformedRow);
  EXPECT_ERROR_CODE(parse_trace(h + "2019-03-01T00:00,\"12,000\",1,1\n"), ErrorCode::MalformedRow);
}

TEST(ParseTrace, RoundTripsRandomTraces) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> kw(1e-3, 1e6), temp(-40, 120), hum(0, 100);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<DemandRecord> recs;
    const DateHour start{make_date(2016, 2, 28), static_cast<int>(rng() % 24)};
    const std::size_t n = 1 + rng() % 200;
    for (std::size_t i = 0; i < n; ++i)
      recs.push_back({start + static_cast<std::int64_t>(i), kw(rng), temp(rng), hum(rng)});
    if (trial == 0) recs[0].humidity_pct = 100.0;
    DemandTrace t{std::move(recs)};
    EXPECT_EQ(parse_trace(serialize_trace(t)), t);
  }
}

TEST(ParseTrace, CrossesLeapDayAndYearEnd) {
  std::vector<double> d(24 * 3, 100.0);
  auto t = test::hourly_trace(make_date(2020, 2, 28), d);
  EXPECT_EQ(t[48].timestamp.date(), make_date(2020, 3, 1));
  auto y = test::hourly_trace(make_date(2018, 12, 31), d);
  EXPECT_EQ(format_date_hour(y[24].timestamp), "2019-01-01T00:00");
  EXPECT_EQ(parse_trace(serialize_trace(y)), y);
}

TEST(Synthetic, Deterministic) {
  auto c = test::small_synthetic(20, 77);
  EXPECT_EQ(generate_synthetic(c), generate_synthetic(c));
  auto c2 = c;
  c2.seed = 78;
  EXPECT_FALSE(generate_synthetic(c) == generate_synthetic(c2));
}

TEST(Synthetic, LengthIsDaysTimes24) {
  EXPECT_EQ(generate_synthetic(test::small_synthetic(2, 1)).size(), 48u);
  auto t = generate_synthetic(test::small_synthetic(5, 1));
  EXPECT_EQ(t.size(), 120u);
  EXPECT_TRUE(t.start().at_midnight());
}

TEST(Synthetic, CampusPresetStaysInReportedRange) {
  auto t = generate_synthetic(SyntheticConfig{});
  ASSERT_EQ(t.size(), 730u * 24u);
  double lo = 1e18, hi = -1e18, tlo = 1e18, thi = -1e18;
  for (const auto& r : t) {
    lo = std::min(lo, r.demand_kw);
    hi = std::max(hi, r.demand_kw);
    tlo = std::min(tlo, r.temp_f);
    thi = std::max(thi, r.temp_f);
  }
  EXPECT_GE(lo, 9934.0);
  EXPECT_LE(hi, 26219.0);
  EXPECT_GE(tlo, -9.5);
  EXPECT_LE(thi, 97.0);
}

TEST(Synthetic, BimodalDaysPeakMorningAndEvening) {
  auto c = test::small_synthetic(14, 3);
  c.bimodal_probability = 1.0;
  c.noise_sd_kw = 0.0;
  c.level_sd_kw = 0.0;
  auto t = generate_synthetic(c);
  for (int d = 0; d < 14; ++d) {
    auto at = [&](int h) { return t[static_cast<std::size_t>(d * 24 + h)].demand_kw; };
    EXPECT_GT(at(9), at(14)) << "day " << d;
    EXPECT_GT(at(19), at(14)) << "day " << d;
  }
  c.bimodal_probability = 0.0;
  auto u = generate_synthetic(c);
  for (int d = 0; d < 14; ++d) {
    auto at = [&](int h) { return u[static_cast<std::size_t>(d * 24 + h)].demand_kw; };
    EXPECT_GT(at(14), at(9)) << "day " << d;
    EXPECT_GT(at(14), at(20)) << "day " << d;
  }
}

TEST(Synthetic, RandomConfigsAlwaysValid) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    SyntheticConfig c;
    c.days = 1 + static_cast<int>(rng() % 40);
    c.start = make_date(2015, 1, 1) + std::chrono::days{static_cast<int>(rng() % 2000)};
    c.base_kw = 100 + 30000 * u(rng);
    c.daily_amplitude_kw = 10000 * u(rng);
    c.weekly_amplitude_kw = 5000 * u(rng);
    c.seasonal_amplitude_kw = 5000 * u(rng);
    c.noise_sd_kw = 2000 * u(rng);
    c.min_kw = 1 + 5000 * u(rng);
    c.max_kw = c.min_kw + 1 + 30000 * u(rng);
    c.bimodal_probability = u(rng);
    c.seed = rng();
    DemandTrace t;
    ASSERT_NO_THROW(t = generate_synthetic(c));
    EXPECT_EQ(t.size(), static_cast<std::size_t>(c.days) * 24);
    for (const auto& r : t) {
      EXPECT_GE(r.demand_kw, c.min_kw);
      EXPECT_LE(r.demand_kw, c.max_kw);
      EXPECT_GE(r.humidity_pct, 0.0);
      EXPECT_LE(r.humidity_pct, 100.0);
    }
  }
}

TEST(Synthetic, InvalidConfig) {
  SyntheticConfig c;
  c.min_kw = 30000;
  EXPECT_ERROR_CODE(generate_synthetic(c), ErrorCode::ConfigError);
  c = {};
  c.bimodal_probability = 1.5;
  EXPECT_ERROR_CODE(generate_synthetic(c), ErrorCode::ConfigError);
  c = {};
  c.noise_sd_kw = -1;
  EXPECT_ERROR_CODE(generate_synthetic(c), ErrorCode::ConfigError);
  c = {};
  c.days = 0;
  EXPECT_ERROR_CODE(generate_synthetic(c), ErrorCode::ConfigError);
}

TEST(Split, CountsAtDayEight) {
  auto t = generate_synthetic(test::small_synthetic(10, 2));
  auto [a, b] = split_train_test(t, DateHour{t.start().date() + std::chrono::days{8}, 0});
  EXPECT_EQ(a.size(), 192u);
  EXPECT_EQ(b.size(), 48u);
  EXPECT_TRUE(a.end_time() == b.start());
}

TEST(Split, BoundaryErrors) {
  auto t = generate_synthetic(test::small_synthetic(10, 2));
  const Date d0 = t.start().date();
  EXPECT_ERROR_CODE(split_train_test(t, DateHour{d0 - std::chrono::days{1}, 0}), ErrorCode::BoundaryError);
  EXPECT_ERROR_CODE(split_train_test(t, DateHour{d0 + std::chrono::days{3}, 3}), ErrorCode::BoundaryError);
  EXPECT_ERROR_CODE(split_train_test(t, t.start()), ErrorCode::BoundaryError);
  EXPECT_ERROR_CODE(split_train_test(t, t.end_time()), ErrorCode::BoundaryError);
}

TEST(Split, ConcatenationReproducesInput) {
  auto t = generate_synthetic(test::small_synthetic(12, 4));
  for (int d = 1; d < 12; ++d) {
    auto [a, b] = split_train_test(t, DateHour{t.start().date() + std::chrono::days{d}, 0});
    std::vector<DemandRecord> joined(a.begin(), a.end());
    joined.insert(joined.end(), b.begin(), b.end());
    EXPECT_EQ(DemandTrace{joined}, t);
  }
}

TEST(Calendar, ParseHolidaysSeasonsAndSemesters) {
  const std::string text =
      "# campus calendar\n"
      "[holidays]\n2019-01-01\n2019-07-04  # independence\n"
      "[seasons]\n"
      "1 = Winter\n2 = Winter\n3 = Spring\n4 = Spring\n5 = Summer\n6 = Summer\n"
      "7 = Summer\n8 = Summer\n9 = Fall\n10 = Fall\n11 = Fall\n12 = Winter\n"
      "[semesters]\n2019-01-14 2019-05-10\n";
  auto cal = parse_calendar(text);
  EXPECT_TRUE(cal.is_holiday(make_date(2019, 7, 4)));
  EXPECT_FALSE(cal.is_holiday(make_date(2019, 7, 5)));
  EXPECT_EQ(cal.season(make_date(2019, 5, 20)), Season::Summer);
  ASSERT_EQ(cal.semesters.size(), 1u);
  auto again = parse_calendar(serialize_calendar(cal));
  EXPECT_EQ(again.holidays, cal.holidays);
  EXPECT_EQ(again.season_of, cal.season_of);
}

TEST(Calendar, RejectsIncompleteSeasonsAndBadLines) {
  EXPECT_ERROR_CODE(parse_calendar("[seasons]\n1 = Winter\n"), ErrorCode::ConfigError);
  EXPECT_ERROR_CODE(parse_calendar("[holidays]\n2019-13-01\n"), ErrorCode::MalformedRow);
  EXPECT_ERROR_CODE(parse_calendar("[seasons]\n1 = Monsoon\n"), ErrorCode::MalformedRow);
  EXPECT_ERROR_CODE(parse_calendar("2019-01-01\n"), ErrorCode::MalformedRow);
  EXPECT_ERROR_CODE(parse_calendar("[weather]\n"), ErrorCode::MalformedRow);
}

TEST(Calendar, WeekdayIsMondayZero) {
  EXPECT_EQ(weekday_index(make_date(2018, 1, 1)), 0);  // a Monday
  EXPECT_EQ(weekday_index(make_date(2018, 1, 7)), 6);
  EXPECT_EQ(days_in_month(make_date(2020, 2, 10)), 29u);
  EXPECT_EQ(days_in_month(make_date(2019, 2, 10)), 28u);
}
