#pragma once

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "peakcast/error.hpp"
#include "peakcast/features.hpp"
#include "peakcast/trace.hpp"

#define EXPECT_ERROR_CODE(stmt, expected)                                      \
  do {                                                                         \
    try {                                                                      \
      (void)(stmt);                                                            \
      ADD_FAILURE() << "expected " << ::peakcast::to_string(expected);         \
    } catch (const ::peakcast::Error& e) {                                     \
      EXPECT_EQ(e.code(), expected) << e.what();                               \
    }                                                                          \
  } while (0)

namespace peakcast::test {

// Valid-looking feature rows: one-hot blocks set, continuous channels uniform.
inline std::vector<FeatureVector> random_inputs(std::uint64_t seed, std::size_t hours = kInputHours) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<FeatureVector> out;
  for (std::size_t t = 0; t < hours; ++t) {
    FeatureVector v{};
    v[kDemandIndex] = u(rng);
    v[kHourOffset + t % 24] = 1.0;
    v[kWeekdayOffset + (t / 24) % 7] = 1.0;
    v[kSeasonOffset + 1] = 1.0;
    v[kTempIndex] = u(rng);
    v[kHumidityIndex] = u(rng);
    out.push_back(v);
  }
  return out;
}

inline DemandTrace hourly_trace(Date start, const std::vector<double>& demand) {
  std::vector<DemandRecord> recs;
  for (std::size_t i = 0; i < demand.size(); ++i)
    recs.push_back({DateHour{start, 0} + static_cast<std::int64_t>(i), demand[i], 50.0 + static_cast<double>(i % 7),
                    40.0 + static_cast<double>(i % 5)});
  return DemandTrace{std::move(recs)};
}

inline SyntheticConfig small_synthetic(int days, std::uint64_t seed) {
  SyntheticConfig c;
  c.days = days;
  c.seed = seed;
  return c;
}

}  // namespace peakcast::test
