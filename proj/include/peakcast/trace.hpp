#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "peakcast/calendar.hpp"
#include "peakcast/error.hpp"

namespace peakcast {

struct DemandRecord {
  DateHour timestamp;
  double demand_kw = 0.0;
  double temp_f = 0.0;
  double humidity_pct = 0.0;

  bool operator==(const DemandRecord&) const = default;
};

/// Hourly trace on a gap-free grid. Construction validates every invariant, so a
/// DemandTrace value is always well formed.
class DemandTrace {
 public:
  DemandTrace() = default;

  explicit DemandTrace(std::vector<DemandRecord> records) : records_(std::move(records)) {
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const auto& r = records_[i];
      if (!(r.demand_kw > 0.0) || !std::isfinite(r.demand_kw))
        fail(ErrorCode::DomainError, "demand_kw must be > 0 at " + format_date_hour(r.timestamp));
      if (!(r.humidity_pct >= 0.0 && r.humidity_pct <= 100.0))
        fail(ErrorCode::DomainError, "humidity_pct outside [0,100] at " + format_date_hour(r.timestamp));
      if (!std::isfinite(r.temp_f)) fail(ErrorCode::DomainError, "temp_f not finite at " + format_date_hour(r.timestamp));
      if (i > 0 && r.timestamp - records_[i - 1].timestamp != 1)
        fail(ErrorCode::GapError, "expected " + format_date_hour(records_[i - 1].timestamp + 1) + " but found " +
                                      format_date_hour(r.timestamp));
    }
  }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const DemandRecord& operator[](std::size_t i) const { return records_[i]; }
  std::span<const DemandRecord> records() const { return records_; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  DateHour start() const { return records_.front().timestamp; }
  DateHour end_time() const { return records_.back().timestamp + 1; }

  /// Index of `t` in the trace, or -1 when outside.
  std::ptrdiff_t index_of(DateHour t) const {
    if (empty() || t < start() || !(t < end_time())) return -1;
    return static_cast<std::ptrdiff_t>(t - start());
  }

  DemandTrace slice(std::size_t first, std::size_t count) const {
    return DemandTrace{std::vector<DemandRecord>(records_.begin() + static_cast<std::ptrdiff_t>(first),
                                                 records_.begin() + static_cast<std::ptrdiff_t>(first + count))};
  }

  bool operator==(const DemandTrace&) const = default;

 private:
  std::vector<DemandRecord> records_;
};

inline constexpr std::string_view kTraceHeader = "timestamp,demand_kw,temp_f,humidity_pct";

namespace detail {
inline std::string format_real(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline bool parse_real(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size() && std::isfinite(out);
}
}  // namespace detail

/// Parses the trace CSV. The header row is mandatory and must match exactly.
inline DemandTrace parse_trace(std::string_view content) {
  std::istringstream in{std::string(content)};
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kTraceHeader)
    fail(ErrorCode::MalformedRow, "trace header must be '" + std::string(kTraceHeader) + "'");
  std::vector<DemandRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = detail::trim(line);
    if (row.empty()) continue;
    std::string_view fields[4];
    std::size_t n = 0;
    while (n < 4) {
      auto comma = row.find(',');
      fields[n++] = row.substr(0, comma);
      if (comma == std::string_view::npos) {
        row = {};
        break;
      }
      row.remove_prefix(comma + 1);
    }
    auto where = [&](std::string_view what) {
      return "trace line " + std::to_string(line_no) + ": " + std::string(what);
    };
    if (n != 4 || !row.empty()) fail(ErrorCode::MalformedRow, where("expected 4 fields"));
    DemandRecord r;
    auto ts = parse_date_hour(detail::trim(fields[0]));
    if (!ts) fail(ErrorCode::MalformedRow, where("bad timestamp '" + std::string(fields[0]) + "'"));
    r.timestamp = *ts;
    if (!detail::parse_real(fields[1], r.demand_kw)) fail(ErrorCode::MalformedRow, where("bad demand_kw"));
    if (!detail::parse_real(fields[2], r.temp_f)) fail(ErrorCode::MalformedRow, where("bad temp_f"));
    if (!detail::parse_real(fields[3], r.humidity_pct)) fail(ErrorCode::MalformedRow, where("bad humidity_pct"));
    records.push_back(r);
  }
  if (records.empty()) fail(ErrorCode::MalformedRow, "trace has no data rows");
  return DemandTrace{std::move(records)};
}

/// Shortest round-trip decimal formatting, so parse_trace(serialize_trace(t)) == t.
inline std::string serialize_trace(const DemandTrace& trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : trace) {
    out += format_date_hour(r.timestamp);
    out += ',';
    out += detail::format_real(r.demand_kw);
    out += ',';
    out += detail::format_real(r.temp_f);
    out += ',';
    out += detail::format_real(r.humidity_pct);
    out += '\n';
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorCode::IoError, "write failed for '" + path + "'");
}

inline DemandTrace load_trace(const std::string& path) {
  try {
    return parse_trace(read_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

// Synthetic campus-like load. The defaults produce a trace in the same envelope as a
// large university micro-grid (roughly 10 to 26 MW, -9.5F to 97F).
struct SyntheticConfig {
  int days = 730;
  Date start = make_date(2018, 1, 1);
  double base_kw = 15500.0;
  double daily_amplitude_kw = 5500.0;
  double weekly_amplitude_kw = 1800.0;
  double seasonal_amplitude_kw = 2500.0;
  double noise_sd_kw = 250.0;
  double min_kw = 9934.0;
  double max_kw = 26219.0;
  double bimodal_probability = 0.3;
  // Day-level AR(1) load offset; gives recent history predictive value.
  double level_sd_kw = 500.0;
  double level_persistence = 0.85;
  double temp_min_f = -9.5;
  double temp_max_f = 97.0;
  std::uint64_t seed = 1;
};

inline void validate(const SyntheticConfig& c) {
  auto bad = [](const std::string& what) { fail(ErrorCode::ConfigError, "synthetic config: " + what); };
  if (c.days < 1) bad("days must be >= 1");
  if (!(c.min_kw > 0.0) || !(c.min_kw < c.max_kw)) bad("need 0 < min_kw < max_kw");
  if (c.daily_amplitude_kw < 0 || c.weekly_amplitude_kw < 0 || c.seasonal_amplitude_kw < 0 || c.noise_sd_kw < 0 ||
      c.level_sd_kw < 0)
    bad("amplitudes and noise levels must be >= 0");
  if (!(c.bimodal_probability >= 0.0 && c.bimodal_probability <= 1.0)) bad("bimodal_probability outside [0,1]");
  if (!(c.level_persistence >= 0.0 && c.level_persistence < 1.0)) bad("level_persistence outside [0,1)");
  if (!(c.temp_min_f < c.temp_max_f)) bad("temp_min_f must be < temp_max_f");
}

inline DemandTrace generate_synthetic(const SyntheticConfig& c) {
  validate(c);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  constexpr double two_pi = 2.0 * std::numbers::pi;

  const double temp_mid = 0.5 * (c.temp_min_f + c.temp_max_f);
  const double temp_amp = 0.5 * (c.temp_max_f - c.temp_min_f);

  std::vector<DemandRecord> records;
  records.reserve(static_cast<std::size_t>(c.days) * 24);
  double level = 0.0;
  double temp_anomaly = 0.0;
  for (int d = 0; d < c.days; ++d) {
    const Date date = c.start + std::chrono::days{d};
    const auto ymd = std::chrono::year_month_day{date};
    const double doy = static_cast<double>((date - Date{ymd.year() / 1 / 1}).count());
    // Coldest around mid-January, warmest around mid-July.
    const double season = -std::cos(two_pi * (doy - 15.0) / 365.25);
    const int wd = weekday_index(date);
    const bool weekend = wd >= 5;

    level = c.level_persistence * level + c.level_sd_kw * std::sqrt(1 - c.level_persistence * c.level_persistence) * unit(rng);
    temp_anomaly = 0.7 * temp_anomaly + 4.0 * unit(rng);
    const bool bimodal = uniform(rng) < c.bimodal_probability;
    const double shift = 0.75 * unit(rng);

    // Cooling load in summer plus a smaller heating bump in winter.
    const double seasonal_kw = c.seasonal_amplitude_kw * (season > 0 ? season : 0.35 * -season);
    const double weekly_kw = weekend ? -c.weekly_amplitude_kw : 0.25 * c.weekly_amplitude_kw;
    const double day_scale = weekend ? 0.6 : 1.0;

    for (int h = 0; h < 24; ++h) {
      const double t = h;
      double profile;
      if (bimodal) {
        const double a = (t - (9.0 + shift)) / 1.8;
        const double b = (t - (19.0 + shift)) / 2.0;
        profile = 0.85 * std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b);
      } else {
        const double a = (t - (14.5 + shift)) / 3.2;
        profile = std::exp(-0.5 * a * a);
      }
      const double diurnal_temp = -std::cos(two_pi * (t - 3.0) / 24.0);
      double temp = temp_mid + 0.8 * temp_amp * season + 0.12 * temp_amp * diurnal_temp + temp_anomaly;
      temp = std::clamp(temp, c.temp_min_f, c.temp_max_f);
      double hum = 55.0 + 20.0 * std::sin(two_pi * (doy + 40.0) / 365.25) - 10.0 * diurnal_temp + 6.0 * unit(rng);
      hum = std::clamp(hum, 0.0, 100.0);

      const double cooling = std::max(temp - 75.0, 0.0) * 40.0;
      double kw = c.base_kw + seasonal_kw + weekly_kw + level + cooling +
                  c.daily_amplitude_kw * day_scale * profile + c.noise_sd_kw * unit(rng);
      kw = std::clamp(kw, c.min_kw, c.max_kw);
      records.push_back({DateHour{date, h}, kw, temp, hum});
    }
  }
  return DemandTrace{std::move(records)};
}

/// Splits at a midnight-aligned boundary strictly inside the trace.
inline std::pair<DemandTrace, DemandTrace> split_train_test(const DemandTrace& trace, DateHour boundary) {
  if (trace.empty()) fail(ErrorCode::BoundaryError, "cannot split an empty trace");
  if (!boundary.at_midnight())
    fail(ErrorCode::BoundaryError, "boundary " + format_date_hour(boundary) + " is not midnight-aligned");
  if (!(trace.start() < boundary) || !(boundary < trace.end_time()))
    fail(ErrorCode::BoundaryError, "boundary " + format_date_hour(boundary) + " is outside the trace");
  const auto cut = static_cast<std::size_t>(boundary - trace.start());
  return {trace.slice(0, cut), trace.slice(cut, trace.size() - cut)};
}

}  // namespace peakcast
