#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "peakcast/error.hpp"

namespace peakcast {

using Date = std::chrono::sys_days;

// Hourly timestamp on a uniform grid (no DST), stored as hours since 1970-01-01T00.
class DateHour {
 public:
  constexpr DateHour() = default;
  constexpr explicit DateHour(std::int64_t hours_since_epoch) : hours_(hours_since_epoch) {}
  DateHour(Date date, int hour) : hours_(date.time_since_epoch().count() * 24 + hour) {}

  constexpr std::int64_t hours_since_epoch() const { return hours_; }

  Date date() const { return Date{std::chrono::days{floor_div(hours_, 24)}}; }
  int hour() const { return static_cast<int>(hours_ - floor_div(hours_, 24) * 24); }
  bool at_midnight() const { return hour() == 0; }

  constexpr DateHour operator+(std::int64_t hours) const { return DateHour{hours_ + hours}; }
  constexpr std::int64_t operator-(DateHour other) const { return hours_ - other.hours_; }
  constexpr auto operator<=>(const DateHour&) const = default;

 private:
  static constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    return a / b - ((a % b != 0) && ((a < 0) != (b < 0)));
  }
  std::int64_t hours_ = 0;
};

inline Date make_date(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
}

inline std::optional<Date> parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len, auto& out) {
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    return ec == std::errc{} && p == text.data() + pos + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

/// Parses `YYYY-MM-DDTHH:00`.
inline std::optional<DateHour> parse_date_hour(std::string_view text) {
  if (text.size() != 16 || text[10] != 'T' || text.substr(13) != ":00") return std::nullopt;
  auto date = parse_date(text.substr(0, 10));
  if (!date) return std::nullopt;
  int hour = 0;
  auto [p, ec] = std::from_chars(text.data() + 11, text.data() + 13, hour);
  if (ec != std::errc{} || p != text.data() + 13 || hour < 0 || hour > 23) return std::nullopt;
  return DateHour{*date, hour};
}

inline std::string format_date(Date date) {
  std::chrono::year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::string format_date_hour(DateHour t) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "T%02d:00", t.hour());
  return format_date(t.date()) + buf;
}

inline unsigned month_of(Date date) {
  return static_cast<unsigned>(std::chrono::year_month_day{date}.month());
}

/// 0 = Monday ... 6 = Sunday.
inline int weekday_index(Date date) {
  return static_cast<int>(std::chrono::weekday{date}.iso_encoding()) - 1;
}

inline unsigned days_in_month(Date date) {
  std::chrono::year_month_day ymd{date};
  std::chrono::year_month_day_last last{ymd.year(), std::chrono::month_day_last{ymd.month()}};
  return static_cast<unsigned>(last.day());
}

enum class Season : int { Fall = 0, Winter = 1, Spring = 2, Summer = 3 };

inline constexpr std::array<std::string_view, 4> kSeasonNames{"Fall", "Winter", "Spring", "Summer"};

inline std::optional<Season> parse_season(std::string_view name) {
  for (std::size_t i = 0; i < kSeasonNames.size(); ++i)
    if (kSeasonNames[i] == name) return static_cast<Season>(i);
  return std::nullopt;
}

struct SemesterRange {
  Date first;
  Date last;
};

struct CalendarSpec {
  std::set<Date> holidays;
  std::array<Season, 12> season_of{Season::Winter, Season::Winter, Season::Spring, Season::Spring,
                                   Season::Spring,  Season::Summer, Season::Summer, Season::Summer,
                                   Season::Fall,    Season::Fall,   Season::Fall,   Season::Winter};
  // Accepted and stored but not part of the default feature layout.
  std::vector<SemesterRange> semesters;

  bool is_holiday(Date d) const { return holidays.contains(d); }
  Season season(Date d) const { return season_of[month_of(d) - 1]; }
};

/// Fixed-date holidays (New Year, Independence Day, Christmas Eve/Day, New Year's Eve)
/// for every year in [first_year, last_year].
inline CalendarSpec default_calendar(int first_year, int last_year) {
  CalendarSpec cal;
  for (int y = first_year; y <= last_year; ++y) {
    cal.holidays.insert(make_date(y, 1, 1));
    cal.holidays.insert(make_date(y, 7, 4));
    cal.holidays.insert(make_date(y, 12, 24));
    cal.holidays.insert(make_date(y, 12, 25));
    cal.holidays.insert(make_date(y, 12, 31));
  }
  return cal;
}

namespace detail {
inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}
}  // namespace detail

/// Calendar file:
///
///   [holidays]
///   2019-01-01
///   [seasons]
///   1 = Winter
///   ...
///   [semesters]            (optional)
///   2019-01-14 2019-05-10
///
/// `#` starts a comment. When a [seasons] section is present it must map all twelve months.
inline CalendarSpec parse_calendar(std::string_view content) {
  CalendarSpec cal;
  std::array<bool, 12> seen{};
  bool have_seasons = false;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(content)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto where = [&] { return "calendar line " + std::to_string(line_no) + " '" + std::string(line) + "'"; };
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::MalformedRow, where());
      section = std::string(line.substr(1, line.size() - 2));
      if (section != "holidays" && section != "seasons" && section != "semesters")
        fail(ErrorCode::MalformedRow, "unknown section in " + where());
      if (section == "seasons") have_seasons = true;
      continue;
    }
    if (section == "holidays") {
      auto d = parse_date(line);
      if (!d) fail(ErrorCode::MalformedRow, "bad holiday date at " + where());
      cal.holidays.insert(*d);
    } else if (section == "seasons") {
      auto eq = line.find('=');
      if (eq == std::string_view::npos) fail(ErrorCode::MalformedRow, "expected 'month = Season' at " + where());
      auto key = detail::trim(line.substr(0, eq));
      auto value = detail::trim(line.substr(eq + 1));
      unsigned month = 0;
      auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), month);
      if (ec != std::errc{} || p != key.data() + key.size() || month < 1 || month > 12)
        fail(ErrorCode::MalformedRow, "bad month at " + where());
      auto season = parse_season(value);
      if (!season) fail(ErrorCode::MalformedRow, "unknown season at " + where());
      if (seen[month - 1]) fail(ErrorCode::ConfigError, "month mapped twice at " + where());
      seen[month - 1] = true;
      cal.season_of[month - 1] = *season;
    } else if (section == "semesters") {
      auto sp = line.find(' ');
      auto a = sp == std::string_view::npos ? std::nullopt : parse_date(line.substr(0, sp));
      auto b = sp == std::string_view::npos ? std::nullopt : parse_date(detail::trim(line.substr(sp)));
      if (!a || !b || *b < *a) fail(ErrorCode::MalformedRow, "bad semester range at " + where());
      cal.semesters.push_back({*a, *b});
    } else {
      fail(ErrorCode::MalformedRow, "entry outside a section at " + where());
    }
  }
  if (have_seasons) {
    for (std::size_t m = 0; m < 12; ++m)
      if (!seen[m]) fail(ErrorCode::ConfigError, "calendar [seasons] does not map month " + std::to_string(m + 1));
  }
  return cal;
}

inline std::string serialize_calendar(const CalendarSpec& cal) {
  std::string out = "[holidays]\n";
  for (Date d : cal.holidays) out += format_date(d) + "\n";
  out += "[seasons]\n";
  for (std::size_t m = 0; m < 12; ++m)
    out += std::to_string(m + 1) + " = " + std::string(kSeasonNames[static_cast<int>(cal.season_of[m])]) + "\n";
  if (!cal.semesters.empty()) {
    out += "[semesters]\n";
    for (const auto& s : cal.semesters) out += format_date(s.first) + " " + format_date(s.last) + "\n";
  }
  return out;
}

}  // namespace peakcast
