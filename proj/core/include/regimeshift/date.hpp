#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace regimeshift {

/// A UTC calendar day, stored as the number of days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int64_t days_since_epoch) : days_(days_since_epoch) {}

  static Date from_ymd(int year, unsigned month, unsigned day);

  /// Parses `YYYY-MM-DD`; throws DataError on anything else.
  static Date parse(std::string_view iso);

  /// Day containing the given Unix timestamp (floor division, UTC midnight boundary).
  static constexpr Date from_unix_seconds(std::int64_t seconds) {
    std::int64_t d = seconds / 86400;
    if (seconds % 86400 < 0) --d;
    return Date(d);
  }

  [[nodiscard]] std::string iso() const;
  [[nodiscard]] constexpr std::int64_t days_since_epoch() const { return days_; }

  constexpr Date operator+(std::int64_t days) const { return Date(days_ + days); }
  constexpr Date operator-(std::int64_t days) const { return Date(days_ - days); }
  friend constexpr std::int64_t operator-(Date a, Date b) { return a.days_ - b.days_; }
  constexpr auto operator<=>(const Date&) const = default;

 private:
  std::int64_t days_ = 0;
};

}  // namespace regimeshift
