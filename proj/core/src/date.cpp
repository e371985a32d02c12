#include "regimeshift/date.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "regimeshift/errors.hpp"

namespace regimeshift {

namespace {

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok()) {
    throw DataError("invalid calendar date " + std::to_string(year) + "-" + std::to_string(month) +
                    "-" + std::to_string(day));
  }
  return Date(sys_days{ymd}.time_since_epoch().count());
}

Date Date::parse(std::string_view iso) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' || !parse_int(iso.substr(0, 4), y) ||
      !parse_int(iso.substr(5, 2), m) || !parse_int(iso.substr(8, 2), d)) {
    throw DataError("expected a YYYY-MM-DD date, got '" + std::string(iso) + "'");
  }
  return from_ymd(y, m, d);
}

std::string Date::iso() const {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{days_}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace regimeshift
