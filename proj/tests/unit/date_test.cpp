#include <gtest/gtest.h>

#include "regimeshift/date.hpp"
#include "regimeshift/errors.hpp"

namespace rs = regimeshift;

TEST(Date, ElectionDayFromCalendar) {
  const rs::Date d = rs::Date::from_ymd(2024, 11, 5);
  EXPECT_EQ(d.days_since_epoch(), 20032);
  EXPECT_EQ(d.iso(), "2024-11-05");
}

TEST(Date, UnixSecondsUseEpochArithmetic) {
  EXPECT_EQ(rs::Date::from_unix_seconds(1715385600).iso(), "2024-05-11");
  EXPECT_EQ(rs::Date::from_unix_seconds(1715385600 + 86399).iso(), "2024-05-11");
  EXPECT_EQ(rs::Date::from_unix_seconds(0).iso(), "1970-01-01");
  EXPECT_EQ(rs::Date::from_unix_seconds(-1).iso(), "1969-12-31");
}

TEST(Date, ParseRoundTrips) {
  for (const char* s : {"2024-02-29", "2025-01-16", "1999-12-31"}) EXPECT_EQ(rs::Date::parse(s).iso(), s);
}

TEST(Date, ParseRejectsInvalidDates) {
  EXPECT_THROW(rs::Date::parse("2023-02-29"), rs::DataError);
  EXPECT_THROW(rs::Date::parse("2024-13-01"), rs::DataError);
  EXPECT_THROW(rs::Date::parse("2024/11/05"), rs::DataError);
  EXPECT_THROW(rs::Date::parse(""), rs::DataError);
}

TEST(Date, Arithmetic) {
  const rs::Date a = rs::Date::parse("2024-03-01");
  const rs::Date b = rs::Date::parse("2025-02-28");
  EXPECT_EQ(b - a + 1, 365);
  EXPECT_EQ((a + 1).iso(), "2024-03-02");
  EXPECT_LT(a, b);
}
