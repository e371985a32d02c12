#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "regimeshift/errors.hpp"
#include "regimeshift/series.hpp"

namespace rs = regimeshift;
namespace ser = regimeshift::series;

namespace {

rs::DailySeries make(std::vector<double> v, const char* start = "2024-11-01") {
  return rs::DailySeries{rs::Date::parse(start), std::move(v), "x", rs::Transform::Raw};
}

}  // namespace

TEST(Series, Log1pHandlesZeros) {
  const auto s = ser::log_transform(make({0.0, std::exp(1.0) - 1.0}), true);
  EXPECT_EQ(s.values[0], 0.0);
  EXPECT_NEAR(s.values[1], 1.0, 1e-15);
  EXPECT_EQ(s.transform, rs::Transform::Log1p);
}

TEST(Series, LogRejectsNonPositive) {
  EXPECT_THROW((void)ser::log_transform(make({1.0, 0.0}), false), rs::DataError);
}

TEST(Series, FirstDifferenceShiftsStart) {
  const auto d = ser::first_difference(ser::log_transform(make({0.0, 1.0, 3.0}), true));
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.start.iso(), "2024-11-02");
  EXPECT_NEAR(d.values[0], std::log(2.0), 1e-15);
  EXPECT_EQ(d.transform, rs::Transform::FirstDiffOfLog1p);
}

TEST(Series, RollingMeanIsTrailing) {
  const auto rm = ser::rolling_mean(make({1, 2, 3, 4, 5}), 3);
  EXPECT_FALSE(rm.values[1].has_value());
  EXPECT_DOUBLE_EQ(*rm.values[2], 2.0);
  EXPECT_DOUBLE_EQ(*rm.values[4], 4.0);
}

TEST(Series, SplitAndConcatenateRoundTrip) {
  const auto s = make({1, 2, 3, 4, 5, 6});
  const auto split = ser::split_at(s, rs::Date::parse("2024-11-05"));
  EXPECT_EQ(split.pre.size(), 4u);
  EXPECT_EQ(split.post.start.iso(), "2024-11-05");
  EXPECT_EQ(ser::concatenate(split).values, s.values);
  EXPECT_THROW((void)ser::split_at(s, rs::Date::parse("2024-11-01")), std::invalid_argument);
  EXPECT_THROW((void)ser::split_at(s, rs::Date::parse("2024-11-07")), std::invalid_argument);
}

TEST(Series, IntersectKeepsCommonRange) {
  const auto [a, b] = ser::intersect(make({1, 2, 3, 4}, "2024-11-01"), make({5, 6, 7, 8}, "2024-11-03"));
  EXPECT_EQ(a.values, (std::vector<double>{3, 4}));
  EXPECT_EQ(b.values, (std::vector<double>{5, 6}));
  EXPECT_THROW((void)ser::intersect(make({1}, "2024-11-01"), make({1}, "2024-12-01")), rs::DataError);
}

TEST(Series, CsvRoundTripIsExact) {
  const auto s = make({0.1, 1.0 / 3.0, 12345.678901234567, -2e-300});
  std::stringstream io;
  ser::write_series_csv(s, io);
  const auto back = ser::read_series_csv(io, "x");
  EXPECT_EQ(back.values, s.values);
  EXPECT_EQ(back.start, s.start);
}
