#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "regimeshift/errors.hpp"
#include "regimeshift/ingest.hpp"

namespace rs = regimeshift;
namespace ing = regimeshift::ingest;

namespace {

constexpr const char* kUsdt = "0xdac17f958d2ee523a2206206994597c13d831ec7";
constexpr const char* kUsdc = "0xa0b86991c6218b36c1d19d4a2e9eb0ce3606eb48";
constexpr const char* kHeader =
    "blockNumber,timeStamp,hash,from,to,value,tokenAddress,fromIsContract,toIsContract\n";

std::string row(std::int64_t ts, const std::string& token, std::uint64_t value, int fc = 0, int tc = 0,
                const std::string& from = "0x01") {
  return "1," + std::to_string(ts) + ",0xh," + from + ",0x02," + std::to_string(value) + "," + token + "," +
         std::to_string(fc) + "," + std::to_string(tc) + "\n";
}

ing::TransactionRecord rec(std::int64_t ts, std::uint64_t value, int fc = 0, int tc = 0) {
  ing::TransactionRecord r;
  r.time_stamp = ts;
  r.token_address = kUsdt;
  r.from_addr = "0x01";
  r.to_addr = "0x02";
  r.from_is_contract = static_cast<std::uint8_t>(fc);
  r.to_is_contract = static_cast<std::uint8_t>(tc);
  r.raw_value = value;
  return r;
}

}  // namespace

TEST(ParseTransactions, AllowListedUsdtRow) {
  std::istringstream in(std::string(kHeader) + row(1730764800, "0xDAC17F958D2EE523A2206206994597C13D831EC7", 5));
  const auto parsed = ing::parse_transactions(in, {kUsdt});
  ASSERT_EQ(parsed.records.size(), 1u);
  EXPECT_EQ(parsed.records[0].token_address, kUsdt);
  EXPECT_EQ(parsed.records[0].raw_value, 5u);
}

TEST(ParseTransactions, EmptyFileWithHeader) {
  std::istringstream in(kHeader);
  const auto parsed = ing::parse_transactions(in, {kUsdt});
  EXPECT_TRUE(parsed.records.empty());
  EXPECT_EQ(parsed.data_rows, 0u);
}

TEST(ParseTransactions, FiltersTokensOutsideAllowList) {
  std::string text = kHeader;
  for (int i = 0; i < 10; ++i) text += row(1730764800 + i, i < 2 ? "0xother" : kUsdt, 1000 + i);
  std::istringstream in(text);
  const auto parsed = ing::parse_transactions(in, {kUsdt});
  EXPECT_EQ(parsed.records.size(), 8u);
  EXPECT_EQ(parsed.filtered_rows, 2u);
  EXPECT_EQ(parsed.records.front().raw_value, 1002u);
}

TEST(ParseTransactions, MissingMandatoryColumnThrows) {
  std::istringstream in("timeStamp,from,to,value,tokenAddress,fromIsContract\n");
  EXPECT_THROW((void)ing::parse_transactions(in, {kUsdt}), rs::DataError);
}

TEST(ParseTransactions, MalformedRowsBelowThresholdAreCounted) {
  std::string text = kHeader;
  for (int i = 0; i < 2000; ++i) text += row(1730764800 + i, kUsdt, 7);
  text += "1,notanumber,0xh,0x01,0x02,5," + std::string(kUsdt) + ",0,0\n";
  std::istringstream in(text);
  const auto parsed = ing::parse_transactions(in, {kUsdt});
  EXPECT_EQ(parsed.records.size(), 2000u);
  EXPECT_EQ(parsed.malformed_rows, 1u);
  ASSERT_FALSE(parsed.malformed_lines.empty());
  EXPECT_EQ(parsed.malformed_lines.front(), 2002u);
}

TEST(ParseTransactions, MalformedRowsAboveThresholdThrow) {
  std::string text = kHeader;
  for (int i = 0; i < 10; ++i) text += row(1730764800 + i, kUsdt, 7);
  text += "1,1730764800,0xh,0x01,0x02,-5," + std::string(kUsdt) + ",0,0\n";
  std::istringstream in(text);
  EXPECT_THROW((void)ing::parse_transactions(in, {kUsdt}), rs::DataError);
}

TEST(ParseTransactions, OptionalFailureColumn) {
  std::istringstream in(
      "timeStamp,tokenAddress,from,to,fromIsContract,toIsContract,value,isError\n"
      "1730764800," + std::string(kUsdt) + ",0x1,0x2,0,0,10,1\n");
  const auto parsed = ing::parse_transactions(in, {kUsdt});
  ASSERT_EQ(parsed.records.size(), 1u);
  EXPECT_TRUE(parsed.has_failure_column);
  EXPECT_EQ(parsed.records[0].failed, std::optional<bool>(true));
}

TEST(ClassifyFlow, FollowsContractFlags) {
  EXPECT_EQ(ing::classify_flow(rec(0, 1, 0, 0)), ing::FlowClass::EoaToEoa);
  EXPECT_EQ(ing::classify_flow(rec(0, 1, 1, 1)), ing::FlowClass::ScToSc);
  EXPECT_EQ(ing::classify_flow(rec(0, 1, 0, 1)), ing::FlowClass::Mixed);
  EXPECT_EQ(ing::classify_flow(rec(0, 1, 1, 0)), ing::FlowClass::Mixed);
}

TEST(ToUsd, ExactDecimalDivision) {
  EXPECT_EQ(ing::to_usd(1'000'000), 1.0);
  EXPECT_EQ(ing::to_usd(0), 0.0);
  EXPECT_EQ(ing::to_usd(123'456'789), 123.456789);
  EXPECT_EQ(ing::to_usd(9'007'199'254'740'991), 9007199254.740991);
  EXPECT_THROW((void)ing::to_usd(-1), std::invalid_argument);
}

TEST(Clean, RemovesDuplicatesAndZeroValues) {
  const std::vector<ing::TransactionRecord> in{rec(10, 5), rec(10, 5), rec(11, 0), rec(12, 7), rec(13, 8)};
  const auto out = ing::clean(in);
  ASSERT_EQ(out.records.size(), 3u);
  EXPECT_EQ(out.duplicates_removed, 1u);
  EXPECT_EQ(out.zero_value_removed, 1u);
  EXPECT_EQ(out.records[0].time_stamp, 10);
  EXPECT_EQ(out.records[2].time_stamp, 13);
  EXPECT_FALSE(out.failure_marker_present);
}

TEST(Clean, DropsFailedTransfersWhenMarked) {
  auto failed = rec(20, 9);
  failed.failed = true;
  auto ok = rec(21, 9);
  ok.failed = false;
  const std::vector<ing::TransactionRecord> in{failed, ok};
  const auto out = ing::clean(in);
  EXPECT_EQ(out.records.size(), 1u);
  EXPECT_EQ(out.failed_removed, 1u);
  EXPECT_TRUE(out.failure_marker_present);
}

TEST(AggregateDaily, SingleRecord) {
  const std::vector<ing::TransactionRecord> in{rec(1730764800, 2'500'000)};
  const auto s = ing::aggregate_daily(in, ing::FlowClass::EoaToEoa, kUsdt);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s.values[0], 2.5);
  EXPECT_EQ(s.transform, rs::Transform::Raw);
}

TEST(AggregateDaily, SumsPerUtcDay) {
  const std::int64_t day = 1730764800;  // 2024-11-05T00:00:00Z
  const std::vector<ing::TransactionRecord> in{rec(day + 5, 1'000'000), rec(day + 86399, 2'000'000),
                                               rec(day + 86400, 4'000'000), rec(day + 10, 9'000'000, 1, 1)};
  const auto s = ing::aggregate_daily(in, ing::FlowClass::EoaToEoa, kUsdt);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.start.iso(), "2024-11-05");
  EXPECT_EQ(s.values[0], 3.0);
  EXPECT_EQ(s.values[1], 4.0);
}

TEST(AggregateDaily, GapsBecomeZeroDays) {
  const std::int64_t day = 1730764800;
  const std::vector<ing::TransactionRecord> in{rec(day, 1'000'000), rec(day + 3 * 86400, 1'000'000)};
  const auto s = ing::aggregate_daily(in, ing::FlowClass::EoaToEoa, kUsdt);
  EXPECT_EQ(s.values, (std::vector<double>{1.0, 0.0, 0.0, 1.0}));
}

TEST(AggregateDaily, EmptySelectionAndMixedAreErrors) {
  const std::vector<ing::TransactionRecord> in{rec(0, 1)};
  EXPECT_THROW((void)ing::aggregate_daily(in, ing::FlowClass::ScToSc, kUsdt), rs::DataError);
  EXPECT_THROW((void)ing::aggregate_daily(in, ing::FlowClass::EoaToEoa, kUsdc), rs::DataError);
  EXPECT_THROW((void)ing::aggregate_daily(in, ing::FlowClass::Mixed, kUsdt), std::invalid_argument);
}

TEST(Accumulator, MergeIsOrderIndependent) {
  ing::DailyVolumeAccumulator a;
  ing::DailyVolumeAccumulator b;
  ing::DailyVolumeAccumulator all;
  for (int i = 0; i < 100; ++i) {
    const auto r = rec(1730764800 + i * 7919, 1'000'003ULL * static_cast<std::uint64_t>(i + 1));
    (i % 3 ? a : b).add(r);
    all.add(r);
  }
  ing::DailyVolumeAccumulator ab = a;
  ab.merge(b);
  ing::DailyVolumeAccumulator ba = b;
  ba.merge(a);
  EXPECT_EQ(ab.to_series("x").values, all.to_series("x").values);
  EXPECT_EQ(ba.to_series("x").values, all.to_series("x").values);
}

TEST(CountByClass, PartitionsCleanedTotal) {
  const std::vector<ing::TransactionRecord> in{rec(1, 1), rec(2, 1, 1, 1), rec(3, 1, 0, 1), rec(4, 1, 1, 0),
                                               rec(5, 2)};
  const auto counts = ing::count_by_class(in);
  std::size_t total = 0;
  for (const auto& [token, per] : counts) {
    for (const auto& [fc, n] : per) total += n;
  }
  EXPECT_EQ(total, in.size());
  EXPECT_EQ(counts.at(kUsdt).at(ing::FlowClass::Mixed), 2u);
}

TEST(MarketCsv, TwoRowFile) {
  std::istringstream in("date,close,volume\n2024-11-04,10.0,1\n2024-11-05,12.0,2\n");
  const auto s = ing::load_market_csv(in, ing::MarketField::Close, "BTC");
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.values[1], 12.0);
  EXPECT_EQ(s.start.iso(), "2024-11-04");
}

TEST(MarketCsv, DuplicateOrMissingFieldRejected) {
  std::istringstream dup("date,close\n2024-11-04,10.0\n2024-11-04,12.0\n");
  EXPECT_THROW((void)ing::load_market_csv(dup, ing::MarketField::Close, "BTC"), rs::DataError);
  std::istringstream missing("date,close\n2024-11-04,10.0\n");
  EXPECT_THROW((void)ing::load_market_csv(missing, ing::MarketField::Volume, "BTC"), rs::DataError);
}

TEST(MarketCsv, CalendarCount) {
  std::string text = "date,close\n";
  rs::Date d = rs::Date::parse("2024-03-01");
  while (d <= rs::Date::parse("2025-02-28")) {
    text += d.iso() + ",1.5\n";
    d = d + 1;
  }
  std::istringstream in(text);
  EXPECT_EQ(ing::load_market_csv(in, ing::MarketField::Close, "BTC").size(), 365u);
}

TEST(MarketCsv, VolumeGapsZeroFilledCloseGapsRejected) {
  std::istringstream vol("date,volume\n2024-11-04,3\n2024-11-06,4\n");
  EXPECT_EQ(ing::load_market_csv(vol, ing::MarketField::Volume, "v").values, (std::vector<double>{3.0, 0.0, 4.0}));
  std::istringstream close("date,close\n2024-11-04,3\n2024-11-06,4\n");
  EXPECT_THROW((void)ing::load_market_csv(close, ing::MarketField::Close, "c"), rs::DataError);
}
