#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "regimeshift/daily_series.hpp"

namespace regimeshift::ingest {

/// One ERC-20 transfer as read from the transaction export.
struct TransactionRecord {
  std::int64_t time_stamp = 0;  ///< Unix seconds, UTC
  std::string token_address;    ///< lowercase, 0x-prefixed
  std::string from_addr;
  std::string to_addr;
  std::uint8_t from_is_contract = 0;
  std::uint8_t to_is_contract = 0;
  std::uint64_t raw_value = 0;  ///< token base units
  /// Set only when the export carries an `isError` column.
  std::optional<bool> failed;

  bool operator==(const TransactionRecord&) const = default;
};

enum class FlowClass { EoaToEoa, ScToSc, Mixed };

[[nodiscard]] std::string_view to_string(FlowClass c);

[[nodiscard]] FlowClass classify_flow(const TransactionRecord& rec) noexcept;

struct ParseOptions {
  /// Malformed rows above this fraction of data rows abort the parse.
  double max_malformed_fraction = 0.001;
};

struct ParsedTransactions {
  std::vector<TransactionRecord> records;
  std::size_t data_rows = 0;
  std::size_t malformed_rows = 0;
  std::size_t filtered_rows = 0;  ///< token not in the allow-list
  bool has_failure_column = false;
  std::vector<std::size_t> malformed_lines;  ///< first few offending line numbers (1-based)
};

/**
 * @brief Reads a headered transaction CSV.
 *
 * Mandatory columns (case-sensitive): timeStamp, tokenAddress, from, to,
 * fromIsContract, toIsContract, value. An `isError` column is used when
 * present; every other column is ignored. Rows for tokens outside
 * `token_allow_list` are skipped before their remaining fields are parsed.
 *
 * @throws DataError on an unreadable file, a missing mandatory column, or a
 *         malformed-row fraction above the configured threshold.
 */
[[nodiscard]] ParsedTransactions parse_transactions(const std::filesystem::path& path,
                                                    const std::set<std::string>& token_allow_list,
                                                    const ParseOptions& options = {});

[[nodiscard]] ParsedTransactions parse_transactions(std::istream& in,
                                                    const std::set<std::string>& token_allow_list,
                                                    const ParseOptions& options = {});

/// raw / 10^decimals. Throws std::invalid_argument for negative input.
[[nodiscard]] double to_usd(std::int64_t raw_value, int decimals = 6);

struct CleanResult {
  std::vector<TransactionRecord> records;
  std::size_t duplicates_removed = 0;
  std::size_t zero_value_removed = 0;
  std::size_t failed_removed = 0;
  /// False when no record carried a failure marker, i.e. the failed-removal
  /// class was skipped.
  bool failure_marker_present = false;
};

/// Drops exact duplicates, zero-value and failed transfers; survivors keep their order.
[[nodiscard]] CleanResult clean(std::span<const TransactionRecord> records);

/// Exact sum of token base units.
__extension__ using BaseUnitSum = unsigned __int128;

/// Per-day sums in base units. Merging is associative and commutative, so
/// shards of a file can be accumulated independently.
class DailyVolumeAccumulator {
 public:
  void add(const TransactionRecord& rec);
  void add(Date day, std::uint64_t raw_value);
  void merge(const DailyVolumeAccumulator& other);

  [[nodiscard]] bool empty() const { return totals_.empty(); }
  [[nodiscard]] std::size_t record_count() const { return records_; }

  /// Contiguous series from the first to the last day seen; quiet days are 0.
  [[nodiscard]] DailySeries to_series(std::string label, int decimals = 6) const;

 private:
  std::map<std::int64_t, BaseUnitSum> totals_;
  std::size_t records_ = 0;
};

/// Daily USD volume of `flow` transfers of `token`.
/// Throws DataError when no record matches.
[[nodiscard]] DailySeries aggregate_daily(std::span<const TransactionRecord> records, FlowClass flow,
                                          std::string_view token, int decimals = 6,
                                          std::string label = {});

/// Record counts per token and flow class.
using ClassCounts = std::map<std::string, std::map<FlowClass, std::size_t>>;

[[nodiscard]] ClassCounts count_by_class(std::span<const TransactionRecord> records);

enum class MarketField { Close, Volume };

[[nodiscard]] std::string_view to_string(MarketField f);
[[nodiscard]] MarketField parse_market_field(std::string_view s);

/**
 * @brief Loads one column of a headered market CSV keyed by `date` (YYYY-MM-DD).
 *
 * Dates must be strictly increasing. Calendar gaps in a volume column become
 * zero-volume days; a gap in a close column is an error since a price cannot
 * be filled without inventing data.
 */
[[nodiscard]] DailySeries load_market_csv(const std::filesystem::path& path, MarketField field,
                                          std::string label = {});

[[nodiscard]] DailySeries load_market_csv(std::istream& in, MarketField field, std::string label);

}  // namespace regimeshift::ingest
