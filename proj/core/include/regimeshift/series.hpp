#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "regimeshift/daily_series.hpp"

namespace regimeshift::series {

/// Elementwise ln(x), or ln(1+x) when `plus_one` is set.
/// Throws DataError on a value outside the logarithm's domain.
[[nodiscard]] DailySeries log_transform(const DailySeries& s, bool plus_one);

/// out[t] = in[t+1] - in[t]; the result starts one day later.
[[nodiscard]] DailySeries first_difference(const DailySeries& s);

/// Trailing moving average; entries before the first full window are empty.
struct RollingMean {
  Date start;
  std::size_t window = 0;
  std::vector<std::optional<double>> values;
};

[[nodiscard]] RollingMean rolling_mean(const DailySeries& s, std::size_t window);

struct SeriesSplit {
  DailySeries pre;   ///< start .. split_date - 1
  DailySeries post;  ///< split_date .. end
  Date split_date;
};

/// Splits so that `split_date` opens the post window. Requires
/// start < split_date <= end.
[[nodiscard]] SeriesSplit split_at(const DailySeries& s, Date split_date);

[[nodiscard]] DailySeries concatenate(const SeriesSplit& split);

/// Restricts two series to their common date range.
[[nodiscard]] std::pair<DailySeries, DailySeries> intersect(const DailySeries& a, const DailySeries& b);

/// Canonical `date,value` CSV.
void write_series_csv(const DailySeries& s, std::ostream& out);
void write_series_csv(const DailySeries& s, const std::filesystem::path& path);

/// Reads the canonical CSV. Dates must be consecutive days.
[[nodiscard]] DailySeries read_series_csv(std::istream& in, std::string label);
[[nodiscard]] DailySeries read_series_csv(const std::filesystem::path& path);

}  // namespace regimeshift::series
