#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regimeshift/date.hpp"

namespace regimeshift {

/// Transformation state of a series' values.
enum class Transform { Raw, Log, Log1p, FirstDiff, FirstDiffOfLog, FirstDiffOfLog1p };

[[nodiscard]] std::string_view to_string(Transform t);

/**
 * @brief Contiguous daily observations starting at `start`.
 *
 * values[i] is the observation for `start + i`. Missing days never appear
 * as gaps; producers fill them explicitly (zero volume for flows).
 */
struct DailySeries {
  Date start;
  std::vector<double> values;
  std::string label;
  Transform transform = Transform::Raw;

  [[nodiscard]] std::size_t size() const { return values.size(); }
  [[nodiscard]] bool empty() const { return values.empty(); }
  [[nodiscard]] Date date_at(std::size_t i) const { return start + static_cast<std::int64_t>(i); }
  /// Last covered date. Undefined for an empty series.
  [[nodiscard]] Date end_date() const { return date_at(values.size() - 1); }
  [[nodiscard]] std::optional<std::size_t> index_of(Date d) const;

  /// Throws DataError if the series is empty or holds a non-finite value.
  void validate() const;
};

}  // namespace regimeshift
