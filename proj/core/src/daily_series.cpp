#include "regimeshift/daily_series.hpp"

#include <cmath>

#include "regimeshift/errors.hpp"

namespace regimeshift {

std::string_view to_string(Transform t) {
  switch (t) {
    case Transform::Raw: return "raw";
    case Transform::Log: return "log";
    case Transform::Log1p: return "log1p";
    case Transform::FirstDiff: return "diff";
    case Transform::FirstDiffOfLog: return "diff_log";
    case Transform::FirstDiffOfLog1p: return "diff_log1p";
  }
  return "unknown";
}

std::optional<std::size_t> DailySeries::index_of(Date d) const {
  const auto offset = d - start;
  if (offset < 0 || static_cast<std::size_t>(offset) >= values.size()) return std::nullopt;
  return static_cast<std::size_t>(offset);
}

void DailySeries::validate() const {
  if (values.empty()) throw DataError("series '" + label + "' is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw DataError("series '" + label + "' has a non-finite value on " + date_at(i).iso());
    }
  }
}

}  // namespace regimeshift
