#include "regimeshift/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "csv_util.hpp"
#include "regimeshift/errors.hpp"

namespace regimeshift::ingest {

namespace {

constexpr std::size_t kMalformedSamples = 10;

template <typename Int>
bool parse_integer(std::string_view s, Int& out) {
  s = detail::trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_flag(std::string_view s, std::uint8_t& out) {
  s = detail::trim(s);
  if (s == "0") {
    out = 0;
    return true;
  }
  if (s == "1") {
    out = 1;
    return true;
  }
  return false;
}

struct Columns {
  std::size_t time_stamp, token, from, to, from_contract, to_contract, value;
  std::optional<std::size_t> is_error;
  std::size_t max_index;
};

Columns locate_columns(const std::vector<std::string>& header) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index.emplace(std::string(detail::trim(header[i])), i);

  auto need = [&](const char* name) {
    auto it = index.find(name);
    if (it == index.end()) throw DataError(std::string("transaction file lacks mandatory column '") + name + "'");
    return it->second;
  };
  Columns c{need("timeStamp"), need("tokenAddress"), need("from"),  need("to"),
            need("fromIsContract"), need("toIsContract"), need("value"), std::nullopt, 0};
  if (auto it = index.find("isError"); it != index.end()) c.is_error = it->second;
  c.max_index = std::max({c.time_stamp, c.token, c.from, c.to, c.from_contract, c.to_contract, c.value});
  if (c.is_error) c.max_index = std::max(c.max_index, *c.is_error);
  return c;
}

struct RecordHash {
  std::size_t operator()(const TransactionRecord& r) const noexcept {
    std::size_t h = std::hash<std::int64_t>{}(r.time_stamp);
    auto combine = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    combine(std::hash<std::string>{}(r.token_address));
    combine(std::hash<std::string>{}(r.from_addr));
    combine(std::hash<std::string>{}(r.to_addr));
    combine(static_cast<std::size_t>(r.from_is_contract) << 1 | r.to_is_contract);
    combine(std::hash<std::uint64_t>{}(r.raw_value));
    combine(r.failed ? (*r.failed ? 2u : 1u) : 0u);
    return h;
  }
};

std::string decimal_to_string(BaseUnitSum v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

double base_units_to_usd(BaseUnitSum total, int decimals) {
  BaseUnitSum scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  const auto whole = total / scale;
  const auto frac = total % scale;
  if (whole >= (static_cast<BaseUnitSum>(1) << 53)) {
    // Beyond exact double range; the rounding is unavoidable.
    return static_cast<double>(whole) + static_cast<double>(frac) / static_cast<double>(scale);
  }
  if (frac == 0) return static_cast<double>(whole);
  if (whole == 0) return static_cast<double>(frac) / static_cast<double>(scale);
  // Parse the exact decimal so the result is the correctly rounded double.
  std::string text = decimal_to_string(whole) + ".";
  std::string f = decimal_to_string(frac);
  text += std::string(static_cast<std::size_t>(decimals) - f.size(), '0') + f;
  double v = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), v);
  return v;
}

}  // namespace

std::string_view to_string(FlowClass c) {
  switch (c) {
    case FlowClass::EoaToEoa: return "EOA-EOA";
    case FlowClass::ScToSc: return "SC-SC";
    case FlowClass::Mixed: return "Mixed";
  }
  return "unknown";
}

FlowClass classify_flow(const TransactionRecord& rec) noexcept {
  if (rec.from_is_contract == 0 && rec.to_is_contract == 0) return FlowClass::EoaToEoa;
  if (rec.from_is_contract == 1 && rec.to_is_contract == 1) return FlowClass::ScToSc;
  return FlowClass::Mixed;
}

ParsedTransactions parse_transactions(std::istream& in, const std::set<std::string>& token_allow_list,
                                      const ParseOptions& options) {
  std::set<std::string> allow;
  for (const auto& t : token_allow_list) allow.insert(detail::to_lower(detail::trim(t)));

  std::string line;
  if (!std::getline(in, line)) throw DataError("transaction file is empty (no header row)");
  const Columns cols = locate_columns(detail::split_csv_line(detail::trim(line)));

  ParsedTransactions out;
  out.has_failure_column = cols.is_error.has_value();
  std::size_t line_no = 1;
  auto malformed = [&out, &line_no] {
    ++out.malformed_rows;
    if (out.malformed_lines.size() < kMalformedSamples) out.malformed_lines.push_back(line_no);
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    ++out.data_rows;
    const auto fields = detail::split_csv_line(trimmed);
    if (fields.size() <= cols.max_index) {
      malformed();
      continue;
    }
    std::string token = detail::to_lower(detail::trim(fields[cols.token]));
    if (!allow.contains(token)) {
      ++out.filtered_rows;
      continue;
    }

    TransactionRecord rec;
    rec.token_address = std::move(token);
    rec.from_addr = detail::to_lower(detail::trim(fields[cols.from]));
    rec.to_addr = detail::to_lower(detail::trim(fields[cols.to]));
    bool ok = parse_integer(fields[cols.time_stamp], rec.time_stamp) && rec.time_stamp >= 0 &&
              parse_flag(fields[cols.from_contract], rec.from_is_contract) &&
              parse_flag(fields[cols.to_contract], rec.to_is_contract) &&
              parse_integer(fields[cols.value], rec.raw_value);
    if (ok && cols.is_error) {
      std::uint8_t flag = 0;
      ok = parse_flag(fields[*cols.is_error], flag);
      rec.failed = flag == 1;
    }
    if (!ok) {
      malformed();
      continue;
    }
    out.records.push_back(std::move(rec));
  }

  if (out.data_rows > 0) {
    const double fraction = static_cast<double>(out.malformed_rows) / static_cast<double>(out.data_rows);
    if (fraction > options.max_malformed_fraction) {
      throw DataError(std::to_string(out.malformed_rows) + " of " + std::to_string(out.data_rows) +
                      " rows are malformed, above the allowed fraction " +
                      std::to_string(options.max_malformed_fraction));
    }
  }
  return out;
}

ParsedTransactions parse_transactions(const std::filesystem::path& path,
                                      const std::set<std::string>& token_allow_list,
                                      const ParseOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open transaction file " + path.string());
  return parse_transactions(in, token_allow_list, options);
}

double to_usd(std::int64_t raw_value, int decimals) {
  if (raw_value < 0) throw std::invalid_argument("token amounts cannot be negative");
  if (decimals < 0 || decimals > 30) throw std::invalid_argument("token decimals out of range");
  return base_units_to_usd(static_cast<BaseUnitSum>(raw_value), decimals);
}

CleanResult clean(std::span<const TransactionRecord> records) {
  CleanResult out;
  std::unordered_set<TransactionRecord, RecordHash> seen;
  seen.reserve(records.size());
  for (const auto& rec : records) {
    if (rec.failed.has_value()) out.failure_marker_present = true;
    if (rec.raw_value == 0) {
      ++out.zero_value_removed;
      continue;
    }
    if (rec.failed.value_or(false)) {
      ++out.failed_removed;
      continue;
    }
    if (!seen.insert(rec).second) {
      ++out.duplicates_removed;
      continue;
    }
    out.records.push_back(rec);
  }
  return out;
}

void DailyVolumeAccumulator::add(const TransactionRecord& rec) {
  add(Date::from_unix_seconds(rec.time_stamp), rec.raw_value);
}

void DailyVolumeAccumulator::add(Date day, std::uint64_t raw_value) {
  totals_[day.days_since_epoch()] += raw_value;
  ++records_;
}

void DailyVolumeAccumulator::merge(const DailyVolumeAccumulator& other) {
  for (const auto& [day, total] : other.totals_) totals_[day] += total;
  records_ += other.records_;
}

DailySeries DailyVolumeAccumulator::to_series(std::string label, int decimals) const {
  if (totals_.empty()) throw DataError("no transfers to aggregate for '" + label + "'");
  const std::int64_t first = totals_.begin()->first;
  const std::int64_t last = totals_.rbegin()->first;
  DailySeries s;
  s.start = Date(first);
  s.label = std::move(label);
  s.transform = Transform::Raw;
  s.values.assign(static_cast<std::size_t>(last - first + 1), 0.0);
  for (const auto& [day, total] : totals_) {
    s.values[static_cast<std::size_t>(day - first)] = base_units_to_usd(total, decimals);
  }
  return s;
}

DailySeries aggregate_daily(std::span<const TransactionRecord> records, FlowClass flow,
                            std::string_view token, int decimals, std::string label) {
  if (flow == FlowClass::Mixed) throw std::invalid_argument("only EOA-EOA and SC-SC flows are aggregated");
  const std::string wanted = detail::to_lower(detail::trim(token));
  if (label.empty()) label = wanted + "/" + std::string(to_string(flow));
  DailyVolumeAccumulator acc;
  for (const auto& rec : records) {
    if (rec.token_address == wanted && classify_flow(rec) == flow) acc.add(rec);
  }
  if (acc.empty()) throw DataError("no " + std::string(to_string(flow)) + " transfers for token " + wanted);
  return acc.to_series(std::move(label), decimals);
}

ClassCounts count_by_class(std::span<const TransactionRecord> records) {
  ClassCounts counts;
  for (const auto& rec : records) ++counts[rec.token_address][classify_flow(rec)];
  return counts;
}

std::string_view to_string(MarketField f) { return f == MarketField::Close ? "close" : "volume"; }

MarketField parse_market_field(std::string_view s) {
  const auto lower = detail::to_lower(detail::trim(s));
  if (lower == "close") return MarketField::Close;
  if (lower == "volume") return MarketField::Volume;
  throw DataError("unknown market field '" + std::string(s) + "' (expected close or volume)");
}

DailySeries load_market_csv(std::istream& in, MarketField field, std::string label) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("market file is empty (no header row)");
  const auto header = detail::split_csv_line(detail::trim(line));
  std::optional<std::size_t> date_col;
  std::optional<std::size_t> value_col;
  const std::string wanted(to_string(field));
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = detail::to_lower(detail::trim(header[i]));
    if (name == "date") date_col = i;
    if (name == wanted) value_col = i;
  }
  if (!date_col) throw DataError("market file lacks a 'date' column");
  if (!value_col) throw DataError("market file lacks a '" + wanted + "' column");

  DailySeries s;
  s.label = std::move(label);
  std::optional<Date> previous;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = detail::split_csv_line(trimmed);
    if (fields.size() <= std::max(*date_col, *value_col)) {
      throw DataError("market file line " + std::to_string(line_no) + " has too few fields");
    }
    const Date d = Date::parse(detail::trim(fields[*date_col]));
    double v = 0.0;
    const auto text = detail::trim(fields[*value_col]);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
      throw DataError("market file line " + std::to_string(line_no) + ": bad " + wanted + " value '" +
                      std::string(text) + "'");
    }
    if (previous) {
      if (d <= *previous) {
        throw DataError("market file dates must be strictly increasing; " + d.iso() + " follows " +
                        previous->iso());
      }
      const auto gap = d - *previous;
      if (gap > 1) {
        if (field == MarketField::Close) {
          throw DataError("market close series has missing days between " + previous->iso() + " and " + d.iso());
        }
        s.values.insert(s.values.end(), static_cast<std::size_t>(gap - 1), 0.0);
      }
    } else {
      s.start = d;
    }
    s.values.push_back(v);
    previous = d;
  }
  if (s.values.empty()) throw DataError("market file has no data rows");
  return s;
}

DailySeries load_market_csv(const std::filesystem::path& path, MarketField field, std::string label) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open market file " + path.string());
  if (label.empty()) label = path.stem().string();
  return load_market_csv(in, field, std::move(label));
}

}  // namespace regimeshift::ingest
