#include "regimeshift/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "csv_util.hpp"
#include "regimeshift/errors.hpp"

namespace regimeshift::series {

namespace {

Transform logged(Transform t, bool plus_one) {
  if (t != Transform::Raw) {
    throw std::invalid_argument("log_transform expects a raw series, got " + std::string(to_string(t)));
  }
  return plus_one ? Transform::Log1p : Transform::Log;
}

Transform differenced(Transform t) {
  switch (t) {
    case Transform::Raw: return Transform::FirstDiff;
    case Transform::Log: return Transform::FirstDiffOfLog;
    case Transform::Log1p: return Transform::FirstDiffOfLog1p;
    default: throw std::invalid_argument("series is already differenced");
  }
}

}  // namespace

DailySeries log_transform(const DailySeries& s, bool plus_one) {
  DailySeries out{s.start, {}, s.label, logged(s.transform, plus_one)};
  out.values.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double v = s.values[i];
    if (plus_one ? !(v > -1.0) : !(v > 0.0)) {
      throw DataError("log of out-of-domain value " + detail::format_double(v) + " in '" + s.label + "' on " +
                      s.date_at(i).iso());
    }
    out.values.push_back(plus_one ? std::log1p(v) : std::log(v));
  }
  return out;
}

DailySeries first_difference(const DailySeries& s) {
  if (s.size() < 2) throw std::invalid_argument("first difference needs at least 2 observations");
  DailySeries out{s.start + 1, {}, s.label, differenced(s.transform)};
  out.values.reserve(s.size() - 1);
  for (std::size_t t = 0; t + 1 < s.size(); ++t) out.values.push_back(s.values[t + 1] - s.values[t]);
  return out;
}

RollingMean rolling_mean(const DailySeries& s, std::size_t window) {
  if (window == 0 || window > s.size()) {
    throw std::invalid_argument("rolling window must be in [1, series length]");
  }
  RollingMean out{s.start, window, std::vector<std::optional<double>>(s.size())};
  for (std::size_t t = window - 1; t < s.size(); ++t) {
    double sum = 0.0;
    for (std::size_t k = t + 1 - window; k <= t; ++k) sum += s.values[k];
    out.values[t] = sum / static_cast<double>(window);
  }
  return out;
}

SeriesSplit split_at(const DailySeries& s, Date split_date) {
  if (s.empty() || split_date <= s.start || split_date > s.end_date()) {
    throw std::invalid_argument("split date " + split_date.iso() + " is not strictly inside the series span");
  }
  const auto cut = static_cast<std::size_t>(split_date - s.start);
  SeriesSplit out;
  out.split_date = split_date;
  out.pre = DailySeries{s.start, {s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(cut)},
                        s.label, s.transform};
  out.post = DailySeries{split_date, {s.values.begin() + static_cast<std::ptrdiff_t>(cut), s.values.end()},
                         s.label, s.transform};
  return out;
}

DailySeries concatenate(const SeriesSplit& split) {
  if (split.pre.empty() || split.post.empty() || split.pre.end_date() + 1 != split.post.start) {
    throw std::invalid_argument("split halves are not adjacent");
  }
  DailySeries out = split.pre;
  out.values.insert(out.values.end(), split.post.values.begin(), split.post.values.end());
  return out;
}

std::pair<DailySeries, DailySeries> intersect(const DailySeries& a, const DailySeries& b) {
  if (a.empty() || b.empty()) throw DataError("cannot align an empty series");
  const Date first = std::max(a.start, b.start);
  const Date last = std::min(a.end_date(), b.end_date());
  if (last < first) throw DataError("series '" + a.label + "' and '" + b.label + "' do not overlap");
  auto slice = [&](const DailySeries& s) {
    const auto from = static_cast<std::ptrdiff_t>(first - s.start);
    const auto to = static_cast<std::ptrdiff_t>(last - s.start) + 1;
    return DailySeries{first, {s.values.begin() + from, s.values.begin() + to}, s.label, s.transform};
  };
  return {slice(a), slice(b)};
}

void write_series_csv(const DailySeries& s, std::ostream& out) {
  out << "date,value\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << s.date_at(i).iso() << ',' << detail::format_double(s.values[i]) << '\n';
  }
}

void write_series_csv(const DailySeries& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_series_csv(s, out);
}

DailySeries read_series_csv(std::istream& in, std::string label) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("series file is empty");
  const auto header = detail::split_csv_line(detail::trim(line));
  if (header.size() < 2 || detail::trim(header[0]) != "date" || detail::trim(header[1]) != "value") {
    throw DataError("series file must start with a 'date,value' header");
  }
  DailySeries s;
  s.label = std::move(label);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = detail::split_csv_line(trimmed);
    if (fields.size() < 2) throw DataError("series line " + std::to_string(line_no) + " has too few fields");
    const Date d = Date::parse(detail::trim(fields[0]));
    if (s.values.empty()) {
      s.start = d;
    } else if (d != s.end_date() + 1) {
      throw DataError("series dates must be consecutive days; " + d.iso() + " follows " + s.end_date().iso());
    }
    const auto text = detail::trim(fields[1]);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
      throw DataError("series line " + std::to_string(line_no) + ": bad value '" + std::string(text) + "'");
    }
    s.values.push_back(v);
  }
  if (s.values.empty()) throw DataError("series file has no rows");
  return s;
}

DailySeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open series file " + path.string());
  return read_series_csv(in, path.stem().string());
}

}  // namespace regimeshift::series
