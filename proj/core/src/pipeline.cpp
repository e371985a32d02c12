#include "regimeshift/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#if defined(REGIMESHIFT_VENDORED_JSON)
#include "json.hpp"
#else
#include <nlohmann/json.hpp>
#endif

#include "csv_util.hpp"
#include "regimeshift/errors.hpp"
#include "regimeshift/rng.hpp"
#include "regimeshift/series.hpp"

namespace regimeshift::pipeline {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- parsing

bool parse_bool(std::string_view v) {
  const std::string s = detail::to_lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("not a boolean: " + std::string(v));
}

template <typename T>
T parse_number(std::string_view v, std::string_view key) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("invalid value '" + std::string(v) + "' for " + std::string(key));
  }
  return out;
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = v.find(',', pos);
    const auto item = detail::trim(v.substr(pos, comma == std::string_view::npos ? v.npos : comma - pos));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

fs::path resolve(std::string_view value, const fs::path& base_dir) {
  fs::path p{std::string(value)};
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p.lexically_normal();
}

ingest::FlowClass parse_flow(std::string_view s) {
  const std::string v = detail::to_lower(s);
  if (v == "eoa-eoa") return ingest::FlowClass::EoaToEoa;
  if (v == "sc-sc") return ingest::FlowClass::ScToSc;
  throw std::invalid_argument("flow must be EOA-EOA or SC-SC: " + std::string(s));
}

template <typename Spec>
Spec& upsert(std::vector<Spec>& specs, const std::string& name) {
  for (auto& s : specs) {
    if (s.name == name) return s;
  }
  specs.push_back(Spec{});
  specs.back().name = name;
  return specs.back();
}

std::string suffix_after(std::string_view key, std::string_view prefix) {
  const std::string name(key.substr(prefix.size()));
  if (name.empty()) throw std::invalid_argument("missing name in key " + std::string(key));
  return name;
}

// ---------------------------------------------------------------- reporting helpers

double report_p(double p) { return std::clamp(p, std::numeric_limits<double>::min(), 1.0); }

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

Json adf_json(const unitroot::AdfResult& r) {
  Json j;
  j["t_stat"] = r.t_stat;
  j["p_value"] = report_p(r.p_value);
  j["p_value_clamped"] = r.p_value_clamped;
  j["lag"] = r.chosen_lag;
  j["nobs"] = r.nobs;
  j["crit_1"] = r.crit_1;
  j["crit_5"] = r.crit_5;
  j["crit_10"] = r.crit_10;
  j["verdict"] = r.stationary_at_5pct ? "stationary" : "non-stationary";
  return j;
}

Json verdict_json(const surrogate::SurrogateVerdict& v, const surrogate::SurrogateConfig& cfg) {
  Json j;
  j["method"] = std::string(surrogate::to_string(cfg.method));
  j["criterion"] = v.criterion;
  j["window_days"] = cfg.match_window_days;
  j["seed"] = cfg.seed;
  j["observed_stat"] = v.observed_stat;
  j["n_surrogates"] = v.n_surrogates;
  j["evaluated"] = v.null_stats.count;
  j["failures"] = v.failures;
  j["matches"] = v.matches;
  j["p_value"] = report_p(v.p_value);
  j["p_value_text"] = v.p_value_text();
  j["significant_at"] = v.significant_at;
  j["null"] = {{"mean", v.null_stats.mean},
               {"q05", v.null_stats.q05},
               {"q50", v.null_stats.q50},
               {"q95", v.null_stats.q95},
               {"q99", v.null_stats.q99},
               {"count_exceeding", v.null_stats.count_exceeding}};
  Json alts = Json::array();
  for (const auto& a : v.alternatives) {
    alts.push_back({{"name", a.name}, {"matches", a.matches}, {"p_value", report_p(a.p_value)}});
  }
  j["alternatives"] = std::move(alts);
  return j;
}

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

struct Asset {
  AssetArtifacts art;
  std::string kind;  ///< blockchain, market or file
  bool market_close = false;
};

DailySeries level_series(const Asset& a, const RunConfig& cfg) {
  std::string t;
  if (auto it = cfg.transforms.find(a.art.name); it != cfg.transforms.end()) {
    t = it->second;
  } else if (a.kind == "blockchain") {
    t = "log1p";
  } else {
    const bool positive = std::all_of(a.art.raw.values.begin(), a.art.raw.values.end(), [](double v) { return v > 0.0; });
    t = positive ? "log" : "log1p";
  }
  if (t == "raw") return a.art.raw;
  return series::log_transform(a.art.raw, t == "log1p");
}

void record_error(Asset& a, std::vector<StageError>& all, std::string stage, const std::exception& e) {
  a.art.errors.push_back({stage, e.what()});
  all.push_back({a.art.name + ": " + stage, e.what()});
}

std::string csv_num(double v) { return std::isfinite(v) ? detail::format_double(v) : std::string{}; }

}  // namespace

// ---------------------------------------------------------------- config

namespace {

Date parse_date(std::string_view v, const std::string& key) {
  try {
    return Date::parse(v);
  } catch (const std::exception& e) {
    throw std::invalid_argument(key + ": " + e.what());
  }
}

}  // namespace

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, const fs::path& base_dir) {
  const std::string k(detail::trim(key));
  const std::string_view v = detail::trim(value);
  auto starts = [&](std::string_view prefix) { return k.rfind(prefix, 0) == 0; };

  if (k == "transactions") {
    cfg.transactions = resolve(v, base_dir);
  } else if (starts("token.")) {
    auto& t = upsert(cfg.tokens, suffix_after(k, "token."));
    const auto parts = split_list(v);
    if (parts.empty() || parts.size() > 2) throw std::invalid_argument("token entry must be 'address[,decimals]'");
    t.address = detail::to_lower(parts[0]);
    if (parts.size() == 2) t.decimals = parse_number<int>(parts[1], k);
  } else if (starts("market.")) {
    auto& m = upsert(cfg.markets, suffix_after(k, "market."));
    const auto colon = v.rfind(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("market entry must be 'path:field'");
    m.path = resolve(v.substr(0, colon), base_dir);
    m.field = ingest::parse_market_field(v.substr(colon + 1));
  } else if (starts("series.")) {
    auto& s = upsert(cfg.series, suffix_after(k, "series."));
    s.path = resolve(v, base_dir);
  } else if (starts("transform.")) {
    const std::string t = detail::to_lower(v);
    if (t != "raw" && t != "log" && t != "log1p") throw std::invalid_argument("transform must be raw, log or log1p");
    cfg.transforms[suffix_after(k, "transform.")] = t;
  } else if (k == "flows") {
    cfg.flows.clear();
    for (const auto& f : split_list(v)) cfg.flows.push_back(parse_flow(f));
  } else if (k == "event_date") {
    cfg.event_date = parse_date(v, k);
  } else if (k == "split_date") {
    cfg.split_date = parse_date(v, k);
  } else if (k == "enable.adf") {
    cfg.enable.adf = parse_bool(v);
  } else if (k == "enable.breaks") {
    cfg.enable.breaks = parse_bool(v);
  } else if (k == "enable.surrogate") {
    cfg.enable.surrogate = parse_bool(v);
  } else if (k == "enable.hht") {
    cfg.enable.hht = parse_bool(v);
  } else if (k == "enable.svar") {
    cfg.enable.svar = parse_bool(v);
  } else if (k == "adf.deterministic") {
    cfg.adf_deterministic = unitroot::parse_deterministic(v);
  } else if (k == "breaks.max_breaks") {
    cfg.breaks.max_breaks = parse_number<std::size_t>(v, k);
  } else if (k == "breaks.trim") {
    cfg.breaks.trim = parse_number<double>(v, k);
  } else if (k == "breaks.selection") {
    cfg.breaks.selection = breaks::parse_selection(v);
  } else if (k == "breaks.fixed_m") {
    cfg.breaks.fixed_m = parse_number<std::size_t>(v, k);
  } else if (k == "breaks.null_replications") {
    cfg.breaks.null_replications = parse_number<std::size_t>(v, k);
  } else if (k == "emd.max_imfs") {
    cfg.emd.max_imfs = parse_number<std::size_t>(v, k);
  } else if (k == "emd.sd_threshold") {
    cfg.emd.sift_sd_threshold = parse_number<double>(v, k);
  } else if (k == "emd.max_sift_iters") {
    cfg.emd.max_sift_iters = parse_number<std::size_t>(v, k);
  } else if (k == "hht.b") {
    cfg.energy_b = parse_number<double>(v, k);
  } else if (k == "hht.bins") {
    cfg.grid.bins = parse_number<std::size_t>(v, k);
  } else if (k == "hht.assets") {
    cfg.hht_assets = split_list(v);
  } else if (k == "surrogate.method") {
    cfg.surrogate.method = surrogate::parse_method(v);
  } else if (k == "surrogate.n") {
    cfg.surrogate.n_surrogates = parse_number<std::size_t>(v, k);
  } else if (k == "surrogate.window") {
    cfg.surrogate.match_window_days = parse_number<std::size_t>(v, k);
  } else if (k == "surrogate.energy") {
    cfg.energy_surrogates = parse_bool(v);
  } else if (starts("svar.pair.")) {
    auto& p = upsert(cfg.svar_pairs, suffix_after(k, "svar.pair."));
    const auto parts = split_list(v);
    if (parts.size() != 2) throw std::invalid_argument("svar pair must name two assets: 'A,B'");
    p.first = parts[0];
    p.second = parts[1];
  } else if (k == "svar.p_max") {
    cfg.svar.p_max = parse_number<std::size_t>(v, k);
  } else if (k == "svar.include_intercepts") {
    cfg.svar.include_intercepts = parse_bool(v);
  } else if (k == "svar.min_overlap_days") {
    cfg.svar.min_overlap_days = parse_number<std::size_t>(v, k);
  } else if (k == "rolling_window") {
    cfg.rolling_window = parse_number<std::size_t>(v, k);
  } else if (k == "seed") {
    cfg.seed = parse_number<std::uint64_t>(v, k);
  } else if (k == "threads") {
    cfg.threads = parse_number<unsigned>(v, k);
  } else if (k == "out_dir") {
    cfg.out_dir = resolve(v, base_dir);
  } else {
    throw std::invalid_argument("unknown config key: " + k);
  }
}

RunConfig parse_config(std::istream& in, const fs::path& base_dir) {
  RunConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = line;
    if (const auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = detail::trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_setting(cfg, sv.substr(0, eq), sv.substr(eq + 1), base_dir);
    } catch (const std::exception& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path.string());
  return parse_config(in, path.parent_path());
}

void validate(const RunConfig& cfg) {
  auto require_file = [](const fs::path& p, const std::string& what) {
    if (!fs::is_regular_file(p)) throw std::invalid_argument(what + " not found: " + p.string());
  };
  if (cfg.transactions) {
    require_file(*cfg.transactions, "transaction file");
    if (cfg.tokens.empty()) throw std::invalid_argument("a transaction file needs at least one token.<NAME> entry");
  }
  for (const auto& t : cfg.tokens) {
    if (t.address.empty()) throw std::invalid_argument("token " + t.name + " has no address");
    if (t.decimals < 0 || t.decimals > 30) throw std::invalid_argument("token " + t.name + " has invalid decimals");
  }
  for (const auto& m : cfg.markets) require_file(m.path, "market file for " + m.name);
  for (const auto& s : cfg.series) require_file(s.path, "series file for " + s.name);
  if (!cfg.transactions && cfg.markets.empty() && cfg.series.empty()) {
    throw std::invalid_argument("no input configured (transactions, market.* or series.*)");
  }
  if (cfg.breaks.trim <= 0.0 || cfg.breaks.trim > 0.25) throw std::invalid_argument("breaks.trim must lie in (0, 0.25]");
  if (cfg.surrogate.n_surrogates == 0) throw std::invalid_argument("surrogate.n must be positive");
  if (cfg.grid.bins == 0) throw std::invalid_argument("hht.bins must be positive");
  if (cfg.rolling_window == 0) throw std::invalid_argument("rolling_window must be positive");
}

std::string canonical_config(const RunConfig& cfg) {
  std::map<std::string, std::string> kv;
  auto num = [](auto v) {
    if constexpr (std::is_floating_point_v<decltype(v)>) {
      return detail::format_double(v);
    } else {
      return std::to_string(v);
    }
  };
  auto join = [](const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
    return out;
  };
  if (cfg.transactions) kv["transactions"] = cfg.transactions->filename().string();
  for (const auto& t : cfg.tokens) kv["token." + t.name] = t.address + "," + num(t.decimals);
  for (const auto& m : cfg.markets) {
    kv["market." + m.name] = m.path.filename().string() + ":" + std::string(ingest::to_string(m.field));
  }
  for (const auto& s : cfg.series) kv["series." + s.name] = s.path.filename().string();
  for (const auto& [name, t] : cfg.transforms) kv["transform." + name] = t;
  std::vector<std::string> flows;
  for (auto f : cfg.flows) flows.emplace_back(ingest::to_string(f));
  kv["flows"] = join(flows);
  kv["event_date"] = cfg.event_date.iso();
  kv["split_date"] = cfg.split_date.iso();
  kv["enable.adf"] = cfg.enable.adf ? "true" : "false";
  kv["enable.breaks"] = cfg.enable.breaks ? "true" : "false";
  kv["enable.surrogate"] = cfg.enable.surrogate ? "true" : "false";
  kv["enable.hht"] = cfg.enable.hht ? "true" : "false";
  kv["enable.svar"] = cfg.enable.svar ? "true" : "false";
  kv["adf.deterministic"] = std::string(unitroot::to_string(cfg.adf_deterministic));
  kv["breaks.max_breaks"] = num(cfg.breaks.max_breaks);
  kv["breaks.trim"] = num(cfg.breaks.trim);
  kv["breaks.selection"] = std::string(breaks::to_string(cfg.breaks.selection));
  kv["breaks.fixed_m"] = num(cfg.breaks.fixed_m);
  kv["breaks.null_replications"] = num(cfg.breaks.null_replications);
  kv["emd.max_imfs"] = num(cfg.emd.max_imfs);
  kv["emd.sd_threshold"] = num(cfg.emd.sift_sd_threshold);
  kv["emd.max_sift_iters"] = num(cfg.emd.max_sift_iters);
  kv["hht.b"] = num(cfg.energy_b);
  kv["hht.bins"] = num(cfg.grid.bins);
  kv["hht.assets"] = join(cfg.hht_assets);
  kv["surrogate.method"] = std::string(surrogate::to_string(cfg.surrogate.method));
  kv["surrogate.n"] = num(cfg.surrogate.n_surrogates);
  kv["surrogate.window"] = num(cfg.surrogate.match_window_days);
  kv["surrogate.energy"] = cfg.energy_surrogates ? "true" : "false";
  for (const auto& p : cfg.svar_pairs) kv["svar.pair." + p.name] = p.first + "," + p.second;
  kv["svar.p_max"] = num(cfg.svar.p_max);
  kv["svar.include_intercepts"] = cfg.svar.include_intercepts ? "true" : "false";
  kv["svar.min_overlap_days"] = num(cfg.svar.min_overlap_days);
  kv["rolling_window"] = num(cfg.rolling_window);
  kv["seed"] = num(cfg.seed);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

// ---------------------------------------------------------------- run

PipelineReport run_pipeline(const RunConfig& cfg) {
  validate(cfg);
  PipelineReport report;
  report.event_date = cfg.event_date;
  report.rolling_window = cfg.rolling_window;

  Json root;
  root["tool"] = {{"name", "regimeshift"}, {"version", std::string(kToolVersion)}};
  const std::string canonical = canonical_config(cfg);
  root["provenance"] = {{"tool_version", std::string(kToolVersion)},
                        {"seed", cfg.seed},
                        {"config_hash", hex64(fnv1a64(canonical))}};
  Json config_lines = Json::array();
  std::istringstream canonical_in(canonical);
  for (std::string l; std::getline(canonical_in, l);) config_lines.push_back(l);
  root["provenance"]["config"] = std::move(config_lines);

  std::vector<Asset> assets;
  Json ingestion;

  // Blockchain flows.
  if (cfg.transactions) {
    std::set<std::string> allow;
    std::map<std::string, std::string> name_of;
    for (const auto& t : cfg.tokens) {
      allow.insert(t.address);
      name_of[t.address] = t.name;
    }
    const auto parsed = ingest::parse_transactions(*cfg.transactions, allow);
    const auto cleaned = ingest::clean(parsed.records);
    const auto counts = ingest::count_by_class(cleaned.records);
    Json tx;
    tx["file"] = cfg.transactions->filename().string();
    tx["data_rows"] = parsed.data_rows;
    tx["malformed_rows"] = parsed.malformed_rows;
    tx["malformed_lines"] = parsed.malformed_lines;
    tx["filtered_rows"] = parsed.filtered_rows;
    tx["records"] = parsed.records.size();
    tx["duplicates_removed"] = cleaned.duplicates_removed;
    tx["zero_value_removed"] = cleaned.zero_value_removed;
    tx["failed_removed"] = cleaned.failed_removed;
    tx["failure_marker_present"] = cleaned.failure_marker_present;
    tx["cleaned_records"] = cleaned.records.size();
    Json by_class = Json::object();
    std::size_t partition_total = 0;
    for (const auto& t : cfg.tokens) {
      Json row = Json::object();
      for (auto fc : {ingest::FlowClass::EoaToEoa, ingest::FlowClass::ScToSc, ingest::FlowClass::Mixed}) {
        std::size_t n = 0;
        if (auto it = counts.find(t.address); it != counts.end()) {
          if (auto jt = it->second.find(fc); jt != it->second.end()) n = jt->second;
        }
        row[std::string(ingest::to_string(fc))] = n;
        partition_total += n;
      }
      by_class[t.name] = std::move(row);
    }
    tx["by_class"] = std::move(by_class);
    tx["partition_consistent"] = partition_total == cleaned.records.size();
    ingestion["transactions"] = std::move(tx);

    for (const auto& t : cfg.tokens) {
      for (auto flow : cfg.flows) {
        Asset a;
        a.kind = "blockchain";
        a.art.name = t.name + "/" + std::string(ingest::to_string(flow));
        try {
          a.art.raw = ingest::aggregate_daily(cleaned.records, flow, t.address, t.decimals, a.art.name);
        } catch (const std::exception& e) {
          report.errors.push_back({a.art.name + ": ingest", e.what()});
          continue;
        }
        assets.push_back(std::move(a));
      }
    }
  }
  for (const auto& m : cfg.markets) {
    Asset a;
    a.kind = "market";
    a.art.name = m.name;
    a.market_close = m.field == ingest::MarketField::Close;
    try {
      a.art.raw = ingest::load_market_csv(m.path, m.field, m.name);
    } catch (const std::exception& e) {
      report.errors.push_back({m.name + ": ingest", e.what()});
      continue;
    }
    assets.push_back(std::move(a));
  }
  for (const auto& s : cfg.series) {
    Asset a;
    a.kind = "file";
    a.art.name = s.name;
    try {
      a.art.raw = series::read_series_csv(s.path);
      a.art.raw.label = s.name;
    } catch (const std::exception& e) {
      report.errors.push_back({s.name + ": ingest", e.what()});
      continue;
    }
    assets.push_back(std::move(a));
  }
  if (assets.empty()) throw std::runtime_error("no asset series could be loaded");

  Json series_rows = Json::array();
  for (auto& a : assets) {
    Json row;
    row["asset"] = a.art.name;
    row["kind"] = a.kind;
    row["start"] = a.art.raw.start.iso();
    row["end"] = a.art.raw.end_date().iso();
    row["length"] = a.art.raw.size();
    try {
      a.art.analysed = level_series(a, cfg);
      row["analysed_transform"] = std::string(to_string(a.art.analysed.transform));
    } catch (const std::exception& e) {
      record_error(a, report.errors, "transform", e);
      row["analysed_transform"] = nullptr;
    }
    series_rows.push_back(std::move(row));
  }
  ingestion["series"] = std::move(series_rows);
  root["ingestion"] = std::move(ingestion);

  auto usable = [](const Asset& a) { return !a.art.analysed.empty(); };
  std::size_t analyses_attempted = 0;
  std::size_t analyses_failed = 0;
  auto attempt = [&](Asset& a, const char* stage, auto&& fn) {
    ++analyses_attempted;
    try {
      fn();
      return true;
    } catch (const std::exception& e) {
      ++analyses_failed;
      record_error(a, report.errors, stage, e);
      return false;
    }
  };

  breaks::BreakConfig bcfg = cfg.breaks;
  bcfg.seed = cfg.seed;
  bcfg.threads = cfg.threads;
  auto surrogate_cfg = [&](const std::string& asset, std::string_view purpose) {
    surrogate::SurrogateConfig s = cfg.surrogate;
    s.seed = mix64(cfg.seed ^ fnv1a64(asset) ^ fnv1a64(purpose));
    s.threads = cfg.threads;
    return s;
  };

  if (cfg.enable.adf) {
    Json rows = Json::array();
    unitroot::AdfSpec spec;
    spec.deterministic = cfg.adf_deterministic;
    for (auto& a : assets) {
      if (!usable(a)) continue;
      Json row;
      row["asset"] = a.art.name;
      row["deterministic"] = std::string(unitroot::to_string(cfg.adf_deterministic));
      attempt(a, "adf", [&] {
        row["level"] = adf_json(unitroot::adf_test(a.art.analysed, spec));
        row["first_difference"] = adf_json(unitroot::adf_test(series::first_difference(a.art.analysed), spec));
      });
      if (row.contains("first_difference")) rows.push_back(std::move(row));
    }
    root["adf"] = std::move(rows);
  }

  if (cfg.enable.breaks) {
    Json rows = Json::array();
    for (auto& a : assets) {
      if (!usable(a)) continue;
      Json row;
      attempt(a, "breaks", [&] {
        const auto& y = a.art.analysed;
        const breaks::BreakModel model = breaks::select_num_breaks(y, bcfg);
        const breaks::SupFResult supf = breaks::supf_test(y, bcfg);
        row["asset"] = a.art.name;
        row["selection"] = std::string(breaks::to_string(bcfg.selection));
        row["m"] = model.m;
        row["bic"] = model.bic;
        row["min_segment"] = model.min_segment;
        row["global_ssr"] = model.global_ssr;
        row["regime_means"] = model.regime_means;
        row["supf"] = {{"sup_f", supf.sup_f},
                       {"p_value", report_p(supf.p_value)},
                       {"crit_5", supf.crit_5},
                       {"argmax_date", y.date_at(supf.argmax_index - 1).iso()},
                       {"reject_at_5pct", supf.reject_at_5pct},
                       {"degenerate", supf.degenerate},
                       {"null_replications", supf.null_replications}};

        std::map<std::size_t, Json> verdicts;
        auto surrogate_json = [&](std::size_t k) -> Json {
          if (auto it = verdicts.find(k); it != verdicts.end()) return it->second;
          const auto scfg = surrogate_cfg(a.art.name, "breaks");
          Json out;
          try {
            out = verdict_json(surrogate::break_significance(y.values, k, scfg, surrogate::supf_detector(bcfg)), scfg);
          } catch (const std::exception& e) {
            ++analyses_failed;
            record_error(a, report.errors, "surrogate", e);
            out = nullptr;
          }
          verdicts.emplace(k, out);
          return out;
        };

        std::vector<std::size_t> targets = model.break_indices;
        const bool candidate = targets.empty() && !supf.degenerate;
        if (candidate) targets.push_back(supf.argmax_index);
        Json brk = Json::array();
        for (std::size_t j = 0; j < targets.size(); ++j) {
          const std::size_t k = targets[j];
          Json b;
          b["date"] = y.date_at(k - 1).iso();
          b["index"] = k;
          b["candidate_only"] = candidate;
          b["f_at_break"] = (k >= supf.lambda_first && k <= supf.lambda_last) ? Json(supf.f_at(k)) : Json(nullptr);
          if (!candidate) {
            b["mean_before"] = model.regime_means[j];
            b["mean_after"] = model.regime_means[j + 1];
          }
          if (cfg.enable.surrogate) b["surrogate"] = surrogate_json(k);
          b["comment"] = "";
          brk.push_back(std::move(b));
        }
        if (!supf.degenerate) {
          const breaks::BreakModel one = breaks::estimate_breaks(y, bcfg, 1);
          const std::size_t k = one.break_indices.front();
          Json d;
          d["date"] = y.date_at(k - 1).iso();
          d["index"] = k;
          d["f_at_break"] = (k >= supf.lambda_first && k <= supf.lambda_last) ? Json(supf.f_at(k)) : Json(nullptr);
          d["mean_before"] = one.regime_means[0];
          d["mean_after"] = one.regime_means[1];
          if (cfg.enable.surrogate) d["surrogate"] = surrogate_json(k);
          d["comment"] = "";
          row["dominant_break"] = std::move(d);
        } else {
          row["dominant_break"] = nullptr;
        }
        row["breaks"] = std::move(brk);
        a.art.breaks = model;
      });
      if (row.contains("breaks")) rows.push_back(std::move(row));
    }
    root["breaks"] = std::move(rows);
  }

  if (cfg.enable.hht) {
    Json rows = Json::array();
    for (auto& a : assets) {
      if (!usable(a)) continue;
      if (!cfg.hht_assets.empty() &&
          std::find(cfg.hht_assets.begin(), cfg.hht_assets.end(), a.art.name) == cfg.hht_assets.end()) {
        continue;
      }
      Json row;
      attempt(a, "hht", [&] {
        const auto& y = a.art.analysed;
        hht::HilbertProfile prof = hht::analyze(y, cfg.emd, cfg.grid, cfg.energy_b);
        const auto& e = prof.energy;
        row["asset"] = a.art.name;
        row["imfs"] = prof.decomposition.imfs.size();
        Json imfs = Json::array();
        for (const auto& imf : prof.decomposition.imfs) {
          imfs.push_back({{"index", imf.index},
                          {"sift_iterations", imf.sift_iterations},
                          {"stop_reason", std::string(hht::to_string(imf.stop_reason))}});
        }
        row["sifting"] = std::move(imfs);
        row["frequency_bins"] = cfg.grid.bins;
        row["b"] = e.b;
        row["e_mean"] = e.e_mean;
        row["e_std"] = e.e_std;
        row["e_th"] = e.e_th;
        row["max_ie"] = e.max_ie;
        Json events = Json::array();
        std::vector<std::size_t> peaks;
        for (const auto& ev : e.events) {
          peaks.push_back(ev.peak);
          events.push_back({{"peak_date", y.date_at(ev.peak).iso()},
                            {"first_date", y.date_at(ev.first).iso()},
                            {"last_date", y.date_at(ev.last).iso()},
                            {"peak_ie_norm", ev.peak_ie_norm},
                            {"exceedance_ratio", e.e_th > 0.0 ? e.ie[ev.peak] / e.e_th : 0.0},
                            {"z", e.exceedance(ev.peak)}});
        }
        row["events"] = std::move(events);
        if (cfg.enable.surrogate && cfg.energy_surrogates) {
          if (peaks.empty()) {
            row["surrogate"] = nullptr;
          } else {
            const auto scfg = surrogate_cfg(a.art.name, "energy");
            try {
              const auto v = surrogate::energy_significance(
                  y.values, peaks, scfg, surrogate::hht_runner(cfg.emd, cfg.grid, cfg.energy_b));
              row["surrogate"] = verdict_json(v, scfg);
            } catch (const std::exception& ex) {
              ++analyses_failed;
              record_error(a, report.errors, "surrogate", ex);
              row["surrogate"] = nullptr;
            }
          }
        }
        a.art.hht = std::move(prof);
      });
      if (row.contains("events")) rows.push_back(std::move(row));
    }
    root["hht"] = std::move(rows);
  }

  if (cfg.enable.svar) {
    Json rows = Json::array();
    auto find_asset = [&](const std::string& name) -> Asset* {
      for (auto& a : assets) {
        if (a.art.name == name) return &a;
      }
      return nullptr;
    };
    for (const auto& pair : cfg.svar_pairs) {
      ++analyses_attempted;
      try {
        Asset* first = find_asset(pair.first);
        Asset* second = find_asset(pair.second);
        if (!first || !second) throw DataError("pair '" + pair.name + "' references an asset that was not loaded");
        const auto rep = svar::regime_analysis(first->art.raw, second->art.raw, cfg.split_date, cfg.svar);
        Json row;
        row["pair"] = pair.name;
        row["variables"] = {rep.labels[0], rep.labels[1]};
        row["split_date"] = rep.split_date.iso();
        row["p"] = rep.p;
        Json windows = Json::array();
        for (const auto& w : rep.windows) {
          Json jw;
          jw["window"] = w.name;
          jw["first"] = w.first.iso();
          jw["last"] = w.last.iso();
          jw["t_eff"] = w.model.t_eff;
          jw["aic"] = w.model.aic;
          jw["sigma_u"] = matrix_json(w.model.sigma_u);
          Json adf = Json::array();
          for (const auto& r : w.panel.adf) adf.push_back(adf_json(r));
          jw["adf"] = std::move(adf);
          jw["warnings"] = w.panel.warnings;
          Json impacts = Json::array();
          for (const auto& e : w.entries) {
            impacts.push_back({{"ordering", std::string(svar::to_string(e.ordering))},
                               {"leader", e.leader},
                               {"follower", e.follower},
                               {"leader_own", e.leader_own},
                               {"leader_to_follower", e.leader_to_follower},
                               {"follower_own", e.follower_own}});
          }
          jw["impacts"] = std::move(impacts);
          windows.push_back(std::move(jw));
        }
        row["windows"] = std::move(windows);
        Json wald = Json::array();
        for (std::size_t o = 0; o < 2; ++o) {
          const auto& w = rep.wald[o];
          wald.push_back({{"ordering", std::string(svar::to_string(static_cast<svar::Ordering>(o)))},
                          {"W", w.W},
                          {"df", w.df},
                          {"p_value", report_p(w.p_value)},
                          {"regularized", w.regularized},
                          {"includes_intercepts", w.includes_intercepts},
                          {"larger_in_post", w.larger_in_post}});
        }
        row["wald"] = std::move(wald);
        Json changes = Json::array();
        for (const auto& c : rep.changes) {
          changes.push_back({{"ordering", std::string(svar::to_string(c.ordering))},
                             {"entry", c.entry},
                             {"pre", c.pre},
                             {"post", c.post},
                             {"percent_change", c.percent_change}});
        }
        row["changes"] = std::move(changes);
        rows.push_back(std::move(row));
      } catch (const std::exception& e) {
        ++analyses_failed;
        report.errors.push_back({pair.name + ": svar", e.what()});
      }
    }
    root["svar"] = std::move(rows);
  }

  if (analyses_attempted > 0 && analyses_failed >= analyses_attempted) {
    throw std::runtime_error("every enabled analysis failed; first error: " +
                             (report.errors.empty() ? std::string("unknown") : report.errors.front().message));
  }

  Json errors = Json::array();
  for (const auto& e : report.errors) errors.push_back({{"where", e.stage}, {"message", e.message}});
  root["errors"] = std::move(errors);

  report.json = root.dump(2) + "\n";
  for (auto& a : assets) report.assets.push_back(std::move(a.art));
  return report;
}

// ---------------------------------------------------------------- output

void write_atomic(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string file_stem(std::string_view asset) {
  std::string out;
  for (char c : asset) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(keep ? c : '_');
  }
  return out;
}

std::vector<fs::path> emit_plot_data(const PipelineReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    write_atomic(p, text);
    written.push_back(p);
  };
  for (const auto& a : report.assets) {
    if (a.analysed.empty()) continue;
    const DailySeries& y = a.analysed;
    const std::string stem = file_stem(a.name);

    const series::RollingMean rm = series::rolling_mean(y, report.rolling_window);
    std::ostringstream s;
    s << "date,value,rolling_mean\n";
    for (std::size_t t = 0; t < y.size(); ++t) {
      s << y.date_at(t).iso() << ',' << csv_num(y.values[t]) << ',' << (rm.values[t] ? csv_num(*rm.values[t]) : "")
        << '\n';
    }
    emit(stem + "_series.csv", s.str());

    std::ostringstream m;
    m << "kind,date,index\n";
    if (a.breaks) {
      for (std::size_t k : a.breaks->break_indices) m << "break," << y.date_at(k - 1).iso() << ',' << k - 1 << '\n';
    }
    if (a.hht) {
      for (const auto& ev : a.hht->energy.events) m << "event," << y.date_at(ev.peak).iso() << ',' << ev.peak << '\n';
    }
    const std::int64_t election = report.event_date - y.start;
    m << "election," << report.event_date.iso() << ',';
    if (election >= 0 && election < static_cast<std::int64_t>(y.size())) m << election;
    m << '\n';
    emit(stem + "_markers.csv", m.str());

    if (a.hht) {
      const auto& sp = a.hht->spectrum;
      std::ostringstream h;
      h << "date";
      for (std::size_t b = 0; b < sp.grid.bins; ++b) h << ",w" << csv_num(sp.grid.center(b));
      h << '\n';
      for (std::size_t t = 0; t < sp.times; ++t) {
        h << y.date_at(t).iso();
        for (std::size_t b = 0; b < sp.grid.bins; ++b) h << ',' << csv_num(sp.at(t, b));
        h << '\n';
      }
      emit(stem + "_spectrum.csv", h.str());

      const auto& e = a.hht->energy;
      std::ostringstream en;
      en << "date,ie,ie_norm,e_th,e_th_norm,event\n";
      const double th_norm = e.max_ie > 0.0 ? e.e_th / e.max_ie : 0.0;
      std::vector<bool> in_event(e.ie.size(), false);
      for (const auto& ev : e.events) {
        for (std::size_t t = ev.first; t <= ev.last; ++t) in_event[t] = true;
      }
      for (std::size_t t = 0; t < e.ie.size(); ++t) {
        en << y.date_at(t).iso() << ',' << csv_num(e.ie[t]) << ',' << csv_num(e.ie_norm[t]) << ',' << csv_num(e.e_th)
           << ',' << csv_num(th_norm) << ',' << (in_event[t] ? 1 : 0) << '\n';
      }
      emit(stem + "_energy.csv", en.str());
    }
  }
  return written;
}

}  // namespace regimeshift::pipeline
