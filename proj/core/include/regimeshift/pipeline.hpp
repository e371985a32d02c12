#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "regimeshift/breaks.hpp"
#include "regimeshift/daily_series.hpp"
#include "regimeshift/date.hpp"
#include "regimeshift/hht.hpp"
#include "regimeshift/ingest.hpp"
#include "regimeshift/surrogate.hpp"
#include "regimeshift/svar.hpp"
#include "regimeshift/unitroot.hpp"

namespace regimeshift::pipeline {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct TokenSpec {
  std::string name;     ///< e.g. "USDT"
  std::string address;  ///< lowercase contract address
  int decimals = 6;
};

struct MarketSpec {
  std::string name;
  std::filesystem::path path;
  ingest::MarketField field = ingest::MarketField::Volume;
};

/// Pre-aggregated `date,value` series.
struct SeriesSpec {
  std::string name;
  std::filesystem::path path;
};

struct SvarPair {
  std::string name;
  std::string first;
  std::string second;
};

struct StageToggles {
  bool adf = true;
  bool breaks = true;
  bool surrogate = true;
  bool hht = true;
  bool svar = true;
};

/**
 * @brief Effective settings for one run.
 *
 * Built from a plain `key = value` file (see README) and CLI overrides.
 * Relative paths are resolved against the directory of the config file.
 */
struct RunConfig {
  std::optional<std::filesystem::path> transactions;
  std::vector<TokenSpec> tokens;
  std::vector<MarketSpec> markets;
  std::vector<SeriesSpec> series;
  /// Level transform per asset ("raw", "log" or "log1p"). Defaults: log1p for
  /// blockchain flows, log for strictly positive market and file series,
  /// log1p otherwise.
  std::map<std::string, std::string> transforms;
  std::vector<ingest::FlowClass> flows{ingest::FlowClass::EoaToEoa, ingest::FlowClass::ScToSc};
  Date event_date = Date::from_ymd(2024, 11, 5);
  Date split_date = Date::from_ymd(2024, 11, 5);
  StageToggles enable;
  unitroot::Deterministic adf_deterministic = unitroot::Deterministic::ConstantOnly;
  breaks::BreakConfig breaks;
  hht::EmdConfig emd;
  hht::FrequencyGrid grid;
  double energy_b = 4.0;
  std::vector<std::string> hht_assets;  ///< empty means every asset
  surrogate::SurrogateConfig surrogate;
  bool energy_surrogates = true;
  svar::SvarConfig svar;
  std::vector<SvarPair> svar_pairs;
  std::size_t rolling_window = 20;
  std::uint64_t seed = 20241105;
  unsigned threads = 1;
  std::filesystem::path out_dir = "out";
};

/// Sets one key. Throws std::invalid_argument for unknown keys or bad values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir = {});

/// Parses `key = value` lines; `#` starts a comment.
[[nodiscard]] RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Checks referenced files and option ranges. Throws std::invalid_argument.
void validate(const RunConfig& cfg);

/// Settings that determine the report, one `key = value` per line in key
/// order. Thread count and output directory are excluded.
[[nodiscard]] std::string canonical_config(const RunConfig& cfg);

struct StageError {
  std::string stage;
  std::string message;
};

/// Series and fitted objects kept for figure data.
struct AssetArtifacts {
  std::string name;
  DailySeries raw;
  DailySeries analysed;  ///< log or log1p level series
  std::optional<breaks::BreakModel> breaks;
  std::optional<hht::HilbertProfile> hht;
  std::vector<StageError> errors;
};

struct PipelineReport {
  std::string json;  ///< serialised report, stable key order
  std::vector<AssetArtifacts> assets;
  std::vector<StageError> errors;  ///< every stage error, asset-level and global
  Date event_date;
  std::size_t rolling_window = 20;

  /// 0 on success, 2 when some stage failed.
  [[nodiscard]] int exit_code() const { return errors.empty() ? 0 : 2; }
};

/**
 * @brief Runs every enabled stage.
 *
 * A failing stage for one asset is recorded and the run continues.
 * @throws std::runtime_error when no asset could be loaded or every asset
 *         failed all enabled analyses.
 */
[[nodiscard]] PipelineReport run_pipeline(const RunConfig& cfg);

/// Writes `text` to `path` through a temporary file and rename.
void write_atomic(const std::filesystem::path& path, std::string_view text);

/// Per-asset CSVs (series, markers, spectrum, energy) under `dir`; returns
/// the files written.
std::vector<std::filesystem::path> emit_plot_data(const PipelineReport& report, const std::filesystem::path& dir);

/// File-system safe form of an asset name.
[[nodiscard]] std::string file_stem(std::string_view asset);

}  // namespace regimeshift::pipeline
