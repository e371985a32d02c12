#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "regimeshift/pipeline.hpp"

namespace pl = regimeshift::pipeline;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = REGIMESHIFT_TEST_DATA_DIR;

pl::RunConfig fixture_config(std::size_t surrogates = 100) {
  auto cfg = pl::load_config(kData / "fixture.cfg");
  cfg.surrogate.n_surrogates = surrogates;
  cfg.breaks.null_replications = 500;
  return cfg;
}

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("regimeshift_" + name + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const json* find_asset(const json& rows, const std::string& asset) {
  for (const auto& r : rows) {
    if (r.at("asset") == asset) return &r;
  }
  return nullptr;
}

}  // namespace

TEST(Config, ParsesKeysAndComments) {
  std::istringstream in(
      "# comment\n"
      "seed = 7\n"
      "threads = 3   # trailing\n"
      "token.DAI = 0x6B175474E89094C44Da98b954EedeAC495271d0F,18\n"
      "surrogate.method = ft\n"
      "svar.pair.x = A,B\n"
      "flows = eoa-eoa\n"
      "\n");
  const auto cfg = pl::parse_config(in);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.threads, 3u);
  ASSERT_EQ(cfg.tokens.size(), 1u);
  EXPECT_EQ(cfg.tokens[0].address, "0x6b175474e89094c44da98b954eedeac495271d0f");
  EXPECT_EQ(cfg.tokens[0].decimals, 18);
  EXPECT_EQ(cfg.surrogate.method, regimeshift::surrogate::Method::FT);
  ASSERT_EQ(cfg.svar_pairs.size(), 1u);
  EXPECT_EQ(cfg.svar_pairs[0].second, "B");
  EXPECT_EQ(cfg.flows.size(), 1u);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  pl::RunConfig cfg;
  EXPECT_THROW(pl::apply_setting(cfg, "no.such.key", "1"), std::invalid_argument);
  EXPECT_THROW(pl::apply_setting(cfg, "seed", "abc"), std::invalid_argument);
  EXPECT_THROW(pl::apply_setting(cfg, "event_date", "2024-13-01"), std::invalid_argument);
  EXPECT_THROW(pl::apply_setting(cfg, "surrogate.method", "iaaft"), std::invalid_argument);
  std::istringstream in("seed 7\n");
  EXPECT_THROW((void)pl::parse_config(in), std::invalid_argument);
}

TEST(Config, ValidationChecksFilesAndRanges) {
  auto cfg = fixture_config();
  EXPECT_NO_THROW(pl::validate(cfg));
  auto missing = cfg;
  missing.transactions = kData / "absent.csv";
  EXPECT_THROW(pl::validate(missing), std::invalid_argument);
  auto trim = cfg;
  trim.breaks.trim = 0.4;
  EXPECT_THROW(pl::validate(trim), std::invalid_argument);
}

TEST(Config, CanonicalFormIgnoresThreadsAndOutput) {
  auto a = fixture_config();
  auto b = a;
  b.threads = 8;
  b.out_dir = "/elsewhere";
  EXPECT_EQ(pl::canonical_config(a), pl::canonical_config(b));
  b.seed = a.seed + 1;
  EXPECT_NE(pl::canonical_config(a), pl::canonical_config(b));
}

TEST(Pipeline, FileStem) {
  EXPECT_EQ(pl::file_stem("USDT/EOA-EOA"), "USDT_EOA-EOA");
}

TEST(Pipeline, WriteAtomicReplacesContent) {
  const auto dir = temp_dir("atomic");
  pl::write_atomic(dir / "r.json", "one");
  pl::write_atomic(dir / "r.json", "two");
  std::ifstream in(dir / "r.json");
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "two");
  EXPECT_FALSE(fs::exists(dir / "r.json.tmp"));
  fs::remove_all(dir);
}

class FixtureRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    report_ = new pl::PipelineReport(pl::run_pipeline(fixture_config()));
    parsed_ = new json(json::parse(report_->json));
  }
  static void TearDownTestSuite() {
    delete report_;
    delete parsed_;
  }
  static pl::PipelineReport* report_;
  static json* parsed_;
};

pl::PipelineReport* FixtureRun::report_ = nullptr;
json* FixtureRun::parsed_ = nullptr;

TEST_F(FixtureRun, ReportHasEverySection) {
  const auto& r = *parsed_;
  for (const char* key : {"tool", "provenance", "ingestion", "adf", "breaks", "hht", "svar", "errors"}) {
    EXPECT_TRUE(r.contains(key)) << key;
  }
  EXPECT_EQ(r["provenance"]["seed"], 20241105u);
  EXPECT_EQ(r["provenance"]["tool_version"], std::string(pl::kToolVersion));
  EXPECT_EQ(report_->exit_code(), 0);
  EXPECT_TRUE(r["errors"].empty()) << r["errors"].dump();
}

TEST_F(FixtureRun, IngestionCountsRows) {
  const auto& tx = parsed_->at("ingestion").at("transactions");
  EXPECT_EQ(tx.at("data_rows"), 3241);
  EXPECT_EQ(tx.at("malformed_rows"), 1);
  EXPECT_EQ(tx.at("duplicates_removed"), 2);
  EXPECT_EQ(tx.at("failed_removed"), 3);
  EXPECT_EQ(tx.at("zero_value_removed"), 3);
  EXPECT_TRUE(tx.at("partition_consistent").get<bool>());
  EXPECT_EQ(parsed_->at("ingestion").at("series").size(), 6u);
}

TEST_F(FixtureRun, PlantedBreakIsFoundAndSignificant) {
  const auto* row = find_asset((*parsed_)["breaks"], "USDT/EOA-EOA");
  ASSERT_NE(row, nullptr);
  ASSERT_FALSE((*row)["dominant_break"].is_null());
  const auto& d = (*row)["dominant_break"];
  const auto date = regimeshift::Date::parse(d["date"].get<std::string>());
  EXPECT_LE(std::abs(date - regimeshift::Date::parse("2024-11-04")), 1);
  EXPECT_LT(d["surrogate"]["p_value"].get<double>(), 0.02);
  EXPECT_LT((*row)["supf"]["p_value"].get<double>(), 0.01);
}

TEST_F(FixtureRun, SmartContractFlowHasNoBreak) {
  const auto* row = find_asset((*parsed_)["breaks"], "USDT/SC-SC");
  ASSERT_NE(row, nullptr);
  EXPECT_EQ((*row)["m"], 0);
}

TEST_F(FixtureRun, SvarTablesArePresent) {
  const auto& svar = (*parsed_)["svar"];
  ASSERT_EQ(svar.size(), 1u);
  EXPECT_EQ(svar[0]["windows"].size(), 3u);
  EXPECT_EQ(svar[0]["wald"].size(), 2u);
}

TEST_F(FixtureRun, PlotDataIsWritten) {
  const auto dir = temp_dir("plots");
  const auto files = pl::emit_plot_data(*report_, dir);
  EXPECT_FALSE(files.empty());
  for (const auto& f : files) EXPECT_GT(fs::file_size(f), 0u) << f;
  EXPECT_TRUE(fs::exists(dir / "USDT_EOA-EOA_energy.csv"));
  fs::remove_all(dir);
}

TEST_F(FixtureRun, DeterministicAcrossThreadCounts) {
  auto cfg = fixture_config();
  cfg.threads = 4;
  EXPECT_EQ(pl::run_pipeline(cfg).json, report_->json);
}

TEST(Pipeline, EmptyConfigIsInvalid) {
  pl::RunConfig cfg;
  EXPECT_THROW((void)pl::run_pipeline(cfg), std::invalid_argument);
}

TEST(Pipeline, NoLoadableAssetIsFatal) {
  pl::RunConfig cfg;
  cfg.transactions = kData / "transactions.csv";
  cfg.tokens.push_back({"NONE", "0x0000000000000000000000000000000000000001", 6});
  EXPECT_THROW((void)pl::run_pipeline(cfg), std::runtime_error);
}
