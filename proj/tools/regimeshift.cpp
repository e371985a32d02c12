// Command-line front end: each subcommand runs the pipeline with a subset of
// stages and writes <out-dir>/report.json.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "regimeshift/pipeline.hpp"
#include "regimeshift/series.hpp"

namespace fs = std::filesystem;
namespace rp = regimeshift::pipeline;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<unsigned> threads;
  std::vector<std::string> settings;
  std::vector<std::string> inputs;
};

struct SurrogateOptions {
  std::optional<std::size_t> n;
  std::optional<std::size_t> window;
  std::string method;
};

rp::RunConfig build_config(const GlobalOptions& g, const SurrogateOptions& s) {
  rp::RunConfig cfg = g.config.empty() ? rp::RunConfig{} : rp::load_config(g.config);
  for (const auto& kv : g.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    rp::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  for (const auto& in : g.inputs) rp::apply_setting(cfg, "series." + fs::path(in).stem().string(), in);
  if (g.seed) cfg.seed = *g.seed;
  if (g.threads) cfg.threads = *g.threads;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (s.n) cfg.surrogate.n_surrogates = *s.n;
  if (s.window) cfg.surrogate.match_window_days = *s.window;
  if (!s.method.empty()) cfg.surrogate.method = regimeshift::surrogate::parse_method(s.method);
  return cfg;
}

void only(rp::RunConfig& cfg, bool adf, bool breaks, bool surrogate, bool hht, bool svar) {
  cfg.enable = {adf, breaks, surrogate, hht, svar};
}

int execute(const std::string& command, rp::RunConfig cfg) {
  if (command == "ingest") only(cfg, false, false, false, false, false);
  if (command == "adf") only(cfg, true, false, false, false, false);
  if (command == "breaks") only(cfg, false, true, false, false, false);
  if (command == "surrogate") only(cfg, false, true, true, false, false);
  if (command == "hht") only(cfg, false, false, false, true, false);
  if (command == "svar") only(cfg, false, false, false, false, true);

  const rp::PipelineReport report = rp::run_pipeline(cfg);
  const fs::path report_path = cfg.out_dir / "report.json";
  rp::write_atomic(report_path, report.json);
  std::cout << "report: " << report_path.string() << '\n';

  if (command == "ingest") {
    for (const auto& a : report.assets) {
      const fs::path p = cfg.out_dir / "series" / (rp::file_stem(a.name) + ".csv");
      fs::create_directories(p.parent_path());
      regimeshift::series::write_series_csv(a.raw, p);
      std::cout << "series: " << p.string() << '\n';
    }
  }
  if (command == "run" || command == "breaks" || command == "hht") {
    const auto files = rp::emit_plot_data(report, cfg.out_dir / "plots");
    std::cout << "plot files: " << files.size() << '\n';
  }
  for (const auto& e : report.errors) std::cerr << "error: " << e.stage << ": " << e.message << '\n';
  return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regime-shift and extreme-event analysis of daily financial series"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "master random seed");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");
  app.add_option("--set", g.settings, "override a config key (key=value), repeatable");
  app.add_option("--input", g.inputs, "extra date,value series file, repeatable");

  SurrogateOptions s;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"ingest", "parse and aggregate inputs, write daily series"},
      {"adf", "augmented Dickey-Fuller tests on levels and differences"},
      {"breaks", "Bai-Perron breaks and SupF test"},
      {"hht", "EMD, Hilbert spectrum and energy events"},
      {"surrogate", "breaks with surrogate significance"},
      {"svar", "two-variable SVAR regime comparison"},
      {"run", "full pipeline"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    if (name == "surrogate" || name == "run") {
      sub->add_option("--surrogates", s.n, "number of surrogates");
      sub->add_option("--window", s.window, "match window in days");
      sub->add_option("--method", s.method, "ft or aaft")->check(CLI::IsMember({"ft", "aaft"}));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    return execute(command, build_config(g, s));
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return 1;
  }
}
