// tailmon: reliability-aware daily tail-risk monitoring over an ETF panel.
//
// Subcommands: validate, backtest, corrupt, ablate, report.
// Exit codes: 0 success, 1 usage/config error, 2 data error, 3 internal.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "tailmon/backtest.hpp"
#include "tailmon/config.hpp"
#include "tailmon/panel_io.hpp"
#include "tailmon/quality.hpp"
#include "tailmon/reporting.hpp"
#include "tailmon/rng.hpp"
#include "tailmon/synthetic.hpp"

namespace fs = std::filesystem;
using namespace tailmon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct CommonFlags {
  std::string config_path;
  std::string panel_path;
  std::string macro_path;
  std::string out_dir;
  std::vector<std::string> symbols;
  bool synthetic = false;
  int synth_days = -1;
  int synth_symbols = -1;
  double fault_probability = -1.0;
  std::int64_t seed = -1;
  int threads = -1;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Config file (key=value sections)");
  cmd->add_option("--panel", flags.panel_path, "Panel CSV path");
  cmd->add_option("--macro", flags.macro_path, "Macro CSV path (date,vix,y3m,y10y)");
  cmd->add_option("--out", flags.out_dir, "Output directory");
  cmd->add_option("--symbols", flags.symbols, "Symbol list")->delimiter(',');
  cmd->add_flag("--synthetic", flags.synthetic, "Use the synthetic panel generator");
  cmd->add_option("--synth-days", flags.synth_days, "Synthetic panel length (days)");
  cmd->add_option("--synth-symbols", flags.synth_symbols, "Synthetic symbol count");
  cmd->add_option("--fault-probability", flags.fault_probability,
                  "Row-wise corruption probability");
  cmd->add_option("--seed", flags.seed, "Run seed");
  cmd->add_option("--threads", flags.threads, "Worker threads for fitting");
}

RunConfig resolve_config(const CommonFlags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) config = parse_config_file(flags.config_path);
  if (!flags.panel_path.empty()) config.panel_csv = flags.panel_path;
  if (!flags.macro_path.empty()) config.macro_csv = flags.macro_path;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  if (!flags.symbols.empty()) config.symbols = flags.symbols;
  if (flags.synthetic) config.synthetic = true;
  if (flags.synth_days > 0) config.synth_days = flags.synth_days;
  if (flags.synth_symbols > 0) config.synth_symbols = flags.synth_symbols;
  if (flags.fault_probability >= 0.0)
    config.fault_probability = flags.fault_probability;
  if (flags.seed >= 0) config.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.threads > 0) config.threads = flags.threads;
  return config;
}

PanelDataset acquire_panel(const RunConfig& config) {
  if (config.synthetic) {
    return generate_synthetic_panel(config.synth_symbols, config.synth_days,
                                    config.seed, config.symbols);
  }
  if (config.panel_csv.empty())
    throw ConfigError("no panel source: pass --panel FILE or --synthetic");
  PanelDataset panel = load_panel(config.panel_csv);
  if (!config.macro_csv.empty()) load_macro(config.macro_csv, panel);
  if (!config.symbols.empty()) {
    PanelDataset filtered;
    filtered.dates = panel.dates;
    filtered.macro = panel.macro;
    for (const auto& sym : config.symbols) {
      const int s = panel.symbol_index(sym);
      if (s < 0) throw IngestError("symbol not in panel: " + sym);
      filtered.symbols.push_back(sym);
      filtered.bars.push_back(panel.bars[s]);
    }
    return filtered;
  }
  return panel;
}

void write_file(const fs::path& path, const std::string& content) {
  write_text_file(path.string(), content);
}

int cmd_validate(const CommonFlags& flags) {
  const RunConfig config = resolve_config(flags);
  const PanelDataset panel = acquire_panel(config);
  const FeatureSeries features =
      compute_features(panel, config.feature_params());

  struct Tally {
    int rows = 0, miss = 0, ohlc = 0, jump = 0, vol = 0, stale = 0;
    int green = 0, yellow = 0, red = 0;
  };
  std::map<std::string, Tally> per_symbol;
  for (int s = 0; s < panel.n_symbols(); ++s) {
    Tally& t = per_symbol[panel.symbols[s]];
    for (int d = 0; d < panel.n_dates(); ++d) {
      const Bar* bar = panel.bars[s][d] ? &panel.bars[s][d].value() : nullptr;
      std::optional<double> prev_close;
      if (d > 0 && panel.bars[s][d - 1])
        prev_close = panel.bars[s][d - 1]->close;
      const QualityReport q =
          assess_quality(bar, features.at(s, d), prev_close,
                         config.quality_weights(), config.quality_thresholds());
      ++t.rows;
      t.miss += q.q_miss > 0.0 ? 1 : 0;
      t.ohlc += q.q_ohlc > 0.0 ? 1 : 0;
      t.jump += q.q_jump >= 0.5 ? 1 : 0;
      t.vol += q.q_vol >= 0.5 ? 1 : 0;
      t.stale += q.q_stale > 0.0 ? 1 : 0;
      switch (q.state) {
        case QualityState::Green: ++t.green; break;
        case QualityState::Yellow: ++t.yellow; break;
        case QualityState::Red: ++t.red; break;
      }
    }
  }

  std::printf("%-10s %8s %6s %6s %6s %6s %6s | %7s %7s %6s\n", "symbol",
              "rows", "miss", "ohlc", "jump", "vol", "stale", "green",
              "yellow", "red");
  for (const auto& [symbol, t] : per_symbol) {
    std::printf("%-10s %8d %6d %6d %6d %6d %6d | %7d %7d %6d\n",
                symbol.c_str(), t.rows, t.miss, t.ohlc, t.jump, t.vol,
                t.stale, t.green, t.yellow, t.red);
  }
  return kExitOk;
}

int cmd_backtest(const CommonFlags& flags) {
  const RunConfig config = resolve_config(flags);
  const PanelDataset panel = acquire_panel(config);

  const BacktestResult result = run_backtest(panel, config);
  const MetricsTable metrics = evaluate(result.records, config.alpha);
  const auto rolling = rolling_breach_series(result.records);

  fs::create_directories(config.out_dir);
  const fs::path out(config.out_dir);
  write_file(out / "records.csv", records_to_csv(result.records));
  write_file(out / "metrics.json", metrics_to_json(result, metrics, config));
  write_file(out / "rolling_breach.csv", rolling_breach_to_csv(rolling));

  const AlertCounts alerts = count_alerts(result.records);
  std::printf("records: %zu (availability %.1f%%)\n", result.records.size(),
              100.0 * result.availability());
  std::printf("alerts: %d green, %d orange, %d red\n", alerts.green,
              alerts.orange, alerts.red);
  const MetricsRow* safe = metrics.find("safe", "overall");
  const MetricsRow* model = metrics.find("model", "overall");
  if (model && model->defined)
    std::printf("model VaR breach rate: %.2f%%\n", 100.0 * model->breach_rate);
  if (safe && safe->defined)
    std::printf("safe  VaR breach rate: %.2f%%\n", 100.0 * safe->breach_rate);
  std::printf("wrote %s\n", (out / "records.csv").c_str());
  return kExitOk;
}

int cmd_corrupt(const CommonFlags& flags) {
  const RunConfig config = resolve_config(flags);
  const PanelDataset panel = acquire_panel(config);

  FaultConfig fault;
  fault.probability = config.fault_probability;
  fault.missing_mode = config.fault_missing;
  fault.stale_mode = config.fault_stale;
  fault.ohlc_mode = config.fault_ohlc;
  fault.seed = derive_stream_key(config.seed, 0xFA17, 0);
  fault.first_service_index = config.train_len;
  const auto [corrupted, log] = corrupt_panel(panel, fault);

  const BacktestResult result = run_backtest(corrupted, config);
  const MetricsTable metrics = evaluate(result.records, config.alpha);

  fs::create_directories(config.out_dir);
  const fs::path out(config.out_dir);
  write_file(out / "fault_log.csv", log.to_csv());
  write_file(out / "records_corrupted.csv", records_to_csv(result.records));
  write_file(out / "metrics_corrupted.json",
             metrics_to_json(result, metrics, config));
  write_file(out / "rolling_breach_corrupted.csv",
             rolling_breach_to_csv(rolling_breach_series(result.records)));

  const AlertCounts alerts = count_alerts(result.records);
  std::printf("corrupted rows: %zu (p = %.2f)\n", log.events.size(),
              log.probability);
  std::printf("records: %zu (availability %.1f%%)\n", result.records.size(),
              100.0 * result.availability());
  std::printf("alerts: %d green, %d orange, %d red\n", alerts.green,
              alerts.orange, alerts.red);
  return kExitOk;
}

int cmd_ablate(const CommonFlags& flags) {
  const RunConfig config = resolve_config(flags);
  const PanelDataset panel = acquire_panel(config);

  const AblationResult ablation = run_ablations(panel, config);

  fs::create_directories(config.out_dir);
  const fs::path out(config.out_dir);
  write_file(out / "fault_log.csv", ablation.fault_log.to_csv());
  write_file(out / "records_clean.csv",
             records_to_csv(ablation.clean_run.records));
  write_file(out / "records_corrupted.csv",
             records_to_csv(ablation.corrupted_run.records));
  write_file(out / "records_no_quality_feature.csv",
             records_to_csv(ablation.no_quality_feature_run.records));
  write_file(out / "records_no_quality_service.csv",
             records_to_csv(ablation.no_quality_service_records));
  write_file(out / "metrics_clean.json",
             metrics_to_json(ablation.clean_run,
                             evaluate(ablation.clean_run.records, config.alpha),
                             config));
  write_file(out / "metrics_corrupted.json",
             metrics_to_json(
                 ablation.corrupted_run,
                 evaluate(ablation.corrupted_run.records, config.alpha),
                 config));
  write_file(out / "ablation_fallback.csv",
             fallback_table_to_csv(ablation.fallback_table));
  write_file(out / "ablation_quality.csv",
             quality_table_to_csv(ablation.quality_table));

  std::printf("fault log rows: %zu\n", ablation.fault_log.events.size());
  std::printf("\nfallback variants (breach rates)\n%s",
              fallback_table_to_csv(ablation.fallback_table).c_str());
  std::printf("\nquality-layer variants (corrupted inputs)\n%s",
              quality_table_to_csv(ablation.quality_table).c_str());
  return kExitOk;
}

int cmd_report(const CommonFlags& flags) {
  const RunConfig config = resolve_config(flags);
  const fs::path out(config.out_dir);
  const fs::path records_path =
      fs::exists(out / "records.csv") ? out / "records.csv"
                                      : out / "records_clean.csv";
  std::ifstream in(records_path, std::ios::binary);
  if (!in) throw IngestError("no records found under " + out.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto records = records_from_csv(ss.str());
  std::printf("%s", format_report(records, config.alpha).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reliability-aware daily tail-risk monitoring"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* validate = app.add_subcommand("validate", "Ingest a panel and print quality-flag counts");
  auto* backtest = app.add_subcommand("backtest", "Run the walk-forward backtest");
  auto* corrupt = app.add_subcommand("corrupt", "Run the backtest on fault-injected inputs");
  auto* ablate = app.add_subcommand("ablate", "Run the fallback and quality-layer ablation grid");
  auto* report = app.add_subcommand("report", "Summarize a finished run directory");
  for (auto* cmd : {validate, backtest, corrupt, ablate, report})
    add_common_flags(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (validate->parsed()) return cmd_validate(flags);
    if (backtest->parsed()) return cmd_backtest(flags);
    if (corrupt->parsed()) return cmd_corrupt(flags);
    if (ablate->parsed()) return cmd_ablate(flags);
    if (report->parsed()) return cmd_report(flags);
    std::fprintf(stderr, "no subcommand\n");
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const ScheduleError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const IngestError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
}
