#pragma once

#include <string>
#include <vector>

#include "tailmon/config.hpp"
#include "tailmon/evaluation.hpp"
#include "tailmon/fault_injection.hpp"
#include "tailmon/types.hpp"

namespace tailmon {

/// One refit segment of the walk-forward protocol. All spans are
/// half-open calendar-index intervals.
struct RefitSpan {
  int train_begin = 0;
  int train_end = 0;    // == predict_begin
  int calib_begin = 0;  // last calib_window days of the training window
  int calib_end = 0;
  int predict_begin = 0;
  int predict_end = 0;
};

struct Schedule {
  std::vector<RefitSpan> spans;
  int first_prediction_index = 0;

  int total_prediction_days() const {
    int n = 0;
    for (const auto& s : spans) n += s.predict_end - s.predict_begin;
    return n;
  }
};

/// Refit every `step` days on the trailing `train_len` days; the first
/// prediction date is the first with train_len prior dates. Prediction
/// spans partition the remaining calendar with no overlap and no gap.
Schedule build_schedule(int n_dates, int train_len = 756, int step = 63,
                        int calib_window = 63);

/// Ablation switches for the engine itself (the five fallback variants
/// are post-hoc recomputations and need no engine flags).
struct BacktestOptions {
  bool use_quality_feature = true;  // Q_t as a model feature column
  bool quality_in_service = true;   // Q_t in the adjustment + alert inputs
};

struct BacktestResult {
  std::vector<BacktestRecord> records;  // date-major, then symbol order
  Schedule schedule;
  std::vector<std::string> warnings;
  int expected_records = 0;  // symbols x prediction days

  double availability() const {
    return expected_records == 0
               ? 0.0
               : static_cast<double>(records.size()) / expected_records;
  }
};

/// Execute the rolling walk-forward protocol: at each refit fit the
/// pooled bootstrap ensemble, the residual calibration, the OOD model,
/// and per-symbol GJR-GARCH; then per prediction day emit quality,
/// forecast, uncertainty, safe output, and baseline VaRs for every
/// symbol. Emits one record per symbol-day even under degraded inputs;
/// per-day failures become conservative records, never aborts.
BacktestResult run_backtest(const PanelDataset& panel, const RunConfig& config,
                            const BacktestOptions& options = {});

/// Five-variant fallback comparison on clean and corrupted inputs
/// (rows: raw, simple, quality-only, uncertainty-only, full) and the
/// three-variant quality-layer comparison on corrupted inputs.
struct FallbackTableRow {
  std::string variant;
  VariantRates clean_overall;
  VariantRates clean_stress;
  VariantRates corrupt_overall;
  VariantRates corrupt_stress;
};

struct QualityTableRow {
  std::string experiment;
  VariantRates overall;
  VariantRates stress;
  double mean_pinball = 0.0;
  int alerts_green = 0;
  int alerts_orange = 0;
  int alerts_red = 0;
};

struct AblationResult {
  BacktestResult clean_run;
  BacktestResult corrupted_run;
  BacktestResult no_quality_feature_run;   // on corrupted inputs
  std::vector<BacktestRecord> no_quality_service_records;  // derived
  FaultLog fault_log;
  std::vector<FallbackTableRow> fallback_table;  // 5 rows
  std::vector<QualityTableRow> quality_table;    // 3 rows
};

AblationResult run_ablations(const PanelDataset& clean_panel,
                             const RunConfig& config);

/// Alert-count summary of a record series.
struct AlertCounts {
  int green = 0;
  int orange = 0;
  int red = 0;
};
AlertCounts count_alerts(const std::vector<BacktestRecord>& records);

}  // namespace tailmon
