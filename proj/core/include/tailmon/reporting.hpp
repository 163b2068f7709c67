#pragma once

#include <string>
#include <vector>

#include "tailmon/backtest.hpp"
#include "tailmon/config.hpp"
#include "tailmon/evaluation.hpp"

namespace tailmon {

/// One row per symbol-day; missing values are empty cells.
std::string records_to_csv(const std::vector<BacktestRecord>& records);
std::vector<BacktestRecord> records_from_csv(const std::string& text);

/// metrics.json: config echo, availability, alert counts, warnings, and
/// the full method x slice metrics table.
std::string metrics_to_json(const BacktestResult& result,
                            const MetricsTable& metrics,
                            const RunConfig& config);

std::string rolling_breach_to_csv(
    const std::vector<RollingBreachPoint>& series);

/// Five-variant fallback comparison, clean/corrupted x overall/stress.
std::string fallback_table_to_csv(const std::vector<FallbackTableRow>& rows);

/// Three-variant quality-layer comparison: overall/stress/pinball/alerts.
std::string quality_table_to_csv(const std::vector<QualityTableRow>& rows);

/// Human-readable report printed by the CLI.
std::string format_report(const std::vector<BacktestRecord>& records,
                          double alpha);

}  // namespace tailmon
