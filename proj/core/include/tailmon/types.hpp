#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tailmon {

// Missing values are first-class: an absent field is representable and
// distinguishable from zero everywhere in the pipeline.

struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScheduleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PredictError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One asset-day of raw market data. Prices are strictly positive when
/// present and uncorrupted; any field may be missing independently.
struct Bar {
  std::string symbol;
  std::string date;  // YYYY-MM-DD, strictly increasing within a symbol
  std::optional<double> open;
  std::optional<double> high;
  std::optional<double> low;
  std::optional<double> close;
  std::optional<double> volume;
  std::optional<double> ret;  // daily simple return

  bool operator==(const Bar&) const = default;
};

/// One day of auxiliary macro inputs. Missing macro values never block
/// daily output.
struct MacroSnapshot {
  std::string date;
  std::optional<double> vix;
  std::map<std::string, double> yields;  // tenor -> zero-coupon yield (%)

  std::optional<double> yield(const std::string& tenor) const {
    auto it = yields.find(tenor);
    if (it == yields.end()) return std::nullopt;
    return it->second;
  }

  bool operator==(const MacroSnapshot&) const = default;
};

/// Prediction-time feature vector for one asset-day. All entries use only
/// information available at day t.
struct FeatureRow {
  std::string symbol;
  std::string date;
  int symbol_index = -1;
  int date_index = -1;

  // raw echo of the bar
  std::optional<double> open;
  std::optional<double> high;
  std::optional<double> low;
  std::optional<double> close;
  std::optional<double> volume;
  std::optional<double> ret;  // r_t

  std::optional<double> ewma_vol;
  std::optional<double> parkinson_vol;
  std::optional<double> garman_klass_vol;
  std::optional<double> roll_vol_20;
  std::optional<double> cum_peak;
  std::optional<double> drawdown;  // in (-1, 0]
  std::optional<double> z_return_60;
  std::optional<double> z_volume_20;

  // date-level cross-asset aggregates
  std::optional<double> cross_mean_return;
  std::optional<double> cross_mean_vol20;

  // auxiliary macro inputs
  std::optional<double> vix;
  std::optional<double> yield_slope;  // long tenor minus short tenor

  double scale_s = 1e-6;  // local volatility reference, always > 0

  // input-quality score, attached after the quality layer runs
  std::optional<double> quality_q;
};

/// Daily panel: a shared trading calendar, one optional bar per
/// (symbol, date), and the macro series aligned to the calendar.
struct PanelDataset {
  std::vector<std::string> dates;    // shared calendar, strictly increasing
  std::vector<std::string> symbols;  // stable order
  // bars[symbol_index][date_index]; nullopt is an explicit calendar gap
  std::vector<std::vector<std::optional<Bar>>> bars;
  // macro[date_index]; entry may be valueless (all fields missing)
  std::vector<MacroSnapshot> macro;

  int n_dates() const { return static_cast<int>(dates.size()); }
  int n_symbols() const { return static_cast<int>(symbols.size()); }

  int symbol_index(const std::string& symbol) const {
    for (int i = 0; i < n_symbols(); ++i)
      if (symbols[i] == symbol) return i;
    return -1;
  }

  /// Keep only the first `n_days` calendar days (causality audits).
  PanelDataset truncated(int n_days) const;

  bool operator==(const PanelDataset&) const = default;
};

}  // namespace tailmon
