#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tailmon/types.hpp"

namespace tailmon {

enum class FaultMode { Missing, Stale, Ohlc };

const char* to_string(FaultMode m);

struct FaultEvent {
  std::string symbol;
  std::string date;
  int symbol_index = -1;
  int date_index = -1;
  FaultMode mode = FaultMode::Missing;
  std::vector<std::string> fields;  // affected fields
};

struct FaultLog {
  std::vector<FaultEvent> events;
  double probability = 0.0;
  std::uint64_t seed = 0;

  std::string to_csv() const;
};

struct FaultConfig {
  double probability = 0.15;  // row-wise corruption probability
  bool missing_mode = true;
  bool stale_mode = true;
  bool ohlc_mode = true;
  std::uint64_t seed = 0;
  // Only rows at or after this calendar index (service time) are eligible;
  // stored training/calibration history is never corrupted directly.
  int first_service_index = 0;
};

/// Corrupt service-time rows of the panel. Each eligible row is hit
/// independently with probability p; the mode is drawn uniformly from the
/// enabled set. Missing mode removes 2-4 of the six critical fields, stale
/// mode flattens the day's prices onto the previous close (return 0), and
/// OHLC mode swaps high/low (or forces high below low when equal).
/// Rows not in the log are byte-identical to the clean panel; the draw for
/// each row comes from a counter-based stream keyed by (symbol, date), so
/// the result is independent of iteration order.
std::pair<PanelDataset, FaultLog> corrupt_panel(const PanelDataset& panel,
                                                const FaultConfig& config);

}  // namespace tailmon
