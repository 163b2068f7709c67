#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tailmon/types.hpp"

namespace tailmon {

/// Generate a synthetic daily ETF panel for desk-scale runs.
///
/// Per-symbol returns follow a GJR-GARCH(1,1) process with Student-t
/// innovations plus a market-wide volatility-regime chain; OHLC bars are
/// constructed consistently around the close path (high >= max(open,close),
/// low <= min(open,close), all prices positive). The macro series carries a
/// VIX-like proxy equal to a scaled cross-sectional rolling volatility, and
/// a two-tenor yield curve. Byte-identical output for a given seed.
///
/// Optionally pass symbol names; otherwise SYM00, SYM01, ... are used.
PanelDataset generate_synthetic_panel(
    int n_symbols, int n_days, std::uint64_t seed,
    const std::vector<std::string>& symbol_names = {});

}  // namespace tailmon
