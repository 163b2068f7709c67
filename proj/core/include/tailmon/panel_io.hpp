#pragma once

#include <string>

#include "tailmon/types.hpp"

namespace tailmon {

/// Load the daily panel from a CSV with header
/// `symbol,date,open,high,low,close,volume` (empty cell = missing value).
/// Rows are sorted by (symbol, date); unparseable numeric cells become
/// missing values, never zeros. Returns are computed as
/// close_t/close_{t-1} - 1 where both closes are present; a provided
/// `return` column (optional trailing column) overrides only when the
/// close-based value is not computable.
///
/// Throws IngestError on an unreadable file, a bad header, or duplicate
/// (symbol, date) rows (the error names both row numbers).
PanelDataset load_panel(const std::string& path);

/// Merge a macro CSV with header `date,vix,y3m,y10y` into the panel.
/// Dates absent from the panel calendar are ignored; panel dates absent
/// from the macro file simply have missing macro values.
void load_macro(const std::string& path, PanelDataset& panel);

/// Serialize the panel back to the ingestion CSV format (one row per
/// present bar, plus a `return` column). Byte-stable for a given panel.
std::string panel_to_csv(const PanelDataset& panel);
std::string macro_to_csv(const PanelDataset& panel);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace tailmon
