#include "tailmon/panel_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace tailmon {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Unparseable or non-finite cells become missing values, never zeros.
std::optional<double> parse_cell(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::string format_cell(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream os;
  os.precision(17);
  os << *v;
  return os.str();
}

}  // namespace

PanelDataset load_panel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open panel file: " + path);

  std::string line;
  if (!std::getline(in, line))
    throw IngestError("empty panel file: " + path);
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  const std::vector<std::string> required = {"symbol", "date",  "open",
                                             "high",   "low",   "close",
                                             "volume"};
  if (header.size() < required.size())
    throw IngestError("panel header must start with "
                      "symbol,date,open,high,low,close,volume: " +
                      path);
  for (std::size_t i = 0; i < required.size(); ++i) {
    if (header[i] != required[i])
      throw IngestError("panel header column " + std::to_string(i + 1) +
                        " must be '" + required[i] + "', got '" + header[i] +
                        "'");
  }
  int return_col = -1;
  for (std::size_t i = required.size(); i < header.size(); ++i) {
    if (header[i] == "return") return_col = static_cast<int>(i);
  }

  struct RawRow {
    Bar bar;
    std::optional<double> provided_return;
    int line_no;
  };
  std::vector<RawRow> rows;
  std::map<std::pair<std::string, std::string>, int> seen;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() < required.size())
      throw IngestError("panel row " + std::to_string(line_no) +
                        ": expected at least 7 columns");
    RawRow row;
    row.line_no = line_no;
    row.bar.symbol = trim(cells[0]);
    row.bar.date = trim(cells[1]);
    if (row.bar.symbol.empty() || row.bar.date.empty())
      throw IngestError("panel row " + std::to_string(line_no) +
                        ": empty symbol or date");
    row.bar.open = parse_cell(cells[2]);
    row.bar.high = parse_cell(cells[3]);
    row.bar.low = parse_cell(cells[4]);
    row.bar.close = parse_cell(cells[5]);
    row.bar.volume = parse_cell(cells[6]);
    if (return_col >= 0 && static_cast<std::size_t>(return_col) < cells.size())
      row.provided_return = parse_cell(cells[return_col]);

    const auto key = std::make_pair(row.bar.symbol, row.bar.date);
    auto [it, inserted] = seen.emplace(key, line_no);
    if (!inserted)
      throw IngestError("duplicate (" + row.bar.symbol + ", " + row.bar.date +
                        ") at rows " + std::to_string(it->second) + " and " +
                        std::to_string(line_no));
    rows.push_back(std::move(row));
  }

  std::sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) {
    if (a.bar.symbol != b.bar.symbol) return a.bar.symbol < b.bar.symbol;
    return a.bar.date < b.bar.date;
  });

  PanelDataset panel;
  std::set<std::string> date_set;
  for (const auto& r : rows) date_set.insert(r.bar.date);
  panel.dates.assign(date_set.begin(), date_set.end());
  std::map<std::string, int> date_index;
  for (int i = 0; i < panel.n_dates(); ++i) date_index[panel.dates[i]] = i;

  for (const auto& r : rows) {
    if (panel.symbols.empty() || panel.symbols.back() != r.bar.symbol)
      panel.symbols.push_back(r.bar.symbol);
  }
  panel.bars.assign(panel.symbols.size(),
                    std::vector<std::optional<Bar>>(panel.dates.size()));
  panel.macro.resize(panel.dates.size());
  for (int d = 0; d < panel.n_dates(); ++d) panel.macro[d].date = panel.dates[d];

  std::map<std::string, int> sym_index;
  for (int i = 0; i < panel.n_symbols(); ++i) sym_index[panel.symbols[i]] = i;
  for (auto& r : rows) {
    const int s = sym_index[r.bar.symbol];
    const int d = date_index[r.bar.date];
    panel.bars[s][d] = std::move(r.bar);
    if (r.provided_return) panel.bars[s][d]->ret = r.provided_return;
  }

  // Returns from closes; a provided return column only fills the gaps the
  // close-based definition cannot.
  for (int s = 0; s < panel.n_symbols(); ++s) {
    std::optional<double> prev_close;
    for (int d = 0; d < panel.n_dates(); ++d) {
      auto& bar = panel.bars[s][d];
      if (!bar) {
        prev_close = std::nullopt;  // calendar gap breaks close adjacency
        continue;
      }
      const std::optional<double> provided = bar->ret;
      if (bar->close && prev_close && *prev_close != 0.0)
        bar->ret = *bar->close / *prev_close - 1.0;
      else
        bar->ret = provided;
      prev_close = bar->close;
    }
  }
  return panel;
}

void load_macro(const std::string& path, PanelDataset& panel) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open macro file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty macro file: " + path);
  auto header = split_csv_line(line);
  for (auto& h : header) h = trim(h);
  if (header.size() < 4 || header[0] != "date" || header[1] != "vix" ||
      header[2] != "y3m" || header[3] != "y10y")
    throw IngestError("macro header must be date,vix,y3m,y10y: " + path);

  std::map<std::string, int> date_index;
  for (int i = 0; i < panel.n_dates(); ++i) date_index[panel.dates[i]] = i;

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() < 4)
      throw IngestError("macro row " + std::to_string(line_no) +
                        ": expected 4 columns");
    auto it = date_index.find(trim(cells[0]));
    if (it == date_index.end()) continue;
    MacroSnapshot& snap = panel.macro[it->second];
    snap.vix = parse_cell(cells[1]);
    if (auto y = parse_cell(cells[2])) snap.yields["3m"] = *y;
    if (auto y = parse_cell(cells[3])) snap.yields["10y"] = *y;
  }
}

std::string panel_to_csv(const PanelDataset& panel) {
  std::ostringstream os;
  os << "symbol,date,open,high,low,close,volume,return\n";
  for (int s = 0; s < panel.n_symbols(); ++s) {
    for (int d = 0; d < panel.n_dates(); ++d) {
      const auto& bar = panel.bars[s][d];
      if (!bar) continue;
      os << bar->symbol << ',' << bar->date << ',' << format_cell(bar->open)
         << ',' << format_cell(bar->high) << ',' << format_cell(bar->low)
         << ',' << format_cell(bar->close) << ',' << format_cell(bar->volume)
         << ',' << format_cell(bar->ret) << '\n';
    }
  }
  return os.str();
}

std::string macro_to_csv(const PanelDataset& panel) {
  std::ostringstream os;
  os << "date,vix,y3m,y10y\n";
  for (int d = 0; d < panel.n_dates(); ++d) {
    const auto& m = panel.macro[d];
    std::optional<double> y3m = m.yield("3m");
    std::optional<double> y10y = m.yield("10y");
    os << panel.dates[d] << ',' << format_cell(m.vix) << ','
       << format_cell(y3m) << ',' << format_cell(y10y) << '\n';
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write file: " + path);
  out << content;
}

PanelDataset PanelDataset::truncated(int n_days) const {
  PanelDataset out;
  const int n = std::min<int>(n_days, n_dates());
  out.dates.assign(dates.begin(), dates.begin() + n);
  out.symbols = symbols;
  out.bars.resize(symbols.size());
  for (std::size_t s = 0; s < symbols.size(); ++s)
    out.bars[s].assign(bars[s].begin(), bars[s].begin() + n);
  out.macro.assign(macro.begin(), macro.begin() + n);
  return out;
}

}  // namespace tailmon
