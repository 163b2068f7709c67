#include "tailmon/fault_injection.hpp"

#include <algorithm>
#include <sstream>

#include "tailmon/rng.hpp"

namespace tailmon {

const char* to_string(FaultMode m) {
  switch (m) {
    case FaultMode::Missing: return "missing";
    case FaultMode::Stale: return "stale";
    case FaultMode::Ohlc: return "ohlc";
  }
  return "?";
}

std::string FaultLog::to_csv() const {
  std::ostringstream os;
  os << "symbol,date,mode,fields\n";
  for (const auto& e : events) {
    os << e.symbol << ',' << e.date << ',' << to_string(e.mode) << ',';
    for (std::size_t i = 0; i < e.fields.size(); ++i) {
      if (i) os << '|';
      os << e.fields[i];
    }
    os << '\n';
  }
  return os.str();
}

namespace {

constexpr const char* kCriticalFields[6] = {"open",  "high",   "low",
                                            "close", "volume", "return"};

std::optional<double>* field_slot(Bar& bar, int field) {
  switch (field) {
    case 0: return &bar.open;
    case 1: return &bar.high;
    case 2: return &bar.low;
    case 3: return &bar.close;
    case 4: return &bar.volume;
    case 5: return &bar.ret;
  }
  return nullptr;
}

}  // namespace

std::pair<PanelDataset, FaultLog> corrupt_panel(const PanelDataset& panel,
                                                const FaultConfig& config) {
  PanelDataset out = panel;
  FaultLog log;
  log.probability = config.probability;
  log.seed = config.seed;

  std::vector<FaultMode> modes;
  if (config.missing_mode) modes.push_back(FaultMode::Missing);
  if (config.stale_mode) modes.push_back(FaultMode::Stale);
  if (config.ohlc_mode) modes.push_back(FaultMode::Ohlc);
  if (modes.empty() || config.probability <= 0.0) return {out, log};

  for (int s = 0; s < out.n_symbols(); ++s) {
    for (int d = std::max(config.first_service_index, 0); d < out.n_dates();
         ++d) {
      auto& bar = out.bars[s][d];
      if (!bar) continue;
      Rng rng(derive_stream_key(config.seed, static_cast<std::uint64_t>(s),
                                static_cast<std::uint64_t>(d)));
      if (rng.uniform01() >= config.probability) continue;

      const FaultMode mode = modes[rng.index(modes.size())];
      FaultEvent event;
      event.symbol = out.symbols[s];
      event.date = out.dates[d];
      event.symbol_index = s;
      event.date_index = d;
      event.mode = mode;

      switch (mode) {
        case FaultMode::Missing: {
          const int k = 2 + static_cast<int>(rng.index(3));  // 2..4 fields
          int order[6] = {0, 1, 2, 3, 4, 5};
          for (int i = 5; i > 0; --i)
            std::swap(order[i], order[rng.index(i + 1)]);
          for (int i = 0; i < k; ++i) {
            *field_slot(*bar, order[i]) = std::nullopt;
            event.fields.push_back(kCriticalFields[order[i]]);
          }
          std::sort(event.fields.begin(), event.fields.end());
          break;
        }
        case FaultMode::Stale: {
          // Flatten same-day prices onto the previous close as delivered
          // (rows before d are already settled). Without a previous close
          // the stale pattern cannot be formed; the row stays clean.
          std::optional<double> prev_close;
          if (d > 0 && out.bars[s][d - 1]) prev_close = out.bars[s][d - 1]->close;
          if (!prev_close) {
            event.fields.clear();
            break;
          }
          bar->open = *prev_close;
          bar->high = *prev_close;
          bar->low = *prev_close;
          bar->close = *prev_close;
          bar->ret = 0.0;
          event.fields = {"close", "high", "low", "open", "return"};
          break;
        }
        case FaultMode::Ohlc: {
          if (bar->high && bar->low) {
            if (*bar->high > *bar->low) {
              std::swap(bar->high, bar->low);
              event.fields = {"high", "low"};
            } else if (*bar->high == *bar->low) {
              bar->high = 0.99 * *bar->low;
              event.fields = {"high"};
            } else {
              event.fields.clear();  // already inconsistent; leave untouched
            }
          } else if (bar->low) {
            bar->high = 0.99 * *bar->low;
            event.fields = {"high"};
          } else if (bar->high) {
            bar->low = 1.01 * *bar->high;
            event.fields = {"low"};
          } else {
            event.fields.clear();
          }
          break;
        }
      }
      if (!event.fields.empty()) log.events.push_back(std::move(event));
    }
  }
  return {out, log};
}

}  // namespace tailmon
