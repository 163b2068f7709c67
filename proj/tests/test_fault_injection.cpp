#include <set>

#include <doctest.h>

#include "tailmon/fault_injection.hpp"
#include "tailmon/features.hpp"
#include "tailmon/panel_io.hpp"
#include "tailmon/quality.hpp"
#include "tailmon/synthetic.hpp"

using namespace tailmon;

namespace {

FaultConfig config_for(const PanelDataset& panel, double p,
                       std::uint64_t seed) {
  FaultConfig c;
  c.probability = p;
  c.seed = seed;
  c.first_service_index = panel.n_dates() / 2;
  return c;
}

}  // namespace

TEST_CASE("zero probability leaves the panel unchanged") {
  const PanelDataset panel = generate_synthetic_panel(3, 200, 8);
  const auto [corrupted, log] = corrupt_panel(panel, config_for(panel, 0.0, 1));
  CHECK(corrupted == panel);
  CHECK(log.events.empty());
}

TEST_CASE("corruption is deterministic given the seed") {
  const PanelDataset panel = generate_synthetic_panel(3, 300, 9);
  const auto [a, log_a] = corrupt_panel(panel, config_for(panel, 0.2, 7));
  const auto [b, log_b] = corrupt_panel(panel, config_for(panel, 0.2, 7));
  CHECK(a == b);
  CHECK(log_a.to_csv() == log_b.to_csv());
  const auto [c, log_c] = corrupt_panel(panel, config_for(panel, 0.2, 8));
  CHECK(log_a.to_csv() != log_c.to_csv());
}

TEST_CASE("corrupted fraction stays inside the binomial band") {
  // ~4500 eligible rows at p = 0.15: +-3 sigma is about +-0.016
  const PanelDataset panel = generate_synthetic_panel(6, 1500, 10);
  FaultConfig config = config_for(panel, 0.15, 11);
  config.first_service_index = 750;  // 6 * 750 = 4500 eligible rows
  const auto [corrupted, log] = corrupt_panel(panel, config);
  const double fraction = static_cast<double>(log.events.size()) / 4500.0;
  CHECK(fraction >= 0.135);
  CHECK(fraction <= 0.165);
}

TEST_CASE("rows outside the service window are never touched") {
  const PanelDataset panel = generate_synthetic_panel(2, 200, 12);
  FaultConfig config = config_for(panel, 1.0, 13);
  config.first_service_index = 150;
  const auto [corrupted, log] = corrupt_panel(panel, config);
  for (int s = 0; s < panel.n_symbols(); ++s)
    for (int d = 0; d < 150; ++d)
      CHECK(corrupted.bars[s][d] == panel.bars[s][d]);
  for (const auto& e : log.events) CHECK(e.date_index >= 150);
}

TEST_CASE("rows not in the log are byte-identical to the clean panel") {
  const PanelDataset panel = generate_synthetic_panel(3, 400, 14);
  const auto [corrupted, log] = corrupt_panel(panel, config_for(panel, 0.3, 15));
  std::set<std::pair<int, int>> hit;
  for (const auto& e : log.events) {
    auto [it, inserted] = hit.emplace(e.symbol_index, e.date_index);
    CHECK(inserted);  // each corrupted row appears exactly once
  }
  for (int s = 0; s < panel.n_symbols(); ++s)
    for (int d = 0; d < panel.n_dates(); ++d)
      if (!hit.count({s, d})) CHECK(corrupted.bars[s][d] == panel.bars[s][d]);
}

TEST_CASE("mode effects satisfy the quality-layer invariants") {
  const PanelDataset panel = generate_synthetic_panel(4, 600, 16);
  const auto [corrupted, log] = corrupt_panel(panel, config_for(panel, 0.25, 17));
  const FeatureSeries features = compute_features(corrupted);
  REQUIRE(!log.events.empty());
  int n_missing = 0, n_stale = 0, n_ohlc = 0;
  for (const auto& e : log.events) {
    const auto& bar = corrupted.bars[e.symbol_index][e.date_index];
    REQUIRE(bar.has_value());
    std::optional<double> prev_close;
    if (e.date_index > 0 && corrupted.bars[e.symbol_index][e.date_index - 1])
      prev_close = corrupted.bars[e.symbol_index][e.date_index - 1]->close;
    const QualityReport q =
        quality_components(&bar.value(),
                           features.at(e.symbol_index, e.date_index),
                           prev_close);
    switch (e.mode) {
      case FaultMode::Missing:
        ++n_missing;
        CHECK(q.q_miss >= 2.0 / 6.0 - 1e-12);
        CHECK(e.fields.size() >= 2);
        CHECK(e.fields.size() <= 4);
        break;
      case FaultMode::Stale:
        ++n_stale;
        CHECK(q.q_stale == 1.0);
        CHECK(bar->ret.value() == 0.0);
        CHECK(bar->open == bar->close);
        CHECK(bar->high == bar->low);
        break;
      case FaultMode::Ohlc:
        ++n_ohlc;
        CHECK(q.q_ohlc == 1.0);
        break;
    }
  }
  // all three modes occur at this scale
  CHECK(n_missing > 0);
  CHECK(n_stale > 0);
  CHECK(n_ohlc > 0);
}

TEST_CASE("disabled modes never occur") {
  const PanelDataset panel = generate_synthetic_panel(2, 300, 18);
  FaultConfig config = config_for(panel, 0.5, 19);
  config.missing_mode = false;
  config.stale_mode = false;
  const auto [corrupted, log] = corrupt_panel(panel, config);
  REQUIRE(!log.events.empty());
  for (const auto& e : log.events) CHECK(e.mode == FaultMode::Ohlc);
}

TEST_CASE("fault log csv shape") {
  const PanelDataset panel = generate_synthetic_panel(2, 300, 20);
  const auto [corrupted, log] = corrupt_panel(panel, config_for(panel, 0.2, 21));
  const std::string csv = log.to_csv();
  CHECK(csv.rfind("symbol,date,mode,fields\n", 0) == 0);
  std::size_t lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == log.events.size() + 1);
}
