#include <cstdio>
#include <fstream>
#include <string>

#include <doctest.h>

#include "tailmon/baselines.hpp"
#include "tailmon/panel_io.hpp"
#include "tailmon/quality.hpp"
#include "tailmon/synthetic.hpp"

using namespace tailmon;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const std::string path = std::string("/tmp/tailmon_test_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("load_panel computes simple returns from closes") {
  const auto path = write_temp("ret.csv",
                               "symbol,date,open,high,low,close,volume\n"
                               "SPY,2023-01-03,99,101,98,100,1000\n"
                               "SPY,2023-01-04,100,102,99,101,1100\n");
  const PanelDataset panel = load_panel(path);
  REQUIRE(panel.n_symbols() == 1);
  REQUIRE(panel.n_dates() == 2);
  CHECK_FALSE(panel.bars[0][0]->ret.has_value());
  CHECK(panel.bars[0][1]->ret.value() == doctest::Approx(0.01));
}

TEST_CASE("unparseable cells become missing values, row retained") {
  const auto path = write_temp("nan.csv",
                               "symbol,date,open,high,low,close,volume\n"
                               "SPY,2023-01-03,99,101,98,100,NaN\n");
  const PanelDataset panel = load_panel(path);
  REQUIRE(panel.bars[0][0].has_value());
  CHECK_FALSE(panel.bars[0][0]->volume.has_value());
  CHECK(panel.bars[0][0]->close.value() == 100.0);
}

TEST_CASE("empty cell is missing, not zero") {
  const auto path = write_temp("empty.csv",
                               "symbol,date,open,high,low,close,volume\n"
                               "SPY,2023-01-03,,101,98,100,500\n");
  const PanelDataset panel = load_panel(path);
  CHECK_FALSE(panel.bars[0][0]->open.has_value());
}

TEST_CASE("duplicate (symbol,date) is a fatal ingest error naming both rows") {
  const auto path = write_temp("dup.csv",
                               "symbol,date,open,high,low,close,volume\n"
                               "SPY,2023-01-03,99,101,98,100,1000\n"
                               "SPY,2023-01-04,100,102,99,101,1100\n"
                               "SPY,2023-01-03,98,100,97,99,900\n");
  try {
    load_panel(path);
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("SPY") != std::string::npos);
    CHECK(msg.find("2023-01-03") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);  // first row number
    CHECK(msg.find("4") != std::string::npos);  // second row number
  }
}

TEST_CASE("unreadable file is a fatal ingest error") {
  CHECK_THROWS_AS(load_panel("/tmp/tailmon_definitely_missing.csv"),
                  IngestError);
}

TEST_CASE("rows are sorted by (symbol,date) regardless of input order") {
  const auto path = write_temp("sort.csv",
                               "symbol,date,open,high,low,close,volume\n"
                               "SPY,2023-01-04,100,102,99,101,1100\n"
                               "EEM,2023-01-03,40,41,39,40,2000\n"
                               "SPY,2023-01-03,99,101,98,100,1000\n");
  const PanelDataset panel = load_panel(path);
  REQUIRE(panel.symbols == std::vector<std::string>{"EEM", "SPY"});
  REQUIRE(panel.dates == std::vector<std::string>{"2023-01-03", "2023-01-04"});
  CHECK(panel.bars[0][1] == std::nullopt);  // EEM gap on the second date
}

TEST_CASE("provided return column fills gaps the closes cannot") {
  const auto path =
      write_temp("provret.csv",
                 "symbol,date,open,high,low,close,volume,return\n"
                 "SPY,2023-01-03,99,101,98,100,1000,0.004\n"
                 "SPY,2023-01-04,100,102,99,,1100,0.012\n"
                 "SPY,2023-01-05,100,102,99,103,1100,0.05\n");
  const PanelDataset panel = load_panel(path);
  // day 0: no prior close; the provided value stands
  CHECK(panel.bars[0][0]->ret.value() == doctest::Approx(0.004));
  // day 1: close missing; provided return overrides
  CHECK(panel.bars[0][1]->ret.value() == doctest::Approx(0.012));
  // day 2: prior close missing; provided return stands
  CHECK(panel.bars[0][2]->ret.value() == doctest::Approx(0.05));
}

TEST_CASE("macro csv merge") {
  const auto panel_path = write_temp("m1.csv",
                                     "symbol,date,open,high,low,close,volume\n"
                                     "SPY,2023-01-03,99,101,98,100,1000\n"
                                     "SPY,2023-01-04,100,102,99,101,1100\n");
  const auto macro_path = write_temp("m2.csv",
                                     "date,vix,y3m,y10y\n"
                                     "2023-01-03,21.5,4.3,3.9\n"
                                     "2023-01-04,,4.4,\n");
  PanelDataset panel = load_panel(panel_path);
  load_macro(macro_path, panel);
  CHECK(panel.macro[0].vix.value() == doctest::Approx(21.5));
  CHECK(panel.macro[0].yield("10y").value() == doctest::Approx(3.9));
  CHECK_FALSE(panel.macro[1].vix.has_value());
  CHECK_FALSE(panel.macro[1].yield("10y").has_value());
  CHECK(panel.macro[1].yield("3m").value() == doctest::Approx(4.4));
}

TEST_CASE("synthetic panel is byte-identical for the same seed") {
  const PanelDataset a = generate_synthetic_panel(3, 120, 99);
  const PanelDataset b = generate_synthetic_panel(3, 120, 99);
  CHECK(panel_to_csv(a) == panel_to_csv(b));
  CHECK(macro_to_csv(a) == macro_to_csv(b));
  CHECK(a == b);
  const PanelDataset c = generate_synthetic_panel(3, 120, 100);
  CHECK(panel_to_csv(a) != panel_to_csv(c));
}

TEST_CASE("synthetic bars have zero OHLC-consistency violations") {
  const PanelDataset panel = generate_synthetic_panel(4, 300, 5);
  int violations = 0;
  for (int s = 0; s < panel.n_symbols(); ++s) {
    for (int d = 0; d < panel.n_dates(); ++d) {
      const auto& bar = panel.bars[s][d];
      REQUIRE(bar.has_value());
      const double o = *bar->open, h = *bar->high, l = *bar->low,
                   c = *bar->close;
      if (h < l || h < o || h < c || l > o || l > c || o <= 0 || h <= 0 ||
          l <= 0 || c <= 0)
        ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("synthetic panel: 252-day historical VaR breach rate in [3%,7%]") {
  // oracle: walk the generated returns, breach = r_{t+1} < trailing VaR
  const PanelDataset panel = generate_synthetic_panel(6, 2000, 42);
  int breaches = 0;
  int count = 0;
  for (int s = 0; s < panel.n_symbols(); ++s) {
    std::vector<double> returns;
    for (int d = 0; d < panel.n_dates(); ++d) {
      const auto& bar = panel.bars[s][d];
      const std::optional<double> next =
          d + 1 < panel.n_dates() ? panel.bars[s][d + 1]->ret : std::nullopt;
      if (bar->ret) returns.push_back(*bar->ret);
      if (static_cast<int>(returns.size()) >= 252 && next) {
        const auto var = hist_var(returns, 252, 0.05);
        REQUIRE(var.has_value());
        ++count;
        breaches += *next < *var ? 1 : 0;
      }
    }
  }
  const double rate = static_cast<double>(breaches) / count;
  CHECK(rate >= 0.03);
  CHECK(rate <= 0.07);
}
