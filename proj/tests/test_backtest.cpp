#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <doctest.h>

#include "tailmon/backtest.hpp"
#include "tailmon/reporting.hpp"
#include "tailmon/rng.hpp"
#include "tailmon/stats.hpp"
#include "tailmon/synthetic.hpp"

using namespace tailmon;

namespace {

// Small but structurally complete configuration: two refits over a
// 900-day panel, full-size windows.
RunConfig small_config() {
  RunConfig config;
  config.synthetic = true;
  config.seed = 42;
  config.gbm_trees = 60;  // keep unit runs quick; defaults are exercised in
                          // the acceptance suite
  return config;
}

PanelDataset small_panel(std::uint64_t seed = 42, int days = 900,
                         int symbols = 2) {
  return generate_synthetic_panel(symbols, days, seed);
}

}  // namespace

TEST_CASE("schedule: minimal panel gives one full span") {
  const Schedule s = build_schedule(756 + 63, 756, 63);
  REQUIRE(s.spans.size() == 1);
  CHECK(s.spans[0].predict_begin == 756);
  CHECK(s.spans[0].predict_end == 819);
  CHECK(s.spans[0].train_begin == 0);
  CHECK(s.spans[0].train_end == 756);
  CHECK(s.spans[0].calib_begin == 756 - 63);
  CHECK(s.spans[0].calib_end == 756);
}

TEST_CASE("schedule: spans abut with no gap or overlap") {
  const Schedule s = build_schedule(756 + 126, 756, 63);
  REQUIRE(s.spans.size() == 2);
  CHECK(s.spans[0].predict_end == s.spans[1].predict_begin);
  CHECK(s.spans[1].predict_end == 756 + 126);
}

TEST_CASE("schedule: 900 dates cover exactly the tail with a short last span") {
  const Schedule s = build_schedule(900, 756, 63);
  REQUIRE(s.spans.size() == 3);
  CHECK(s.spans[0].predict_begin == 756);
  CHECK(s.spans[2].predict_end == 900);
  CHECK(s.spans[2].predict_end - s.spans[2].predict_begin == 900 - 756 - 126);
  int covered = 0;
  for (const auto& span : s.spans) covered += span.predict_end - span.predict_begin;
  CHECK(covered == 900 - 756);
  // training span ends where prediction begins
  for (const auto& span : s.spans) CHECK(span.train_end == span.predict_begin);
}

TEST_CASE("schedule: insufficient dates is an error") {
  CHECK_THROWS_AS(build_schedule(756, 756, 63), ScheduleError);
  CHECK_THROWS_AS(build_schedule(100, 756, 63), ScheduleError);
}

TEST_CASE("kupiec: null value, known points, and grid minimum") {
  CHECK(kupiec_lr(100, 5, 0.05).statistic == doctest::Approx(0.0));

  // reported pairs: n=4501 with counts 261, 196, 239
  CHECK(kupiec_lr(4501, 261, 0.05).statistic ==
        doctest::Approx(5.76).epsilon(0.01));
  CHECK(kupiec_lr(4501, 196, 0.05).statistic ==
        doctest::Approx(4.12).epsilon(0.01));
  CHECK(kupiec_lr(4501, 239, 0.05).statistic ==
        doctest::Approx(0.89).epsilon(0.01));

  // extreme counts use the 0 ln 0 convention and stay finite
  CHECK(std::isfinite(kupiec_lr(50, 0, 0.05).statistic));
  CHECK(std::isfinite(kupiec_lr(50, 50, 0.05).statistic));

  // minimum near round(n p)
  for (int n : {40, 100, 1000}) {
    const int null_x = static_cast<int>(std::lround(n * 0.05));
    const double at_null = kupiec_lr(n, null_x, 0.05).statistic;
    for (int x = 0; x <= n; x += std::max(1, n / 50))
      CHECK(at_null <= kupiec_lr(n, x, 0.05).statistic + 1e-12);
  }

  // p-values live in [0,1] and shrink as the statistic grows
  CHECK(kupiec_lr(4501, 261, 0.05).p_value <
        kupiec_lr(4501, 239, 0.05).p_value);
}

TEST_CASE("stress mask rules") {
  std::vector<BacktestRecord> records(10);
  SUBCASE("constant vix flags every day") {
    std::vector<std::optional<double>> vix(10, 20.0);
    apply_stress_mask(records, vix, 0.80);
    for (const auto& r : records) CHECK(r.eval.stress);
  }
  SUBCASE("uniform grid flags the top fifth") {
    std::vector<BacktestRecord> recs(100);
    std::vector<std::optional<double>> vix(100);
    for (int i = 0; i < 100; ++i) vix[i] = 1.0 + i;  // 1..100
    apply_stress_mask(recs, vix, 0.80);
    int flagged = 0;
    for (const auto& r : recs) flagged += r.eval.stress ? 1 : 0;
    CHECK(flagged >= 20);
    CHECK(flagged <= 21);  // threshold day itself is included (>=)
  }
  SUBCASE("all-missing vix warns and flags nothing") {
    std::vector<std::optional<double>> vix(10);
    const auto warnings = apply_stress_mask(records, vix, 0.80);
    CHECK(!warnings.empty());
    for (const auto& r : records) CHECK_FALSE(r.eval.stress);
  }
}

TEST_CASE("evaluate: rates, pinball, and partition additivity") {
  // hand-built records: 20 evaluable, 1 breach for the safe method
  std::vector<BacktestRecord> records;
  for (int i = 0; i < 20; ++i) {
    BacktestRecord r;
    r.symbol = i % 2 == 0 ? "AAA" : "BBB";
    r.date = "2023-01-" + std::to_string(10 + i);
    r.q_cal = -0.02;
    r.safe.q_safe = -0.025;
    r.scale_s = 0.01;
    r.eval.realized_return = i == 0 ? -0.05 : 0.001 * i;
    r.eval.evaluable = true;
    records.push_back(r);
  }
  const MetricsTable table = evaluate(records, 0.05);
  const MetricsRow* safe = table.find("safe", "overall");
  REQUIRE(safe != nullptr);
  CHECK(safe->count == 20);
  CHECK(safe->breaches == 1);
  CHECK(safe->breach_rate == doctest::Approx(0.05));

  // pinball equals an independent recomputation
  double pinball = 0.0;
  for (const auto& r : records)
    pinball += pinball_loss(*r.eval.realized_return, r.safe.q_safe, 0.05);
  pinball /= records.size();
  CHECK(safe->mean_pinball == doctest::Approx(pinball).epsilon(1e-12));

  // per-symbol breach counts sum to the overall count
  const MetricsRow* a = table.find("safe", "sym_AAA");
  const MetricsRow* b = table.find("safe", "sym_BBB");
  REQUIRE(a != nullptr);
  REQUIRE(b != nullptr);
  CHECK(a->breaches + b->breaches == safe->breaches);
  CHECK(a->count + b->count == safe->count);

  // stress + nonstress partition as well
  const MetricsRow* stress = table.find("safe", "stress");
  const MetricsRow* nonstress = table.find("safe", "nonstress");
  CHECK(stress->count + nonstress->count == safe->count);

  // empty slice rows exist with count 0 and undefined metrics
  const MetricsRow* red = table.find("safe", "alert_red");
  REQUIRE(red != nullptr);
  CHECK(red->count == 0);
  CHECK_FALSE(red->defined);
}

TEST_CASE("full backtest: availability, determinism, and structure") {
  const PanelDataset panel = small_panel();
  const RunConfig config = small_config();

  const BacktestResult a = run_backtest(panel, config);
  CHECK(a.expected_records ==
        panel.n_symbols() * (panel.n_dates() - config.train_len));
  CHECK(a.records.size() == static_cast<std::size_t>(a.expected_records));
  CHECK(a.availability() == doctest::Approx(1.0));

  const BacktestResult b = run_backtest(panel, config);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i)
    CHECK(causal_fields_equal(a.records[i], b.records[i]));
  CHECK(records_to_csv(a.records) == records_to_csv(b.records));

  // every record respects the safe-output ordering
  for (const auto& r : a.records) {
    if (r.degraded) continue;
    CHECK(r.safe.q_safe <= r.q_cal + 1e-15);
    if (r.safe.q_hist63)
      CHECK(r.safe.q_safe <= *r.safe.q_hist63 + 1e-15);
    CHECK(r.safe.adjustment_a >= 0.0);
    CHECK(r.q_raw == doctest::Approx(mean(r.member_preds)).epsilon(1e-12));
  }
}

TEST_CASE("in-calibration breach rate of the calibrated forecast is ~alpha") {
  // By construction of the residual quantile, scoring the calibration
  // window with q_raw + c breaches about alpha of the pooled rows
  // (within the discreteness of the empirical quantile).
  const PanelDataset panel = small_panel(7, 900, 3);
  RunConfig config = small_config();
  const BacktestResult result = run_backtest(panel, config);

  // recompute residual breaches for the first refit window through the
  // emitted record values is not possible directly; instead check the
  // realized out-of-sample behavior is centered near alpha
  int evaluable = 0, breaches = 0;
  for (const auto& r : result.records) {
    if (!r.eval.evaluable) continue;
    ++evaluable;
    breaches += *r.eval.realized_return < r.q_cal ? 1 : 0;
  }
  REQUIRE(evaluable > 200);
  const double rate = static_cast<double>(breaches) / evaluable;
  CHECK(rate > 0.01);
  CHECK(rate < 0.12);
}

TEST_CASE("causality: truncating the panel reproduces records exactly") {
  const PanelDataset panel = small_panel(11, 880, 2);
  const RunConfig config = small_config();
  const BacktestResult full = run_backtest(panel, config);

  std::mt19937_64 gen(5);
  std::vector<std::size_t> picks;
  for (int k = 0; k < 6; ++k) picks.push_back(gen() % full.records.size());

  for (const std::size_t idx : picks) {
    const BacktestRecord& target = full.records[idx];
    const PanelDataset truncated = panel.truncated(target.date_index + 1);
    const BacktestResult partial = run_backtest(truncated, config);
    bool found = false;
    for (const auto& r : partial.records) {
      if (r.symbol == target.symbol && r.date == target.date) {
        CHECK(causal_fields_equal(r, target));
        found = true;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("corrupting service-time rows never changes earlier records") {
  const PanelDataset panel = small_panel(13, 880, 2);
  RunConfig config = small_config();
  const BacktestResult clean = run_backtest(panel, config);

  FaultConfig fault;
  fault.probability = 0.15;
  fault.seed = 99;
  fault.first_service_index = config.train_len;
  const auto [corrupted, log] = corrupt_panel(panel, fault);
  REQUIRE(!log.events.empty());
  int first_corrupt = panel.n_dates();
  for (const auto& e : log.events)
    first_corrupt = std::min(first_corrupt, e.date_index);

  const BacktestResult dirty = run_backtest(corrupted, config);
  REQUIRE(clean.records.size() == dirty.records.size());
  for (std::size_t i = 0; i < clean.records.size(); ++i) {
    if (clean.records[i].date_index < first_corrupt)
      CHECK(causal_fields_equal(clean.records[i], dirty.records[i]));
  }
  CHECK(dirty.availability() == doctest::Approx(1.0));
}

TEST_CASE("ablation grid shapes and identities") {
  const PanelDataset panel = small_panel(17, 880, 2);
  RunConfig config = small_config();
  config.fault_probability = 0.15;
  const AblationResult ablation = run_ablations(panel, config);

  REQUIRE(ablation.fallback_table.size() == 5);
  CHECK(ablation.fallback_table[0].variant == "raw");
  CHECK(ablation.fallback_table[4].variant == "full");
  REQUIRE(ablation.quality_table.size() == 3);
  CHECK(ablation.quality_table[0].experiment == "corrupt_full_service");

  // the no-quality-feature run drops exactly one model feature
  FeatureSpec with_q{panel.symbols, true};
  FeatureSpec without_q{panel.symbols, false};
  CHECK(with_q.names().size() == without_q.names().size() + 1);

  // simple fallback equals min(q_cal, anchor) recomputed from records
  for (const auto& r : ablation.clean_run.records) {
    if (r.degraded) continue;
    const double simple = variant_var(r, FallbackVariant::Simple);
    const double expected =
        r.safe.q_hist63 ? std::min(r.q_cal, *r.safe.q_hist63) : r.q_cal;
    CHECK(simple == doctest::Approx(expected).epsilon(1e-15));
    // the full service is never laxer than the simple fallback
    CHECK(r.safe.q_safe <= simple + 1e-15);
  }

  // raw breach count >= full-service count on the same records (soft
  // expectation reported by the paper's grid; hard by construction here
  // because q_safe <= q_cal pointwise)
  const VariantRates raw =
      variant_breach_rate(ablation.clean_run.records, FallbackVariant::Raw, false);
  const VariantRates full = variant_breach_rate(ablation.clean_run.records,
                                                FallbackVariant::Full, false);
  CHECK(raw.breaches >= full.breaches);

  // availability holds on every engine run
  CHECK(ablation.clean_run.availability() == doctest::Approx(1.0));
  CHECK(ablation.corrupted_run.availability() == doctest::Approx(1.0));
  CHECK(ablation.no_quality_feature_run.availability() == doctest::Approx(1.0));
}

TEST_CASE("records round-trip through csv") {
  const PanelDataset panel = small_panel(19, 860, 2);
  const RunConfig config = small_config();
  const BacktestResult result = run_backtest(panel, config);
  const std::string csv = records_to_csv(result.records);
  const auto loaded = records_from_csv(csv);
  REQUIRE(loaded.size() == result.records.size());
  // metrics computed from the round-tripped records are identical
  const MetricsTable a = evaluate(result.records, config.alpha);
  const MetricsTable b = evaluate(loaded, config.alpha);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].count == b.rows[i].count);
    CHECK(a.rows[i].breaches == b.rows[i].breaches);
    if (a.rows[i].defined)
      CHECK(a.rows[i].mean_pinball ==
            doctest::Approx(b.rows[i].mean_pinball).epsilon(1e-12));
  }
}

TEST_CASE("rolling breach series covers full windows only") {
  const PanelDataset panel = small_panel(23, 880, 2);
  const RunConfig config = small_config();
  const BacktestResult result = run_backtest(panel, config);
  const auto series = rolling_breach_series(result.records, 60);
  REQUIRE(!series.empty());
  // number of prediction dates
  std::set<std::string> dates;
  for (const auto& r : result.records) dates.insert(r.date);
  std::set<std::string> series_dates;
  for (const auto& p : series) {
    CHECK(p.rate >= 0.0);
    CHECK(p.rate <= 1.0);
    series_dates.insert(p.date);
  }
  CHECK(series_dates.size() == dates.size() - 59);
}
