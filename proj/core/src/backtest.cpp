#include "tailmon/backtest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <memory>
#include <optional>

#include "tailmon/baselines.hpp"
#include "tailmon/rng.hpp"
#include "tailmon/stats.hpp"

namespace tailmon {

Schedule build_schedule(int n_dates, int train_len, int step,
                        int calib_window) {
  if (train_len <= 0 || step <= 0 || calib_window <= 0 ||
      calib_window > train_len)
    throw ScheduleError("build_schedule: invalid window lengths");
  if (n_dates <= train_len)
    throw ScheduleError("build_schedule: " + std::to_string(n_dates) +
                        " dates cannot cover a " + std::to_string(train_len) +
                        "-day training window plus a prediction span");
  Schedule schedule;
  schedule.first_prediction_index = train_len;
  for (int begin = train_len; begin < n_dates; begin += step) {
    RefitSpan span;
    span.predict_begin = begin;
    span.predict_end = std::min(begin + step, n_dates);
    span.train_begin = begin - train_len;
    span.train_end = begin;
    span.calib_begin = begin - calib_window;
    span.calib_end = begin;
    schedule.spans.push_back(span);
  }
  return schedule;
}

namespace {

// Run tasks [0, n) with at most `threads` workers; results land by index,
// so the outcome is identical for any thread count.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::future<void>> futures;
  const int n_workers = std::min(threads, n);
  futures.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w)
    futures.push_back(std::async(std::launch::async, worker));
  for (auto& f : futures) f.get();
}

struct SymbolReturnHistory {
  // present returns in calendar order and, per calendar index, how many of
  // them occurred at dates <= that index
  std::vector<double> values;
  std::vector<int> count_through;  // size n_dates

  std::span<const double> through(int date_index) const {
    return {values.data(),
            static_cast<std::size_t>(count_through[date_index])};
  }
};

SymbolReturnHistory collect_returns(const PanelDataset& panel, int symbol) {
  SymbolReturnHistory h;
  h.count_through.resize(panel.n_dates());
  for (int d = 0; d < panel.n_dates(); ++d) {
    const auto& bar = panel.bars[symbol][d];
    if (bar && bar->ret) h.values.push_back(*bar->ret);
    h.count_through[d] = static_cast<int>(h.values.size());
  }
  return h;
}

std::optional<double> label_return(const PanelDataset& panel, int symbol,
                                   int date_index) {
  if (date_index + 1 >= panel.n_dates()) return std::nullopt;
  const auto& bar = panel.bars[symbol][date_index + 1];
  if (!bar) return std::nullopt;
  return bar->ret;
}

}  // namespace

BacktestResult run_backtest(const PanelDataset& panel, const RunConfig& config,
                            const BacktestOptions& options) {
  BacktestResult result;
  result.schedule = build_schedule(panel.n_dates(), config.train_len,
                                   config.refit_step, config.calib_window);
  const int n_sym = panel.n_symbols();
  const int n_dates = panel.n_dates();
  result.expected_records = n_sym * result.schedule.total_prediction_days();

  FeatureSeries features = compute_features(panel, config.feature_params());

  // Quality pre-pass: causal per-row scores, also the quality_q feature.
  const QualityWeights q_weights = config.quality_weights();
  const QualityThresholds q_thresholds = config.quality_thresholds();
  std::vector<std::vector<QualityReport>> quality(
      n_sym, std::vector<QualityReport>(n_dates));
  for (int s = 0; s < n_sym; ++s) {
    for (int d = 0; d < n_dates; ++d) {
      const Bar* bar =
          panel.bars[s][d] ? &panel.bars[s][d].value() : nullptr;
      std::optional<double> prev_close;
      if (d > 0 && panel.bars[s][d - 1]) prev_close = panel.bars[s][d - 1]->close;
      quality[s][d] = assess_quality(bar, features.at(s, d), prev_close,
                                     q_weights, q_thresholds);
      features.at(s, d).quality_q = quality[s][d].score_q;
    }
  }

  FeatureSpec spec;
  spec.symbols = panel.symbols;
  spec.include_quality = options.use_quality_feature;
  const std::vector<std::string> feature_names = spec.names();

  std::vector<SymbolReturnHistory> returns(n_sym);
  for (int s = 0; s < n_sym; ++s) returns[s] = collect_returns(panel, s);

  const UncertaintyParams u_params = config.uncertainty_params();
  const UncertaintyWeights u_weights = config.uncertainty_weights();
  const AdjustmentWeights adj_weights = config.adjustment_weights();
  const AlertThresholds alert_thresholds = config.alert_thresholds();
  DriftTracker tracker(n_sym, u_params);

  struct PendingForecast {
    int date_index;
    double q_cal;
  };
  std::vector<std::optional<PendingForecast>> pending(n_sym);

  std::vector<GjrGarchParams> garch_params(n_sym);
  std::vector<GarchState> garch_state(n_sym);

  const QuantileEnsemble* previous_ensemble = nullptr;
  std::unique_ptr<QuantileEnsemble> ensemble_storage;
  std::unique_ptr<QuantileEnsemble> prior_storage;

  for (std::size_t refit_idx = 0; refit_idx < result.schedule.spans.size();
       ++refit_idx) {
    const RefitSpan& span = result.schedule.spans[refit_idx];

    // --- refit: pooled ensemble -----------------------------------------
    TrainingSet training;
    training.feature_names = feature_names;
    for (int d = span.train_begin; d < span.train_end; ++d) {
      for (int s = 0; s < n_sym; ++s) {
        const auto label = label_return(panel, s, d);
        if (!label) continue;  // rows without a next-day return are skipped
        training.rows.push_back(spec.vectorize(features.at(s, d)));
        training.labels.push_back(*label);
        training.date_index.push_back(d);
      }
    }
    const std::uint64_t refit_seed = derive_stream_key(
        config.seed, 0xF17, static_cast<std::uint64_t>(refit_idx));
    EnsembleConfig ens_config = config.ensemble_config(refit_seed);
    EnsembleMeta meta;
    meta.train_begin = span.train_begin;
    meta.train_end = span.train_end;
    ens_config.threads = config.threads;
    prior_storage = std::move(ensemble_storage);
    ensemble_storage = std::make_unique<QuantileEnsemble>(
        QuantileEnsemble::fit(training, ens_config, meta));
    const QuantileEnsemble& ensemble = *ensemble_storage;

    // --- out-of-distribution reference ----------------------------------
    std::vector<std::vector<double>> ood_rows;
    ood_rows.reserve(static_cast<std::size_t>(span.train_end -
                                              span.train_begin) *
                     n_sym);
    for (int d = span.train_begin; d < span.train_end; ++d)
      for (int s = 0; s < n_sym; ++s)
        ood_rows.push_back(impute_with_medians(
            spec.vectorize(features.at(s, d)), ensemble.medians()));
    const OodModel ood = fit_ood(ood_rows, config.ood_params());

    // --- residual calibration -------------------------------------------
    // In-sample with the fresh ensemble by default; the out-of-sample
    // alternative scores the window with the previous ensemble.
    const QuantileEnsemble* calib_model = &ensemble;
    if (config.calibration_out_of_sample && previous_ensemble)
      calib_model = previous_ensemble;
    std::vector<double> calib_preds;
    std::vector<double> calib_realized;
    for (int d = span.calib_begin; d < span.calib_end; ++d) {
      for (int s = 0; s < n_sym; ++s) {
        const auto label = label_return(panel, s, d);
        if (!label) continue;
        const auto forecast =
            calib_model->predict_imputed(spec.vectorize(features.at(s, d)));
        calib_preds.push_back(forecast.q_raw);
        calib_realized.push_back(*label);
      }
    }
    const CalibrationState calibration =
        fit_calibration(calib_preds, calib_realized, config.alpha,
                        span.calib_end - span.calib_begin);
    if (calibration.empty_window)
      result.warnings.push_back(
          "refit " + std::to_string(refit_idx) +
          ": no calibration residuals available, offset forced to 0");

    // --- per-symbol GJR-GARCH benchmark ----------------------------------
    parallel_for(n_sym, config.threads, [&](int s) {
      std::vector<double> train_returns;
      for (int d = span.train_begin; d < span.train_end; ++d) {
        const auto& bar = panel.bars[s][d];
        if (bar && bar->ret) train_returns.push_back(*bar->ret);
      }
      garch_params[s] = fit_gjr_garch(train_returns);
      double seed_var = 0.0;
      if (train_returns.size() >= 2) {
        const double m = mean(train_returns);
        for (double r : train_returns) seed_var += (r - m) * (r - m);
        seed_var /= train_returns.size() - 1;
      }
      garch_state[s].variance = std::max(seed_var, 1e-10);
    });
    for (int s = 0; s < n_sym; ++s)
      if (!garch_params[s].converged)
        result.warnings.push_back("refit " + std::to_string(refit_idx) +
                                  ": GJR-GARCH fit for " + panel.symbols[s] +
                                  " kept its starting point");

    // --- day loop ---------------------------------------------------------
    for (int d = span.predict_begin; d < span.predict_end; ++d) {
      for (int s = 0; s < n_sym; ++s) {
        BacktestRecord record;
        record.symbol = panel.symbols[s];
        record.date = panel.dates[d];
        record.symbol_index = s;
        record.date_index = d;

        // Outcomes arrive with a one-day lag: settle yesterday's forecast
        // before today's scores are computed.
        if (pending[s] && pending[s]->date_index < d) {
          const int realized_at = pending[s]->date_index + 1;
          if (realized_at <= d) {
            const auto& bar = panel.bars[s][realized_at];
            if (bar && bar->ret)
              tracker.record_outcome(s, *bar->ret < pending[s]->q_cal);
            pending[s].reset();
          }
        }

        // GJR state: fold in today's observed return (missing => no shock),
        // giving the one-step-ahead variance.
        const auto& today_bar = panel.bars[s][d];
        const double shock = today_bar && today_bar->ret ? *today_bar->ret : 0.0;
        garch_state[s] = garch_step(garch_params[s], garch_state[s], shock);

        try {
          const FeatureRow& row = features.at(s, d);
          const QualityReport& q_report = quality[s][d];
          record.quality = q_report;
          record.scale_s = row.scale_s;

          const auto x_raw = spec.vectorize(row);
          const auto x_imputed =
              impute_with_medians(x_raw, ensemble.medians());
          TailForecast forecast = ensemble.predict(x_imputed);
          forecast.symbol = record.symbol;
          forecast.date = record.date;
          forecast.q_cal =
              apply_calibration(forecast.q_raw, calibration.offset);
          record.member_preds = forecast.member_preds;
          record.q_raw = forecast.q_raw;
          record.q_cal = forecast.q_cal;

          UncertaintyReport u;
          u.u_model = model_dispersion(forecast.member_preds, row.scale_s);
          u.u_ood = ood_score(ood, x_imputed);
          u.u_drift = tracker.drift_score(s, config.alpha);
          u.score_u =
              combine_uncertainty(u.u_model, u.u_ood, u.u_drift, u_weights);
          u.state = tracker.uncertainty_state(s, u.score_u);
          u.label = uncertainty_label(u.score_u, u_params);
          tracker.record_u(s, u.score_u);
          record.uncertainty = u;

          const auto trailing = returns[s].through(d);
          const std::optional<double> anchor =
              hist_var(trailing, config.anchor_window, config.alpha);
          record.var_hist252 =
              hist_var(trailing, config.hist_window, config.alpha);
          record.var_ewma = ewma_var(row.ewma_vol);
          record.var_gjr =
              garch_var(garch_params[s], garch_state[s], config.alpha);

          const double q_for_adjustment =
              options.quality_in_service ? q_report.score_q : 0.0;
          const std::optional<QualityState> quality_for_alert =
              options.quality_in_service
                  ? std::optional<QualityState>(q_report.state)
                  : std::nullopt;
          record.safe = decide_safe_output(
              record.q_cal, anchor, row.scale_s, u.score_u, q_for_adjustment,
              quality_for_alert, u.label, u.u_drift, adj_weights,
              alert_thresholds);

          pending[s] = PendingForecast{d, record.q_cal};
        } catch (const std::exception& e) {
          // A failed day still produces output: worst observable quality,
          // no model VaR, red alert.
          record.degraded = true;
          record.quality.q_miss = 1.0;
          record.quality.q_ohlc = 1.0;
          record.quality.q_jump = 1.0;
          record.quality.q_vol = 1.0;
          record.quality.q_stale = 1.0;
          record.quality.score_q = quality_score(record.quality, q_weights);
          record.quality.state =
              quality_state(record.quality.score_q, q_thresholds);
          record.safe.alert = AlertLevel::Red;
          result.warnings.push_back("degraded record " + record.symbol + " " +
                                    record.date + ": " + e.what());
        }

        const auto realized = label_return(panel, s, d);
        record.eval.realized_return = realized;
        record.eval.evaluable = realized.has_value() && !record.degraded;
        result.records.push_back(std::move(record));
      }
    }
    previous_ensemble = ensemble_storage.get();
  }

  // Stress labeling over the pooled prediction-sample VIX (evaluation-only).
  std::vector<std::optional<double>> vix_by_record(result.records.size());
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    vix_by_record[i] = features.at(r.symbol_index, r.date_index).vix;
  }
  auto warnings = apply_stress_mask(result.records, vix_by_record,
                                    config.stress_quantile);
  result.warnings.insert(result.warnings.end(), warnings.begin(),
                         warnings.end());
  return result;
}

namespace {

double variant_pinball(const std::vector<BacktestRecord>& records,
                       FallbackVariant v, const AdjustmentWeights& w,
                       double alpha) {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : records) {
    if (!r.eval.evaluable || !r.eval.realized_return || r.degraded) continue;
    sum += pinball_loss(*r.eval.realized_return, variant_var(r, v, w), alpha);
    ++count;
  }
  return count > 0 ? sum / count : 0.0;
}

// The service-side ablation keeps the quality feature in the model but
// strips quality from the adjustment and the alert inputs. Everything is
// derivable from the full-service records.
std::vector<BacktestRecord> derive_no_quality_service(
    const std::vector<BacktestRecord>& records, const RunConfig& config) {
  std::vector<BacktestRecord> out = records;
  const AdjustmentWeights w = config.adjustment_weights();
  const AlertThresholds at = config.alert_thresholds();
  for (auto& r : out) {
    if (r.degraded) continue;
    r.safe = decide_safe_output(r.q_cal, r.safe.q_hist63, r.scale_s,
                                r.uncertainty.score_u, 0.0, std::nullopt,
                                r.uncertainty.label, r.uncertainty.u_drift, w,
                                at);
  }
  return out;
}

}  // namespace

AblationResult run_ablations(const PanelDataset& clean_panel,
                             const RunConfig& config) {
  AblationResult result;

  FaultConfig fault;
  fault.probability = config.fault_probability;
  fault.missing_mode = config.fault_missing;
  fault.stale_mode = config.fault_stale;
  fault.ohlc_mode = config.fault_ohlc;
  fault.seed = derive_stream_key(config.seed, 0xFA17, 0);
  fault.first_service_index = config.train_len;
  auto [corrupted_panel, fault_log] = corrupt_panel(clean_panel, fault);
  result.fault_log = std::move(fault_log);

  result.clean_run = run_backtest(clean_panel, config);
  result.corrupted_run = run_backtest(corrupted_panel, config);
  BacktestOptions no_feature;
  no_feature.use_quality_feature = false;
  result.no_quality_feature_run =
      run_backtest(corrupted_panel, config, no_feature);
  result.no_quality_service_records =
      derive_no_quality_service(result.corrupted_run.records, config);

  const AdjustmentWeights w = config.adjustment_weights();
  for (FallbackVariant v : kAllVariants) {
    FallbackTableRow row;
    row.variant = to_string(v);
    row.clean_overall =
        variant_breach_rate(result.clean_run.records, v, false, w);
    row.clean_stress =
        variant_breach_rate(result.clean_run.records, v, true, w);
    row.corrupt_overall =
        variant_breach_rate(result.corrupted_run.records, v, false, w);
    row.corrupt_stress =
        variant_breach_rate(result.corrupted_run.records, v, true, w);
    result.fallback_table.push_back(std::move(row));
  }

  const auto quality_row = [&](const std::string& name,
                               const std::vector<BacktestRecord>& records) {
    QualityTableRow row;
    row.experiment = name;
    row.overall =
        variant_breach_rate(records, FallbackVariant::Full, false, w);
    row.stress = variant_breach_rate(records, FallbackVariant::Full, true, w);
    row.mean_pinball =
        variant_pinball(records, FallbackVariant::Full, w, config.alpha);
    const AlertCounts alerts = count_alerts(records);
    row.alerts_green = alerts.green;
    row.alerts_orange = alerts.orange;
    row.alerts_red = alerts.red;
    return row;
  };
  result.quality_table.push_back(
      quality_row("corrupt_full_service", result.corrupted_run.records));
  result.quality_table.push_back(quality_row(
      "no_quality_feature", result.no_quality_feature_run.records));
  result.quality_table.push_back(quality_row(
      "no_quality_service_layer", result.no_quality_service_records));
  return result;
}

AlertCounts count_alerts(const std::vector<BacktestRecord>& records) {
  AlertCounts counts;
  for (const auto& r : records) {
    switch (r.safe.alert) {
      case AlertLevel::Green: ++counts.green; break;
      case AlertLevel::Orange: ++counts.orange; break;
      case AlertLevel::Red: ++counts.red; break;
    }
  }
  return counts;
}

}  // namespace tailmon
