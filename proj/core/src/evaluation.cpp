#include "tailmon/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tailmon/stats.hpp"

namespace tailmon {

bool causal_fields_equal(const BacktestRecord& a, const BacktestRecord& b) {
  const auto opt_eq = [](const std::optional<double>& x,
                         const std::optional<double>& y) {
    if (x.has_value() != y.has_value()) return false;
    return !x || *x == *y;
  };
  return a.symbol == b.symbol && a.date == b.date &&
         a.member_preds == b.member_preds && a.q_raw == b.q_raw &&
         a.q_cal == b.q_cal && a.quality.q_miss == b.quality.q_miss &&
         a.quality.q_ohlc == b.quality.q_ohlc &&
         a.quality.q_jump == b.quality.q_jump &&
         a.quality.q_vol == b.quality.q_vol &&
         a.quality.q_stale == b.quality.q_stale &&
         a.quality.score_q == b.quality.score_q &&
         a.quality.state == b.quality.state &&
         a.uncertainty.u_model == b.uncertainty.u_model &&
         a.uncertainty.u_ood == b.uncertainty.u_ood &&
         a.uncertainty.u_drift == b.uncertainty.u_drift &&
         a.uncertainty.score_u == b.uncertainty.score_u &&
         a.uncertainty.state == b.uncertainty.state &&
         a.uncertainty.label == b.uncertainty.label &&
         opt_eq(a.safe.q_hist63, b.safe.q_hist63) &&
         a.safe.adjustment_a == b.safe.adjustment_a &&
         a.safe.q_safe == b.safe.q_safe && a.safe.ratio_r == b.safe.ratio_r &&
         a.safe.alert == b.safe.alert &&
         a.safe.anchor_missing == b.safe.anchor_missing &&
         opt_eq(a.var_hist252, b.var_hist252) &&
         opt_eq(a.var_ewma, b.var_ewma) && opt_eq(a.var_gjr, b.var_gjr) &&
         a.scale_s == b.scale_s && a.degraded == b.degraded;
}

KupiecResult kupiec_lr(int n, int x, double p) {
  KupiecResult out;
  if (n <= 0 || x < 0 || x > n) return out;
  const double p_hat = static_cast<double>(x) / n;
  double ll = 0.0;
  if (x > 0) ll += x * std::log(p_hat / p);
  if (n - x > 0) ll += (n - x) * std::log((1.0 - p_hat) / (1.0 - p));
  out.statistic = 2.0 * ll;
  out.p_value = chi_square1_sf(out.statistic);
  return out;
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Model: return "model";
    case Method::Safe: return "safe";
    case Method::Hist252: return "hist252";
    case Method::Ewma: return "ewma";
    case Method::Gjr: return "gjr";
  }
  return "?";
}

std::optional<double> method_var(const BacktestRecord& r, Method m) {
  if (r.degraded && (m == Method::Model || m == Method::Safe))
    return std::nullopt;
  switch (m) {
    case Method::Model: return r.q_cal;
    case Method::Safe: return r.safe.q_safe;
    case Method::Hist252: return r.var_hist252;
    case Method::Ewma: return r.var_ewma;
    case Method::Gjr: return r.var_gjr;
  }
  return std::nullopt;
}

const MetricsRow* MetricsTable::find(const std::string& method,
                                     const std::string& slice) const {
  for (const auto& row : rows)
    if (row.method == method && row.slice == slice) return &row;
  return nullptr;
}

std::vector<std::string> apply_stress_mask(
    std::vector<BacktestRecord>& records,
    const std::vector<std::optional<double>>& vix_by_record,
    double stress_quantile) {
  std::vector<std::string> warnings;
  std::vector<double> pooled;
  for (const auto& v : vix_by_record)
    if (v) pooled.push_back(*v);
  if (pooled.empty()) {
    for (auto& r : records) r.eval.stress = false;
    warnings.push_back(
        "stress mask: no VIX observations in the prediction sample; "
        "zero stress days");
    return warnings;
  }
  const double threshold = empirical_quantile(pooled, stress_quantile);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& v = vix_by_record[i];
    records[i].eval.stress = v && *v >= threshold;
  }
  return warnings;
}

namespace {

struct SliceAccumulator {
  int count = 0;
  int breaches = 0;
  double pinball_sum = 0.0;
};

MetricsRow finalize(const std::string& method, const std::string& slice,
                    const SliceAccumulator& acc, double alpha) {
  MetricsRow row;
  row.method = method;
  row.slice = slice;
  row.count = acc.count;
  row.breaches = acc.breaches;
  if (acc.count > 0) {
    row.defined = true;
    row.breach_rate = static_cast<double>(acc.breaches) / acc.count;
    const KupiecResult k = kupiec_lr(acc.count, acc.breaches, alpha);
    row.kupiec_stat = k.statistic;
    row.kupiec_p = k.p_value;
    row.mean_pinball = acc.pinball_sum / acc.count;
  }
  return row;
}

}  // namespace

MetricsTable evaluate(const std::vector<BacktestRecord>& records,
                      double alpha) {
  std::vector<std::string> slices = {"overall",   "stress",
                                     "nonstress", "state_low",
                                     "state_elevated", "alert_green",
                                     "alert_orange",   "alert_red"};
  std::vector<std::string> symbols;
  for (const auto& r : records)
    if (std::find(symbols.begin(), symbols.end(), r.symbol) == symbols.end())
      symbols.push_back(r.symbol);
  std::sort(symbols.begin(), symbols.end());
  for (const auto& s : symbols) slices.push_back("sym_" + s);

  const auto slice_matches = [](const BacktestRecord& r,
                                const std::string& slice) {
    if (slice == "overall") return true;
    if (slice == "stress") return r.eval.stress;
    if (slice == "nonstress") return !r.eval.stress;
    if (slice == "state_low")
      return r.uncertainty.state == UncertaintyState::Low;
    if (slice == "state_elevated")
      return r.uncertainty.state == UncertaintyState::Elevated;
    if (slice == "alert_green") return r.safe.alert == AlertLevel::Green;
    if (slice == "alert_orange") return r.safe.alert == AlertLevel::Orange;
    if (slice == "alert_red") return r.safe.alert == AlertLevel::Red;
    if (slice.rfind("sym_", 0) == 0) return r.symbol == slice.substr(4);
    return false;
  };

  MetricsTable table;
  for (Method m : kAllMethods) {
    std::map<std::string, SliceAccumulator> acc;
    for (const auto& slice : slices) acc[slice];  // emit empty slices too
    for (const auto& r : records) {
      if (!r.eval.evaluable || !r.eval.realized_return) continue;
      const auto var = method_var(r, m);
      if (!var) continue;
      const double realized = *r.eval.realized_return;
      const bool breach = realized < *var;  // strict; ties are non-breach
      const double loss = pinball_loss(realized, *var, alpha);
      for (const auto& slice : slices) {
        if (!slice_matches(r, slice)) continue;
        auto& a = acc[slice];
        ++a.count;
        a.breaches += breach ? 1 : 0;
        a.pinball_sum += loss;
      }
    }
    for (const auto& slice : slices)
      table.rows.push_back(finalize(to_string(m), slice, acc[slice], alpha));
  }
  return table;
}

std::vector<RollingBreachPoint> rolling_breach_series(
    const std::vector<BacktestRecord>& records, int window) {
  // pool by prediction date, in calendar order
  std::vector<std::string> dates;
  std::map<std::string, int> date_pos;
  for (const auto& r : records) {
    if (date_pos.emplace(r.date, 0).second) dates.push_back(r.date);
  }
  std::sort(dates.begin(), dates.end());
  for (std::size_t i = 0; i < dates.size(); ++i) date_pos[dates[i]] = static_cast<int>(i);

  std::vector<RollingBreachPoint> out;
  for (Method m : kAllMethods) {
    std::vector<int> day_count(dates.size(), 0);
    std::vector<int> day_breach(dates.size(), 0);
    for (const auto& r : records) {
      if (!r.eval.evaluable || !r.eval.realized_return) continue;
      const auto var = method_var(r, m);
      if (!var) continue;
      const int pos = date_pos[r.date];
      ++day_count[pos];
      day_breach[pos] += *r.eval.realized_return < *var ? 1 : 0;
    }
    int roll_count = 0;
    int roll_breach = 0;
    for (std::size_t i = 0; i < dates.size(); ++i) {
      roll_count += day_count[i];
      roll_breach += day_breach[i];
      if (static_cast<int>(i) >= window) {
        roll_count -= day_count[i - window];
        roll_breach -= day_breach[i - window];
      }
      if (static_cast<int>(i) >= window - 1 && roll_count > 0) {
        out.push_back({dates[i], to_string(m),
                       static_cast<double>(roll_breach) / roll_count});
      }
    }
  }
  return out;
}

const char* to_string(FallbackVariant v) {
  switch (v) {
    case FallbackVariant::Raw: return "raw";
    case FallbackVariant::Simple: return "simple";
    case FallbackVariant::QualityOnly: return "quality_only";
    case FallbackVariant::UncertaintyOnly: return "uncertainty_only";
    case FallbackVariant::Full: return "full";
  }
  return "?";
}

double variant_var(const BacktestRecord& r, FallbackVariant v,
                   const AdjustmentWeights& w) {
  switch (v) {
    case FallbackVariant::Raw:
      return r.q_cal;
    case FallbackVariant::Simple:
      return safe_var(r.q_cal, r.safe.q_hist63, 0.0);
    case FallbackVariant::QualityOnly: {
      const double a = r.scale_s * w.quality * r.quality.score_q;
      return safe_var(r.q_cal, r.safe.q_hist63, a);
    }
    case FallbackVariant::UncertaintyOnly: {
      const double a = r.scale_s * w.uncertainty * r.uncertainty.score_u;
      return safe_var(r.q_cal, r.safe.q_hist63, a);
    }
    case FallbackVariant::Full:
      return r.safe.q_safe;
  }
  return r.q_cal;
}

VariantRates variant_breach_rate(const std::vector<BacktestRecord>& records,
                                 FallbackVariant v, bool stress_only,
                                 const AdjustmentWeights& w) {
  VariantRates out;
  for (const auto& r : records) {
    if (!r.eval.evaluable || !r.eval.realized_return || r.degraded) continue;
    if (stress_only && !r.eval.stress) continue;
    const double var = variant_var(r, v, w);
    ++out.count;
    out.breaches += *r.eval.realized_return < var ? 1 : 0;
  }
  if (out.count > 0) {
    out.defined = true;
    out.rate = static_cast<double>(out.breaches) / out.count;
  }
  return out;
}

}  // namespace tailmon
