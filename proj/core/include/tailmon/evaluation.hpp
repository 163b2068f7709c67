#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tailmon/quality.hpp"
#include "tailmon/safe_output.hpp"
#include "tailmon/uncertainty.hpp"

namespace tailmon {

/// One monitored asset-day. The `eval` section is consumed only by
/// evaluation code paths; everything else is reproducible from data
/// available at day t.
struct BacktestRecord {
  std::string symbol;
  std::string date;
  int symbol_index = -1;
  int date_index = -1;

  std::vector<double> member_preds;
  double q_raw = 0.0;
  double q_cal = 0.0;
  QualityReport quality;
  UncertaintyReport uncertainty;
  SafeDecision safe;
  std::optional<double> var_hist252;
  std::optional<double> var_ewma;
  std::optional<double> var_gjr;
  double scale_s = 0.0;
  bool degraded = false;  // per-day failure converted to conservative output

  struct Evaluation {
    std::optional<double> realized_return;  // r_{t+1}
    bool evaluable = false;
    bool stress = false;
  } eval;
};

/// Equality of everything reproducible at day t (the causality audit).
bool causal_fields_equal(const BacktestRecord& a, const BacktestRecord& b);

struct KupiecResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Kupiec unconditional-coverage likelihood ratio,
/// LR = 2[x ln(p^/p) + (n-x) ln((1-p^)/(1-p))], p^ = x/n, with the
/// 0 ln 0 limit convention; p-value from the chi-square(1) upper tail.
KupiecResult kupiec_lr(int n, int x, double p);

/// Forecast methods reported side by side.
enum class Method { Model, Safe, Hist252, Ewma, Gjr };
const char* to_string(Method m);
inline constexpr Method kAllMethods[] = {Method::Model, Method::Safe,
                                         Method::Hist252, Method::Ewma,
                                         Method::Gjr};

std::optional<double> method_var(const BacktestRecord& r, Method m);

struct MetricsRow {
  std::string method;
  std::string slice;
  int count = 0;
  int breaches = 0;
  bool defined = false;  // false for empty slices; rates then meaningless
  double breach_rate = 0.0;
  double kupiec_stat = 0.0;
  double kupiec_p = 1.0;
  double mean_pinball = 0.0;
};

struct MetricsTable {
  std::vector<MetricsRow> rows;
  const MetricsRow* find(const std::string& method,
                         const std::string& slice) const;
};

/// Mark records whose day-t VIX is at or above the given quantile of the
/// pooled prediction-sample VIX distribution. Missing VIX days are
/// non-stress; if every VIX is missing, nothing is flagged and a warning
/// is returned.
std::vector<std::string> apply_stress_mask(
    std::vector<BacktestRecord>& records,
    const std::vector<std::optional<double>>& vix_by_record,
    double stress_quantile = 0.80);

/// Breach/Kupiec/pinball per method over the standard slices: overall,
/// stress, nonstress, uncertainty state, alert level, and per symbol.
MetricsTable evaluate(const std::vector<BacktestRecord>& records,
                      double alpha);

/// Rolling pooled breach-rate series per method over a trailing window of
/// prediction dates. Rows: (date, method, rate).
struct RollingBreachPoint {
  std::string date;
  std::string method;
  double rate;
};
std::vector<RollingBreachPoint> rolling_breach_series(
    const std::vector<BacktestRecord>& records, int window = 60);

/// Post-hoc fallback variants recomputed from full-service records
/// (shared forecasts; only the adjustment rule differs).
enum class FallbackVariant { Raw, Simple, QualityOnly, UncertaintyOnly, Full };
const char* to_string(FallbackVariant v);
inline constexpr FallbackVariant kAllVariants[] = {
    FallbackVariant::Raw, FallbackVariant::Simple,
    FallbackVariant::QualityOnly, FallbackVariant::UncertaintyOnly,
    FallbackVariant::Full};

double variant_var(const BacktestRecord& r, FallbackVariant v,
                   const AdjustmentWeights& w = {});

struct VariantRates {
  int count = 0;
  int breaches = 0;
  double rate = 0.0;
  bool defined = false;
};
VariantRates variant_breach_rate(const std::vector<BacktestRecord>& records,
                                 FallbackVariant v, bool stress_only,
                                 const AdjustmentWeights& w = {});

}  // namespace tailmon
