#include "tailmon/quality.hpp"

#include <cmath>
#include <stdexcept>

namespace tailmon {

const char* to_string(QualityState s) {
  switch (s) {
    case QualityState::Green: return "GREEN";
    case QualityState::Yellow: return "YELLOW";
    case QualityState::Red: return "RED";
  }
  return "?";
}

double logistic(double x, double center, double slope) {
  if (!(slope > 0.0)) throw std::invalid_argument("logistic: slope <= 0");
  return 1.0 / (1.0 + std::exp(-(x - center) / slope));
}

namespace {

// less-than / greater-than among present fields only
bool lt(const std::optional<double>& a, const std::optional<double>& b) {
  return a && b && *a < *b;
}
bool gt(const std::optional<double>& a, const std::optional<double>& b) {
  return a && b && *a > *b;
}
bool nonpositive(const std::optional<double>& p) { return p && *p <= 0.0; }

}  // namespace

QualityReport quality_components(const Bar* bar, const FeatureRow& features,
                                 std::optional<double> prev_close,
                                 const QualityThresholds& th) {
  QualityReport r;

  std::optional<double> open, high, low, close, volume, ret;
  if (bar) {
    open = bar->open;
    high = bar->high;
    low = bar->low;
    close = bar->close;
    volume = bar->volume;
    ret = bar->ret;
  }

  int missing = 0;
  for (const auto* f : {&open, &high, &low, &close, &volume, &ret})
    if (!f->has_value()) ++missing;
  r.q_miss = missing / 6.0;

  const bool inconsistent = lt(high, low) || lt(high, open) ||
                            lt(high, close) || gt(low, open) ||
                            gt(low, close) || nonpositive(open) ||
                            nonpositive(high) || nonpositive(low) ||
                            nonpositive(close);
  r.q_ohlc = inconsistent ? 1.0 : 0.0;

  // Return anomaly: hard indicator on |r_t|, logistic on the 60-day z-score.
  // A missing z-score contributes 0 (its absence is already in q_miss).
  const double jump_indicator =
      (ret && std::fabs(*ret) > th.jump_abs_return) ? 1.0 : 0.0;
  const double z_r_term =
      features.z_return_60
          ? logistic(std::fabs(*features.z_return_60), th.logistic_center,
                     th.logistic_slope)
          : 0.0;
  r.q_jump = std::max(jump_indicator, z_r_term);

  r.q_vol = features.z_volume_20
                ? logistic(std::fabs(*features.z_volume_20),
                           th.logistic_center, th.logistic_slope)
                : 0.0;

  // Stale price: a run of at least two equal consecutive closes ending at t.
  bool stale = false;
  if (close && prev_close) {
    stale = std::fabs(*close - *prev_close) <=
            th.stale_rel_tol * std::fabs(*prev_close);
  }
  r.q_stale = stale ? 1.0 : 0.0;

  return r;
}

double quality_score(const QualityReport& c, const QualityWeights& w) {
  return w.miss * c.q_miss + w.ohlc * c.q_ohlc + w.jump * c.q_jump +
         w.vol * c.q_vol + w.stale * c.q_stale;
}

QualityState quality_state(double score_q, const QualityThresholds& t) {
  if (score_q <= t.green_max) return QualityState::Green;
  if (score_q <= t.yellow_max) return QualityState::Yellow;
  return QualityState::Red;
}

QualityReport assess_quality(const Bar* bar, const FeatureRow& features,
                             std::optional<double> prev_close,
                             const QualityWeights& weights,
                             const QualityThresholds& thresholds) {
  QualityReport r = quality_components(bar, features, prev_close, thresholds);
  r.score_q = quality_score(r, weights);
  r.state = quality_state(r.score_q, thresholds);
  return r;
}

}  // namespace tailmon
