#include "tailmon/safe_output.hpp"

#include <algorithm>
#include <cmath>

namespace tailmon {

const char* to_string(AlertLevel a) {
  switch (a) {
    case AlertLevel::Green: return "GREEN";
    case AlertLevel::Orange: return "ORANGE";
    case AlertLevel::Red: return "RED";
  }
  return "?";
}

double adjustment(double scale_s, double score_u, double score_q,
                  const AdjustmentWeights& w) {
  return scale_s * (w.uncertainty * score_u + w.quality * score_q);
}

double safe_var(double q_cal, std::optional<double> q_hist63,
                double adjustment_a, bool* anchor_missing) {
  const double adjusted = q_cal - adjustment_a;
  if (!q_hist63) {
    if (anchor_missing) *anchor_missing = true;
    return adjusted;
  }
  if (anchor_missing) *anchor_missing = false;
  return std::min(*q_hist63, adjusted);
}

double fallback_ratio(double q_cal, double q_safe, double scale_s) {
  return std::max(q_cal - q_safe, 0.0) / scale_s;
}

AlertLevel alert_level(std::optional<QualityState> quality,
                       UncertaintyLabel label, double u_drift, double ratio_r,
                       const AlertThresholds& t) {
  const bool red = (quality && *quality == QualityState::Red) ||
                   label == UncertaintyLabel::High ||
                   u_drift >= t.drift_red || ratio_r >= t.ratio_red;
  if (red) return AlertLevel::Red;
  const bool orange = (quality && *quality == QualityState::Yellow) ||
                      label == UncertaintyLabel::Medium ||
                      u_drift >= t.drift_orange || ratio_r >= t.ratio_orange;
  if (orange) return AlertLevel::Orange;
  return AlertLevel::Green;
}

SafeDecision decide_safe_output(double q_cal, std::optional<double> q_hist63,
                                double scale_s, double score_u, double score_q,
                                std::optional<QualityState> quality_state,
                                UncertaintyLabel label, double u_drift,
                                const AdjustmentWeights& aw,
                                const AlertThresholds& at) {
  SafeDecision d;
  d.q_hist63 = q_hist63;
  d.adjustment_a = adjustment(scale_s, score_u, score_q, aw);
  d.q_safe = safe_var(q_cal, q_hist63, d.adjustment_a, &d.anchor_missing);
  d.ratio_r = fallback_ratio(q_cal, d.q_safe, scale_s);
  d.alert = alert_level(quality_state, label, u_drift, d.ratio_r, at);
  return d;
}

}  // namespace tailmon
