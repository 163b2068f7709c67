#pragma once

#include <optional>

#include "tailmon/quality.hpp"
#include "tailmon/uncertainty.hpp"

namespace tailmon {

enum class AlertLevel { Green, Orange, Red };

const char* to_string(AlertLevel a);

struct AdjustmentWeights {
  double uncertainty = 0.75;
  double quality = 0.50;
};

struct AlertThresholds {
  double drift_orange = 0.5;
  double drift_red = 1.0;
  double ratio_orange = 0.35;
  double ratio_red = 0.75;
};

/// Conservative downward adjustment A_t = s_t * (0.75 U_t + 0.50 Q_t).
double adjustment(double scale_s, double score_u, double score_q,
                  const AdjustmentWeights& w = {});

/// Safe VaR: min of the 63-day historical anchor and the adjusted model
/// forecast. When the anchor is unavailable (early sample), the adjusted
/// forecast alone is used and the decision is flagged.
struct SafeDecision {
  std::optional<double> q_hist63;
  double adjustment_a = 0.0;
  double q_safe = 0.0;
  double ratio_r = 0.0;
  AlertLevel alert = AlertLevel::Green;
  bool anchor_missing = false;
};

double safe_var(double q_cal, std::optional<double> q_hist63,
                double adjustment_a, bool* anchor_missing = nullptr);

/// Fallback-intensity ratio R_t = (q_cal - q_safe)_+ / s_t.
double fallback_ratio(double q_cal, double q_safe, double scale_s);

/// Escalation rule over quality state, uncertainty label, drift score, and
/// fallback ratio. Pass nullopt for the quality state to disable
/// quality-based escalation (service-layer ablation).
AlertLevel alert_level(std::optional<QualityState> quality,
                       UncertaintyLabel label, double u_drift, double ratio_r,
                       const AlertThresholds& t = {});

/// Full decision for one day.
SafeDecision decide_safe_output(double q_cal, std::optional<double> q_hist63,
                                double scale_s, double score_u, double score_q,
                                std::optional<QualityState> quality_state,
                                UncertaintyLabel label, double u_drift,
                                const AdjustmentWeights& aw = {},
                                const AlertThresholds& at = {});

}  // namespace tailmon
