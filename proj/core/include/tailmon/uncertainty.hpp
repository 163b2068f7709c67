#pragma once

#include <deque>
#include <span>
#include <vector>

namespace tailmon {

enum class UncertaintyState { Low, Elevated };
enum class UncertaintyLabel { Low, Medium, High };

const char* to_string(UncertaintyState s);
const char* to_string(UncertaintyLabel l);

struct UncertaintyWeights {
  double model = 0.40;
  double ood = 0.35;
  double drift = 0.25;
};

struct UncertaintyParams {
  int drift_window = 60;       // evaluable post-adjustment forecasts
  int drift_min_obs = 30;      // below this, the drift score is 0
  int u_history_window = 252;  // per-symbol history for the state quantile
  int state_min_history = 20;  // below this, the state is Low (cold start)
  double state_quantile = 0.90;
  double label_low_max = 0.33;    // low for U <= 0.33
  double label_medium_max = 0.66; // medium for 0.33 < U <= 0.66
};

/// Ensemble-dispersion component: sample sd of the member predictions over
/// 3 * s_t, clipped at 1. Requires scale_s > 0.
double model_dispersion(std::span<const double> member_preds, double scale_s);

/// Weighted aggregate U_t of the three components.
double combine_uncertainty(double u_model, double u_ood, double u_drift,
                           const UncertaintyWeights& w = {});

UncertaintyLabel uncertainty_label(double u, const UncertaintyParams& p = {});

/// Per-symbol rolling state for the drift component and the uncertainty
/// state threshold. Single writer per symbol; outcomes arrive with a
/// one-day information lag and are appended before the day's scores are
/// read, so issued reports are never retroactively changed.
class DriftTracker {
 public:
  DriftTracker(int n_symbols, UncertaintyParams params = {});

  /// Append the realized breach indicator of an evaluable forecast
  /// (realized return strictly below the calibrated forecast).
  void record_outcome(int symbol, bool breach);

  /// Append today's aggregate score to the symbol's U history.
  void record_u(int symbol, double u);

  /// Excess-breach drift score from the symbol's recent outcomes.
  double drift_score(int symbol, double alpha) const;

  /// Low iff U_t <= rolling 90th percentile of the symbol's prior U
  /// scores (the current day is excluded; short histories => Low).
  UncertaintyState uncertainty_state(int symbol, double u) const;

  int outcome_count(int symbol) const;
  int u_history_count(int symbol) const;

 private:
  struct SymbolState {
    std::deque<bool> breaches;
    std::deque<double> u_history;
  };
  std::vector<SymbolState> symbols_;
  UncertaintyParams params_;
};

struct UncertaintyReport {
  double u_model = 0.0;
  double u_ood = 0.0;
  double u_drift = 0.0;
  double score_u = 0.0;
  UncertaintyState state = UncertaintyState::Low;
  UncertaintyLabel label = UncertaintyLabel::Low;
};

}  // namespace tailmon
