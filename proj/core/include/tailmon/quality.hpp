#pragma once

#include <optional>

#include "tailmon/types.hpp"

namespace tailmon {

enum class QualityState { Green, Yellow, Red };

const char* to_string(QualityState s);

struct QualityWeights {
  double miss = 0.30;
  double ohlc = 0.35;
  double jump = 0.15;
  double vol = 0.10;
  double stale = 0.10;
};

struct QualityThresholds {
  double green_max = 0.25;   // green for Q <= green_max
  double yellow_max = 0.60;  // yellow for green_max < Q <= yellow_max
  double jump_abs_return = 0.15;
  double logistic_center = 3.0;
  double logistic_slope = 1.0;
  double stale_rel_tol = 1e-12;
};

/// Input-quality diagnostics for one asset-day.
struct QualityReport {
  double q_miss = 0.0;   // fraction of missing critical fields, in [0,1]
  double q_ohlc = 0.0;   // OHLC-consistency flag, 0 or 1
  double q_jump = 0.0;   // bounded return-anomaly score
  double q_vol = 0.0;    // bounded volume-anomaly score
  double q_stale = 0.0;  // repeated-close flag, 0 or 1
  double score_q = 0.0;  // aggregate Q_t in [0,1]
  QualityState state = QualityState::Green;
};

/// Bounded logistic score 1/(1+exp(-(x-c)/s)); requires s > 0.
double logistic(double x, double center, double slope);

/// The five quality components for day t. This layer never fails: any
/// missing input only moves a component toward its benign value while
/// q_miss charges the missingness itself.
QualityReport quality_components(const Bar* bar, const FeatureRow& features,
                                 std::optional<double> prev_close,
                                 const QualityThresholds& thresholds = {});

/// Fixed-weight aggregate of the five components.
double quality_score(const QualityReport& components,
                     const QualityWeights& weights = {});

QualityState quality_state(double score_q, const QualityThresholds& t = {});

/// Components, aggregate, and state in one call.
QualityReport assess_quality(const Bar* bar, const FeatureRow& features,
                             std::optional<double> prev_close,
                             const QualityWeights& weights = {},
                             const QualityThresholds& thresholds = {});

}  // namespace tailmon
