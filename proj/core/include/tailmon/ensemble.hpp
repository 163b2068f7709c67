#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tailmon/gbm.hpp"

namespace tailmon {

struct EnsembleConfig {
  GbmParams gbm;
  int n_members = 5;
  int min_training_rows = 500;  // below this, fitting refuses
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 1;  // member fits are independent given per-member seeds
};

/// Pooled panel training set. Rows may contain NaN for missing features;
/// fitting computes the training medians and imputes internally.
struct TrainingSet {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;
  std::vector<double> labels;      // next-day returns
  std::vector<int> date_index;     // per row, for date-level bootstrap
};

/// Per-day output of the ensemble: one prediction per member plus their
/// mean. The calibrated value is attached downstream.
struct TailForecast {
  std::string symbol;
  std::string date;
  std::vector<double> member_preds;
  double q_raw = 0.0;  // arithmetic mean of member_preds
  double q_cal = 0.0;  // q_raw + calibration offset
};

struct EnsembleMeta {
  int train_begin = -1;  // date indices of the fit window
  int train_end = -1;
  std::uint64_t seed = 0;
};

/// Bootstrap ensemble of quantile models fitted on date-level resamples of
/// the pooled training window.
class QuantileEnsemble {
 public:
  static QuantileEnsemble fit(const TrainingSet& data,
                              const EnsembleConfig& config,
                              EnsembleMeta meta = {});

  /// Member predictions and their mean for one (already imputed) row.
  TailForecast predict(std::span<const double> x) const;

  /// Impute a raw (NaN-carrying) vector with this ensemble's training
  /// medians, then predict.
  TailForecast predict_imputed(const std::vector<double>& x_raw) const;

  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const std::vector<double>& medians() const { return medians_; }
  const std::vector<QuantileGbm>& members() const { return members_; }
  const EnsembleMeta& meta() const { return meta_; }
  double alpha() const { return alpha_; }

  std::string to_json() const;
  static QuantileEnsemble from_json(const std::string& text);

  void save(const std::string& path) const;
  static QuantileEnsemble load(const std::string& path);

 private:
  std::vector<std::string> feature_names_;
  std::vector<double> medians_;
  std::vector<QuantileGbm> members_;
  EnsembleMeta meta_;
  double alpha_ = 0.05;
};

/// Additive residual-based calibration offset (return units).
struct CalibrationState {
  double offset = 0.0;
  int window_days = 63;
  int residual_count = 0;
  bool empty_window = false;  // no residuals were available; offset forced 0
};

/// c = alpha-quantile of pooled residuals r_{s+1} - q_raw_{s+1} over the
/// calibration window.
CalibrationState fit_calibration(std::span<const double> raw_predictions,
                                 std::span<const double> realized_returns,
                                 double alpha, int window_days = 63);

inline double apply_calibration(double q_raw, double offset) {
  return q_raw + offset;
}

}  // namespace tailmon
