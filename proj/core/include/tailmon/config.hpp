#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tailmon/ensemble.hpp"
#include "tailmon/features.hpp"
#include "tailmon/ood.hpp"
#include "tailmon/quality.hpp"
#include "tailmon/safe_output.hpp"
#include "tailmon/uncertainty.hpp"

namespace tailmon {

/// Full run configuration. Every default reproduces the fixed service
/// parameterization (windows, weights, thresholds) the pipeline was
/// designed around; overrides are echoed into metrics.json.
struct RunConfig {
  // [data]
  std::string panel_csv;
  std::string macro_csv;
  bool synthetic = false;
  int synth_symbols = 6;
  int synth_days = 2000;
  std::vector<std::string> symbols;  // optional filter / synthetic names
  std::string out_dir = "out";

  // [run]
  std::uint64_t seed = 42;
  int threads = 1;
  double alpha = 0.05;

  // [windows]
  int train_len = 756;
  int refit_step = 63;
  int calib_window = 63;
  int hist_window = 252;
  int anchor_window = 63;
  int drift_window = 60;
  int drift_min_obs = 30;
  int u_history_window = 252;
  int u_state_min_history = 20;
  int z_return_window = 60;
  int z_volume_window = 20;
  int roll_vol_window = 20;
  double ewma_lambda = 0.94;
  double scale_floor = 1e-6;

  // [weights]
  double w_q_miss = 0.30;
  double w_q_ohlc = 0.35;
  double w_q_jump = 0.15;
  double w_q_vol = 0.10;
  double w_q_stale = 0.10;
  double w_u_model = 0.40;
  double w_u_ood = 0.35;
  double w_u_drift = 0.25;
  double adj_uncertainty = 0.75;
  double adj_quality = 0.50;

  // [thresholds]
  double quality_green_max = 0.25;
  double quality_yellow_max = 0.60;
  double jump_abs_return = 0.15;
  double logistic_center = 3.0;
  double logistic_slope = 1.0;
  double stale_rel_tol = 1e-12;
  double label_low_max = 0.33;
  double label_medium_max = 0.66;
  double alert_drift_orange = 0.5;
  double alert_drift_red = 1.0;
  double alert_ratio_orange = 0.35;
  double alert_ratio_red = 0.75;
  double state_quantile = 0.90;
  double stress_quantile = 0.80;
  double ood_retained_variance = 0.95;
  int ood_max_components = 10;
  double ood_ref_quantile = 0.95;

  // [gbm]
  int gbm_trees = 200;
  int gbm_max_depth = 3;
  double gbm_learning_rate = 0.05;
  int gbm_min_samples_leaf = 20;
  int n_members = 5;
  int min_training_rows = 500;
  bool calibration_out_of_sample = false;

  // [corruption]
  double fault_probability = 0.15;
  bool fault_missing = true;
  bool fault_stale = true;
  bool fault_ohlc = true;

  FeatureParams feature_params() const;
  QualityWeights quality_weights() const;
  QualityThresholds quality_thresholds() const;
  UncertaintyWeights uncertainty_weights() const;
  UncertaintyParams uncertainty_params() const;
  AdjustmentWeights adjustment_weights() const;
  AlertThresholds alert_thresholds() const;
  OodParams ood_params() const;
  GbmParams gbm_params() const;
  EnsembleConfig ensemble_config(std::uint64_t refit_seed) const;

  /// Audit-trail echo of every constant.
  nlohmann::json echo() const;
};

/// Parse a sectioned key=value config file ([data], [run], [windows],
/// [weights], [thresholds], [gbm], [corruption]; '#' comments). Unknown
/// keys raise ConfigError.
RunConfig parse_config_file(const std::string& path);

/// Apply one "section.key=value" override (CLI surface).
void apply_config_entry(RunConfig& config, const std::string& section,
                        const std::string& key, const std::string& value);

}  // namespace tailmon
