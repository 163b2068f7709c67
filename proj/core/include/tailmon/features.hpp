#pragma once

#include <string>
#include <vector>

#include "tailmon/types.hpp"

namespace tailmon {

inline constexpr double kScaleFloor = 1e-6;  // floor for the s_t divisor

struct FeatureParams {
  double ewma_lambda = 0.94;  // RiskMetrics decay
  int z_return_window = 60;
  int z_volume_window = 20;
  int roll_vol_window = 20;
  double scale_floor = kScaleFloor;
};

/// Feature series for one panel: rows[symbol_index][date_index].
struct FeatureSeries {
  std::vector<std::vector<FeatureRow>> rows;

  const FeatureRow& at(int symbol, int date) const {
    return rows[symbol][date];
  }
  FeatureRow& at(int symbol, int date) { return rows[symbol][date]; }
};

/// Compute all prediction-time features. Uses only information available
/// at day t; rows with insufficient history carry missing feature values.
FeatureSeries compute_features(const PanelDataset& panel,
                               const FeatureParams& params = {});

/// Ordered mapping from a FeatureRow to the model's numeric vector.
/// Missing entries become NaN and are later median-imputed. The quality
/// score is one named column so the no-quality-feature ablation can drop
/// exactly that column.
struct FeatureSpec {
  std::vector<std::string> symbols;  // one-hot order
  bool include_quality = true;

  std::vector<std::string> names() const;
  std::vector<double> vectorize(const FeatureRow& row) const;
};

/// Per-feature medians over the non-missing entries of each column.
/// A column that is entirely missing imputes to 0.
std::vector<double> column_medians(const std::vector<std::vector<double>>& x);

/// Replace every NaN entry by the matching median; other entries untouched.
std::vector<double> impute_with_medians(std::vector<double> x,
                                        const std::vector<double>& medians);

}  // namespace tailmon
