#pragma once

#include <vector>

namespace tailmon {

/// Distance-based out-of-distribution detector: standardize features,
/// project onto the leading principal components, and measure Mahalanobis
/// distance in that space against the training distribution.
struct OodModel {
  std::vector<int> kept;            // input columns with sd > 0
  std::vector<double> means;        // per kept column
  std::vector<double> sds;          // per kept column
  std::vector<std::vector<double>> components;  // k rows, orthonormal
  std::vector<double> variances;    // per-component eigenvalues
  double d_ref = 1.0;               // 95th percentile of training distances
  bool degenerate = false;          // no usable variance in training rows

  double distance(const std::vector<double>& x) const;
};

struct OodParams {
  double retained_variance = 0.95;
  int max_components = 10;
  double ref_quantile = 0.95;
};

/// Fit on the imputed training feature matrix (>= 2 rows). Constant
/// columns are dropped; if everything is constant the model is flagged
/// degenerate with d_ref = 1 and all distances 0.
OodModel fit_ood(const std::vector<std::vector<double>>& rows,
                 const OodParams& params = {});

/// clip((d/d_ref - 1) / 1.5, 0, 1); 0 for a degenerate model.
double ood_score(const OodModel& model, const std::vector<double>& x);

}  // namespace tailmon
