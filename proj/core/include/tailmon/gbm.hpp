#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tailmon {

struct GbmParams {
  int n_trees = 200;
  int max_depth = 3;
  double learning_rate = 0.05;
  int min_samples_leaf = 20;

  bool operator==(const GbmParams&) const = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf increment, learning rate already applied
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const {
    int i = 0;
    while (nodes[i].feature >= 0)
      i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left
                                                    : nodes[i].right;
    return nodes[i].value;
  }
};

/// Gradient-boosted regression trees minimizing pinball loss at a fixed
/// quantile level. Trees fit the loss subgradient with least-squares
/// splits; each terminal region then steps toward the empirical
/// alpha-quantile of its residuals. Fitting is exact-greedy and fully
/// deterministic (no internal randomness).
class QuantileGbm {
 public:
  QuantileGbm() = default;

  static QuantileGbm fit(const std::vector<std::vector<double>>& rows,
                         const std::vector<double>& y, double alpha,
                         const GbmParams& params);

  double predict(std::span<const double> x) const;

  double alpha() const { return alpha_; }
  double base_score() const { return base_score_; }
  const GbmParams& params() const { return params_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }

  // for deserialization
  QuantileGbm(double alpha, double base_score, GbmParams params,
              std::vector<RegressionTree> trees)
      : alpha_(alpha),
        base_score_(base_score),
        params_(params),
        trees_(std::move(trees)) {}

 private:
  double alpha_ = 0.05;
  double base_score_ = 0.0;
  GbmParams params_;
  std::vector<RegressionTree> trees_;
};

}  // namespace tailmon
