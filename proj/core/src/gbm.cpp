#include "tailmon/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tailmon/stats.hpp"
#include "tailmon/types.hpp"

namespace tailmon {

namespace {

constexpr double kMinGain = 1e-12;

struct SplitCandidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Level-wise exact-greedy tree construction over presorted columns.
class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& columns,
              const std::vector<std::vector<int>>& sorted_idx,
              const GbmParams& params)
      : columns_(columns), sorted_idx_(sorted_idx), params_(params) {}

  // Fits a least-squares tree to `target`, then replaces each leaf value
  // by learning_rate * alpha-quantile of `residual` within the leaf.
  RegressionTree build(const std::vector<double>& target,
                       const std::vector<double>& residual, double alpha) {
    const int n = static_cast<int>(target.size());
    RegressionTree tree;
    tree.nodes.push_back(TreeNode{});
    std::vector<int> node_of(n, 0);

    std::vector<int> active = {0};
    for (int depth = 0; depth < params_.max_depth && !active.empty();
         ++depth) {
      const int n_nodes = static_cast<int>(tree.nodes.size());
      std::vector<double> node_sum(n_nodes, 0.0);
      std::vector<int> node_count(n_nodes, 0);
      for (int i = 0; i < n; ++i) {
        node_sum[node_of[i]] += target[i];
        ++node_count[node_of[i]];
      }

      std::vector<SplitCandidate> best(n_nodes);
      std::vector<char> is_active(n_nodes, 0);
      for (int id : active) is_active[id] = 1;

      // One pass per feature over the full sorted order; per-node running
      // left-hand statistics give every candidate threshold in O(n).
      std::vector<double> left_sum(n_nodes);
      std::vector<int> left_count(n_nodes);
      std::vector<double> prev_value(n_nodes);
      for (int j = 0; j < static_cast<int>(columns_.size()); ++j) {
        std::fill(left_sum.begin(), left_sum.end(), 0.0);
        std::fill(left_count.begin(), left_count.end(), 0);
        std::fill(prev_value.begin(), prev_value.end(), 0.0);
        std::vector<char> started(n_nodes, 0);
        for (int i : sorted_idx_[j]) {
          const int node = node_of[i];
          if (!is_active[node]) continue;
          const double v = columns_[j][i];
          if (started[node] && v != prev_value[node]) {
            const int nl = left_count[node];
            const int nr = node_count[node] - nl;
            if (nl >= params_.min_samples_leaf &&
                nr >= params_.min_samples_leaf) {
              const double sl = left_sum[node];
              const double sr = node_sum[node] - sl;
              const double total = node_sum[node];
              const double gain = sl * sl / nl + sr * sr / nr -
                                  total * total / node_count[node];
              if (gain > best[node].gain + kMinGain ||
                  (!best[node].found && gain > kMinGain)) {
                best[node].found = true;
                best[node].gain = gain;
                best[node].feature = j;
                best[node].threshold = 0.5 * (prev_value[node] + v);
              }
            }
          }
          left_sum[node] += target[i];
          ++left_count[node];
          prev_value[node] = v;
          started[node] = 1;
        }
      }

      std::vector<int> next_active;
      for (int id : active) {
        if (!best[id].found) continue;
        TreeNode& parent = tree.nodes[id];
        parent.feature = best[id].feature;
        parent.threshold = best[id].threshold;
        parent.left = static_cast<int>(tree.nodes.size());
        parent.right = parent.left + 1;
        tree.nodes.push_back(TreeNode{});
        tree.nodes.push_back(TreeNode{});
        next_active.push_back(parent.left);
        next_active.push_back(parent.right);
      }
      if (next_active.empty()) break;
      for (int i = 0; i < n; ++i) {
        const TreeNode& node = tree.nodes[node_of[i]];
        if (node.feature >= 0)
          node_of[i] = columns_[node.feature][i] <= node.threshold
                           ? node.left
                           : node.right;
      }
      active = std::move(next_active);
    }

    // Terminal-region line search: step toward the residual quantile.
    std::vector<std::vector<double>> leaf_residuals(tree.nodes.size());
    for (int i = 0; i < n; ++i) leaf_residuals[node_of[i]].push_back(residual[i]);
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      TreeNode& node = tree.nodes[id];
      if (node.feature >= 0) continue;
      node.value = leaf_residuals[id].empty()
                       ? 0.0
                       : params_.learning_rate *
                             empirical_quantile(leaf_residuals[id], alpha);
    }
    return tree;
  }

 private:
  const std::vector<std::vector<double>>& columns_;
  const std::vector<std::vector<int>>& sorted_idx_;
  const GbmParams& params_;
};

}  // namespace

QuantileGbm QuantileGbm::fit(const std::vector<std::vector<double>>& rows,
                             const std::vector<double>& y, double alpha,
                             const GbmParams& params) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw FitError("QuantileGbm: empty training set");
  if (y.size() != rows.size())
    throw FitError("QuantileGbm: label/row count mismatch");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw FitError("QuantileGbm: alpha outside (0,1)");
  const int d = static_cast<int>(rows[0].size());
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != d)
      throw FitError("QuantileGbm: ragged feature rows");
  for (const auto& r : rows)
    for (double v : r)
      if (std::isnan(v)) throw FitError("QuantileGbm: NaN feature (impute first)");

  // column-major copy + per-feature sort order, shared across trees
  std::vector<std::vector<double>> columns(d, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) columns[j][i] = rows[i][j];
  std::vector<std::vector<int>> sorted_idx(d);
  for (int j = 0; j < d; ++j) {
    sorted_idx[j].resize(n);
    std::iota(sorted_idx[j].begin(), sorted_idx[j].end(), 0);
    std::stable_sort(sorted_idx[j].begin(), sorted_idx[j].end(),
                     [&](int a, int b) { return columns[j][a] < columns[j][b]; });
  }

  QuantileGbm model;
  model.alpha_ = alpha;
  model.params_ = params;
  model.base_score_ = empirical_quantile(y, alpha);

  std::vector<double> f(n, model.base_score_);
  std::vector<double> gradient(n);
  std::vector<double> residual(n);
  TreeBuilder builder(columns, sorted_idx, params);
  model.trees_.reserve(params.n_trees);
  for (int m = 0; m < params.n_trees; ++m) {
    for (int i = 0; i < n; ++i) {
      residual[i] = y[i] - f[i];
      gradient[i] = y[i] > f[i] ? alpha : (y[i] < f[i] ? alpha - 1.0 : 0.0);
    }
    RegressionTree tree = builder.build(gradient, residual, alpha);
    for (int i = 0; i < n; ++i) {
      int node = 0;
      while (tree.nodes[node].feature >= 0) {
        const TreeNode& t = tree.nodes[node];
        node = columns[t.feature][i] <= t.threshold ? t.left : t.right;
      }
      f[i] += tree.nodes[node].value;
    }
    model.trees_.push_back(std::move(tree));
  }
  return model;
}

double QuantileGbm::predict(std::span<const double> x) const {
  double out = base_score_;
  for (const auto& tree : trees_) out += tree.predict(x);
  return out;
}

}  // namespace tailmon
