#include "tailmon/ood.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tailmon/stats.hpp"

namespace tailmon {

double OodModel::distance(const std::vector<double>& x) const {
  if (degenerate || components.empty()) return 0.0;
  std::vector<double> z(kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j)
    z[j] = (x[kept[j]] - means[j]) / sds[j];
  double d2 = 0.0;
  for (std::size_t c = 0; c < components.size(); ++c) {
    double score = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) score += components[c][j] * z[j];
    d2 += score * score / variances[c];
  }
  return std::sqrt(d2);
}

OodModel fit_ood(const std::vector<std::vector<double>>& rows,
                 const OodParams& params) {
  if (rows.size() < 2)
    throw std::invalid_argument("fit_ood: need at least 2 rows");
  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(rows[0].size());

  OodModel model;
  for (int j = 0; j < d; ++j) {
    double m = 0.0;
    for (const auto& r : rows) m += r[j];
    m /= n;
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[j] - m) * (r[j] - m);
    const double sd = std::sqrt(ss / (n - 1));
    if (sd > 0.0) {
      model.kept.push_back(j);
      model.means.push_back(m);
      model.sds.push_back(sd);
    }
  }

  if (model.kept.empty()) {
    model.degenerate = true;
    model.d_ref = 1.0;
    return model;
  }

  const int k_in = static_cast<int>(model.kept.size());
  Eigen::MatrixXd z(n, k_in);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k_in; ++j)
      z(i, j) = (rows[i][model.kept[j]] - model.means[j]) / model.sds[j];

  Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("fit_ood: eigendecomposition failed");

  // eigenvalues ascending; take from the top until the retained-variance
  // target, capped at max_components, skipping numerically null directions
  const Eigen::VectorXd evals = solver.eigenvalues();
  const Eigen::MatrixXd evecs = solver.eigenvectors();
  const double total = std::max(evals.sum(), 0.0);
  const double eval_floor = std::max(1e-12, 1e-12 * evals(k_in - 1));
  const int cap = std::min(params.max_components, k_in);
  double captured = 0.0;
  for (int c = k_in - 1; c >= 0; --c) {
    if (static_cast<int>(model.components.size()) >= cap) break;
    const double lambda = evals(c);
    if (lambda <= eval_floor) break;
    std::vector<double> comp(k_in);
    for (int j = 0; j < k_in; ++j) comp[j] = evecs(j, c);
    model.components.push_back(std::move(comp));
    model.variances.push_back(lambda);
    captured += lambda;
    if (total > 0.0 && captured / total >= params.retained_variance) break;
  }

  if (model.components.empty()) {
    model.degenerate = true;
    model.d_ref = 1.0;
    return model;
  }

  std::vector<double> distances(n);
  for (int i = 0; i < n; ++i) distances[i] = model.distance(rows[i]);
  model.d_ref = empirical_quantile(distances, params.ref_quantile);
  if (!(model.d_ref > 0.0)) {
    model.degenerate = true;
    model.d_ref = 1.0;
  }
  return model;
}

double ood_score(const OodModel& model, const std::vector<double>& x) {
  if (model.degenerate) return 0.0;
  const double d = model.distance(x);
  const double raw = (d / model.d_ref - 1.0) / 1.5;
  return std::clamp(raw, 0.0, 1.0);
}

}  // namespace tailmon
