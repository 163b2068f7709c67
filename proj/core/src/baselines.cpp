#include "tailmon/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "tailmon/rng.hpp"
#include "tailmon/stats.hpp"

namespace tailmon {

std::optional<double> hist_var(std::span<const double> trailing_returns,
                               int window, double alpha) {
  if (static_cast<int>(trailing_returns.size()) < window) return std::nullopt;
  const auto tail = trailing_returns.subspan(trailing_returns.size() - window);
  return empirical_quantile(tail, alpha);
}

std::optional<double> ewma_var(std::optional<double> ewma_vol) {
  if (!ewma_vol) return std::nullopt;
  return kEwmaNormalMultiplier * *ewma_vol;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// Unconstrained coordinates <-> constrained GJR parameters. The total
// persistence is a sigmoid; its split across (alpha, gamma/2, beta) is a
// three-way softmax with the beta logit pinned to 0.
struct ParamMap {
  static GjrGarchParams decode(const double* u) {
    GjrGarchParams p;
    p.omega = std::exp(u[0]);
    const double pi = sigmoid(u[1]) * 0.9999;
    const double e1 = std::exp(u[2]);
    const double e2 = std::exp(u[3]);
    const double denom = e1 + e2 + 1.0;
    p.alpha_arch = pi * e1 / denom;
    p.gamma_lev = 2.0 * pi * e2 / denom;
    p.beta_garch = pi * 1.0 / denom;
    p.nu = 2.0 + std::exp(u[4]);
    return p;
  }

  static std::array<double, 5> encode(const GjrGarchParams& p) {
    const double pi =
        std::clamp(p.persistence(), 1e-8, 0.9998) / 0.9999;
    const double w1 = std::max(p.alpha_arch / (0.9999 * pi), 1e-10);
    const double w2 = std::max(p.gamma_lev / 2.0 / (0.9999 * pi), 1e-10);
    const double w3 = std::max(p.beta_garch / (0.9999 * pi), 1e-10);
    return {std::log(p.omega), logit(std::clamp(pi, 1e-8, 1.0 - 1e-8)),
            std::log(w1 / w3), std::log(w2 / w3),
            std::log(std::max(p.nu - 2.0, 1e-8))};
  }
};

// Negative log-likelihood of the zero-mean GJR recursion with
// unit-variance Student-t innovations; variance seeded at the sample
// variance of the series.
double gjr_nll(const GjrGarchParams& p, std::span<const double> r,
               double seed_variance) {
  const int n = static_cast<int>(r.size());
  const double c2 = (p.nu - 2.0) / p.nu;  // scale^2 of the standardized t
  const double log_norm = std::lgamma((p.nu + 1.0) / 2.0) -
                          std::lgamma(p.nu / 2.0) -
                          0.5 * std::log(p.nu * M_PI) - 0.5 * std::log(c2);
  double variance = seed_variance;
  double nll = 0.0;
  for (int t = 0; t < n; ++t) {
    if (t > 0) {
      const double prev = r[t - 1];
      variance = p.omega +
                 (p.alpha_arch + (prev < 0.0 ? p.gamma_lev : 0.0)) * prev *
                     prev +
                 p.beta_garch * variance;
    }
    if (!(variance > 0.0) || !std::isfinite(variance))
      return std::numeric_limits<double>::infinity();
    const double z2 = r[t] * r[t] / (variance * c2);
    nll -= log_norm - 0.5 * std::log(variance) -
           (p.nu + 1.0) / 2.0 * std::log1p(z2 / p.nu);
  }
  return std::isfinite(nll) ? nll
                            : std::numeric_limits<double>::infinity();
}

// Plain Nelder-Mead with a deterministic initial simplex.
struct SimplexResult {
  std::array<double, 5> x;
  double f;
  bool converged;
};

SimplexResult nelder_mead(const std::function<double(const double*)>& fn,
                          std::array<double, 5> x0, double step,
                          int max_iter) {
  constexpr int kDim = 5;
  struct Vertex {
    std::array<double, kDim> x;
    double f;
  };
  std::vector<Vertex> simplex(kDim + 1);
  simplex[0] = {x0, fn(x0.data())};
  for (int i = 0; i < kDim; ++i) {
    auto x = x0;
    x[i] += step;
    simplex[i + 1] = {x, fn(x.data())};
  }

  auto order = [&simplex] {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  order();

  bool converged = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (std::fabs(simplex.back().f - simplex.front().f) <
        1e-10 * (1.0 + std::fabs(simplex.front().f))) {
      converged = true;
      break;
    }
    std::array<double, kDim> centroid{};
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) centroid[j] += simplex[i].x[j] / kDim;

    auto blend = [&centroid](const std::array<double, kDim>& far,
                             double coef) {
      std::array<double, kDim> out;
      for (int j = 0; j < kDim; ++j)
        out[j] = centroid[j] + coef * (centroid[j] - far[j]);
      return out;
    };

    const auto xr = blend(simplex.back().x, 1.0);
    const double fr = fn(xr.data());
    if (fr < simplex.front().f) {
      const auto xe = blend(simplex.back().x, 2.0);
      const double fe = fn(xe.data());
      simplex.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < simplex[kDim - 1].f) {
      simplex.back() = {xr, fr};
    } else {
      const auto xc = blend(simplex.back().x, -0.5);
      const double fc = fn(xc.data());
      if (fc < simplex.back().f) {
        simplex.back() = {xc, fc};
      } else {
        for (int i = 1; i <= kDim; ++i) {
          for (int j = 0; j < kDim; ++j)
            simplex[i].x[j] =
                simplex[0].x[j] + 0.5 * (simplex[i].x[j] - simplex[0].x[j]);
          simplex[i].f = fn(simplex[i].x.data());
        }
      }
    }
    order();
  }
  return {simplex.front().x, simplex.front().f, converged};
}

}  // namespace

GjrGarchParams fit_gjr_garch(std::span<const double> returns) {
  if (static_cast<int>(returns.size()) < 250) {
    GjrGarchParams p;
    p.converged = false;
    return p;
  }
  double sample_var = 0.0;
  {
    const double m = mean(returns);
    for (double r : returns) sample_var += (r - m) * (r - m);
    sample_var /= std::max<std::size_t>(returns.size() - 1, 1);
  }
  if (!(sample_var > 0.0)) {
    GjrGarchParams p;
    p.omega = 1e-12;
    p.converged = false;
    return p;
  }

  GjrGarchParams init;
  init.omega = 0.1 * sample_var * (1.0 - 0.9);
  init.alpha_arch = 0.05;
  init.gamma_lev = 0.05;
  init.beta_garch = 0.85;
  init.nu = 8.0;

  const auto objective = [&](const double* u) {
    return gjr_nll(ParamMap::decode(u), returns, sample_var);
  };

  auto x = ParamMap::encode(init);
  if (!std::isfinite(objective(x.data()))) {
    init.converged = false;
    return init;
  }

  // a coarse pass then a fine restart from the incumbent
  SimplexResult best = nelder_mead(objective, x, 0.5, 2000);
  SimplexResult refined = nelder_mead(objective, best.x, 0.1, 2000);
  if (refined.f <= best.f) best = refined;

  if (!std::isfinite(best.f)) {
    init.converged = false;
    return init;
  }
  GjrGarchParams fitted = ParamMap::decode(best.x.data());
  fitted.converged = best.converged;
  return fitted;
}

GarchState garch_step(const GjrGarchParams& params, const GarchState& state,
                      double observed_return) {
  GarchState next;
  next.variance =
      params.omega +
      (params.alpha_arch + (observed_return < 0.0 ? params.gamma_lev : 0.0)) *
          observed_return * observed_return +
      params.beta_garch * state.variance;
  return next;
}

double garch_var(const GjrGarchParams& params, const GarchState& state,
                 double alpha) {
  const double sigma = std::sqrt(std::max(state.variance, 0.0));
  if (sigma == 0.0) return 0.0;
  return sigma * student_t_quantile(alpha, params.nu) *
         std::sqrt((params.nu - 2.0) / params.nu);
}

std::vector<double> simulate_gjr_garch(const GjrGarchParams& params, int n,
                                       std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  const double t_scale = std::sqrt((params.nu - 2.0) / params.nu);
  const double stationary =
      params.omega / std::max(1.0 - params.persistence(), 1e-6);
  double variance = stationary > 0.0 ? stationary : params.omega;
  double prev = 0.0;
  for (int t = 0; t < n; ++t) {
    if (t > 0) {
      variance = params.omega +
                 (params.alpha_arch + (prev < 0.0 ? params.gamma_lev : 0.0)) *
                     prev * prev +
                 params.beta_garch * variance;
    }
    const double r =
        std::sqrt(variance) * t_scale * rng.student_t(params.nu);
    out[t] = r;
    prev = r;
  }
  return out;
}

}  // namespace tailmon
