#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tailmon {

/// Gaussian 5% lower-tail threshold used by the EWMA-normal benchmark.
inline constexpr double kEwmaNormalMultiplier = -1.64485;

/// Empirical alpha-quantile of exactly the trailing `window` returns.
/// Returns nullopt when fewer than `window` observations are available
/// (the caller decides policy).
std::optional<double> hist_var(std::span<const double> trailing_returns,
                               int window, double alpha);

/// EWMA-normal VaR: -1.64485 * sigma_ewma. Unavailable if the volatility
/// feature is missing.
std::optional<double> ewma_var(std::optional<double> ewma_vol);

struct GjrGarchParams {
  double omega = 0.0;       // > 0
  double alpha_arch = 0.0;  // >= 0
  double gamma_lev = 0.0;   // >= 0
  double beta_garch = 0.0;  // >= 0
  double nu = 8.0;          // > 2
  bool converged = true;

  double persistence() const {
    return alpha_arch + gamma_lev / 2.0 + beta_garch;
  }
};

struct GarchState {
  double variance = 0.0;  // strictly positive conditional variance
};

/// Zero-mean GJR-GARCH(1,1) with unit-variance Student-t innovations,
/// fitted by maximum likelihood over an unconstrained reparameterization
/// (positivity, the stationarity simplex, and nu > 2 hold by construction)
/// using a derivative-free simplex search from a fixed starting point.
/// Never throws on non-convergence: the start point is returned with
/// converged = false. Requires at least 250 returns.
GjrGarchParams fit_gjr_garch(std::span<const double> returns);

/// One application of the variance recursion given the observed return.
GarchState garch_step(const GjrGarchParams& params, const GarchState& state,
                      double observed_return);

/// One-step VaR from the already-stepped state:
/// sigma * t_inv_nu(alpha) * sqrt((nu-2)/nu).
double garch_var(const GjrGarchParams& params, const GarchState& state,
                 double alpha);

/// Simulate the process (test oracles and recovery checks).
std::vector<double> simulate_gjr_garch(const GjrGarchParams& params, int n,
                                       std::uint64_t seed);

}  // namespace tailmon
