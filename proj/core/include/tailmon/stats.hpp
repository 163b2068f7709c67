#pragma once

#include <span>
#include <vector>

namespace tailmon {

double mean(std::span<const double> xs);

/// Sample standard deviation (n-1 denominator). Returns 0 for n < 2.
double sample_sd(std::span<const double> xs);

/// Empirical quantile with linear interpolation between order statistics
/// at rank 1 + alpha*(n-1). Throws std::invalid_argument on an empty list.
/// This is the single quantile operator used across the whole service;
/// alternate rank rules are a one-line swap here.
double empirical_quantile(std::span<const double> values, double alpha);

/// Pinball (quantile) loss: alpha*(y-q) if y >= q, else (1-alpha)*(q-y).
double pinball_loss(double y, double q, double alpha);

// --- distribution helpers ------------------------------------------------

double norm_cdf(double z);
double norm_quantile(double p);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double x, double nu);
double student_t_quantile(double p, double nu);

/// Chi-square(1) upper-tail probability, via the complementary error
/// function: sf(x) = erfc(sqrt(x/2)).
double chi_square1_sf(double x);

}  // namespace tailmon
