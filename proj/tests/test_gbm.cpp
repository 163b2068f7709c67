#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "tailmon/gbm.hpp"
#include "tailmon/rng.hpp"

using namespace tailmon;

TEST_CASE("constant target degeneracy: every prediction equals the target") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> rows(600);
  std::vector<double> y(600, -0.02);
  for (auto& r : rows) r = {u(gen), u(gen), u(gen)};
  const QuantileGbm model = QuantileGbm::fit(rows, y, 0.05, GbmParams{});
  for (int i = 0; i < 50; ++i)
    CHECK(model.predict(rows[i]) == doctest::Approx(-0.02).epsilon(1e-6));
}

TEST_CASE("fitting is deterministic") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> rows(800);
  std::vector<double> y(800);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = {u(gen), u(gen)};
    y[i] = rows[i][0] + 0.1 * u(gen);
  }
  const QuantileGbm a = QuantileGbm::fit(rows, y, 0.05, GbmParams{});
  const QuantileGbm b = QuantileGbm::fit(rows, y, 0.05, GbmParams{});
  const std::vector<double> probe = {0.3, -0.7};
  CHECK(a.predict(probe) == b.predict(probe));
}

TEST_CASE("a constant feature is never split on") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> rows(700);
  std::vector<double> y(700);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = {u(gen), 5.0};  // second column constant in training
    y[i] = rows[i][0] + 0.05 * u(gen);
  }
  const QuantileGbm model = QuantileGbm::fit(rows, y, 0.05, GbmParams{});
  // perturbing the unused feature leaves the prediction unchanged
  const double base = model.predict(std::vector<double>{0.2, 5.0});
  CHECK(model.predict(std::vector<double>{0.2, -40.0}) == base);
  CHECK(model.predict(std::vector<double>{0.2, 1e6}) == base);
}

TEST_CASE("heteroskedastic gaussian: fitted 5% quantile tracks -1.64485 sigma(x)") {
  // y ~ N(0, sigma(x)^2), sigma increasing in the first feature; the fitted
  // quantile must decrease along that feature and match the analytic value
  // within 20% relative error on a grid probe (n = 50,000).
  const int n = 50000;
  Rng rng(2024);
  std::vector<std::vector<double>> rows(n);
  std::vector<double> y(n);
  const auto sigma_of = [](double x) { return 0.01 + 0.02 * x; };
  for (int i = 0; i < n; ++i) {
    const double x0 = rng.uniform01();
    const double x1 = rng.uniform01();  // noise feature
    rows[i] = {x0, x1};
    y[i] = sigma_of(x0) * rng.normal();
  }
  const QuantileGbm model = QuantileGbm::fit(rows, y, 0.05, GbmParams{});

  double prev = 1.0;
  for (double x = 0.1; x <= 0.9; x += 0.1) {
    const double pred = model.predict(std::vector<double>{x, 0.5});
    const double analytic = -1.64485 * sigma_of(x);
    CHECK(std::fabs(pred - analytic) / std::fabs(analytic) < 0.20);
    CHECK(pred <= prev + 1e-12);  // monotone non-increasing along sigma(x)
    prev = pred;
  }
}

TEST_CASE("fit rejects malformed inputs") {
  std::vector<std::vector<double>> rows = {{1.0}, {2.0}};
  std::vector<double> y = {0.1};
  CHECK_THROWS(QuantileGbm::fit(rows, y, 0.05, GbmParams{}));
  y = {0.1, std::nan("")};
  rows[0][0] = std::nan("");
  y = {0.1, 0.2};
  CHECK_THROWS(QuantileGbm::fit(rows, y, 0.05, GbmParams{}));
}
