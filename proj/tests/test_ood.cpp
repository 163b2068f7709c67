#include <cmath>
#include <vector>

#include <doctest.h>

#include "tailmon/ood.hpp"
#include "tailmon/rng.hpp"

using namespace tailmon;

TEST_CASE("a row at the feature mean has distance zero") {
  std::vector<std::vector<double>> rows;
  Rng rng(4);
  for (int i = 0; i < 500; ++i)
    rows.push_back({1.0 + rng.normal(), -2.0 + 2.0 * rng.normal()});
  const OodModel model = fit_ood(rows);
  REQUIRE_FALSE(model.degenerate);
  // mean of the training rows
  double m0 = 0.0, m1 = 0.0;
  for (const auto& r : rows) {
    m0 += r[0];
    m1 += r[1];
  }
  m0 /= rows.size();
  m1 /= rows.size();
  CHECK(model.distance({m0, m1}) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("at most 5% + 1/n of training rows exceed d_ref") {
  std::vector<std::vector<double>> rows;
  Rng rng(5);
  for (int i = 0; i < 400; ++i)
    rows.push_back({rng.normal(), rng.normal(), rng.normal()});
  const OodModel model = fit_ood(rows);
  int above = 0;
  for (const auto& r : rows) above += model.distance(r) > model.d_ref ? 1 : 0;
  CHECK(static_cast<double>(above) / rows.size() <= 0.05 + 1.0 / rows.size());
}

TEST_CASE("isotropic 2d gaussian: d_ref matches the chi-square quantile") {
  // chi2_2 has closed-form quantile -2 ln(1-p); at p=0.95 that is 5.9915
  std::vector<std::vector<double>> rows;
  Rng rng(6);
  for (int i = 0; i < 10000; ++i) rows.push_back({rng.normal(), rng.normal()});
  const OodModel model = fit_ood(rows);
  const double analytic = std::sqrt(-2.0 * std::log(0.05));
  CHECK(analytic == doctest::Approx(2.4477).epsilon(1e-4));
  CHECK(std::fabs(model.d_ref - analytic) / analytic < 0.05);
}

TEST_CASE("retained components are orthonormal") {
  std::vector<std::vector<double>> rows;
  Rng rng(7);
  for (int i = 0; i < 600; ++i) {
    const double a = rng.normal(), b = rng.normal(), c = rng.normal();
    rows.push_back({a, 0.5 * a + b, c, a - c, 3.0 * b});
  }
  const OodModel model = fit_ood(rows);
  REQUIRE_FALSE(model.components.empty());
  for (std::size_t i = 0; i < model.components.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < model.components[i].size(); ++k)
        dot += model.components[i][k] * model.components[j][k];
      CHECK(std::fabs(dot - (i == j ? 1.0 : 0.0)) < 1e-8);
    }
  }
}

TEST_CASE("identical training rows are a flagged degenerate case") {
  std::vector<std::vector<double>> rows(50, std::vector<double>{1.0, 2.0});
  const OodModel model = fit_ood(rows);
  CHECK(model.degenerate);
  CHECK(model.d_ref == 1.0);
  CHECK(model.distance({5.0, -3.0}) == 0.0);
  CHECK(ood_score(model, {5.0, -3.0}) == 0.0);
}

TEST_CASE("ood score formula") {
  OodModel model;
  model.kept = {0};
  model.means = {0.0};
  model.sds = {1.0};
  model.components = {{1.0}};
  model.variances = {1.0};
  model.d_ref = 2.0;
  // distance(x) = |x| here
  CHECK(ood_score(model, {2.0}) == doctest::Approx(0.0));          // d = d_ref
  CHECK(ood_score(model, {5.0}) == doctest::Approx(1.0));          // 2.5x
  CHECK(ood_score(model, {3.5}) == doctest::Approx(0.5));          // 1.75x
  CHECK(ood_score(model, {1.0}) == 0.0);                           // below ref
}

TEST_CASE("ood score is non-decreasing in the distance") {
  std::vector<std::vector<double>> rows;
  Rng rng(8);
  for (int i = 0; i < 300; ++i) rows.push_back({rng.normal(), rng.normal()});
  const OodModel model = fit_ood(rows);
  double prev_score = -1.0;
  for (double radius = 0.0; radius < 12.0; radius += 0.25) {
    const double score = ood_score(model, {radius, radius});
    CHECK(score >= prev_score - 1e-12);
    CHECK(score >= 0.0);
    CHECK(score <= 1.0);
    prev_score = score;
  }
}

TEST_CASE("fit_ood requires two rows") {
  CHECK_THROWS(fit_ood({{1.0}}));
}
