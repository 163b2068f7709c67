#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "tailmon/safe_output.hpp"

using namespace tailmon;

TEST_CASE("adjustment formula") {
  CHECK(adjustment(0.02, 0.0, 0.0) == 0.0);
  CHECK(adjustment(0.02, 0.4, 0.2) == doctest::Approx(0.008));
  CHECK(adjustment(0.02, 1.0, 1.0) == doctest::Approx(1.25 * 0.02));
}

TEST_CASE("safe var picks the lower of anchor and adjusted forecast") {
  CHECK(safe_var(-0.02, -0.015, 0.0) == doctest::Approx(-0.02));
  CHECK(safe_var(-0.01, -0.03, 0.002) == doctest::Approx(-0.03));
  CHECK(safe_var(-0.02, -0.025, 0.008) == doctest::Approx(-0.028));
}

TEST_CASE("missing anchor falls back to the adjusted forecast with a flag") {
  bool missing = false;
  CHECK(safe_var(-0.02, std::nullopt, 0.004, &missing) ==
        doctest::Approx(-0.024));
  CHECK(missing);
  safe_var(-0.02, -0.05, 0.004, &missing);
  CHECK_FALSE(missing);
}

TEST_CASE("fallback ratio") {
  CHECK(fallback_ratio(-0.02, -0.02, 0.02) == 0.0);
  CHECK(fallback_ratio(-0.02, -0.028, 0.02) == doctest::Approx(0.4));
}

TEST_CASE("alert rules") {
  // quality red alone is red
  CHECK(alert_level(QualityState::Red, UncertaintyLabel::Low, 0.0, 0.0) ==
        AlertLevel::Red);
  // drift at the orange trigger
  CHECK(alert_level(QualityState::Green, UncertaintyLabel::Low, 0.5, 0.0) ==
        AlertLevel::Orange);
  // all quiet
  CHECK(alert_level(QualityState::Green, UncertaintyLabel::Low, 0.0, 0.0) ==
        AlertLevel::Green);
  // ratio at the red trigger
  CHECK(alert_level(QualityState::Green, UncertaintyLabel::Low, 0.0, 0.75) ==
        AlertLevel::Red);
  // label contributions
  CHECK(alert_level(QualityState::Green, UncertaintyLabel::Medium, 0.0, 0.0) ==
        AlertLevel::Orange);
  CHECK(alert_level(QualityState::Green, UncertaintyLabel::High, 0.0, 0.0) ==
        AlertLevel::Red);
  // disabled quality input cannot escalate
  CHECK(alert_level(std::nullopt, UncertaintyLabel::Low, 0.0, 0.0) ==
        AlertLevel::Green);
  CHECK(alert_level(QualityState::Yellow, UncertaintyLabel::Low, 0.0, 0.0) ==
        AlertLevel::Orange);
}

namespace {

int alert_rank(AlertLevel a) { return static_cast<int>(a); }

}  // namespace

TEST_CASE("safe-output property fuzz") {
  std::mt19937_64 gen(2718);
  std::uniform_real_distribution<double> q_dist(-0.10, 0.0);
  std::uniform_real_distribution<double> s_dist(1e-4, 0.05);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const double q_cal = q_dist(gen);
    const double q_hist = q_dist(gen);
    const double s = s_dist(gen);
    const double u = u01(gen);
    const double q = u01(gen);
    const bool have_anchor = u01(gen) < 0.9;
    const std::optional<double> anchor =
        have_anchor ? std::optional<double>(q_hist) : std::nullopt;

    const double a = adjustment(s, u, q);
    CHECK(a >= 0.0);
    const double q_safe = safe_var(q_cal, anchor, a);
    CHECK(q_safe <= q_cal);
    if (anchor) CHECK(q_safe <= *anchor);
    const double r = fallback_ratio(q_cal, q_safe, s);
    CHECK(r >= 0.0);

    // conservatism monotonicity in U and in Q
    const double up_u = u01(gen) * (1.0 - u) + u;
    CHECK(safe_var(q_cal, anchor, adjustment(s, up_u, q)) <= q_safe + 1e-15);
    const double up_q = u01(gen) * (1.0 - q) + q;
    CHECK(safe_var(q_cal, anchor, adjustment(s, u, up_q)) <= q_safe + 1e-15);

    // equality with the calibrated forecast only when nothing binds
    if (a == 0.0 && (!anchor || *anchor >= q_cal))
      CHECK(q_safe == q_cal);
  }
}

TEST_CASE("alert level is monotone under pointwise-worse inputs") {
  const QualityState q_states[] = {QualityState::Green, QualityState::Yellow,
                                   QualityState::Red};
  const UncertaintyLabel labels[] = {UncertaintyLabel::Low,
                                     UncertaintyLabel::Medium,
                                     UncertaintyLabel::High};
  const double drifts[] = {0.0, 0.49, 0.5, 0.99, 1.0};
  const double ratios[] = {0.0, 0.34, 0.35, 0.74, 0.75};
  for (int qi = 0; qi < 3; ++qi)
    for (int li = 0; li < 3; ++li)
      for (int di = 0; di < 5; ++di)
        for (int ri = 0; ri < 5; ++ri) {
          const AlertLevel base = alert_level(q_states[qi], labels[li],
                                              drifts[di], ratios[ri]);
          // worsen each input one notch where possible
          if (qi < 2)
            CHECK(alert_rank(alert_level(q_states[qi + 1], labels[li],
                                         drifts[di], ratios[ri])) >=
                  alert_rank(base));
          if (li < 2)
            CHECK(alert_rank(alert_level(q_states[qi], labels[li + 1],
                                         drifts[di], ratios[ri])) >=
                  alert_rank(base));
          if (di < 4)
            CHECK(alert_rank(alert_level(q_states[qi], labels[li],
                                         drifts[di + 1], ratios[ri])) >=
                  alert_rank(base));
          if (ri < 4)
            CHECK(alert_rank(alert_level(q_states[qi], labels[li], drifts[di],
                                         ratios[ri + 1])) >= alert_rank(base));
        }
}

TEST_CASE("ablation variants reduce to the documented formulas") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> q_dist(-0.08, 0.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double q_cal = q_dist(gen);
    const double anchor = q_dist(gen);
    const double s = 0.001 + 0.03 * u01(gen);
    const double u = u01(gen);
    const double q = u01(gen);

    // simple fallback: adjustment forced to zero
    CHECK(safe_var(q_cal, anchor, adjustment(s, 0.0, 0.0)) ==
          std::min(anchor, q_cal));
    // quality-only: A = s * 0.50 * Q
    CHECK(safe_var(q_cal, anchor, adjustment(s, 0.0, q)) ==
          doctest::Approx(std::min(anchor, q_cal - s * 0.50 * q)));
    // uncertainty-only: A = s * 0.75 * U
    CHECK(safe_var(q_cal, anchor, adjustment(s, u, 0.0)) ==
          doctest::Approx(std::min(anchor, q_cal - s * 0.75 * u)));
  }
}
