#include "tailmon/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "tailmon/rng.hpp"
#include "tailmon/stats.hpp"

namespace tailmon {

namespace {

// Sequential weekdays from a fixed epoch, civil-date arithmetic only.
struct CivilDate {
  int y, m, d;
};

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int k[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return k[m - 1];
}

CivilDate next_day(CivilDate c) {
  ++c.d;
  if (c.d > days_in_month(c.y, c.m)) {
    c.d = 1;
    ++c.m;
    if (c.m > 12) {
      c.m = 1;
      ++c.y;
    }
  }
  return c;
}

// Day of week via Sakamoto; 0 = Sunday.
int day_of_week(const CivilDate& c) {
  static const int t[] = {0, 3, 2, 5, 0, 3, 5, 1, 4, 6, 2, 4};
  int y = c.y;
  if (c.m < 3) y -= 1;
  return (y + y / 4 - y / 100 + y / 400 + t[c.m - 1] + c.d) % 7;
}

std::string format_date(const CivilDate& c) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", c.y, c.m, c.d);
  return buf;
}

std::vector<std::string> trading_calendar(int n_days) {
  std::vector<std::string> dates;
  dates.reserve(n_days);
  CivilDate c{2016, 1, 4};  // a Monday
  while (static_cast<int>(dates.size()) < n_days) {
    const int dow = day_of_week(c);
    if (dow != 0 && dow != 6) dates.push_back(format_date(c));
    c = next_day(c);
  }
  return dates;
}

}  // namespace

PanelDataset generate_synthetic_panel(
    int n_symbols, int n_days, std::uint64_t seed,
    const std::vector<std::string>& symbol_names) {
  if (n_symbols < 1) throw std::invalid_argument("n_symbols must be >= 1");
  if (n_days < 2) throw std::invalid_argument("n_days must be >= 2");

  PanelDataset panel;
  panel.dates = trading_calendar(n_days);
  for (int s = 0; s < n_symbols; ++s) {
    if (s < static_cast<int>(symbol_names.size()) &&
        !symbol_names[s].empty()) {
      panel.symbols.push_back(symbol_names[s]);
    } else {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "SYM%02d", s);
      panel.symbols.push_back(buf);
    }
  }
  panel.bars.assign(n_symbols, std::vector<std::optional<Bar>>(n_days));
  panel.macro.resize(n_days);
  for (int d = 0; d < n_days; ++d) panel.macro[d].date = panel.dates[d];

  // Market-wide volatility-regime chain: occasional stressed stretches that
  // scale every symbol's conditional volatility.
  Rng regime_rng(derive_stream_key(seed, 0xE61, 0));
  std::vector<double> regime(n_days, 1.0);
  {
    bool stressed = false;
    for (int d = 0; d < n_days; ++d) {
      const double u = regime_rng.uniform01();
      if (!stressed && u < 0.010) stressed = true;
      else if (stressed && u < 0.060) stressed = false;
      regime[d] = stressed ? 2.2 : 1.0;
    }
  }

  std::vector<std::vector<double>> returns(n_symbols,
                                           std::vector<double>(n_days, 0.0));
  for (int s = 0; s < n_symbols; ++s) {
    Rng rng(derive_stream_key(seed, 1, static_cast<std::uint64_t>(s)));

    // Mildly heterogeneous GJR parameters per symbol.
    const double target_vol = 0.008 + 0.0035 * (s % 4);
    const double a_arch = 0.04 + 0.01 * (s % 3);
    const double g_lev = 0.06 + 0.02 * (s % 2);
    const double b_garch = 0.87;
    const double nu = 6.0 + 2.0 * (s % 3);
    const double persistence = a_arch + g_lev / 2.0 + b_garch;
    const double omega = target_vol * target_vol * (1.0 - persistence);
    const double t_scale = std::sqrt((nu - 2.0) / nu);

    double variance = target_vol * target_vol;
    double prev_close = 40.0 + 15.0 * s;
    double prev_ret = 0.0;

    for (int d = 0; d < n_days; ++d) {
      if (d > 0) {
        variance = omega +
                   (a_arch + (prev_ret < 0.0 ? g_lev : 0.0)) * prev_ret *
                       prev_ret +
                   b_garch * variance;
      }
      // The regime multiplier scales the observed return only; the base
      // process feeds the recursion so the chain stays stationary.
      const double base = std::sqrt(variance) * t_scale * rng.student_t(nu);
      const double sigma = std::sqrt(variance) * regime[d];
      double r = std::clamp(base * regime[d], -0.5, 0.5);

      Bar bar;
      bar.symbol = panel.symbols[s];
      bar.date = panel.dates[d];
      const double close = d == 0 ? prev_close : prev_close * (1.0 + r);
      const double open_gap = 0.3 * sigma * rng.normal();
      const double open = prev_close * (1.0 + std::clamp(open_gap, -0.2, 0.2));
      const double hi_ext =
          std::min(0.9, std::fabs(0.6 * sigma * rng.normal()));
      const double lo_ext =
          std::min(0.9, std::fabs(0.6 * sigma * rng.normal()));
      bar.open = open;
      bar.close = close;
      bar.high = std::max(open, close) * (1.0 + hi_ext);
      bar.low = std::min(open, close) * (1.0 - lo_ext);
      const double vol_base = 1.0e6 * (1.0 + s);
      bar.volume = std::floor(vol_base * std::exp(0.4 * rng.normal()) *
                              (1.0 + 20.0 * std::fabs(r)));
      if (d > 0) bar.ret = close / prev_close - 1.0;

      const double realized = d == 0 ? 0.0 : close / prev_close - 1.0;
      panel.bars[s][d] = std::move(bar);
      returns[s][d] = realized;
      prev_ret = d == 0 ? 0.0 : base;
      prev_close = close;
    }
  }

  // VIX proxy: annualized cross-sectional mean 20-day return volatility.
  // A small deterministic fraction of macro days is left missing so
  // downstream code exercises the auxiliary-input gaps.
  Rng macro_rng(derive_stream_key(seed, 2, 0));
  double y3m = 2.0;
  double slope = 1.0;
  constexpr int kVolWindow = 20;
  for (int d = 0; d < n_days; ++d) {
    MacroSnapshot& m = panel.macro[d];
    if (d >= kVolWindow) {
      double acc = 0.0;
      for (int s = 0; s < n_symbols; ++s) {
        std::vector<double> window(returns[s].begin() + (d - kVolWindow + 1),
                                   returns[s].begin() + (d + 1));
        acc += sample_sd(window);
      }
      const double vix = 100.0 * std::sqrt(252.0) * acc / n_symbols;
      if (macro_rng.uniform01() >= 0.03) m.vix = vix;
    } else {
      macro_rng.uniform01();
    }
    y3m = 2.0 + 0.98 * (y3m - 2.0) + 0.02 * macro_rng.normal();
    slope = 1.0 + 0.97 * (slope - 1.0) + 0.03 * macro_rng.normal();
    if (macro_rng.uniform01() >= 0.08) {
      m.yields["3m"] = y3m;
      m.yields["10y"] = y3m + slope;
    }
  }

  return panel;
}

}  // namespace tailmon
