#include "tailmon/features.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "tailmon/stats.hpp"

namespace tailmon {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double opt_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

// Rolling full-window moments over an optional-valued series. The window
// includes the current day and requires every observation present.
struct RollingWindow {
  explicit RollingWindow(int size) : size_(size) {}

  void push(std::optional<double> v) {
    buf_.push_back(v);
    if (static_cast<int>(buf_.size()) > size_) buf_.pop_front();
  }

  bool full() const {
    if (static_cast<int>(buf_.size()) < size_) return false;
    return std::all_of(buf_.begin(), buf_.end(),
                       [](const auto& v) { return v.has_value(); });
  }

  std::vector<double> values() const {
    std::vector<double> out;
    out.reserve(buf_.size());
    for (const auto& v : buf_)
      if (v) out.push_back(*v);
    return out;
  }

 private:
  int size_;
  std::deque<std::optional<double>> buf_;
};

// z-score of the latest observation against its own trailing window
// (window includes day t; sd = 0 => z defined as 0).
std::optional<double> window_z(const RollingWindow& w,
                               std::optional<double> current) {
  if (!current || !w.full()) return std::nullopt;
  const auto vals = w.values();
  const double m = mean(vals);
  const double sd = sample_sd(vals);
  if (sd == 0.0) return 0.0;
  return (*current - m) / sd;
}

std::optional<double> positive_log_ratio(std::optional<double> num,
                                         std::optional<double> den) {
  if (!num || !den) return std::nullopt;
  if (*num <= 0.0 || *den <= 0.0) return std::nullopt;
  return std::log(*num / *den);
}

}  // namespace

FeatureSeries compute_features(const PanelDataset& panel,
                               const FeatureParams& params) {
  const int n_sym = panel.n_symbols();
  const int n_dates = panel.n_dates();
  FeatureSeries series;
  series.rows.assign(n_sym, std::vector<FeatureRow>(n_dates));

  for (int s = 0; s < n_sym; ++s) {
    double ewma_var = 0.0;
    std::optional<double> prev_ret;
    std::optional<double> cum_peak;
    RollingWindow ret_window(params.roll_vol_window);
    RollingWindow zr_window(params.z_return_window);
    RollingWindow zv_window(params.z_volume_window);
    std::deque<double> recent_returns;  // present values only, for the
                                        // scale fallback

    for (int d = 0; d < n_dates; ++d) {
      FeatureRow& row = series.rows[s][d];
      row.symbol = panel.symbols[s];
      row.date = panel.dates[d];
      row.symbol_index = s;
      row.date_index = d;

      const std::optional<Bar>& bar = panel.bars[s][d];
      if (bar) {
        row.open = bar->open;
        row.high = bar->high;
        row.low = bar->low;
        row.close = bar->close;
        row.volume = bar->volume;
        row.ret = bar->ret;
      }

      // EWMA variance recursion v_t = lambda*v_{t-1} + (1-lambda)*r_{t-1}^2;
      // a missing prior return leaves the estimate unchanged.
      if (d > 0 && prev_ret) {
        ewma_var = params.ewma_lambda * ewma_var +
                   (1.0 - params.ewma_lambda) * (*prev_ret) * (*prev_ret);
      }
      row.ewma_vol = std::sqrt(ewma_var);

      if (auto hl = positive_log_ratio(row.high, row.low)) {
        row.parkinson_vol = std::sqrt((*hl) * (*hl) / (4.0 * std::log(2.0)));
        if (auto co = positive_log_ratio(row.close, row.open)) {
          const double gk = 0.5 * (*hl) * (*hl) -
                            (2.0 * std::log(2.0) - 1.0) * (*co) * (*co);
          row.garman_klass_vol = std::sqrt(std::max(gk, 0.0));
        }
      }

      if (row.close && *row.close > 0.0) {
        cum_peak = cum_peak ? std::max(*cum_peak, *row.close) : *row.close;
      }
      row.cum_peak = cum_peak;
      if (row.close && cum_peak && *cum_peak > 0.0)
        row.drawdown = *row.close / *cum_peak - 1.0;

      ret_window.push(row.ret);
      zr_window.push(row.ret);
      zv_window.push(row.volume);
      if (ret_window.full()) {
        const auto vals = ret_window.values();
        row.roll_vol_20 = sample_sd(vals);
      }
      row.z_return_60 = window_z(zr_window, row.ret);
      row.z_volume_20 = window_z(zv_window, row.volume);

      if (row.ret) {
        recent_returns.push_back(*row.ret);
        if (static_cast<int>(recent_returns.size()) > params.roll_vol_window)
          recent_returns.pop_front();
      }

      // Local volatility reference: the rolling-volatility feature when
      // computable, else the sd of the most recent present returns.
      double scale = 0.0;
      if (row.roll_vol_20) {
        scale = *row.roll_vol_20;
      } else if (recent_returns.size() >= 5) {
        std::vector<double> vals(recent_returns.begin(), recent_returns.end());
        scale = sample_sd(vals);
      }
      row.scale_s = std::max(scale, params.scale_floor);

      prev_ret = row.ret;
    }
  }

  // Date-level cross-asset aggregates: equal-weighted cross-sectional means
  // over the symbols present that day. Single pass after per-symbol work.
  for (int d = 0; d < n_dates; ++d) {
    std::vector<double> rets;
    std::vector<double> vols;
    for (int s = 0; s < n_sym; ++s) {
      const FeatureRow& row = series.rows[s][d];
      if (row.ret) rets.push_back(*row.ret);
      if (row.roll_vol_20) vols.push_back(*row.roll_vol_20);
    }
    const std::optional<double> cmr =
        rets.empty() ? std::nullopt : std::optional<double>(mean(rets));
    const std::optional<double> cmv =
        vols.empty() ? std::nullopt : std::optional<double>(mean(vols));
    static const MacroSnapshot kEmptyMacro;
    const MacroSnapshot& macro =
        d < static_cast<int>(panel.macro.size()) ? panel.macro[d] : kEmptyMacro;
    std::optional<double> slope;
    const auto y_short = macro.yield("3m");
    const auto y_long = macro.yield("10y");
    if (y_short && y_long) slope = *y_long - *y_short;
    for (int s = 0; s < n_sym; ++s) {
      FeatureRow& row = series.rows[s][d];
      row.cross_mean_return = cmr;
      row.cross_mean_vol20 = cmv;
      row.vix = macro.vix;
      row.yield_slope = slope;
    }
  }

  return series;
}

std::vector<std::string> FeatureSpec::names() const {
  std::vector<std::string> n = {
      "open",          "high",
      "low",           "close",
      "volume",        "return",
      "ewma_vol",      "parkinson_vol",
      "garman_klass_vol", "roll_vol_20",
      "cum_peak",      "drawdown",
      "z_return_60",   "z_volume_20",
      "cross_mean_return", "cross_mean_vol20",
      "vix",           "yield_slope",
      "scale_s"};
  if (include_quality) n.push_back("quality_q");
  for (const auto& s : symbols) n.push_back("sym_" + s);
  return n;
}

std::vector<double> FeatureSpec::vectorize(const FeatureRow& row) const {
  std::vector<double> x;
  x.reserve(19 + 1 + symbols.size());
  x.push_back(opt_or_nan(row.open));
  x.push_back(opt_or_nan(row.high));
  x.push_back(opt_or_nan(row.low));
  x.push_back(opt_or_nan(row.close));
  x.push_back(opt_or_nan(row.volume));
  x.push_back(opt_or_nan(row.ret));
  x.push_back(opt_or_nan(row.ewma_vol));
  x.push_back(opt_or_nan(row.parkinson_vol));
  x.push_back(opt_or_nan(row.garman_klass_vol));
  x.push_back(opt_or_nan(row.roll_vol_20));
  x.push_back(opt_or_nan(row.cum_peak));
  x.push_back(opt_or_nan(row.drawdown));
  x.push_back(opt_or_nan(row.z_return_60));
  x.push_back(opt_or_nan(row.z_volume_20));
  x.push_back(opt_or_nan(row.cross_mean_return));
  x.push_back(opt_or_nan(row.cross_mean_vol20));
  x.push_back(opt_or_nan(row.vix));
  x.push_back(opt_or_nan(row.yield_slope));
  x.push_back(row.scale_s);
  if (include_quality) x.push_back(opt_or_nan(row.quality_q));
  for (const auto& s : symbols) x.push_back(row.symbol == s ? 1.0 : 0.0);
  return x;
}

std::vector<double> column_medians(
    const std::vector<std::vector<double>>& x) {
  if (x.empty()) return {};
  const std::size_t cols = x[0].size();
  std::vector<double> medians(cols, 0.0);
  std::vector<double> col;
  for (std::size_t j = 0; j < cols; ++j) {
    col.clear();
    for (const auto& row : x)
      if (!std::isnan(row[j])) col.push_back(row[j]);
    medians[j] = col.empty() ? 0.0 : empirical_quantile(col, 0.5);
  }
  return medians;
}

std::vector<double> impute_with_medians(std::vector<double> x,
                                        const std::vector<double>& medians) {
  for (std::size_t j = 0; j < x.size() && j < medians.size(); ++j)
    if (std::isnan(x[j])) x[j] = medians[j];
  return x;
}

}  // namespace tailmon
