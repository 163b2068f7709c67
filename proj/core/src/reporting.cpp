#include "tailmon/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tailmon {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

QualityState quality_state_from(const std::string& s) {
  if (s == "GREEN") return QualityState::Green;
  if (s == "YELLOW") return QualityState::Yellow;
  return QualityState::Red;
}

UncertaintyState u_state_from(const std::string& s) {
  return s == "LOW" ? UncertaintyState::Low : UncertaintyState::Elevated;
}

UncertaintyLabel u_label_from(const std::string& s) {
  if (s == "LOW") return UncertaintyLabel::Low;
  if (s == "MEDIUM") return UncertaintyLabel::Medium;
  return UncertaintyLabel::High;
}

AlertLevel alert_from(const std::string& s) {
  if (s == "GREEN") return AlertLevel::Green;
  if (s == "ORANGE") return AlertLevel::Orange;
  return AlertLevel::Red;
}

}  // namespace

std::string records_to_csv(const std::vector<BacktestRecord>& records) {
  std::ostringstream os;
  os << "symbol,date,q_raw,q_cal,q_safe,q_hist63,adjustment,ratio,alert,"
        "anchor_missing,"
        "q_miss,q_ohlc,q_jump,q_vol,q_stale,quality_score,quality_state,"
        "u_model,u_ood,u_drift,u_score,u_state,u_label,"
        "var_hist252,var_ewma,var_gjr,scale_s,degraded,"
        "realized_return,evaluable,stress\n";
  for (const auto& r : records) {
    os << r.symbol << ',' << r.date << ',';
    if (r.degraded) {
      os << ",,,";  // q_raw, q_cal, q_safe
      os << fmt(r.safe.q_hist63) << ",,,";
    } else {
      os << fmt(r.q_raw) << ',' << fmt(r.q_cal) << ',' << fmt(r.safe.q_safe)
         << ',' << fmt(r.safe.q_hist63) << ',' << fmt(r.safe.adjustment_a)
         << ',' << fmt(r.safe.ratio_r) << ',';
    }
    os << to_string(r.safe.alert) << ','
       << (r.safe.anchor_missing ? "1" : "0") << ',' << fmt(r.quality.q_miss)
       << ',' << fmt(r.quality.q_ohlc) << ',' << fmt(r.quality.q_jump) << ','
       << fmt(r.quality.q_vol) << ',' << fmt(r.quality.q_stale) << ','
       << fmt(r.quality.score_q) << ',' << to_string(r.quality.state) << ','
       << fmt(r.uncertainty.u_model) << ',' << fmt(r.uncertainty.u_ood) << ','
       << fmt(r.uncertainty.u_drift) << ',' << fmt(r.uncertainty.score_u)
       << ',' << to_string(r.uncertainty.state) << ','
       << to_string(r.uncertainty.label) << ',' << fmt(r.var_hist252) << ','
       << fmt(r.var_ewma) << ',' << fmt(r.var_gjr) << ',' << fmt(r.scale_s)
       << ',' << (r.degraded ? "1" : "0") << ','
       << fmt(r.eval.realized_return) << ',' << (r.eval.evaluable ? "1" : "0")
       << ',' << (r.eval.stress ? "1" : "0") << '\n';
  }
  return os.str();
}

std::vector<BacktestRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw IngestError("records csv: missing header");
  std::vector<BacktestRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split(line, ',');
    if (c.size() < 31) throw IngestError("records csv: short row");
    BacktestRecord r;
    int i = 0;
    r.symbol = c[i++];
    r.date = c[i++];
    const auto q_raw = parse_opt(c[i++]);
    const auto q_cal = parse_opt(c[i++]);
    const auto q_safe = parse_opt(c[i++]);
    r.safe.q_hist63 = parse_opt(c[i++]);
    const auto adjustment = parse_opt(c[i++]);
    const auto ratio = parse_opt(c[i++]);
    r.safe.alert = alert_from(c[i++]);
    r.safe.anchor_missing = c[i++] == "1";
    r.quality.q_miss = parse_opt(c[i++]).value_or(0.0);
    r.quality.q_ohlc = parse_opt(c[i++]).value_or(0.0);
    r.quality.q_jump = parse_opt(c[i++]).value_or(0.0);
    r.quality.q_vol = parse_opt(c[i++]).value_or(0.0);
    r.quality.q_stale = parse_opt(c[i++]).value_or(0.0);
    r.quality.score_q = parse_opt(c[i++]).value_or(0.0);
    r.quality.state = quality_state_from(c[i++]);
    r.uncertainty.u_model = parse_opt(c[i++]).value_or(0.0);
    r.uncertainty.u_ood = parse_opt(c[i++]).value_or(0.0);
    r.uncertainty.u_drift = parse_opt(c[i++]).value_or(0.0);
    r.uncertainty.score_u = parse_opt(c[i++]).value_or(0.0);
    r.uncertainty.state = u_state_from(c[i++]);
    r.uncertainty.label = u_label_from(c[i++]);
    r.var_hist252 = parse_opt(c[i++]);
    r.var_ewma = parse_opt(c[i++]);
    r.var_gjr = parse_opt(c[i++]);
    r.scale_s = parse_opt(c[i++]).value_or(0.0);
    r.degraded = c[i++] == "1";
    r.eval.realized_return = parse_opt(c[i++]);
    r.eval.evaluable = c[i++] == "1";
    r.eval.stress = c[i++] == "1";
    if (!r.degraded) {
      r.q_raw = q_raw.value_or(0.0);
      r.q_cal = q_cal.value_or(0.0);
      r.safe.q_safe = q_safe.value_or(0.0);
      r.safe.adjustment_a = adjustment.value_or(0.0);
      r.safe.ratio_r = ratio.value_or(0.0);
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::string metrics_to_json(const BacktestResult& result,
                            const MetricsTable& metrics,
                            const RunConfig& config) {
  json j;
  j["config"] = config.echo();
  j["records"] = result.records.size();
  j["expected_records"] = result.expected_records;
  j["availability"] = result.availability();
  const AlertCounts alerts = count_alerts(result.records);
  j["alerts"] = {{"green", alerts.green},
                 {"orange", alerts.orange},
                 {"red", alerts.red}};
  int evaluable = 0;
  for (const auto& r : result.records) evaluable += r.eval.evaluable ? 1 : 0;
  j["evaluable"] = evaluable;
  j["warnings"] = result.warnings;
  json rows = json::array();
  for (const auto& row : metrics.rows) {
    json r = {{"method", row.method}, {"slice", row.slice},
              {"count", row.count},   {"breaches", row.breaches},
              {"defined", row.defined}};
    if (row.defined) {
      r["breach_rate"] = row.breach_rate;
      r["kupiec_stat"] = row.kupiec_stat;
      r["kupiec_p"] = row.kupiec_p;
      r["mean_pinball"] = row.mean_pinball;
    }
    rows.push_back(std::move(r));
  }
  j["metrics"] = std::move(rows);
  return j.dump(2);
}

std::string rolling_breach_to_csv(
    const std::vector<RollingBreachPoint>& series) {
  std::ostringstream os;
  os << "date,method,rate\n";
  for (const auto& p : series)
    os << p.date << ',' << p.method << ',' << fmt(p.rate) << '\n';
  return os.str();
}

namespace {

std::string rate_cell(const VariantRates& r) {
  if (!r.defined) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", r.rate);
  return buf;
}

}  // namespace

std::string fallback_table_to_csv(const std::vector<FallbackTableRow>& rows) {
  std::ostringstream os;
  os << "variant,clean_overall,clean_stress,corrupt_overall,corrupt_stress,"
        "clean_overall_n,clean_stress_n,corrupt_overall_n,corrupt_stress_n\n";
  for (const auto& row : rows) {
    os << row.variant << ',' << rate_cell(row.clean_overall) << ','
       << rate_cell(row.clean_stress) << ',' << rate_cell(row.corrupt_overall)
       << ',' << rate_cell(row.corrupt_stress) << ','
       << row.clean_overall.count << ',' << row.clean_stress.count << ','
       << row.corrupt_overall.count << ',' << row.corrupt_stress.count
       << '\n';
  }
  return os.str();
}

std::string quality_table_to_csv(const std::vector<QualityTableRow>& rows) {
  std::ostringstream os;
  os << "experiment,overall,stress,pinball,alerts_green,alerts_orange,"
        "alerts_red\n";
  for (const auto& row : rows) {
    char pinball[32];
    std::snprintf(pinball, sizeof(pinball), "%.6f", row.mean_pinball);
    os << row.experiment << ',' << rate_cell(row.overall) << ','
       << rate_cell(row.stress) << ',' << pinball << ',' << row.alerts_green
       << ',' << row.alerts_orange << ',' << row.alerts_red << '\n';
  }
  return os.str();
}

std::string format_report(const std::vector<BacktestRecord>& records,
                          double alpha) {
  const MetricsTable metrics = evaluate(records, alpha);
  std::ostringstream os;
  char buf[256];

  os << "== Method comparison (overall) ==\n";
  std::snprintf(buf, sizeof(buf), "%-10s %8s %10s %10s %10s %12s\n", "method",
                "count", "breaches", "rate%", "kupiec", "pinball");
  os << buf;
  for (Method m : kAllMethods) {
    const MetricsRow* row = metrics.find(to_string(m), "overall");
    if (!row || !row->defined) continue;
    std::snprintf(buf, sizeof(buf), "%-10s %8d %10d %10.2f %10.2f %12.6f\n",
                  row->method.c_str(), row->count, row->breaches,
                  100.0 * row->breach_rate, row->kupiec_stat,
                  row->mean_pinball);
    os << buf;
  }

  os << "\n== Stress split (safe output) ==\n";
  for (const char* slice : {"nonstress", "stress"}) {
    const MetricsRow* row = metrics.find("safe", slice);
    if (!row || !row->defined) continue;
    std::snprintf(buf, sizeof(buf), "%-10s count %6d rate %6.2f%%\n", slice,
                  row->count, 100.0 * row->breach_rate);
    os << buf;
  }

  os << "\n== Uncertainty states (safe output) ==\n";
  for (const char* slice : {"state_low", "state_elevated"}) {
    const MetricsRow* row = metrics.find("safe", slice);
    if (!row || !row->defined) continue;
    std::snprintf(buf, sizeof(buf), "%-15s count %6d rate %6.2f%% pinball %10.6f\n",
                  slice, row->count, 100.0 * row->breach_rate,
                  row->mean_pinball);
    os << buf;
  }

  os << "\n== Per-symbol breach rates (safe vs gjr) ==\n";
  std::vector<std::string> symbols;
  for (const auto& r : records)
    if (std::find(symbols.begin(), symbols.end(), r.symbol) == symbols.end())
      symbols.push_back(r.symbol);
  std::sort(symbols.begin(), symbols.end());
  for (const auto& s : symbols) {
    const MetricsRow* safe = metrics.find("safe", "sym_" + s);
    const MetricsRow* gjr = metrics.find("gjr", "sym_" + s);
    if (!safe || !safe->defined) continue;
    std::snprintf(buf, sizeof(buf), "%-8s safe %6.2f%%  gjr %6.2f%%\n",
                  s.c_str(), 100.0 * safe->breach_rate,
                  gjr && gjr->defined ? 100.0 * gjr->breach_rate : 0.0);
    os << buf;
  }

  const AlertCounts alerts = count_alerts(records);
  os << "\n== Alerts ==\n";
  std::snprintf(buf, sizeof(buf), "green %d, orange %d, red %d\n",
                alerts.green, alerts.orange, alerts.red);
  os << buf;
  return os.str();
}

}  // namespace tailmon
