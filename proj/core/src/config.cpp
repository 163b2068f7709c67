#include "tailmon/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tailmon {

using nlohmann::json;

FeatureParams RunConfig::feature_params() const {
  FeatureParams p;
  p.ewma_lambda = ewma_lambda;
  p.z_return_window = z_return_window;
  p.z_volume_window = z_volume_window;
  p.roll_vol_window = roll_vol_window;
  p.scale_floor = scale_floor;
  return p;
}

QualityWeights RunConfig::quality_weights() const {
  return {w_q_miss, w_q_ohlc, w_q_jump, w_q_vol, w_q_stale};
}

QualityThresholds RunConfig::quality_thresholds() const {
  QualityThresholds t;
  t.green_max = quality_green_max;
  t.yellow_max = quality_yellow_max;
  t.jump_abs_return = jump_abs_return;
  t.logistic_center = logistic_center;
  t.logistic_slope = logistic_slope;
  t.stale_rel_tol = stale_rel_tol;
  return t;
}

UncertaintyWeights RunConfig::uncertainty_weights() const {
  return {w_u_model, w_u_ood, w_u_drift};
}

UncertaintyParams RunConfig::uncertainty_params() const {
  UncertaintyParams p;
  p.drift_window = drift_window;
  p.drift_min_obs = drift_min_obs;
  p.u_history_window = u_history_window;
  p.state_min_history = u_state_min_history;
  p.state_quantile = state_quantile;
  p.label_low_max = label_low_max;
  p.label_medium_max = label_medium_max;
  return p;
}

AdjustmentWeights RunConfig::adjustment_weights() const {
  return {adj_uncertainty, adj_quality};
}

AlertThresholds RunConfig::alert_thresholds() const {
  return {alert_drift_orange, alert_drift_red, alert_ratio_orange,
          alert_ratio_red};
}

OodParams RunConfig::ood_params() const {
  return {ood_retained_variance, ood_max_components, ood_ref_quantile};
}

GbmParams RunConfig::gbm_params() const {
  return {gbm_trees, gbm_max_depth, gbm_learning_rate, gbm_min_samples_leaf};
}

EnsembleConfig RunConfig::ensemble_config(std::uint64_t refit_seed) const {
  EnsembleConfig c;
  c.gbm = gbm_params();
  c.n_members = n_members;
  c.min_training_rows = min_training_rows;
  c.alpha = alpha;
  c.seed = refit_seed;
  return c;
}

json RunConfig::echo() const {
  json j;
  j["data"] = {{"panel_csv", panel_csv},   {"macro_csv", macro_csv},
               {"synthetic", synthetic},   {"synth_symbols", synth_symbols},
               {"synth_days", synth_days}, {"symbols", symbols},
               {"out_dir", out_dir}};
  j["run"] = {{"seed", seed}, {"threads", threads}, {"alpha", alpha}};
  j["windows"] = {{"train_len", train_len},
                  {"refit_step", refit_step},
                  {"calib_window", calib_window},
                  {"hist_window", hist_window},
                  {"anchor_window", anchor_window},
                  {"drift_window", drift_window},
                  {"drift_min_obs", drift_min_obs},
                  {"u_history_window", u_history_window},
                  {"u_state_min_history", u_state_min_history},
                  {"z_return_window", z_return_window},
                  {"z_volume_window", z_volume_window},
                  {"roll_vol_window", roll_vol_window},
                  {"ewma_lambda", ewma_lambda},
                  {"scale_floor", scale_floor}};
  j["weights"] = {{"w_q_miss", w_q_miss},
                  {"w_q_ohlc", w_q_ohlc},
                  {"w_q_jump", w_q_jump},
                  {"w_q_vol", w_q_vol},
                  {"w_q_stale", w_q_stale},
                  {"w_u_model", w_u_model},
                  {"w_u_ood", w_u_ood},
                  {"w_u_drift", w_u_drift},
                  {"adj_uncertainty", adj_uncertainty},
                  {"adj_quality", adj_quality}};
  j["thresholds"] = {{"quality_green_max", quality_green_max},
                     {"quality_yellow_max", quality_yellow_max},
                     {"jump_abs_return", jump_abs_return},
                     {"logistic_center", logistic_center},
                     {"logistic_slope", logistic_slope},
                     {"stale_rel_tol", stale_rel_tol},
                     {"label_low_max", label_low_max},
                     {"label_medium_max", label_medium_max},
                     {"alert_drift_orange", alert_drift_orange},
                     {"alert_drift_red", alert_drift_red},
                     {"alert_ratio_orange", alert_ratio_orange},
                     {"alert_ratio_red", alert_ratio_red},
                     {"state_quantile", state_quantile},
                     {"stress_quantile", stress_quantile},
                     {"ood_retained_variance", ood_retained_variance},
                     {"ood_max_components", ood_max_components},
                     {"ood_ref_quantile", ood_ref_quantile}};
  j["gbm"] = {{"gbm_trees", gbm_trees},
              {"gbm_max_depth", gbm_max_depth},
              {"gbm_learning_rate", gbm_learning_rate},
              {"gbm_min_samples_leaf", gbm_min_samples_leaf},
              {"n_members", n_members},
              {"min_training_rows", min_training_rows},
              {"calibration_out_of_sample", calibration_out_of_sample}};
  j["corruption"] = {{"fault_probability", fault_probability},
                     {"fault_missing", fault_missing},
                     {"fault_stale", fault_stale},
                     {"fault_ohlc", fault_ohlc}};
  return j;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: bad boolean for " + key + ": " + v);
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number for " + key + ": " + v);
  }
}

int parse_int(const std::string& v, const std::string& key) {
  const double x = parse_double(v, key);
  return static_cast<int>(x);
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

void apply_config_entry(RunConfig& c, const std::string& section,
                        const std::string& key, const std::string& value) {
  const std::string k = section.empty() ? key : section + "." + key;
  auto is = [&](const char* sec, const char* name) {
    return section == sec && key == name;
  };

  if (is("data", "panel_csv")) c.panel_csv = value;
  else if (is("data", "macro_csv")) c.macro_csv = value;
  else if (is("data", "synthetic")) c.synthetic = parse_bool(value, k);
  else if (is("data", "synth_symbols")) c.synth_symbols = parse_int(value, k);
  else if (is("data", "synth_days")) c.synth_days = parse_int(value, k);
  else if (is("data", "symbols")) c.symbols = parse_list(value);
  else if (is("data", "out_dir")) c.out_dir = value;
  else if (is("run", "seed"))
    c.seed = static_cast<std::uint64_t>(parse_double(value, k));
  else if (is("run", "threads")) c.threads = parse_int(value, k);
  else if (is("run", "alpha")) c.alpha = parse_double(value, k);
  else if (is("windows", "train_len")) c.train_len = parse_int(value, k);
  else if (is("windows", "refit_step")) c.refit_step = parse_int(value, k);
  else if (is("windows", "calib_window")) c.calib_window = parse_int(value, k);
  else if (is("windows", "hist_window")) c.hist_window = parse_int(value, k);
  else if (is("windows", "anchor_window"))
    c.anchor_window = parse_int(value, k);
  else if (is("windows", "drift_window")) c.drift_window = parse_int(value, k);
  else if (is("windows", "drift_min_obs"))
    c.drift_min_obs = parse_int(value, k);
  else if (is("windows", "u_history_window"))
    c.u_history_window = parse_int(value, k);
  else if (is("windows", "u_state_min_history"))
    c.u_state_min_history = parse_int(value, k);
  else if (is("windows", "z_return_window"))
    c.z_return_window = parse_int(value, k);
  else if (is("windows", "z_volume_window"))
    c.z_volume_window = parse_int(value, k);
  else if (is("windows", "roll_vol_window"))
    c.roll_vol_window = parse_int(value, k);
  else if (is("windows", "ewma_lambda")) c.ewma_lambda = parse_double(value, k);
  else if (is("windows", "scale_floor")) c.scale_floor = parse_double(value, k);
  else if (is("weights", "w_q_miss")) c.w_q_miss = parse_double(value, k);
  else if (is("weights", "w_q_ohlc")) c.w_q_ohlc = parse_double(value, k);
  else if (is("weights", "w_q_jump")) c.w_q_jump = parse_double(value, k);
  else if (is("weights", "w_q_vol")) c.w_q_vol = parse_double(value, k);
  else if (is("weights", "w_q_stale")) c.w_q_stale = parse_double(value, k);
  else if (is("weights", "w_u_model")) c.w_u_model = parse_double(value, k);
  else if (is("weights", "w_u_ood")) c.w_u_ood = parse_double(value, k);
  else if (is("weights", "w_u_drift")) c.w_u_drift = parse_double(value, k);
  else if (is("weights", "adj_uncertainty"))
    c.adj_uncertainty = parse_double(value, k);
  else if (is("weights", "adj_quality")) c.adj_quality = parse_double(value, k);
  else if (is("thresholds", "quality_green_max"))
    c.quality_green_max = parse_double(value, k);
  else if (is("thresholds", "quality_yellow_max"))
    c.quality_yellow_max = parse_double(value, k);
  else if (is("thresholds", "jump_abs_return"))
    c.jump_abs_return = parse_double(value, k);
  else if (is("thresholds", "logistic_center"))
    c.logistic_center = parse_double(value, k);
  else if (is("thresholds", "logistic_slope"))
    c.logistic_slope = parse_double(value, k);
  else if (is("thresholds", "stale_rel_tol"))
    c.stale_rel_tol = parse_double(value, k);
  else if (is("thresholds", "label_low_max"))
    c.label_low_max = parse_double(value, k);
  else if (is("thresholds", "label_medium_max"))
    c.label_medium_max = parse_double(value, k);
  else if (is("thresholds", "alert_drift_orange"))
    c.alert_drift_orange = parse_double(value, k);
  else if (is("thresholds", "alert_drift_red"))
    c.alert_drift_red = parse_double(value, k);
  else if (is("thresholds", "alert_ratio_orange"))
    c.alert_ratio_orange = parse_double(value, k);
  else if (is("thresholds", "alert_ratio_red"))
    c.alert_ratio_red = parse_double(value, k);
  else if (is("thresholds", "state_quantile"))
    c.state_quantile = parse_double(value, k);
  else if (is("thresholds", "stress_quantile"))
    c.stress_quantile = parse_double(value, k);
  else if (is("thresholds", "ood_retained_variance"))
    c.ood_retained_variance = parse_double(value, k);
  else if (is("thresholds", "ood_max_components"))
    c.ood_max_components = parse_int(value, k);
  else if (is("thresholds", "ood_ref_quantile"))
    c.ood_ref_quantile = parse_double(value, k);
  else if (is("gbm", "gbm_trees")) c.gbm_trees = parse_int(value, k);
  else if (is("gbm", "gbm_max_depth")) c.gbm_max_depth = parse_int(value, k);
  else if (is("gbm", "gbm_learning_rate"))
    c.gbm_learning_rate = parse_double(value, k);
  else if (is("gbm", "gbm_min_samples_leaf"))
    c.gbm_min_samples_leaf = parse_int(value, k);
  else if (is("gbm", "n_members")) c.n_members = parse_int(value, k);
  else if (is("gbm", "min_training_rows"))
    c.min_training_rows = parse_int(value, k);
  else if (is("gbm", "calibration_out_of_sample"))
    c.calibration_out_of_sample = parse_bool(value, k);
  else if (is("corruption", "fault_probability"))
    c.fault_probability = parse_double(value, k);
  else if (is("corruption", "fault_missing"))
    c.fault_missing = parse_bool(value, k);
  else if (is("corruption", "fault_stale"))
    c.fault_stale = parse_bool(value, k);
  else if (is("corruption", "fault_ohlc")) c.fault_ohlc = parse_bool(value, k);
  else
    throw ConfigError("config: unknown key '" + k + "'");
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  RunConfig config;
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    apply_config_entry(config, section, key, value);
  }
  return config;
}

}  // namespace tailmon
