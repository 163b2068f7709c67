#include "tailmon/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tailmon/features.hpp"
#include "tailmon/rng.hpp"
#include "tailmon/stats.hpp"
#include "tailmon/types.hpp"

namespace tailmon {

using nlohmann::json;

QuantileEnsemble QuantileEnsemble::fit(const TrainingSet& data,
                                       const EnsembleConfig& config,
                                       EnsembleMeta meta) {
  const int n = static_cast<int>(data.rows.size());
  if (n < config.min_training_rows)
    throw FitError("ensemble fit: " + std::to_string(n) +
                   " training rows, need at least " +
                   std::to_string(config.min_training_rows));
  if (data.labels.size() != data.rows.size() ||
      data.date_index.size() != data.rows.size())
    throw FitError("ensemble fit: rows/labels/date_index size mismatch");

  QuantileEnsemble out;
  out.feature_names_ = data.feature_names;
  out.medians_ = column_medians(data.rows);
  out.alpha_ = config.alpha;
  meta.seed = config.seed;
  out.meta_ = meta;

  std::vector<std::vector<double>> imputed(data.rows.size());
  for (std::size_t i = 0; i < data.rows.size(); ++i)
    imputed[i] = impute_with_medians(data.rows[i], out.medians_);

  // Row indices per distinct training date, in date order.
  std::map<int, std::vector<int>> by_date;
  for (int i = 0; i < n; ++i) by_date[data.date_index[i]].push_back(i);
  std::vector<const std::vector<int>*> date_rows;
  date_rows.reserve(by_date.size());
  for (const auto& [date, rows] : by_date) date_rows.push_back(&rows);
  const std::uint64_t n_dates = date_rows.size();

  out.members_.resize(config.n_members);
  const auto fit_member = [&](int b) {
    // member b draws from the stream keyed by seed xor b
    Rng rng(derive_stream_key(config.seed ^ static_cast<std::uint64_t>(b),
                              0xB005, static_cast<std::uint64_t>(b)));
    std::vector<std::vector<double>> sample_rows;
    std::vector<double> sample_labels;
    sample_rows.reserve(data.rows.size());
    sample_labels.reserve(data.rows.size());
    for (std::uint64_t k = 0; k < n_dates; ++k) {
      const auto& rows = *date_rows[rng.index(n_dates)];
      for (int i : rows) {
        sample_rows.push_back(imputed[i]);
        sample_labels.push_back(data.labels[i]);
      }
    }
    out.members_[b] =
        QuantileGbm::fit(sample_rows, sample_labels, config.alpha, config.gbm);
  };
  if (config.threads > 1 && config.n_members > 1) {
    std::vector<std::future<void>> futures;
    futures.reserve(config.n_members);
    for (int b = 0; b < config.n_members; ++b)
      futures.push_back(std::async(std::launch::async, fit_member, b));
    for (auto& f : futures) f.get();
  } else {
    for (int b = 0; b < config.n_members; ++b) fit_member(b);
  }
  return out;
}

TailForecast QuantileEnsemble::predict(std::span<const double> x) const {
  if (x.size() != feature_names_.size())
    throw PredictError("predict: expected " +
                       std::to_string(feature_names_.size()) +
                       " features, got " + std::to_string(x.size()));
  for (double v : x)
    if (std::isnan(v)) throw PredictError("predict: NaN feature (impute first)");
  TailForecast f;
  f.member_preds.reserve(members_.size());
  for (const auto& m : members_) f.member_preds.push_back(m.predict(x));
  f.q_raw = mean(f.member_preds);
  f.q_cal = f.q_raw;
  return f;
}

TailForecast QuantileEnsemble::predict_imputed(
    const std::vector<double>& x_raw) const {
  return predict(impute_with_medians(x_raw, medians_));
}

namespace {

json tree_to_json(const RegressionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes)
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
  return nodes;
}

RegressionTree tree_from_json(const json& j) {
  RegressionTree tree;
  for (const auto& n : j) {
    TreeNode node;
    node.feature = n.at(0).get<int>();
    node.threshold = n.at(1).get<double>();
    node.left = n.at(2).get<int>();
    node.right = n.at(3).get<int>();
    node.value = n.at(4).get<double>();
    tree.nodes.push_back(node);
  }
  return tree;
}

}  // namespace

std::string QuantileEnsemble::to_json() const {
  json j;
  j["format"] = "tailmon-ensemble";
  j["version"] = 1;
  j["alpha"] = alpha_;
  j["seed"] = meta_.seed;
  j["train_begin"] = meta_.train_begin;
  j["train_end"] = meta_.train_end;
  j["feature_names"] = feature_names_;
  j["medians"] = medians_;
  json members = json::array();
  for (const auto& m : members_) {
    json jm;
    jm["base_score"] = m.base_score();
    jm["gbm"] = {{"n_trees", m.params().n_trees},
                 {"max_depth", m.params().max_depth},
                 {"learning_rate", m.params().learning_rate},
                 {"min_samples_leaf", m.params().min_samples_leaf}};
    json trees = json::array();
    for (const auto& t : m.trees()) trees.push_back(tree_to_json(t));
    jm["trees"] = std::move(trees);
    members.push_back(std::move(jm));
  }
  j["members"] = std::move(members);
  return j.dump();
}

QuantileEnsemble QuantileEnsemble::from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("format", "") != "tailmon-ensemble")
    throw IngestError("ensemble artifact: unknown format tag");
  if (j.value("version", 0) != 1)
    throw IngestError("ensemble artifact: unsupported version");
  QuantileEnsemble out;
  out.alpha_ = j.at("alpha").get<double>();
  out.meta_.seed = j.at("seed").get<std::uint64_t>();
  out.meta_.train_begin = j.at("train_begin").get<int>();
  out.meta_.train_end = j.at("train_end").get<int>();
  out.feature_names_ = j.at("feature_names").get<std::vector<std::string>>();
  out.medians_ = j.at("medians").get<std::vector<double>>();
  for (const auto& jm : j.at("members")) {
    GbmParams params;
    params.n_trees = jm.at("gbm").at("n_trees").get<int>();
    params.max_depth = jm.at("gbm").at("max_depth").get<int>();
    params.learning_rate = jm.at("gbm").at("learning_rate").get<double>();
    params.min_samples_leaf = jm.at("gbm").at("min_samples_leaf").get<int>();
    std::vector<RegressionTree> trees;
    for (const auto& jt : jm.at("trees")) trees.push_back(tree_from_json(jt));
    out.members_.emplace_back(out.alpha_, jm.at("base_score").get<double>(),
                              params, std::move(trees));
  }
  return out;
}

void QuantileEnsemble::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write model artifact: " + path);
  out << to_json();
}

QuantileEnsemble QuantileEnsemble::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot read model artifact: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

CalibrationState fit_calibration(std::span<const double> raw_predictions,
                                 std::span<const double> realized_returns,
                                 double alpha, int window_days) {
  if (raw_predictions.size() != realized_returns.size())
    throw FitError("fit_calibration: prediction/return size mismatch");
  CalibrationState state;
  state.window_days = window_days;
  state.residual_count = static_cast<int>(raw_predictions.size());
  if (raw_predictions.empty()) {
    state.offset = 0.0;
    state.empty_window = true;
    return state;
  }
  std::vector<double> residuals(raw_predictions.size());
  for (std::size_t i = 0; i < raw_predictions.size(); ++i)
    residuals[i] = realized_returns[i] - raw_predictions[i];
  state.offset = empirical_quantile(residuals, alpha);
  return state;
}

}  // namespace tailmon
