#include <fstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "tailmon/config.hpp"

using namespace tailmon;

TEST_CASE("defaults carry the fixed service parameterization") {
  const RunConfig c;
  CHECK(c.alpha == 0.05);
  CHECK(c.train_len == 756);
  CHECK(c.refit_step == 63);
  CHECK(c.calib_window == 63);
  CHECK(c.hist_window == 252);
  CHECK(c.anchor_window == 63);
  CHECK(c.drift_window == 60);
  CHECK(c.drift_min_obs == 30);
  CHECK(c.u_history_window == 252);
  CHECK(c.ewma_lambda == 0.94);
  CHECK(c.w_q_miss == 0.30);
  CHECK(c.w_q_ohlc == 0.35);
  CHECK(c.w_q_jump == 0.15);
  CHECK(c.w_q_vol == 0.10);
  CHECK(c.w_q_stale == 0.10);
  CHECK(c.w_u_model == 0.40);
  CHECK(c.w_u_ood == 0.35);
  CHECK(c.w_u_drift == 0.25);
  CHECK(c.adj_uncertainty == 0.75);
  CHECK(c.adj_quality == 0.50);
  CHECK(c.quality_green_max == 0.25);
  CHECK(c.quality_yellow_max == 0.60);
  CHECK(c.label_low_max == 0.33);
  CHECK(c.label_medium_max == 0.66);
  CHECK(c.alert_drift_orange == 0.5);
  CHECK(c.alert_drift_red == 1.0);
  CHECK(c.alert_ratio_orange == 0.35);
  CHECK(c.alert_ratio_red == 0.75);
  CHECK(c.jump_abs_return == 0.15);
  CHECK(c.state_quantile == 0.90);
  CHECK(c.stress_quantile == 0.80);
  CHECK(c.fault_probability == 0.15);
  CHECK(c.gbm_trees == 200);
  CHECK(c.gbm_max_depth == 3);
  CHECK(c.gbm_learning_rate == 0.05);
  CHECK(c.gbm_min_samples_leaf == 20);
  CHECK(c.n_members == 5);
  CHECK(c.min_training_rows == 500);
}

TEST_CASE("config file parse and override echo") {
  const std::string path = "/tmp/tailmon_test_config.ini";
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "[run]\n"
        << "seed = 777\n"
        << "alpha = 0.05\n"
        << "[windows]\n"
        << "train_len = 500\n"
        << "ewma_lambda = 0.9\n"
        << "[gbm]\n"
        << "gbm_trees = 100\n"
        << "calibration_out_of_sample = true\n"
        << "[data]\n"
        << "symbols = SPY, QQQ ,IWM\n";
  }
  const RunConfig c = parse_config_file(path);
  CHECK(c.seed == 777);
  CHECK(c.train_len == 500);
  CHECK(c.ewma_lambda == 0.9);
  CHECK(c.gbm_trees == 100);
  CHECK(c.calibration_out_of_sample);
  REQUIRE(c.symbols.size() == 3);
  CHECK(c.symbols[1] == "QQQ");
  // untouched keys keep their defaults
  CHECK(c.refit_step == 63);

  // every override is reflected verbatim in the echo block
  const nlohmann::json echo = c.echo();
  CHECK(echo["run"]["seed"].get<std::uint64_t>() == 777);
  CHECK(echo["windows"]["train_len"].get<int>() == 500);
  CHECK(echo["windows"]["ewma_lambda"].get<double>() == 0.9);
  CHECK(echo["gbm"]["gbm_trees"].get<int>() == 100);
  CHECK(echo["gbm"]["calibration_out_of_sample"].get<bool>());
  CHECK(echo["windows"]["refit_step"].get<int>() == 63);
}

TEST_CASE("unknown keys and malformed values are config errors") {
  const std::string path = "/tmp/tailmon_test_config_bad.ini";
  {
    std::ofstream out(path);
    out << "[run]\nbogus_key = 3\n";
  }
  CHECK_THROWS_AS(parse_config_file(path), ConfigError);
  {
    std::ofstream out(path);
    out << "[run]\nseed = not_a_number\n";
  }
  CHECK_THROWS_AS(parse_config_file(path), ConfigError);
  {
    std::ofstream out(path);
    out << "[run]\nno equals sign here\n";
  }
  CHECK_THROWS_AS(parse_config_file(path), ConfigError);
  CHECK_THROWS_AS(parse_config_file("/tmp/definitely_no_such_config.ini"),
                  ConfigError);
}
