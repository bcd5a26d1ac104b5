#include <cmath>
#include <cstring>
#include <string>

#include "gtest/gtest.h"
#include "rydcopy/rydcopy.h"

TEST(CApi, version_and_status_strings) {
  EXPECT_STRNE(rydcopy_version(), "");
  EXPECT_STREQ(rydcopy_status_string(RYDCOPY_OK), "ok");
}

TEST(CApi, config_lifecycle) {
  rydcopy_config* cfg = nullptr;
  ASSERT_EQ(rydcopy_config_default(&cfg), RYDCOPY_OK);
  EXPECT_EQ(rydcopy_config_set_seed(cfg, 77), RYDCOPY_OK);
  EXPECT_EQ(rydcopy_config_set_workers(cfg, 0), RYDCOPY_ERR_CONFIG);
  char* json = nullptr;
  ASSERT_EQ(rydcopy_config_to_json(cfg, &json), RYDCOPY_OK);
  EXPECT_NE(std::string(json).find("\"seed\": 77"), std::string::npos);
  rydcopy_string_free(json);
  rydcopy_config_free(cfg);
}

TEST(CApi, errors_are_reported) {
  rydcopy_config* cfg = nullptr;
  EXPECT_EQ(rydcopy_config_from_json("{\"bogus\": 1}", &cfg), RYDCOPY_ERR_CONFIG);
  EXPECT_NE(std::string(rydcopy_last_error()).find("bogus"), std::string::npos);
  EXPECT_EQ(rydcopy_config_from_json("{not json", &cfg), RYDCOPY_ERR_CONFIG);
  EXPECT_EQ(rydcopy_config_default(nullptr), RYDCOPY_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(rydcopy_config_load("/nonexistent.json", &cfg), RYDCOPY_ERR_CONFIG);

  ASSERT_EQ(rydcopy_config_default(&cfg), RYDCOPY_OK);
  rydcopy_result* res = nullptr;
  EXPECT_EQ(rydcopy_run(cfg, "plot", &res), RYDCOPY_ERR_CONFIG);
  EXPECT_EQ(res, nullptr);
  rydcopy_config_free(cfg);
}

TEST(CApi, gate_time_table_command) {
  rydcopy_config* cfg = nullptr;
  ASSERT_EQ(rydcopy_config_from_json("{\"gate\": {\"table_n_max\": 5}}", &cfg), RYDCOPY_OK);
  rydcopy_result* res = nullptr;
  ASSERT_EQ(rydcopy_run(cfg, "gate-time-table", &res), RYDCOPY_OK);
  ASSERT_EQ(rydcopy_result_table_count(res), 1u);
  EXPECT_STREQ(rydcopy_result_table_name(res, 0), "gate_time_table");
  const std::string csv = rydcopy_result_table_csv(res, 0);
  EXPECT_NE(csv.find("\n1,2,1.5,"), std::string::npos);
  EXPECT_NE(csv.find("\n4,"), std::string::npos);
  EXPECT_EQ(rydcopy_result_table_csv(res, 5), nullptr);
  rydcopy_result_free(res);
  rydcopy_config_free(cfg);
}

TEST(CApi, numeric_helpers) {
  double t = 0;
  ASSERT_EQ(rydcopy_exact_gate_time(1, 1.0, &t), RYDCOPY_OK);
  EXPECT_NEAR(t, 2 * M_PI, 1e-14);
  ASSERT_EQ(rydcopy_approx_gate_time(4, 1.0, &t), RYDCOPY_OK);
  EXPECT_NEAR(t, 3.5 * M_PI, 1e-14);
  ASSERT_EQ(rydcopy_gate_time(2, 10.0, "shaped", &t), RYDCOPY_OK);
  EXPECT_EQ(rydcopy_gate_time(2, 10.0, "wiggly", &t), RYDCOPY_ERR_CONFIG);

  const double p0[] = {1, 0}, p1[] = {0, 1};
  double g = 1;
  ASSERT_EQ(rydcopy_gate_infidelity(p0, p1, 2, &g), RYDCOPY_OK);
  EXPECT_EQ(g, 0.0);

  rydcopy_readout_params rp;
  rydcopy_readout_params_default(&rp);
  EXPECT_DOUBLE_EQ(rp.t_photon_us, 0.013);
  rp.t_meas_us = 0;
  double f = 0;
  ASSERT_EQ(rydcopy_measurement_infidelity(p0, p1, 2, &rp, &f), RYDCOPY_OK);
  EXPECT_DOUBLE_EQ(f, 0.5);
  rp.t_bg_us = -1;
  EXPECT_EQ(rydcopy_measurement_infidelity(p0, p1, 2, &rp, &f), RYDCOPY_ERR_CONFIG);
}
