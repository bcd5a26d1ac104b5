#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"
#include "rydcopy/config.hpp"
#include "rydcopy/error.hpp"
#include "rydcopy/experiment.hpp"

using namespace rydcopy;
using nlohmann::json;

namespace {

ExperimentConfig tiny() {
  ExperimentConfig c;
  c.layout.n_ancillae = {1, 2};
  c.gate.omega_mhz = {6, 12};
  c.gate.trajectories = 40;
  c.readout.t_meas_us = {0, 1, 3, 6};
  c.gate.table_n_max = 6;
  return c;
}

std::string cell(const Table& t, std::size_t row, const std::string& col) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == col) return t.rows.at(row).at(i);
  throw std::out_of_range(col);
}

}  // namespace

TEST(Config, defaults_roundtrip) {
  const ExperimentConfig c;
  EXPECT_EQ(c.gate.omega_mhz.front(), 4);
  EXPECT_EQ(c.gate.omega_mhz.back(), 15);
  EXPECT_DOUBLE_EQ(c.readout.params.t_photon_us, 0.013);
  EXPECT_DOUBLE_EQ(c.readout.params.t_bg_us, 0.19);
  EXPECT_DOUBLE_EQ(c.readout.params.t_loss_us, 200);
  const ExperimentConfig d = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(d.to_json(), c.to_json());
  EXPECT_EQ(d.hash(), c.hash());
}

TEST(Config, partial_json_keeps_defaults) {
  const auto c = ExperimentConfig::from_json(json::parse(R"({"seed": 42, "gate": {"envelope": "square"}})"));
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.gate.envelope, EnvelopeMode::square);
  EXPECT_EQ(c.gate.trajectories, 2000u);
}

TEST(Config, rejects_bad_input) {
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"sed": 1})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"gate": {"omega_mhz": []}})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"gate": {"omega_mhz": [-1]}})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"readout": {"t_bg_us": 0}})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"layout": {"n_ancillae": "five"}})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"gate": {"integrator": "euler"}})")), ConfigError);
  EXPECT_THROW(ExperimentConfig::load("/nonexistent/config.json"), ConfigError);
}

TEST(Config, hash_tracks_physics_not_plumbing) {
  ExperimentConfig a;
  ExperimentConfig b = a;
  b.workers = 8;
  b.output_dir = "elsewhere";
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 2;
  EXPECT_NE(a.hash(), b.hash());
  EXPECT_EQ(fnv1a64_hex(""), "cbf29ce484222325");
}

TEST(Experiment, number_format) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333");
}

TEST(Experiment, gate_time_table_rows) {
  const auto r = cmd_gate_time_table(tiny());
  const Table& t = r.tables.at(0);
  ASSERT_EQ(t.rows.size(), 6u);
  EXPECT_EQ(cell(t, 0, "exact_pi_over_omega"), "2");
  EXPECT_EQ(cell(t, 3, "approx_pi_over_omega"), "3.5");
  EXPECT_NEAR(std::stod(cell(t, 4, "exact_pi_over_omega")), 4.2317, 1e-4);
  EXPECT_NEAR(std::stod(cell(t, 4, "shaped_over_exact")), 4.0 / 3.0, 0.01);
}

TEST(Experiment, best_omega_ties_go_low) {
  std::vector<SweepCell> cells(3);
  cells[0].n_ancillae = cells[1].n_ancillae = cells[2].n_ancillae = 2;
  cells[0].omega_mhz = 9;
  cells[1].omega_mhz = 5;
  cells[2].omega_mhz = 12;
  cells[0].if_gate = 1e-3;
  cells[1].if_gate = 1e-3;
  cells[2].if_gate = 2e-3;
  const auto b = best_per_n(cells);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].omega_mhz, 5);
}

TEST(Experiment, min_time_rules) {
  std::vector<ReadoutPoint> curve;
  const double ts[] = {0, 1, 2, 3, 4};
  const double ifs[] = {0.5, 0.3, 0.05, 0.012, 0.011};
  for (int i = 0; i < 5; ++i) curve.push_back({3, "aggregated", 7.0, ts[i], ifs[i], 0, 0.01});
  const auto rows = min_times(curve, {0.001, 0.4, 0.02, 0.0105});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].target_if, 0.4);
  EXPECT_EQ(*rows[0].t_min_us, 1.0);
  EXPECT_EQ(*rows[1].t_min_us, 3.0);
  EXPECT_FALSE(rows[2].t_min_us);
  EXPECT_EQ(rows[2].reason, "grid");
  EXPECT_FALSE(rows[3].t_min_us);
  EXPECT_EQ(rows[3].reason, "gate_floor");
}

TEST(Experiment, readout_curve_zero_time_is_blind) {
  const ExperimentConfig c = tiny();
  const auto best = best_per_n(run_gate_sweep(c));
  ASSERT_EQ(best.size(), 2u);
  for (const auto& p : readout_curve(c, best))
    if (p.t_meas_us == 0) EXPECT_DOUBLE_EQ(p.infidelity, 0.5);
}

TEST(Experiment, min_time_weak_target_is_first_grid_point) {
  ExperimentConfig c = tiny();
  c.target_if = {0.4, 0.001, 1e-9};
  const auto r = cmd_min_time(c);
  const Table& t = r.tables.at(0);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (cell(t, i, "target_if") == "0.4") EXPECT_EQ(cell(t, i, "t_min_us"), "1");
    if (cell(t, i, "target_if") == "1e-09" && cell(t, i, "scheme") == "aggregated") {
      EXPECT_EQ(cell(t, i, "t_min_us"), kMissing);
      EXPECT_EQ(cell(t, i, "missing_reason"), "gate_floor");
    }
  }
}

TEST(Experiment, csv_identical_across_worker_counts) {
  ExperimentConfig a = tiny();
  a.readout.mle = true;
  a.readout.mle_records = 300;
  ExperimentConfig b = a;
  b.workers = 3;
  for (const char* cmd : {"gate-sweep", "readout-curve"}) {
    const auto ra = run_command(a, cmd);
    const auto rb = run_command(b, cmd);
    ASSERT_EQ(ra.tables.size(), rb.tables.size());
    for (std::size_t i = 0; i < ra.tables.size(); ++i)
      EXPECT_EQ(render_csv(ra.tables[i], a, cmd), render_csv(rb.tables[i], b, cmd)) << cmd;
  }
}

TEST(Experiment, outputs_carry_metadata) {
  const ExperimentConfig c = tiny();
  const auto dir = std::filesystem::temp_directory_path() / "rydcopy_test_outputs";
  std::filesystem::remove_all(dir);
  const auto r = cmd_gate_time_table(c);
  const auto paths = write_outputs(r, c, dir.string(), 0.25, "2026-01-01T00:00:00Z");
  ASSERT_EQ(paths.size(), 2u);
  std::ifstream csv(paths[0]);
  std::stringstream ss;
  ss << csv.rdbuf();
  EXPECT_NE(ss.str().find("# config_hash: " + c.hash()), std::string::npos);
  EXPECT_NE(ss.str().find("# seed: 1"), std::string::npos);
  const json side = json::parse(std::ifstream(paths[1]));
  EXPECT_EQ(side["config_hash"], c.hash());
  EXPECT_EQ(side["started_utc"], "2026-01-01T00:00:00Z");
  EXPECT_EQ(side["command"], "gate-time-table");
  std::filesystem::remove_all(dir);
}

TEST(Experiment, unknown_command) { EXPECT_THROW(run_command(tiny(), "plot"), ConfigError); }
