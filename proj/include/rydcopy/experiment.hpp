#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rydcopy/config.hpp"
#include "rydcopy/dynamics.hpp"

namespace rydcopy {

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct CommandResult {
  std::string command;
  std::vector<Table> tables;
  nlohmann::json summary = nlohmann::json::object();
  bool passed = true;  // validate only
};

inline constexpr const char* kMissing = "NA";

/// Fixed-format number rendering used in every CSV cell.
std::string format_number(double v);

struct SweepCell {
  std::size_t n_ancillae = 0;
  double omega_mhz = 0.0;
  ExcitationDistributions dist;
  double if_gate = 0.0;
  double if_gate_stderr = 0.0;
};

std::vector<SweepCell> run_gate_sweep(const ExperimentConfig& cfg);
/// Lowest IF_gate per N over the sweep grid; ties go to the lower Omega.
std::vector<SweepCell> best_per_n(const std::vector<SweepCell>& cells);

struct ReadoutPoint {
  std::size_t n_ancillae = 0;
  std::string scheme;  // aggregated | atom_resolved | perfect_gate
  std::optional<double> omega_mhz;
  double t_meas_us = 0.0;
  double infidelity = 0.0;
  double stderr_ = 0.0;
  double if_gate = 0.0;
};

std::vector<ReadoutPoint> readout_curve(const ExperimentConfig& cfg, const std::vector<SweepCell>& best);

struct MinTimeRow {
  std::size_t n_ancillae = 0;
  std::string scheme;
  double target_if = 0.0;
  std::optional<double> t_min_us;
  std::string reason;  // empty, "gate_floor" or "grid"
  double if_gate = 0.0;
};

/// Smallest positive grid time reaching each target, targets in descending order.
std::vector<MinTimeRow> min_times(const std::vector<ReadoutPoint>& curve, std::vector<double> targets,
                                  const std::string& scheme = "aggregated");

CommandResult cmd_gate_time_table(const ExperimentConfig& cfg);
CommandResult cmd_gate_sweep(const ExperimentConfig& cfg);
CommandResult cmd_readout_curve(const ExperimentConfig& cfg);
CommandResult cmd_min_time(const ExperimentConfig& cfg);
CommandResult cmd_validate(const ExperimentConfig& cfg);

const std::vector<std::string>& command_names();
CommandResult run_command(const ExperimentConfig& cfg, const std::string& name);

/// CSV text with a '#' metadata header (no wall-clock, so reruns are byte-identical).
std::string render_csv(const Table& t, const ExperimentConfig& cfg, const std::string& command);

/// Writes one CSV per table plus <command>.json into `dir`; returns the paths written.
std::vector<std::string> write_outputs(const CommandResult& r, const ExperimentConfig& cfg, const std::string& dir,
                                       double elapsed_s, const std::string& started_utc);

}  // namespace rydcopy
