#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "rydcopy/dynamics.hpp"
#include "rydcopy/geometry.hpp"
#include "rydcopy/readout.hpp"
#include "rydcopy/schedule.hpp"

namespace rydcopy {

struct LayoutConfig {
  std::vector<std::size_t> n_ancillae{1, 2, 3, 4, 5};
  double radius_um = 2.0;
  double min_separation_um = 2.0;
};

struct SpeciesConfig {
  C6Table c6;
  double t1_cs_us = 176.0;
  double t1_rb_us = 190.0;
};

struct GateConfig {
  std::vector<double> omega_mhz{4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15};  // Omega/2pi
  EnvelopeMode envelope = EnvelopeMode::shaped;
  std::size_t trajectories = 2000;  // per logical state
  Estimator estimator = Estimator::stratified;
  IntegratorOptions integrator;
  bool decay = true;
  std::size_t table_n_max = 50;  // gate-time-table rows 1..table_n_max
};

struct ReadoutConfig {
  ReadoutParams params;
  std::vector<double> t_meas_us;  // default 0, 0.5, ..., 25
  bool mle = false;
  std::size_t mle_records = 10000;  // per hypothesis
};

struct ExperimentConfig {
  LayoutConfig layout;
  SpeciesConfig species;
  GateConfig gate;
  ReadoutConfig readout;
  std::vector<double> target_if{0.1, 0.01, 0.005, 0.002, 0.001, 0.0005};
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::size_t workers = 1;

  ExperimentConfig();

  /// Missing keys keep their defaults; unknown keys are rejected.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
  nlohmann::json to_json() const;
  /// FNV-1a 64 of the canonical JSON dump, as 16 hex digits. Excludes output_dir and workers.
  std::string hash() const;
  void validate() const;

  Layout layout_for(std::size_t n_ancillae) const;
};

std::string fnv1a64_hex(const std::string& s);

}  // namespace rydcopy
