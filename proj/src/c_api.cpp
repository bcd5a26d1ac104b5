#include "rydcopy/rydcopy.h"

#include <chrono>
#include <cstring>
#include <ctime>
#include <string>
#include <vector>

#include "rydcopy/config.hpp"
#include "rydcopy/error.hpp"
#include "rydcopy/experiment.hpp"
#include "rydcopy/readout.hpp"
#include "rydcopy/schedule.hpp"

struct rydcopy_config {
  rydcopy::ExperimentConfig cfg;
};

struct rydcopy_result {
  rydcopy::CommandResult result;
  std::vector<std::string> csv;
  std::string summary;
  std::vector<std::string> files;
  double elapsed_s = 0.0;
  std::string started_utc;
};

namespace {

thread_local std::string g_last_error;

template <class Fn>
rydcopy_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const rydcopy::ConfigError& e) {
    g_last_error = e.what();
    return RYDCOPY_ERR_CONFIG;
  } catch (const rydcopy::NumericalError& e) {
    g_last_error = e.what();
    return RYDCOPY_ERR_NUMERICAL;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return RYDCOPY_ERR_CONFIG;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return RYDCOPY_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RYDCOPY_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RYDCOPY_ERR_INTERNAL;
  }
}

rydcopy_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return RYDCOPY_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

rydcopy::ReadoutParams to_params(const rydcopy_readout_params& p) {
  rydcopy::ReadoutParams r;
  r.t_photon_us = p.t_photon_us;
  r.t_bg_us = p.t_bg_us;
  r.t_loss_us = p.t_loss_us;
  r.t_meas_us = p.t_meas_us;
  r.dt_us = p.dt_us;
  r.detection_fraction = p.detection_fraction;
  return r;
}

}  // namespace

extern "C" {

const char* rydcopy_version(void) { return RYDCOPY_VERSION; }

const char* rydcopy_last_error(void) { return g_last_error.c_str(); }

const char* rydcopy_status_string(rydcopy_status status) {
  switch (status) {
    case RYDCOPY_OK: return "ok";
    case RYDCOPY_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RYDCOPY_ERR_CONFIG: return "configuration error";
    case RYDCOPY_ERR_NUMERICAL: return "numerical error";
    case RYDCOPY_ERR_IO: return "i/o error";
    case RYDCOPY_ERR_VALIDATION_FAILED: return "validation failed";
    case RYDCOPY_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

rydcopy_status rydcopy_config_default(rydcopy_config** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new rydcopy_config{};
    return RYDCOPY_OK;
  });
}

rydcopy_status rydcopy_config_load(const char* path, rydcopy_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new rydcopy_config{rydcopy::ExperimentConfig::load(path)};
    return RYDCOPY_OK;
  });
}

rydcopy_status rydcopy_config_from_json(const char* json_text, rydcopy_config** out) {
  if (!json_text) return null_arg("json_text");
  if (!out) return null_arg("out");
  return guarded([&] {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      throw rydcopy::ConfigError(e.what());
    }
    *out = new rydcopy_config{rydcopy::ExperimentConfig::from_json(j)};
    return RYDCOPY_OK;
  });
}

void rydcopy_config_free(rydcopy_config* config) { delete config; }

rydcopy_status rydcopy_config_set_seed(rydcopy_config* config, uint64_t seed) {
  if (!config) return null_arg("config");
  config->cfg.seed = seed;
  return RYDCOPY_OK;
}

rydcopy_status rydcopy_config_set_output_dir(rydcopy_config* config, const char* dir) {
  if (!config) return null_arg("config");
  if (!dir) return null_arg("dir");
  config->cfg.output_dir = dir;
  return RYDCOPY_OK;
}

rydcopy_status rydcopy_config_set_trajectories(rydcopy_config* config, size_t count) {
  if (!config) return null_arg("config");
  return guarded([&] {
    auto next = config->cfg;
    next.gate.trajectories = count;
    next.validate();
    config->cfg = std::move(next);
    return RYDCOPY_OK;
  });
}

rydcopy_status rydcopy_config_set_workers(rydcopy_config* config, size_t count) {
  if (!config) return null_arg("config");
  if (count < 1) {
    g_last_error = "workers must be at least 1";
    return RYDCOPY_ERR_CONFIG;
  }
  config->cfg.workers = count;
  return RYDCOPY_OK;
}

rydcopy_status rydcopy_config_to_json(const rydcopy_config* config, char** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = dup_string(config->cfg.to_json().dump(2));
    return RYDCOPY_OK;
  });
}

rydcopy_status rydcopy_config_hash(const rydcopy_config* config, char** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = dup_string(config->cfg.hash());
    return RYDCOPY_OK;
  });
}

void rydcopy_string_free(char* s) { delete[] s; }

rydcopy_status rydcopy_run(const rydcopy_config* config, const char* command, rydcopy_result** out) {
  if (!config) return null_arg("config");
  if (!command) return null_arg("command");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto res = std::make_unique<rydcopy_result>();
    res->started_utc = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    res->result = rydcopy::run_command(config->cfg, command);
    res->elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& t : res->result.tables)
      res->csv.push_back(rydcopy::render_csv(t, config->cfg, res->result.command));
    res->summary = res->result.summary.dump();
    const bool passed = res->result.passed;
    *out = res.release();
    if (!passed) {
      g_last_error = "validation failed";
      return RYDCOPY_ERR_VALIDATION_FAILED;
    }
    return RYDCOPY_OK;
  });
}

rydcopy_status rydcopy_result_write(const rydcopy_result* result, const rydcopy_config* config) {
  if (!result) return null_arg("result");
  if (!config) return null_arg("config");
  try {
    g_last_error.clear();
    auto* r = const_cast<rydcopy_result*>(result);
    r->files = rydcopy::write_outputs(result->result, config->cfg, config->cfg.output_dir, result->elapsed_s,
                                      result->started_utc);
    return RYDCOPY_OK;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RYDCOPY_ERR_IO;
  }
}

size_t rydcopy_result_table_count(const rydcopy_result* result) { return result ? result->csv.size() : 0; }

const char* rydcopy_result_table_name(const rydcopy_result* result, size_t index) {
  if (!result || index >= result->result.tables.size()) return nullptr;
  return result->result.tables[index].name.c_str();
}

const char* rydcopy_result_table_csv(const rydcopy_result* result, size_t index) {
  if (!result || index >= result->csv.size()) return nullptr;
  return result->csv[index].c_str();
}

const char* rydcopy_result_summary_json(const rydcopy_result* result) {
  return result ? result->summary.c_str() : nullptr;
}

int rydcopy_result_passed(const rydcopy_result* result) { return result && result->result.passed ? 1 : 0; }

size_t rydcopy_result_file_count(const rydcopy_result* result) { return result ? result->files.size() : 0; }

const char* rydcopy_result_file_path(const rydcopy_result* result, size_t index) {
  if (!result || index >= result->files.size()) return nullptr;
  return result->files[index].c_str();
}

void rydcopy_result_free(rydcopy_result* result) { delete result; }

rydcopy_status rydcopy_gate_time(size_t n_ancillae, double omega_mhz, const char* envelope, double* out) {
  if (!envelope) return null_arg("envelope");
  if (!out) return null_arg("out");
  return guarded([&] {
    if (n_ancillae < 1) throw rydcopy::ConfigError("need at least one ancilla");
    const auto mode = rydcopy::parse_envelope_mode(envelope);
    *out = rydcopy::build_copy_schedule(n_ancillae, rydcopy::angular_from_mhz(omega_mhz), mode).total_time();
    return RYDCOPY_OK;
  });
}

rydcopy_status rydcopy_exact_gate_time(size_t n_ancillae, double omega, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = rydcopy::exact_gate_time(n_ancillae, omega);
    return RYDCOPY_OK;
  });
}

rydcopy_status rydcopy_approx_gate_time(size_t n_ancillae, double omega, double* out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = rydcopy::approx_gate_time(n_ancillae, omega);
    return RYDCOPY_OK;
  });
}

rydcopy_status rydcopy_gate_infidelity(const double* p0, const double* p1, size_t count, double* out) {
  if (!p0 || !p1) return null_arg("distribution");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = rydcopy::gate_infidelity(std::span<const double>(p0, count), std::span<const double>(p1, count));
    return RYDCOPY_OK;
  });
}

void rydcopy_readout_params_default(rydcopy_readout_params* out) {
  if (!out) return;
  const rydcopy::ReadoutParams d;
  *out = {d.t_photon_us, d.t_bg_us, d.t_loss_us, d.t_meas_us, d.dt_us, d.detection_fraction};
}

rydcopy_status rydcopy_measurement_infidelity(const double* p0, const double* p1, size_t count,
                                              const rydcopy_readout_params* params, double* out) {
  if (!p0 || !p1) return null_arg("distribution");
  if (!params) return null_arg("params");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto q = rydcopy::aggregated_distributions(std::span<const double>(p0, count),
                                                     std::span<const double>(p1, count), to_params(*params));
    *out = rydcopy::measurement_infidelity(q[0], q[1]);
    return RYDCOPY_OK;
  });
}

}  // extern "C"
