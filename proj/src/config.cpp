#include "rydcopy/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rydcopy/error.hpp"

namespace rydcopy {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void positive(double v, const std::string& name) {
  if (!(v > 0) || std::isnan(v)) throw ConfigError(name + " must be positive");
}

}  // namespace

std::string fnv1a64_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig::ExperimentConfig() {
  for (int i = 0; i <= 50; ++i) readout.t_meas_us.push_back(0.5 * i);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  reject_unknown(j, {"layout", "species", "gate", "readout", "target_if", "seed", "output_dir", "workers"}, "config");
  if (j.contains("layout")) {
    const auto& l = j["layout"];
    reject_unknown(l, {"n_ancillae", "radius_um", "min_separation_um"}, "layout");
    read(l, "n_ancillae", c.layout.n_ancillae, "layout");
    read(l, "radius_um", c.layout.radius_um, "layout");
    read(l, "min_separation_um", c.layout.min_separation_um, "layout");
  }
  if (j.contains("species")) {
    const auto& s = j["species"];
    reject_unknown(s, {"c6_cs_cs_ghz_um6", "c6_cs_rb_ghz_um6", "c6_rb_rb_ghz_um6", "t1_cs_us", "t1_rb_us"}, "species");
    read(s, "c6_cs_cs_ghz_um6", c.species.c6.cs_cs_ghz_um6, "species");
    read(s, "c6_cs_rb_ghz_um6", c.species.c6.cs_rb_ghz_um6, "species");
    read(s, "c6_rb_rb_ghz_um6", c.species.c6.rb_rb_ghz_um6, "species");
    read(s, "t1_cs_us", c.species.t1_cs_us, "species");
    read(s, "t1_rb_us", c.species.t1_rb_us, "species");
  }
  if (j.contains("gate")) {
    const auto& g = j["gate"];
    reject_unknown(g,
                   {"omega_mhz", "envelope", "trajectories", "estimator", "integrator", "substeps_per_segment", "decay",
                    "table_n_max"},
                   "gate");
    read(g, "omega_mhz", c.gate.omega_mhz, "gate");
    if (g.contains("envelope")) c.gate.envelope = parse_envelope_mode(g["envelope"].get<std::string>());
    read(g, "trajectories", c.gate.trajectories, "gate");
    if (g.contains("estimator")) c.gate.estimator = parse_estimator(g["estimator"].get<std::string>());
    if (g.contains("integrator")) c.gate.integrator.kind = parse_integrator_kind(g["integrator"].get<std::string>());
    read(g, "substeps_per_segment", c.gate.integrator.substeps_per_segment, "gate");
    read(g, "decay", c.gate.decay, "gate");
    read(g, "table_n_max", c.gate.table_n_max, "gate");
  }
  if (j.contains("readout")) {
    const auto& r = j["readout"];
    reject_unknown(r,
                   {"t_photon_us", "t_bg_us", "t_loss_us", "dt_us", "detection_fraction", "t_meas_us", "mle",
                    "mle_records"},
                   "readout");
    read(r, "t_photon_us", c.readout.params.t_photon_us, "readout");
    read(r, "t_bg_us", c.readout.params.t_bg_us, "readout");
    read(r, "t_loss_us", c.readout.params.t_loss_us, "readout");
    read(r, "dt_us", c.readout.params.dt_us, "readout");
    read(r, "detection_fraction", c.readout.params.detection_fraction, "readout");
    read(r, "t_meas_us", c.readout.t_meas_us, "readout");
    read(r, "mle", c.readout.mle, "readout");
    read(r, "mle_records", c.readout.mle_records, "readout");
  }
  read(j, "target_if", c.target_if, "config");
  read(j, "seed", c.seed, "config");
  read(j, "output_dir", c.output_dir, "config");
  read(j, "workers", c.workers, "config");
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json j;
  j["layout"] = {{"n_ancillae", layout.n_ancillae},
                 {"radius_um", layout.radius_um},
                 {"min_separation_um", layout.min_separation_um}};
  j["species"] = {{"c6_cs_cs_ghz_um6", species.c6.cs_cs_ghz_um6},
                  {"c6_cs_rb_ghz_um6", species.c6.cs_rb_ghz_um6},
                  {"c6_rb_rb_ghz_um6", species.c6.rb_rb_ghz_um6},
                  {"t1_cs_us", species.t1_cs_us},
                  {"t1_rb_us", species.t1_rb_us}};
  j["gate"] = {{"omega_mhz", gate.omega_mhz},
               {"envelope", to_string(gate.envelope)},
               {"trajectories", gate.trajectories},
               {"estimator", to_string(gate.estimator)},
               {"integrator", to_string(gate.integrator.kind)},
               {"substeps_per_segment", gate.integrator.substeps_per_segment},
               {"decay", gate.decay},
               {"table_n_max", gate.table_n_max}};
  const auto& p = readout.params;
  j["readout"] = {{"t_photon_us", p.t_photon_us},
                  {"t_bg_us", p.t_bg_us},
                  {"t_loss_us", p.t_loss_us},
                  {"dt_us", p.dt_us},
                  {"detection_fraction", p.detection_fraction},
                  {"t_meas_us", readout.t_meas_us},
                  {"mle", readout.mle},
                  {"mle_records", readout.mle_records}};
  j["target_if"] = target_if;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["workers"] = workers;
  return j;
}

std::string ExperimentConfig::hash() const {
  json j = to_json();
  j.erase("output_dir");
  j.erase("workers");
  return fnv1a64_hex(j.dump());
}

void ExperimentConfig::validate() const {
  if (layout.n_ancillae.empty()) throw ConfigError("layout.n_ancillae must be non-empty");
  for (auto n : layout.n_ancillae)
    if (n < 1 || n > 11) throw ConfigError("layout.n_ancillae entries must be in 1..11");
  positive(layout.radius_um, "layout.radius_um");
  positive(layout.min_separation_um, "layout.min_separation_um");
  positive(species.t1_cs_us, "species.t1_cs_us");
  positive(species.t1_rb_us, "species.t1_rb_us");
  if (gate.omega_mhz.empty()) throw ConfigError("gate.omega_mhz must be non-empty");
  for (double w : gate.omega_mhz) positive(w, "gate.omega_mhz entries");
  if (gate.integrator.substeps_per_segment < 1) throw ConfigError("gate.substeps_per_segment must be at least 1");
  if (gate.trajectories < 1 && gate.estimator == Estimator::sampled)
    throw ConfigError("gate.trajectories must be at least 1 for the sampled estimator");
  if (gate.table_n_max < 1) throw ConfigError("gate.table_n_max must be at least 1");
  readout.params.validate();
  if (readout.t_meas_us.empty()) throw ConfigError("readout.t_meas_us must be non-empty");
  for (double t : readout.t_meas_us)
    if (!(t >= 0) || !std::isfinite(t)) throw ConfigError("readout.t_meas_us entries must be nonnegative");
  if (readout.mle && readout.mle_records < 1) throw ConfigError("readout.mle_records must be at least 1");
  if (target_if.empty()) throw ConfigError("target_if must be non-empty");
  for (double t : target_if)
    if (!(t > 0 && t <= 0.5)) throw ConfigError("target_if entries must be in (0, 0.5]");
  if (workers < 1) throw ConfigError("workers must be at least 1");
}

Layout ExperimentConfig::layout_for(std::size_t n_ancillae) const {
  return ring_layout(n_ancillae, layout.radius_um, layout.min_separation_um, Species::rubidium(species.t1_rb_us),
                     Species::cesium(species.t1_cs_us));
}

}  // namespace rydcopy
