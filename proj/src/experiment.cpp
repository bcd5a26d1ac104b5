#include "rydcopy/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "rydcopy/error.hpp"
#include "rydcopy/parallel.hpp"
#include "rydcopy/readout.hpp"
#include "rydcopy/special.hpp"
#include "rydcopy/symmetric.hpp"

#ifndef RYDCOPY_VERSION
#define RYDCOPY_VERSION "0.0.0"
#endif

namespace rydcopy {

using nlohmann::json;

namespace {

constexpr std::uint64_t kGateStream = 0x67617465;  // "gate"
constexpr std::uint64_t kMleStream = 0x6d6c65;     // "mle"
constexpr std::uint64_t kValidateStream = 0x76616c;

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : kMissing; }

std::string fmt_size(std::size_t v) { return std::to_string(v); }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

CommandResult cmd_gate_time_table(const ExperimentConfig& cfg) {
  CommandResult r;
  r.command = "gate-time-table";
  Table t{"gate_time_table", {"n_ancillae", "exact_pi_over_omega", "approx_pi_over_omega", "shaped_pi_over_omega",
                              "shaped_over_exact"},
          {}};
  // Times scale as 1/Omega; any drive gives the same table in units of pi/Omega.
  const double omega = 1.0;
  for (std::size_t n = 1; n <= cfg.gate.table_n_max; ++n) {
    const double exact = exact_gate_time(n, omega) * omega / std::numbers::pi;
    const double approx = approx_gate_time(n, omega) * omega / std::numbers::pi;
    const double shaped = build_copy_schedule(n, omega, EnvelopeMode::shaped).total_time() * omega / std::numbers::pi;
    t.rows.push_back({fmt_size(n), format_number(exact), format_number(approx), format_number(shaped),
                      format_number(shaped / exact)});
  }
  r.summary["envelope_area_factor"] = envelope_area_factor(EnvelopeMode::shaped);
  r.tables.push_back(std::move(t));
  return r;
}

std::vector<SweepCell> run_gate_sweep(const ExperimentConfig& cfg) {
  std::vector<SweepCell> cells;
  for (std::size_t n : cfg.layout.n_ancillae) {
    const Layout layout = cfg.layout_for(n);
    for (std::size_t k = 0; k < cfg.gate.omega_mhz.size(); ++k) {
      const double f = cfg.gate.omega_mhz[k];
      const auto sim = GateSimulator::for_layout(layout, cfg.species.c6, angular_from_mhz(f), cfg.gate.envelope,
                                                 cfg.gate.integrator, cfg.gate.decay);
      const std::uint64_t seed = derive_seed(cfg.seed, kGateStream, n * 1000 + k);
      SweepCell c;
      c.n_ancillae = n;
      c.omega_mhz = f;
      c.dist = excitation_distributions(*sim, cfg.gate.trajectories, seed, cfg.gate.estimator, cfg.workers);
      c.if_gate = gate_infidelity(c.dist);
      c.if_gate_stderr = gate_infidelity_stderr(c.dist);
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

std::vector<SweepCell> best_per_n(const std::vector<SweepCell>& cells) {
  std::vector<SweepCell> best;
  for (const auto& c : cells) {
    auto it = std::find_if(best.begin(), best.end(), [&](const SweepCell& b) { return b.n_ancillae == c.n_ancillae; });
    if (it == best.end()) {
      best.push_back(c);
    } else if (c.if_gate < it->if_gate || (c.if_gate == it->if_gate && c.omega_mhz < it->omega_mhz)) {
      *it = c;
    }
  }
  return best;
}

CommandResult cmd_gate_sweep(const ExperimentConfig& cfg) {
  CommandResult r;
  r.command = "gate-sweep";
  const auto cells = run_gate_sweep(cfg);
  Table sweep{"gate_sweep",
              {"n_ancillae", "omega_mhz", "if_gate", "if_gate_stderr", "no_jump_weight_0", "no_jump_weight_1",
               "trajectories_0", "trajectories_1", "estimator"},
              {}};
  Table dist{"gate_distributions", {"n_ancillae", "omega_mhz", "logical_state", "n_excited", "p", "stderr"}, {}};
  for (const auto& c : cells) {
    sweep.rows.push_back({fmt_size(c.n_ancillae), format_number(c.omega_mhz), format_number(c.if_gate),
                          format_number(c.if_gate_stderr), format_number(c.dist.no_jump_weight[0]),
                          format_number(c.dist.no_jump_weight[1]), fmt_size(c.dist.trajectories[0]),
                          fmt_size(c.dist.trajectories[1]), to_string(c.dist.estimator)});
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t n = 0; n < c.dist.p[s].size(); ++n)
        dist.rows.push_back({fmt_size(c.n_ancillae), format_number(c.omega_mhz), fmt_size(s), fmt_size(n),
                             format_number(c.dist.p[s][n]), format_number(c.dist.stderr_[s][n])});
  }
  Table best{"gate_best_omega", {"n_ancillae", "omega_mhz", "if_gate", "if_gate_stderr"}, {}};
  for (const auto& b : best_per_n(cells)) {
    best.rows.push_back({fmt_size(b.n_ancillae), format_number(b.omega_mhz), format_number(b.if_gate),
                         format_number(b.if_gate_stderr)});
    r.summary["best_omega_mhz"][std::to_string(b.n_ancillae)] = b.omega_mhz;
  }
  r.tables = {std::move(sweep), std::move(dist), std::move(best)};
  return r;
}

std::vector<ReadoutPoint> readout_curve(const ExperimentConfig& cfg, const std::vector<SweepCell>& best) {
  std::vector<ReadoutPoint> out;
  const auto& ts = cfg.readout.t_meas_us;
  auto params_at = [&](double t) {
    ReadoutParams p = cfg.readout.params;
    p.t_meas_us = t;
    return p;
  };
  const std::vector<double> perfect0{1.0, 0.0}, perfect1{0.0, 1.0};
  for (double t : ts) {
    const auto q = aggregated_distributions(perfect0, perfect1, params_at(t));
    out.push_back({1, "perfect_gate", std::nullopt, t, measurement_infidelity(q[0], q[1]), 0.0, 0.0});
  }
  for (const auto& b : best) {
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const auto q = aggregated_distributions(b.dist.p[0], b.dist.p[1], params_at(ts[k]));
      out.push_back({b.n_ancillae, "aggregated", b.omega_mhz, ts[k], measurement_infidelity(q[0], q[1]),
                     b.if_gate_stderr, b.if_gate});
    }
    if (!cfg.readout.mle) continue;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const std::uint64_t seed = derive_seed(cfg.seed, kMleStream, b.n_ancillae * 100000 + k);
      const auto est =
          mle_infidelity(b.dist.p[0], b.dist.p[1], params_at(ts[k]), cfg.readout.mle_records, seed, cfg.workers);
      out.push_back({b.n_ancillae, "atom_resolved", b.omega_mhz, ts[k], est.infidelity, est.stderr_, b.if_gate});
    }
  }
  return out;
}

namespace {

Table readout_table(const std::vector<ReadoutPoint>& curve) {
  Table t{"readout_curve", {"n_ancillae", "scheme", "omega_mhz", "t_meas_us", "if", "stderr", "if_gate"}, {}};
  for (const auto& p : curve)
    t.rows.push_back({fmt_size(p.n_ancillae), p.scheme, opt_number(p.omega_mhz), format_number(p.t_meas_us),
                      format_number(p.infidelity), format_number(p.stderr_), format_number(p.if_gate)});
  return t;
}

}  // namespace

CommandResult cmd_readout_curve(const ExperimentConfig& cfg) {
  CommandResult r;
  r.command = "readout-curve";
  const auto best = best_per_n(run_gate_sweep(cfg));
  r.tables.push_back(readout_table(readout_curve(cfg, best)));
  for (const auto& b : best) r.summary["best_omega_mhz"][std::to_string(b.n_ancillae)] = b.omega_mhz;
  return r;
}

std::vector<MinTimeRow> min_times(const std::vector<ReadoutPoint>& curve, std::vector<double> targets,
                                  const std::string& scheme) {
  std::sort(targets.begin(), targets.end(), std::greater<>());
  std::vector<std::size_t> ns;
  for (const auto& p : curve)
    if (p.scheme == scheme && std::find(ns.begin(), ns.end(), p.n_ancillae) == ns.end()) ns.push_back(p.n_ancillae);
  std::vector<MinTimeRow> rows;
  for (std::size_t n : ns) {
    std::vector<const ReadoutPoint*> pts;
    for (const auto& p : curve)
      if (p.scheme == scheme && p.n_ancillae == n) pts.push_back(&p);
    std::sort(pts.begin(), pts.end(), [](auto* a, auto* b) { return a->t_meas_us < b->t_meas_us; });
    const double floor = pts.front()->if_gate;
    for (double target : targets) {
      MinTimeRow row{n, scheme, target, std::nullopt, "", floor};
      if (floor > target) {
        row.reason = "gate_floor";
      } else {
        for (const auto* p : pts) {
          if (p->t_meas_us > 0 && p->infidelity <= target) {
            row.t_min_us = p->t_meas_us;
            break;
          }
        }
        if (!row.t_min_us) row.reason = "grid";
      }
      rows.push_back(row);
    }
  }
  return rows;
}

CommandResult cmd_min_time(const ExperimentConfig& cfg) {
  CommandResult r;
  r.command = "min-time";
  const auto best = best_per_n(run_gate_sweep(cfg));
  const auto curve = readout_curve(cfg, best);
  Table t{"min_time", {"n_ancillae", "scheme", "target_if", "t_min_us", "missing_reason", "if_gate"}, {}};
  std::vector<std::string> schemes{"perfect_gate", "aggregated"};
  if (cfg.readout.mle) schemes.push_back("atom_resolved");
  for (const auto& scheme : schemes)
    for (const auto& m : min_times(curve, cfg.target_if, scheme))
      t.rows.push_back({fmt_size(m.n_ancillae), m.scheme, format_number(m.target_if), opt_number(m.t_min_us),
                        m.reason.empty() ? "" : m.reason, format_number(m.if_gate)});
  r.tables.push_back(std::move(t));
  r.tables.push_back(readout_table(curve));
  return r;
}

namespace {

struct Check {
  std::string name;
  double measured;
  double tolerance;
  bool passed;
};

double rk4_rabi_error(std::size_t steps) {
  // One ancilla, data atom idle: |0> <-> |R> on the ancilla under a square pulse.
  const Model m(BlockadeMatrix(2), DecayModel::none(2));
  PulseSegment seg;
  seg.target = PulseTarget::ancilla_0R;
  seg.amplitude = 1.0;
  seg.duration = 2.0;
  StateVector psi = StateVector::product(m.basis(), std::vector<Level>{Level::g0, Level::g0});
  integrate_segment(m, psi, seg, seg.duration / static_cast<double>(steps));
  const std::size_t g = 0;
  const std::size_t r = m.basis().stride(1) * static_cast<std::size_t>(Level::R);
  return std::abs(psi[g] - cplx(std::cos(seg.duration), 0.0)) +
         std::abs(psi[r] - cplx(0.0, -std::sin(seg.duration)));
}

}  // namespace

CommandResult cmd_validate(const ExperimentConfig& cfg) {
  CommandResult r;
  r.command = "validate";
  std::vector<Check> checks;

  const double omega = angular_from_mhz(10.0);
  for (std::size_t n : {2, 3}) {
    const double d = compare_full_vs_symmetric(n, omega, 500.0 * omega, EnvelopeMode::square);
    checks.push_back({"symmetric_vs_full_n" + std::to_string(n), d, 1e-6, d <= 1e-6});
  }

  const double e1 = rk4_rabi_error(40), e2 = rk4_rabi_error(80);
  checks.push_back({"rk4_error_ratio_halving", e1 / e2, 16.0, e1 / e2 > 12.0 && e1 / e2 < 20.0});

  const double g = lower_incomplete_gamma_int(6, 200.0);
  checks.push_back({"gamma_6_200_rel_error", std::abs(g - 120.0) / 120.0, 1e-9, std::abs(g - 120.0) / 120.0 <= 1e-9});
  const double g1 = std::abs(lower_incomplete_gamma_int(1, 0.7) - (1.0 - std::exp(-0.7)));
  checks.push_back({"gamma_1_x_abs_error", g1, 1e-14, g1 <= 1e-14});

  ReadoutParams rp = cfg.readout.params;
  rp.t_meas_us = 6.0;
  const CountDistribution atom = p_atom_analytic(rp);
  const double norm_err = std::abs(atom.total() - 1.0);
  checks.push_back({"p_atom_normalization", norm_err, 1e-10, norm_err <= 1e-10});

  {
    const std::size_t n_sites = 5, n_exc = 3, samples = 20000;
    std::vector<double> p(n_sites + 1, 0.0);
    p[n_exc] = 1.0;
    const CountDistribution q = aggregated_distribution(p, rp);
    std::vector<std::size_t> totals(samples);
    parallel_for(samples, cfg.workers, [&](std::size_t i) {
      const auto rec = markov_sample(n_exc, n_sites, rp, derive_seed(cfg.seed, kValidateStream, i));
      std::size_t s = 0;
      for (auto c : rec) s += c;
      totals[i] = s;
    });
    const double tv = total_variation(q, totals);
    checks.push_back({"readout_analytic_vs_markov_tvd", tv, 0.03, tv < 0.03});
  }

  Table t{"validate", {"check", "measured", "tolerance", "passed"}, {}};
  for (const auto& c : checks) {
    t.rows.push_back({c.name, format_number(c.measured), format_number(c.tolerance), c.passed ? "true" : "false"});
    r.passed = r.passed && c.passed;
    r.summary["checks"][c.name] = {{"measured", c.measured}, {"tolerance", c.tolerance}, {"passed", c.passed}};
  }
  r.summary["passed"] = r.passed;
  r.tables.push_back(std::move(t));
  return r;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"gate-time-table", "gate-sweep", "readout-curve", "min-time", "validate"};
  return names;
}

CommandResult run_command(const ExperimentConfig& cfg, const std::string& name) {
  cfg.validate();
  if (name == "gate-time-table") return cmd_gate_time_table(cfg);
  if (name == "gate-sweep") return cmd_gate_sweep(cfg);
  if (name == "readout-curve") return cmd_readout_curve(cfg);
  if (name == "min-time") return cmd_min_time(cfg);
  if (name == "validate") return cmd_validate(cfg);
  throw ConfigError("unknown command '" + name + "'");
}

std::string render_csv(const Table& t, const ExperimentConfig& cfg, const std::string& command) {
  std::ostringstream os;
  os << "# rydcopy " << RYDCOPY_VERSION << "\n";
  os << "# command: " << command << "\n";
  os << "# config_hash: " << cfg.hash() << "\n";
  os << "# seed: " << cfg.seed << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  return os.str();
}

std::vector<std::string> write_outputs(const CommandResult& r, const ExperimentConfig& cfg, const std::string& dir,
                                       double elapsed_s, const std::string& started_utc) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> paths;
  json files = json::array();
  for (const auto& t : r.tables) {
    const fs::path p = fs::path(dir) / (t.name + ".csv");
    std::ofstream out(p, std::ios::binary);
    out << render_csv(t, cfg, r.command);
    if (!out) throw std::runtime_error("failed writing '" + p.string() + "'");
    paths.push_back(p.string());
    files.push_back({{"file", t.name + ".csv"}, {"rows", t.rows.size()}});
  }
  json side;
  side["command"] = r.command;
  side["version"] = RYDCOPY_VERSION;
  side["config_hash"] = cfg.hash();
  side["seed"] = cfg.seed;
  side["workers"] = cfg.workers;
  side["started_utc"] = started_utc;
  side["elapsed_s"] = elapsed_s;
  side["files"] = files;
  side["summary"] = r.summary;
  side["config"] = cfg.to_json();
  const fs::path p = fs::path(dir) / (r.command + ".json");
  std::ofstream out(p, std::ios::binary);
  out << side.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing '" + p.string() + "'");
  paths.push_back(p.string());
  return paths;
}

}  // namespace rydcopy
