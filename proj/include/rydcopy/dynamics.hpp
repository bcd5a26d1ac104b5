#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rydcopy/geometry.hpp"
#include "rydcopy/hamiltonian.hpp"
#include "rydcopy/rng.hpp"
#include "rydcopy/schedule.hpp"

namespace rydcopy {

enum class IntegratorKind { rk4, exponential };
std::string to_string(IntegratorKind k);
IntegratorKind parse_integrator_kind(const std::string& s);

struct IntegratorOptions {
  IntegratorKind kind = IntegratorKind::exponential;
  /// Sub-steps per pulse segment. Jumps are resolved at sub-step boundaries; the
  /// exponential integrator holds the drive constant (midpoint value) over each.
  std::size_t substeps_per_segment = 64;
  /// RK4 step bound dt_max = 1 / (rk4_safety * max(Omega_0, max|V|, max gamma)).
  double rk4_safety = 50.0;
  /// Above this the exponential integrator recomputes block propagators on every call.
  std::size_t propagator_cache_bytes = std::size_t{512} << 20;
};

double rk4_dt_max(const Model& m, const PulseSegment& seg, double safety = 50.0);

/// Classic RK4 over segment-local time [t_begin, t_end] (whole segment by default) with
/// steps no longer than dt_max. Throws NumericalError if the norm grows by more than 1e-6.
void integrate_segment(const Model& m, StateVector& psi, const PulseSegment& seg, double dt_max,
                       double t_begin = 0.0, std::optional<double> t_end = std::nullopt);

struct SubStep {
  std::size_t segment = 0;
  double t_begin = 0.0;  // segment-local
  double t_end = 0.0;
  double time_end = 0.0;  // since schedule start
};

/// Deterministic (no-jump) propagation over a sub-step grid of a schedule.
class Evolution {
 public:
  Evolution(const Model& model, const Schedule& schedule, std::size_t substeps_per_segment);
  virtual ~Evolution() = default;

  const std::vector<SubStep>& steps() const { return steps_; }
  virtual void advance(StateVector& psi, std::size_t step) const = 0;

 protected:
  const Model& model_;
  const Schedule& schedule_;
  std::vector<SubStep> steps_;
};

/// Both evolutions keep references: `model` and `schedule` must outlive them.
std::unique_ptr<Evolution> make_evolution(const Model& model, const Schedule& schedule, const IntegratorOptions& opts);

struct JumpRecord {
  std::size_t atom = 0;
  double time_us = 0.0;
};

struct TrajectoryOutcome {
  std::vector<Level> levels;  // sampled projective outcome per atom
  std::size_t n1 = 0;         // ancillae found in |1>
  std::vector<JumpRecord> jumps;
};

enum class Estimator {
  sampled,     // plain quantum-jump histogram
  stratified,  // exact no-jump branch + jump-conditioned trajectories
};
std::string to_string(Estimator e);
Estimator parse_estimator(const std::string& s);

/// Full-model copy-gate simulator for one (layout, drive) configuration. Thread-safe
/// for concurrent trajectory runs once constructed.
class GateSimulator {
 public:
  GateSimulator(const BlockadeMatrix& blockade, DecayModel decay, Schedule schedule, IntegratorOptions opts = {});
  ~GateSimulator();
  GateSimulator(const GateSimulator&) = delete;
  GateSimulator& operator=(const GateSimulator&) = delete;

  static std::unique_ptr<GateSimulator> for_layout(const Layout& layout, const C6Table& c6, double omega,
                                                   EnvelopeMode mode, IntegratorOptions opts = {},
                                                   bool with_decay = true);

  const Model& model() const { return model_; }
  const Schedule& schedule() const { return schedule_; }
  const Evolution& evolution() const { return *evolution_; }
  std::size_t num_ancillae() const { return model_.num_ancillae(); }

  /// Data atom in |logical>, ancillae in |0>.
  StateVector initial_state(int logical) const;

  /// Squared norm of the no-jump branch at the end of the schedule.
  double no_jump_weight(int logical) const;
  /// n1 distribution of the normalized no-jump final state.
  std::vector<double> no_jump_n1_distribution(int logical) const;
  /// Unnormalized no-jump final state.
  const StateVector& no_jump_final_state(int logical) const;

  TrajectoryOutcome run_trajectory(int logical, std::uint64_t seed) const;
  /// Trajectory conditioned on at least one jump (threshold drawn above the no-jump weight).
  TrajectoryOutcome run_jump_conditioned(int logical, std::uint64_t seed) const;

 private:
  struct NoJumpPath;
  const NoJumpPath& path(int logical) const;
  TrajectoryOutcome run_with_threshold(int logical, double threshold, Rng& rng) const;

  Model model_;
  Schedule schedule_;
  IntegratorOptions options_;
  std::unique_ptr<Evolution> evolution_;
  std::array<std::unique_ptr<NoJumpPath>, 2> paths_;
};

/// Applies a quantum jump R -> L on a randomly chosen atom (weights gamma_i <P_R^i>);
/// returns the atom index. The state is renormalized.
std::size_t apply_jump(const Model& m, StateVector& psi, Rng& rng);

/// Samples a basis state from |psi|^2 / <psi|psi>.
std::size_t sample_basis_index(const StateVector& psi, Rng& rng);

struct ExcitationDistributions {
  std::array<std::vector<double>, 2> p;       // p[s][n], n = 0..N
  std::array<std::vector<double>, 2> stderr_;  // per-bin standard error
  std::array<std::size_t, 2> trajectories{0, 0};
  std::array<double, 2> no_jump_weight{1.0, 1.0};  // stratified only
  Estimator estimator = Estimator::sampled;
  /// Sampled histogram backing the stderr (jump-conditioned for stratified).
  std::array<std::vector<double>, 2> sampled_histogram;

  std::size_t num_ancillae() const { return p[0].size() - 1; }
};

ExcitationDistributions excitation_distributions(const GateSimulator& sim, std::size_t n_trajectories,
                                                 std::uint64_t seed, Estimator estimator = Estimator::stratified,
                                                 std::size_t workers = 1);

/// From two explicit vectors (no error bars).
ExcitationDistributions make_distributions(std::vector<double> p0, std::vector<double> p1);

/// 1/2 - (1/4) sum_n |p0_n - p1_n|
double gate_infidelity(const ExcitationDistributions& d);
double gate_infidelity(std::span<const double> p0, std::span<const double> p1);
/// Delta-method standard error from the sampled part of the estimate.
double gate_infidelity_stderr(const ExcitationDistributions& d);

}  // namespace rydcopy
