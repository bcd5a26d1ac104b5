#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rydcopy/geometry.hpp"
#include "rydcopy/schedule.hpp"

namespace rydcopy {

/// Occupation numbers of the ancilla register: n0 + n1 + nR = N.
struct Occupation {
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  std::size_t nR = 0;
  bool operator==(const Occupation&) const = default;
};

/// Amplitudes over the symmetric (bosonic three-mode) subspace with a cap on nR.
class SymState {
 public:
  SymState(std::size_t n_ancillae, std::size_t nr_cap);

  static SymState occupation(std::size_t n_ancillae, std::size_t nr_cap, Occupation occ);

  std::size_t num_ancillae() const { return n_; }
  std::size_t nr_cap() const { return cap_; }
  std::size_t size() const { return states_.size(); }
  const Occupation& state(std::size_t i) const { return states_[i]; }
  std::optional<std::size_t> find(Occupation occ) const;

  std::complex<double>& amp(std::size_t i) { return amp_[i]; }
  const std::complex<double>& amp(std::size_t i) const { return amp_[i]; }
  double population(Occupation occ) const;
  double norm2() const;

  /// Distribution of n1 over 0..N.
  std::vector<double> n1_distribution() const;

 private:
  std::size_t n_;
  std::size_t cap_;
  std::vector<Occupation> states_;
  std::vector<std::complex<double>> amp_;
};

/// Drive amplitude and uniform pair blockade, both in rad/µs.
struct BosonicParams {
  double omega = 1.0;
  double eta = 0.0;
};

enum class BosonicMode { h0, h1 };

/// exp(-i H dt) with H = Omega (a_g^† a_R + h.c.) + (eta/2) a_R^†² a_R², g = 0 or 1.
void bosonic_step(SymState& s, BosonicMode mode, const BosonicParams& params, double dt);
inline void bosonic_step_h0(SymState& s, const BosonicParams& p, double dt) { bosonic_step(s, BosonicMode::h0, p, dt); }
inline void bosonic_step_h1(SymState& s, const BosonicParams& p, double dt) { bosonic_step(s, BosonicMode::h1, p, dt); }

struct SymmetricRunOptions {
  std::optional<std::size_t> nr_cap;  // default min(N, 3)
  bool data_blocked = false;          // data atom in R: ancilla drives inert
  std::size_t substeps_per_segment = 400;  // shaped envelopes only
};

struct SymmetricResult {
  SymState state;
  std::vector<double> n1_distribution;
};

/// Runs the ancilla segments of `schedule` from |N;0;0> with pair blockade eta (rad/µs).
SymmetricResult run_symmetric_protocol(std::size_t n_ancillae, double eta, const Schedule& schedule,
                                       const SymmetricRunOptions& options = {});

/// Projects a full-model state of N+1 atoms (atom 0 = data) onto |n0;n1;nR> of the ancillae,
/// summing over data-atom levels. Returns populations indexed like `like`.
std::vector<double> symmetric_populations(std::span<const std::complex<double>> full_state,
                                          std::size_t n_ancillae, const SymState& like);

/// Runs the full model (RK4, gamma = 0, data atom in |1>) and the bosonic model
/// on the same copy schedule and returns max |p_full - p_sym| over symmetric states.
/// `ancilla_blockade`, if given, replaces the uniform eta in the full model only.
double compare_full_vs_symmetric(std::size_t n_ancillae, double omega, double eta, EnvelopeMode mode,
                                 const std::optional<BlockadeMatrix>& ancilla_blockade = std::nullopt);

}  // namespace rydcopy
