#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rydcopy/geometry.hpp"
#include "rydcopy/schedule.hpp"

namespace rydcopy {

using cplx = std::complex<double>;

/// Per-atom levels. L is the absorbing loss level reached by Rydberg decay.
enum class Level : std::uint8_t { g0 = 0, g1 = 1, R = 2, L = 3 };

/// Product basis over n atoms with 4 levels each; atom a occupies base-4 digit a.
class Basis {
 public:
  explicit Basis(std::size_t n_atoms);

  std::size_t atoms() const { return n_; }
  std::size_t dim() const { return dim_; }
  std::size_t stride(std::size_t atom) const { return strides_[atom]; }
  Level level(std::size_t index, std::size_t atom) const {
    return static_cast<Level>((index / strides_[atom]) & 3u);
  }
  std::size_t index_of(std::span<const Level> levels) const;
  std::size_t count_in(std::size_t index, Level lv, std::size_t first_atom = 0) const;

 private:
  std::size_t n_;
  std::size_t dim_;
  std::vector<std::size_t> strides_;
};

class StateVector {
 public:
  explicit StateVector(std::size_t dim) : amp_(dim, cplx{0.0, 0.0}) {}

  static StateVector product(const Basis& basis, std::span<const Level> levels);

  std::size_t dim() const { return amp_.size(); }
  cplx& operator[](std::size_t i) { return amp_[i]; }
  const cplx& operator[](std::size_t i) const { return amp_[i]; }
  std::span<cplx> span() { return amp_; }
  std::span<const cplx> span() const { return amp_; }

  double norm2() const;
  void scale(double s);
  bool all_finite() const;

 private:
  std::vector<cplx> amp_;
};

/// Rydberg decay rates gamma_i = 1/T1 (µs^-1), one per atom.
struct DecayModel {
  std::vector<double> gamma;

  static DecayModel from_layout(const Layout& layout);
  static DecayModel none(std::size_t n_atoms) { return {std::vector<double>(n_atoms, 0.0)}; }
  double max_rate() const;
};

/// Immutable full-space model: atom 0 is the data atom, atoms 1..N the ancillae.
/// Diagonal terms (blockade energy, decay) are tabulated per basis state.
class Model {
 public:
  Model(const BlockadeMatrix& blockade, DecayModel decay);

  const Basis& basis() const { return basis_; }
  std::size_t atoms() const { return basis_.atoms(); }
  std::size_t num_ancillae() const { return basis_.atoms() - 1; }
  double coupling(std::size_t i, std::size_t j) const { return v_[i * atoms() + j]; }  // rad/µs
  double max_coupling() const;
  const DecayModel& decay() const { return decay_; }

  /// Blockade energy E(config) in rad/µs.
  double energy(std::size_t index) const { return energy_[index]; }
  /// Sum over atoms in R of gamma_i / 2.
  double half_decay(std::size_t index) const { return half_decay_[index]; }

  /// Atoms addressed by a drive target, as a bitmask.
  std::uint32_t addressed_atoms(PulseTarget t) const;

 private:
  Basis basis_;
  std::vector<double> v_;
  DecayModel decay_;
  std::vector<double> energy_;
  std::vector<double> half_decay_;
};

/// Ground level coupled to R by a target.
Level drive_ground_level(PulseTarget t);

/// out += -i * rabi * sum_{addressed i} (|g_i><R_i| + |R_i><g_i|) psi
void apply_drive(const Model& m, PulseTarget target, double rabi, std::span<const cplx> psi, std::span<cplx> out);

/// out += -i * E(config) * psi
void apply_blockade(const Model& m, std::span<const cplx> psi, std::span<cplx> out);

/// out += -(sum_i gamma_i [i in R] / 2) * psi
void apply_decay_nonhermitian(const Model& m, std::span<const cplx> psi, std::span<cplx> out);

/// Full right-hand side of d psi/dt: overwrites `out`.
void evaluate_rhs(const Model& m, PulseTarget target, double rabi, std::span<const cplx> psi, std::span<cplx> out);

/// <phi| H |psi> for the Hermitian part (drive + blockade), used for property checks.
cplx hermitian_matrix_element(const Model& m, PulseTarget target, double rabi, std::span<const cplx> phi,
                              std::span<const cplx> psi);

/// Population of atom `atom` in level `lv`.
double level_population(const Model& m, std::span<const cplx> psi, std::size_t atom, Level lv);

}  // namespace rydcopy
