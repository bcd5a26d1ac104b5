#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace rydcopy {

enum class SpeciesName { Cs, Rb };

struct Species {
  SpeciesName name = SpeciesName::Cs;
  double rydberg_lifetime_us = 176.0;

  static Species cesium(double t1_us = 176.0) { return {SpeciesName::Cs, t1_us}; }
  static Species rubidium(double t1_us = 190.0) { return {SpeciesName::Rb, t1_us}; }
};

enum class AtomRole { data, ancilla };

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point2 a, Point2 b);

struct AtomSpec {
  Species species;
  AtomRole role = AtomRole::ancilla;
  Point2 position_um;
};

/// Atom 0 is always the data atom; atoms 1..N are ancillae.
class Layout {
 public:
  Layout(std::vector<AtomSpec> atoms, double min_separation_um);

  const std::vector<AtomSpec>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  std::size_t num_ancillae() const { return atoms_.size() - 1; }
  double min_separation_um() const { return min_separation_um_; }
  double smallest_pair_distance_um() const;

 private:
  std::vector<AtomSpec> atoms_;
  double min_separation_um_;
};

/// Van der Waals coefficients in GHz·µm⁶ (interaction V/2π = C6 / r⁶).
struct C6Table {
  double cs_cs_ghz_um6 = -2900.0;
  double cs_rb_ghz_um6 = -1700.0;
  double rb_rb_ghz_um6 = 0.0;  // unused with a single data atom

  double lookup(SpeciesName a, SpeciesName b) const;
};

/// Symmetric pairwise blockade energies, stored as V/2π in MHz.
class BlockadeMatrix {
 public:
  explicit BlockadeMatrix(std::size_t n);

  std::size_t size() const { return n_; }
  double mhz(std::size_t i, std::size_t j) const { return v_[i * n_ + j]; }
  /// Angular value in rad/µs, the unit used by the Hamiltonian.
  double angular(std::size_t i, std::size_t j) const;
  void set_mhz(std::size_t i, std::size_t j, double value);
  double max_abs_mhz() const;

  static BlockadeMatrix uniform(std::size_t n, double value_mhz);

 private:
  std::size_t n_;
  std::vector<double> v_;
};

/// Data atom (Rb) at the origin, N Cs ancillae on a regular N-gon.
Layout ring_layout(std::size_t n_ancillae, double radius_um, double min_separation_um = 2.0,
                   Species data = Species::rubidium(), Species ancilla = Species::cesium());

BlockadeMatrix pairwise_blockade(const Layout& layout, const C6Table& c6);

}  // namespace rydcopy
