#include "rydcopy/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rydcopy/error.hpp"

namespace rydcopy {

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Layout::Layout(std::vector<AtomSpec> atoms, double min_separation_um)
    : atoms_(std::move(atoms)), min_separation_um_(min_separation_um) {
  if (atoms_.size() < 2) throw ConfigError("layout needs a data atom and at least one ancilla");
  if (!(min_separation_um_ > 0.0)) throw ConfigError("minimum separation must be positive");
  if (atoms_[0].role != AtomRole::data) throw ConfigError("atom 0 must be the data atom");
  for (std::size_t i = 1; i < atoms_.size(); ++i) {
    if (atoms_[i].role != AtomRole::ancilla) throw ConfigError("exactly one data atom is allowed");
  }
  for (const auto& a : atoms_) {
    if (!(a.species.rydberg_lifetime_us > 0.0)) throw ConfigError("Rydberg lifetime must be positive");
  }
  // Small slack so that exact-contact configurations (hexagon chord == radius) pass.
  const double d = smallest_pair_distance_um();
  if (d < min_separation_um_ * (1.0 - 1e-12)) {
    throw ConfigError("pair distance " + std::to_string(d) + " µm below minimum separation " +
                      std::to_string(min_separation_um_) + " µm");
  }
}

double Layout::smallest_pair_distance_um() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    for (std::size_t j = i + 1; j < atoms_.size(); ++j)
      best = std::min(best, distance(atoms_[i].position_um, atoms_[j].position_um));
  return best;
}

double C6Table::lookup(SpeciesName a, SpeciesName b) const {
  if (a == SpeciesName::Cs && b == SpeciesName::Cs) return cs_cs_ghz_um6;
  if (a == SpeciesName::Rb && b == SpeciesName::Rb) return rb_rb_ghz_um6;
  return cs_rb_ghz_um6;
}

BlockadeMatrix::BlockadeMatrix(std::size_t n) : n_(n), v_(n * n, 0.0) {}

double BlockadeMatrix::angular(std::size_t i, std::size_t j) const {
  return 2.0 * std::numbers::pi * mhz(i, j);
}

void BlockadeMatrix::set_mhz(std::size_t i, std::size_t j, double value) {
  if (i == j) throw ConfigError("blockade matrix diagonal is fixed at zero");
  v_[i * n_ + j] = value;
  v_[j * n_ + i] = value;
}

double BlockadeMatrix::max_abs_mhz() const {
  double m = 0.0;
  for (double v : v_) m = std::max(m, std::abs(v));
  return m;
}

BlockadeMatrix BlockadeMatrix::uniform(std::size_t n, double value_mhz) {
  BlockadeMatrix b(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) b.set_mhz(i, j, value_mhz);
  return b;
}

Layout ring_layout(std::size_t n_ancillae, double radius_um, double min_separation_um, Species data,
                   Species ancilla) {
  if (n_ancillae < 1) throw ConfigError("ring layout needs at least one ancilla");
  if (!(radius_um > 0.0)) throw ConfigError("ring radius must be positive");
  std::vector<AtomSpec> atoms;
  atoms.reserve(n_ancillae + 1);
  atoms.push_back({data, AtomRole::data, {0.0, 0.0}});
  for (std::size_t k = 0; k < n_ancillae; ++k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_ancillae);
    atoms.push_back({ancilla, AtomRole::ancilla, {radius_um * std::cos(phi), radius_um * std::sin(phi)}});
  }
  return Layout(std::move(atoms), min_separation_um);
}

BlockadeMatrix pairwise_blockade(const Layout& layout, const C6Table& c6) {
  const auto& atoms = layout.atoms();
  BlockadeMatrix v(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      const double coeff = c6.lookup(atoms[i].species.name, atoms[j].species.name);
      const double r = distance(atoms[i].position_um, atoms[j].position_um);
      // GHz·µm⁶ / µm⁶ -> MHz
      v.set_mhz(i, j, 1e3 * coeff / std::pow(r, 6));
    }
  }
  return v;
}

}  // namespace rydcopy
