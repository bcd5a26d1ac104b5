#include "rydcopy/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "rydcopy/error.hpp"

namespace rydcopy {

Basis::Basis(std::size_t n_atoms) : n_(n_atoms), dim_(1), strides_(n_atoms) {
  if (n_atoms == 0 || n_atoms > 12) throw ConfigError("basis supports 1..12 atoms");
  for (std::size_t a = 0; a < n_atoms; ++a) {
    strides_[a] = dim_;
    dim_ *= 4;
  }
}

std::size_t Basis::index_of(std::span<const Level> levels) const {
  if (levels.size() != n_) throw ConfigError("level list does not match atom count");
  std::size_t idx = 0;
  for (std::size_t a = 0; a < n_; ++a) idx += static_cast<std::size_t>(levels[a]) * strides_[a];
  return idx;
}

std::size_t Basis::count_in(std::size_t index, Level lv, std::size_t first_atom) const {
  std::size_t c = 0;
  for (std::size_t a = first_atom; a < n_; ++a) c += level(index, a) == lv;
  return c;
}

StateVector StateVector::product(const Basis& basis, std::span<const Level> levels) {
  StateVector s(basis.dim());
  s[basis.index_of(levels)] = 1.0;
  return s;
}

double StateVector::norm2() const {
  double n = 0.0;
  for (const auto& a : amp_) n += std::norm(a);
  return n;
}

void StateVector::scale(double s) {
  for (auto& a : amp_) a *= s;
}

bool StateVector::all_finite() const {
  return std::all_of(amp_.begin(), amp_.end(),
                     [](const cplx& a) { return std::isfinite(a.real()) && std::isfinite(a.imag()); });
}

DecayModel DecayModel::from_layout(const Layout& layout) {
  DecayModel d;
  for (const auto& a : layout.atoms()) d.gamma.push_back(1.0 / a.species.rydberg_lifetime_us);
  return d;
}

double DecayModel::max_rate() const {
  double m = 0.0;
  for (double g : gamma) m = std::max(m, g);
  return m;
}

Model::Model(const BlockadeMatrix& blockade, DecayModel decay)
    : basis_(blockade.size()), v_(blockade.size() * blockade.size()), decay_(std::move(decay)) {
  const std::size_t n = blockade.size();
  if (decay_.gamma.size() != n) throw ConfigError("decay model does not match atom count");
  for (double g : decay_.gamma)
    if (g < 0.0) throw ConfigError("decay rates must be non-negative");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v_[i * n + j] = i == j ? 0.0 : blockade.angular(i, j);

  energy_.assign(basis_.dim(), 0.0);
  half_decay_.assign(basis_.dim(), 0.0);
  std::vector<std::size_t> rydberg;
  for (std::size_t idx = 0; idx < basis_.dim(); ++idx) {
    rydberg.clear();
    for (std::size_t a = 0; a < n; ++a)
      if (basis_.level(idx, a) == Level::R) rydberg.push_back(a);
    double e = 0.0;
    double g = 0.0;
    for (std::size_t p = 0; p < rydberg.size(); ++p) {
      g += decay_.gamma[rydberg[p]];
      for (std::size_t q = p + 1; q < rydberg.size(); ++q) e += coupling(rydberg[p], rydberg[q]);
    }
    energy_[idx] = e;
    half_decay_[idx] = 0.5 * g;
  }
}

double Model::max_coupling() const {
  double m = 0.0;
  for (double v : v_) m = std::max(m, std::abs(v));
  return m;
}

std::uint32_t Model::addressed_atoms(PulseTarget t) const {
  if (t == PulseTarget::data_0R) return 1u;
  return ((1u << atoms()) - 1u) & ~1u;
}

Level drive_ground_level(PulseTarget t) { return t == PulseTarget::ancilla_1R ? Level::g1 : Level::g0; }

void apply_drive(const Model& m, PulseTarget target, double rabi, std::span<const cplx> psi, std::span<cplx> out) {
  if (rabi == 0.0) return;
  const Basis& b = m.basis();
  const std::uint32_t mask = m.addressed_atoms(target);
  const auto g = static_cast<std::size_t>(drive_ground_level(target));
  const cplx c{0.0, -rabi};
  for (std::size_t a = 0; a < b.atoms(); ++a) {
    if (!(mask >> a & 1u)) continue;
    const std::size_t s = b.stride(a);
    const std::size_t shift = (static_cast<std::size_t>(Level::R) - g) * s;
    // Visit each (g, R) pair once through the index with atom a in g.
    for (std::size_t hi = 0; hi < b.dim(); hi += 4 * s) {
      for (std::size_t lo = 0; lo < s; ++lo) {
        const std::size_t i = hi + g * s + lo;
        const std::size_t j = i + shift;
        out[i] += c * psi[j];
        out[j] += c * psi[i];
      }
    }
  }
}

void apply_blockade(const Model& m, std::span<const cplx> psi, std::span<cplx> out) {
  for (std::size_t i = 0; i < psi.size(); ++i) out[i] += cplx{0.0, -m.energy(i)} * psi[i];
}

void apply_decay_nonhermitian(const Model& m, std::span<const cplx> psi, std::span<cplx> out) {
  for (std::size_t i = 0; i < psi.size(); ++i) out[i] -= m.half_decay(i) * psi[i];
}

void evaluate_rhs(const Model& m, PulseTarget target, double rabi, std::span<const cplx> psi, std::span<cplx> out) {
  for (std::size_t i = 0; i < psi.size(); ++i) out[i] = cplx{-m.half_decay(i), -m.energy(i)} * psi[i];
  apply_drive(m, target, rabi, psi, out);
}

cplx hermitian_matrix_element(const Model& m, PulseTarget target, double rabi, std::span<const cplx> phi,
                              std::span<const cplx> psi) {
  // H psi = i * (d psi/dt without decay)
  std::vector<cplx> tmp(psi.size(), cplx{0.0, 0.0});
  apply_drive(m, target, rabi, psi, tmp);
  apply_blockade(m, psi, tmp);
  cplx acc{0.0, 0.0};
  for (std::size_t i = 0; i < psi.size(); ++i) acc += std::conj(phi[i]) * cplx{0.0, 1.0} * tmp[i];
  return acc;
}

double level_population(const Model& m, std::span<const cplx> psi, std::size_t atom, Level lv) {
  double p = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    if (m.basis().level(i, atom) == lv) p += std::norm(psi[i]);
  return p;
}

}  // namespace rydcopy
