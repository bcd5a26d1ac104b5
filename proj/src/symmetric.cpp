#include "rydcopy/symmetric.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "rydcopy/dynamics.hpp"
#include "rydcopy/error.hpp"
#include "rydcopy/hamiltonian.hpp"

namespace rydcopy {

SymState::SymState(std::size_t n, std::size_t cap) : n_(n), cap_(std::min(cap, n)) {
  if (n < 1) throw ConfigError("symmetric state needs at least one ancilla");
  for (std::size_t nr = 0; nr <= cap_; ++nr)
    for (std::size_t n1 = 0; n1 + nr <= n; ++n1) states_.push_back({n - n1 - nr, n1, nr});
  amp_.assign(states_.size(), {0.0, 0.0});
}

SymState SymState::occupation(std::size_t n, std::size_t cap, Occupation occ) {
  SymState s(n, cap);
  const auto i = s.find(occ);
  if (!i) throw ConfigError("occupation outside the capped symmetric subspace");
  s.amp_[*i] = 1.0;
  return s;
}

std::optional<std::size_t> SymState::find(Occupation occ) const {
  const auto it = std::find(states_.begin(), states_.end(), occ);
  if (it == states_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

double SymState::population(Occupation occ) const {
  const auto i = find(occ);
  return i ? std::norm(amp_[*i]) : 0.0;
}

double SymState::norm2() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return s;
}

std::vector<double> SymState::n1_distribution() const {
  std::vector<double> d(n_ + 1, 0.0);
  for (std::size_t i = 0; i < states_.size(); ++i) d[states_[i].n1] += std::norm(amp_[i]);
  return d;
}

void bosonic_step(SymState& s, BosonicMode mode, const BosonicParams& p, double dt) {
  if (p.eta < 0.0) throw ConfigError("blockade energy must be non-negative");
  const auto dim = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Occupation o = s.state(i);
    h(i, i) = 0.5 * p.eta * static_cast<double>(o.nR) * (static_cast<double>(o.nR) - 1.0);
    if (o.nR == 0) continue;
    // a_g^† a_R: one R atom drops to the driven ground level
    Occupation to = o;
    --to.nR;
    std::size_t ng;
    if (mode == BosonicMode::h0) ng = ++to.n0; else ng = ++to.n1;
    const auto j = s.find(to);
    if (!j) continue;
    const double elem = p.omega * std::sqrt(static_cast<double>(o.nR)) * std::sqrt(static_cast<double>(ng));
    h(static_cast<Eigen::Index>(*j), static_cast<Eigen::Index>(i)) = elem;
    h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*j)) = elem;
  }
  const Eigen::MatrixXcd u = (std::complex<double>(0.0, -dt) * h).exp();
  Eigen::VectorXcd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = s.amp(static_cast<std::size_t>(i));
  v = u * v;
  for (Eigen::Index i = 0; i < dim; ++i) s.amp(static_cast<std::size_t>(i)) = v(i);
}

SymmetricResult run_symmetric_protocol(std::size_t n, double eta, const Schedule& schedule,
                                       const SymmetricRunOptions& options) {
  const std::size_t cap = options.nr_cap.value_or(std::min<std::size_t>(n, 3));
  SymState s = SymState::occupation(n, cap, {n, 0, 0});
  if (!options.data_blocked) {
    for (const auto& seg : schedule.segments) {
      if (seg.target == PulseTarget::data_0R) continue;
      const BosonicMode mode = seg.target == PulseTarget::ancilla_0R ? BosonicMode::h0 : BosonicMode::h1;
      if (seg.envelope == EnvelopeMode::square) {
        bosonic_step(s, mode, {seg.phase_sign * seg.amplitude, eta}, seg.duration);
        continue;
      }
      const std::size_t m = options.substeps_per_segment;
      const double dt = seg.duration / static_cast<double>(m);
      for (std::size_t k = 0; k < m; ++k) {
        bosonic_step(s, mode, {seg.rabi_at((static_cast<double>(k) + 0.5) * dt), eta}, dt);
      }
    }
  }
  auto dist = s.n1_distribution();
  return {std::move(s), std::move(dist)};
}

std::vector<double> symmetric_populations(std::span<const std::complex<double>> psi, std::size_t n,
                                          const SymState& like) {
  const Basis basis(n + 1);
  if (psi.size() != basis.dim()) throw ConfigError("state dimension does not match ancilla count");
  std::vector<double> out(like.size(), 0.0);
  // Overlap with |n0;n1;nR> = sqrt(n0! n1! nR! / N!) * sum over distinct arrangements; done per data level.
  for (std::size_t data = 0; data < 4; ++data) {
    std::vector<std::complex<double>> overlap(like.size(), {0.0, 0.0});
    for (std::size_t idx = 0; idx < basis.dim(); ++idx) {
      if (static_cast<std::size_t>(basis.level(idx, 0)) != data) continue;
      if (basis.count_in(idx, Level::L, 1) != 0) continue;
      const Occupation o{basis.count_in(idx, Level::g0, 1), basis.count_in(idx, Level::g1, 1),
                         basis.count_in(idx, Level::R, 1)};
      if (const auto i = like.find(o)) overlap[*i] += psi[idx];
    }
    for (std::size_t i = 0; i < like.size(); ++i) {
      const Occupation o = like.state(i);
      const double log_norm = 0.5 * (std::lgamma(o.n0 + 1.0) + std::lgamma(o.n1 + 1.0) + std::lgamma(o.nR + 1.0) -
                                     std::lgamma(static_cast<double>(n) + 1.0));
      out[i] += std::norm(overlap[i]) * std::exp(2.0 * log_norm);
    }
  }
  return out;
}

double compare_full_vs_symmetric(std::size_t n, double omega, double eta, EnvelopeMode mode,
                                 const std::optional<BlockadeMatrix>& ancilla_blockade) {
  const Schedule schedule = build_copy_schedule(n, omega, mode);

  BlockadeMatrix v = ancilla_blockade.value_or(BlockadeMatrix::uniform(n + 1, eta / (2.0 * std::numbers::pi)));
  if (v.size() != n + 1) throw ConfigError("blockade matrix must cover data atom and ancillae");
  for (std::size_t j = 1; j <= n; ++j) v.set_mhz(0, j, 0.0);  // data atom ignored
  const Model model(v, DecayModel::none(n + 1));
  std::vector<Level> init(n + 1, Level::g0);
  init[0] = Level::g1;
  StateVector psi = StateVector::product(model.basis(), init);
  for (const auto& seg : schedule.segments) integrate_segment(model, psi, seg, rk4_dt_max(model, seg));

  SymmetricRunOptions opts;
  opts.nr_cap = n;
  const SymmetricResult sym = run_symmetric_protocol(n, eta, schedule, opts);
  const auto full = symmetric_populations(psi.span(), n, sym.state);
  double worst = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i)
    worst = std::max(worst, std::abs(full[i] - std::norm(sym.state.amp(i))));
  return worst;
}

}  // namespace rydcopy
