#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "gtest/gtest.h"
#include "rydcopy/dynamics.hpp"
#include "rydcopy/hamiltonian.hpp"

using namespace rydcopy;

namespace {

StateVector random_state(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  StateVector s(dim);
  for (std::size_t i = 0; i < dim; ++i) s[i] = {g(rng), g(rng)};
  s.scale(1.0 / std::sqrt(s.norm2()));
  return s;
}

Model two_ancilla_model(double v_mhz, bool decay) {
  BlockadeMatrix v(3);
  v.set_mhz(0, 1, 0.7 * v_mhz);
  v.set_mhz(0, 2, 0.9 * v_mhz);
  v.set_mhz(1, 2, v_mhz);
  return Model(v, decay ? DecayModel{{0.2, 0.3, 0.4}} : DecayModel::none(3));
}

PulseSegment square(PulseTarget t, double amp, double dur) {
  PulseSegment s;
  s.target = t;
  s.amplitude = amp;
  s.duration = dur;
  s.target_area = amp * dur;
  return s;
}

}  // namespace

TEST(Basis, digit_layout) {
  const Basis b(3);
  EXPECT_EQ(b.dim(), 64u);
  const std::vector<Level> lv{Level::R, Level::g1, Level::L};
  const std::size_t i = b.index_of(lv);
  EXPECT_EQ(i, 2u + 1u * 4 + 3u * 16);
  EXPECT_EQ(b.level(i, 0), Level::R);
  EXPECT_EQ(b.level(i, 2), Level::L);
  EXPECT_EQ(b.count_in(i, Level::g1), 1u);
  EXPECT_EQ(b.count_in(i, Level::R, 1), 0u);
}

TEST(Hamiltonian, hermitian_for_every_target) {
  const Model m = two_ancilla_model(30.0, false);
  const auto phi = random_state(m.basis().dim(), 1);
  const auto psi = random_state(m.basis().dim(), 2);
  for (auto t : {PulseTarget::data_0R, PulseTarget::ancilla_0R, PulseTarget::ancilla_1R}) {
    const cplx a = hermitian_matrix_element(m, t, 4.2, phi.span(), psi.span());
    const cplx b = hermitian_matrix_element(m, t, 4.2, psi.span(), phi.span());
    EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-12);
  }
}

TEST(Hamiltonian, addressed_atoms) {
  const Model m = two_ancilla_model(1.0, false);
  EXPECT_EQ(m.addressed_atoms(PulseTarget::data_0R), 0b001u);
  EXPECT_EQ(m.addressed_atoms(PulseTarget::ancilla_0R), 0b110u);
  EXPECT_EQ(m.addressed_atoms(PulseTarget::ancilla_1R), 0b110u);
  EXPECT_EQ(drive_ground_level(PulseTarget::ancilla_1R), Level::g1);
}

TEST(Hamiltonian, blockade_energy_sums_pairs_in_r) {
  const Model m = two_ancilla_model(10.0, false);
  const std::vector<Level> all_r{Level::R, Level::R, Level::R};
  const double expect = 2 * std::numbers::pi * (7.0 + 9.0 + 10.0);
  EXPECT_NEAR(m.energy(m.basis().index_of(all_r)), expect, 1e-12);
  const std::vector<Level> one_r{Level::g0, Level::R, Level::g1};
  EXPECT_EQ(m.energy(m.basis().index_of(one_r)), 0.0);
}

TEST(Dynamics, rk4_preserves_norm_without_decay) {
  const Model m = two_ancilla_model(40.0, false);
  StateVector psi = random_state(m.basis().dim(), 3);
  const auto seg = square(PulseTarget::ancilla_0R, 2 * std::numbers::pi * 5, 0.3);
  integrate_segment(m, psi, seg, rk4_dt_max(m, seg));
  EXPECT_NEAR(psi.norm2(), 1.0, 1e-7);  // RK4 is not exactly unitary
}

TEST(Dynamics, rk4_is_fourth_order) {
  const Model m = two_ancilla_model(3.0, false);
  const auto seg = square(PulseTarget::ancilla_0R, 2.0, 1.5);
  const StateVector psi0 = random_state(m.basis().dim(), 4);
  StateVector ref = psi0;
  integrate_segment(m, ref, seg, 1e-5);
  auto err = [&](double dt) {
    StateVector s = psi0;
    integrate_segment(m, s, seg, dt);
    double e = 0;
    for (std::size_t i = 0; i < s.dim(); ++i) e += std::norm(s[i] - ref[i]);
    return std::sqrt(e);
  };
  const double ratio = err(0.004) / err(0.002);
  EXPECT_GT(ratio, 14.0);
  EXPECT_LT(ratio, 18.0);
}

TEST(Dynamics, single_atom_rabi_closed_form) {
  // Omega (|0><R| + h.c.): P_R = sin^2(Omega t).
  const Model m(BlockadeMatrix(2), DecayModel::none(2));
  const double omega = 1.7;
  for (double t : {0.2, 0.5, std::numbers::pi / (2 * omega)}) {
    StateVector psi = StateVector::product(m.basis(), std::vector<Level>{Level::g0, Level::g0});
    integrate_segment(m, psi, square(PulseTarget::data_0R, omega, t), 1e-3);
    EXPECT_NEAR(level_population(m, psi.span(), 0, Level::R), std::pow(std::sin(omega * t), 2), 1e-10);
  }
}

TEST(Dynamics, exponential_matches_rk4_with_decay) {
  const Model m = two_ancilla_model(25.0, true);
  Schedule s = build_copy_schedule(2, 2 * std::numbers::pi * 4, EnvelopeMode::square);
  IntegratorOptions opts;
  const auto expo = make_evolution(m, s, opts);
  StateVector a = random_state(m.basis().dim(), 5);
  StateVector b = a;
  for (std::size_t k = 0; k < expo->steps().size(); ++k) expo->advance(a, k);
  for (const auto& seg : s.segments) integrate_segment(m, b, seg, rk4_dt_max(m, seg, 400.0));
  double e = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  EXPECT_LT(e, 1e-8);
  EXPECT_LT(a.norm2(), 1.0);  // decay removes norm
}

TEST(Dynamics, exponential_shaped_converges_to_rk4) {
  const Model m = two_ancilla_model(25.0, true);
  Schedule s = build_copy_schedule(2, 2 * std::numbers::pi * 4, EnvelopeMode::shaped);
  StateVector ref = StateVector::product(m.basis(), std::vector<Level>{Level::g1, Level::g0, Level::g0});
  const StateVector start = ref;
  for (const auto& seg : s.segments) integrate_segment(m, ref, seg, rk4_dt_max(m, seg, 400.0));
  auto err = [&](std::size_t substeps) {
    IntegratorOptions opts;
    opts.substeps_per_segment = substeps;
    const auto ev = make_evolution(m, s, opts);
    StateVector a = start;
    for (std::size_t k = 0; k < ev->steps().size(); ++k) ev->advance(a, k);
    double e = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) e = std::max(e, std::abs(a[i] - ref[i]));
    return e;
  };
  const double e64 = err(64), e128 = err(128);
  EXPECT_LT(e64, 2e-3);
  EXPECT_GT(e64 / e128, 3.0);  // midpoint hold is second order
}

TEST(Dynamics, two_ancilla_symmetric_block_matches_3x3_diagonalization) {
  // Data atom idle, ancillae from |00>: the symmetric ladder |0,0>,|S_1R>,|RR> with
  // couplings sqrt(2) Omega and blockade eta on |RR>.
  const double omega = 1.1, eta = 2 * std::numbers::pi * 0.8, t = 1.9;
  BlockadeMatrix v(3);
  v.set_mhz(1, 2, 0.8);
  const Model m(v, DecayModel::none(3));
  StateVector psi = StateVector::product(m.basis(), std::vector<Level>{Level::g1, Level::g0, Level::g0});
  integrate_segment(m, psi, square(PulseTarget::ancilla_0R, omega, t), 1e-3);

  Eigen::Matrix3d h;
  h << 0, std::sqrt(2.0) * omega, 0, std::sqrt(2.0) * omega, 0, std::sqrt(2.0) * omega, 0, std::sqrt(2.0) * omega, eta;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
  Eigen::Vector3cd c0(1, 0, 0);
  Eigen::Vector3cd phases;
  for (int i = 0; i < 3; ++i) phases[i] = std::exp(cplx(0, -es.eigenvalues()[i] * t));
  const Eigen::Matrix3cd u = es.eigenvectors().cast<cplx>() * phases.asDiagonal() *
                             es.eigenvectors().transpose().cast<cplx>();
  const Eigen::Vector3cd c = u * c0;

  const Basis& b = m.basis();
  const auto at = [&](Level a1, Level a2) { return psi[b.index_of(std::vector<Level>{Level::g1, a1, a2})]; };
  EXPECT_NEAR(std::norm(at(Level::g0, Level::g0)), std::norm(c[0]), 1e-10);
  EXPECT_NEAR(std::norm(at(Level::R, Level::g0)) + std::norm(at(Level::g0, Level::R)), std::norm(c[1]), 1e-10);
  EXPECT_NEAR(std::norm(at(Level::R, Level::R)), std::norm(c[2]), 1e-10);
}

TEST(Dynamics, no_jump_norm_decays_exponentially_in_r) {
  // Atom held in R with no drive: |psi|^2 = exp(-gamma t).
  const Model m(BlockadeMatrix(2), DecayModel{{0.0, 0.25}});
  StateVector psi = StateVector::product(m.basis(), std::vector<Level>{Level::g0, Level::R});
  integrate_segment(m, psi, square(PulseTarget::data_0R, 0.0, 2.0), 1e-3);
  EXPECT_NEAR(psi.norm2(), std::exp(-0.25 * 2.0), 1e-12);
}
