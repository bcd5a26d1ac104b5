#include "rydcopy/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "rydcopy/error.hpp"
#include "rydcopy/parallel.hpp"

namespace rydcopy {

std::string to_string(Estimator e) { return e == Estimator::sampled ? "sampled" : "stratified"; }

Estimator parse_estimator(const std::string& s) {
  if (s == "sampled") return Estimator::sampled;
  if (s == "stratified") return Estimator::stratified;
  throw ConfigError("unknown estimator '" + s + "'");
}

namespace {

constexpr std::size_t kCheckpointBudgetBytes = std::size_t{64} << 20;

void check_logical(int logical) {
  if (logical != 0 && logical != 1) throw ConfigError("logical state must be 0 or 1");
}

}  // namespace

struct GateSimulator::NoJumpPath {
  std::once_flag once;
  std::vector<double> norm2;  // after k sub-steps, k = 0..S
  std::size_t checkpoint_every = 1;
  std::vector<StateVector> checkpoints;  // state after k*checkpoint_every sub-steps
  std::optional<StateVector> final_state;
};

GateSimulator::GateSimulator(const BlockadeMatrix& blockade, DecayModel decay, Schedule schedule, IntegratorOptions opts)
    : model_(blockade, std::move(decay)), schedule_(std::move(schedule)), options_(opts) {
  if (schedule_.num_ancillae != model_.num_ancillae()) throw ConfigError("schedule and layout disagree on N");
  evolution_ = make_evolution(model_, schedule_, options_);
  for (auto& p : paths_) p = std::make_unique<NoJumpPath>();
}

GateSimulator::~GateSimulator() = default;

std::unique_ptr<GateSimulator> GateSimulator::for_layout(const Layout& layout, const C6Table& c6, double omega,
                                                         EnvelopeMode mode, IntegratorOptions opts, bool with_decay) {
  DecayModel decay = with_decay ? DecayModel::from_layout(layout) : DecayModel::none(layout.size());
  return std::make_unique<GateSimulator>(pairwise_blockade(layout, c6), std::move(decay),
                                         build_copy_schedule(layout.num_ancillae(), omega, mode), opts);
}

StateVector GateSimulator::initial_state(int logical) const {
  check_logical(logical);
  std::vector<Level> lv(model_.atoms(), Level::g0);
  lv[0] = logical ? Level::g1 : Level::g0;
  return StateVector::product(model_.basis(), lv);
}

const GateSimulator::NoJumpPath& GateSimulator::path(int logical) const {
  check_logical(logical);
  NoJumpPath& p = *paths_[static_cast<std::size_t>(logical)];
  std::call_once(p.once, [&] {
    const std::size_t steps = evolution_->steps().size();
    const std::size_t bytes_per_state = model_.basis().dim() * sizeof(cplx);
    p.checkpoint_every = std::max<std::size_t>(1, (steps + 1) * bytes_per_state / kCheckpointBudgetBytes + 1);
    StateVector psi = initial_state(logical);
    p.norm2.reserve(steps + 1);
    p.norm2.push_back(psi.norm2());
    p.checkpoints.push_back(psi);
    for (std::size_t k = 0; k < steps; ++k) {
      evolution_->advance(psi, k);
      p.norm2.push_back(psi.norm2());
      if ((k + 1) % p.checkpoint_every == 0) p.checkpoints.push_back(psi);
    }
    if (!psi.all_finite()) throw NumericalError("non-finite amplitudes in no-jump evolution");
    p.final_state = std::move(psi);
  });
  return p;
}

double GateSimulator::no_jump_weight(int logical) const { return path(logical).norm2.back(); }

const StateVector& GateSimulator::no_jump_final_state(int logical) const { return *path(logical).final_state; }

std::vector<double> GateSimulator::no_jump_n1_distribution(int logical) const {
  const StateVector& psi = no_jump_final_state(logical);
  const double w = psi.norm2();
  std::vector<double> d(num_ancillae() + 1, 0.0);
  for (std::size_t i = 0; i < psi.dim(); ++i) {
    const double pr = std::norm(psi[i]);
    if (pr != 0.0) d[model_.basis().count_in(i, Level::g1, 1)] += pr / w;
  }
  return d;
}

std::size_t apply_jump(const Model& m, StateVector& psi, Rng& rng) {
  const Basis& b = m.basis();
  std::vector<double> weight(b.atoms(), 0.0);
  for (std::size_t a = 0; a < b.atoms(); ++a)
    weight[a] = m.decay().gamma[a] * level_population(m, psi.span(), a, Level::R);
  double total = 0.0;
  for (double w : weight) total += w;
  if (!(total > 0.0)) throw NumericalError("quantum jump requested with no Rydberg population");
  double u = uniform01(rng) * total;
  std::size_t atom = 0;
  for (; atom + 1 < b.atoms(); ++atom) {
    if (u < weight[atom]) break;
    u -= weight[atom];
  }
  while (weight[atom] == 0.0) --atom;  // guard against u landing on a zero-weight tail

  StateVector next(psi.dim());
  const std::size_t shift = b.stride(atom);  // R -> L is one level up
  for (std::size_t i = 0; i < psi.dim(); ++i)
    if (b.level(i, atom) == Level::R) next[i + shift] = psi[i];
  next.scale(1.0 / std::sqrt(next.norm2()));
  psi = std::move(next);
  return atom;
}

std::size_t sample_basis_index(const StateVector& psi, Rng& rng) {
  const double total = psi.norm2();
  double u = uniform01(rng) * total;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < psi.dim(); ++i) {
    const double p = std::norm(psi[i]);
    if (p == 0.0) continue;
    last_nonzero = i;
    if (u < p) return i;
    u -= p;
  }
  return last_nonzero;
}

TrajectoryOutcome GateSimulator::run_with_threshold(int logical, double threshold, Rng& rng) const {
  const NoJumpPath& p = path(logical);
  const auto& steps = evolution_->steps();
  const std::size_t total = steps.size();
  TrajectoryOutcome out;

  // Until the first jump the trajectory follows the shared no-jump path exactly.
  std::size_t k = 1;
  while (k <= total && p.norm2[k] >= threshold) ++k;
  StateVector psi(model_.basis().dim());
  if (k > total) {
    psi = *p.final_state;
  } else {
    const std::size_t c = k / p.checkpoint_every;
    psi = p.checkpoints[c];
    for (std::size_t j = c * p.checkpoint_every; j < k; ++j) evolution_->advance(psi, j);
    out.jumps.push_back({apply_jump(model_, psi, rng), steps[k - 1].time_end});
    threshold = uniform01(rng);
    for (std::size_t j = k; j < total; ++j) {
      evolution_->advance(psi, j);
      if (psi.norm2() < threshold) {
        out.jumps.push_back({apply_jump(model_, psi, rng), steps[j].time_end});
        threshold = uniform01(rng);
      }
    }
  }
  if (!psi.all_finite()) throw NumericalError("non-finite amplitudes in trajectory");
  const std::size_t idx = sample_basis_index(psi, rng);
  out.levels.resize(model_.atoms());
  for (std::size_t a = 0; a < model_.atoms(); ++a) out.levels[a] = model_.basis().level(idx, a);
  out.n1 = model_.basis().count_in(idx, Level::g1, 1);
  return out;
}

TrajectoryOutcome GateSimulator::run_trajectory(int logical, std::uint64_t seed) const {
  Rng rng(seed);
  const double r = uniform01(rng);
  return run_with_threshold(logical, r, rng);
}

TrajectoryOutcome GateSimulator::run_jump_conditioned(int logical, std::uint64_t seed) const {
  const double w = no_jump_weight(logical);
  if (!(w < 1.0)) throw NumericalError("no jump probability: cannot condition on a jump");
  Rng rng(seed);
  const double r = w + (1.0 - w) * uniform01(rng);
  return run_with_threshold(logical, r, rng);
}

ExcitationDistributions make_distributions(std::vector<double> p0, std::vector<double> p1) {
  if (p0.size() != p1.size() || p0.empty()) throw ConfigError("distributions must have equal, non-zero length");
  ExcitationDistributions d;
  d.stderr_ = {std::vector<double>(p0.size(), 0.0), std::vector<double>(p0.size(), 0.0)};
  d.sampled_histogram = d.stderr_;
  d.p = {std::move(p0), std::move(p1)};
  return d;
}

ExcitationDistributions excitation_distributions(const GateSimulator& sim, std::size_t n_traj, std::uint64_t seed,
                                                 Estimator estimator, std::size_t workers) {
  const std::size_t n = sim.num_ancillae();
  ExcitationDistributions d;
  d.estimator = estimator;
  for (int s = 0; s < 2; ++s) {
    const auto si = static_cast<std::size_t>(s);
    std::vector<double> hist(n + 1, 0.0);
    double w = 1.0;
    std::size_t runs = n_traj;
    bool sample = true;
    if (estimator == Estimator::stratified) {
      w = sim.no_jump_weight(s);
      sample = w < 1.0 && n_traj > 0;
      if (!sample) runs = 0;
    } else if (n_traj == 0) {
      throw ConfigError("sampled estimator needs at least one trajectory");
    }
    if (sample) {
      std::vector<std::size_t> n1(runs);
      parallel_for(runs, workers, [&](std::size_t i) {
        const std::uint64_t ts = derive_seed(seed, static_cast<std::uint64_t>(s), i);
        n1[i] = estimator == Estimator::stratified ? sim.run_jump_conditioned(s, ts).n1 : sim.run_trajectory(s, ts).n1;
      });
      for (std::size_t v : n1) hist[v] += 1.0;
      for (auto& h : hist) h /= static_cast<double>(runs);
    }
    std::vector<double> p(n + 1, 0.0), se(n + 1, 0.0);
    if (estimator == Estimator::sampled) {
      p = hist;
      for (std::size_t k = 0; k <= n; ++k) se[k] = std::sqrt(hist[k] * (1.0 - hist[k]) / static_cast<double>(runs));
    } else {
      const auto nj = sim.no_jump_n1_distribution(s);
      for (std::size_t k = 0; k <= n; ++k) {
        p[k] = w * nj[k] + (runs ? (1.0 - w) * hist[k] : 0.0);
        se[k] = runs ? (1.0 - w) * std::sqrt(hist[k] * (1.0 - hist[k]) / static_cast<double>(runs)) : 0.0;
      }
      if (!runs) {
        // w < 1 with zero trajectories: renormalize onto the no-jump branch
        double sum = 0.0;
        for (double v : p) sum += v;
        for (auto& v : p) v /= sum;
      }
    }
    d.p[si] = std::move(p);
    d.stderr_[si] = std::move(se);
    d.trajectories[si] = runs;
    d.no_jump_weight[si] = w;
    d.sampled_histogram[si] = std::move(hist);
  }
  return d;
}

double gate_infidelity(std::span<const double> p0, std::span<const double> p1) {
  if (p0.size() != p1.size()) throw ConfigError("distributions must have equal length");
  double s = 0.0;
  for (std::size_t n = 0; n < p0.size(); ++n) s += std::abs(p0[n] - p1[n]);
  return 0.5 - 0.25 * s;
}

double gate_infidelity(const ExcitationDistributions& d) { return gate_infidelity(d.p[0], d.p[1]); }

double gate_infidelity_stderr(const ExcitationDistributions& d) {
  double var = 0.0;
  for (std::size_t s = 0; s < 2; ++s) {
    if (d.trajectories[s] == 0) continue;
    const double scale = d.estimator == Estimator::stratified ? 1.0 - d.no_jump_weight[s] : 1.0;
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t n = 0; n < d.p[s].size(); ++n) {
      const double diff = d.p[0][n] - d.p[1][n];
      const double c = diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0);
      m1 += c * d.sampled_histogram[s][n];
      m2 += c * c * d.sampled_histogram[s][n];
    }
    var += scale * scale * (m2 - m1 * m1) / static_cast<double>(d.trajectories[s]);
  }
  return 0.25 * std::sqrt(std::max(0.0, var));
}

}  // namespace rydcopy
