#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <map>

#include "rydcopy/dynamics.hpp"
#include "rydcopy/error.hpp"

namespace rydcopy {

std::string to_string(IntegratorKind k) { return k == IntegratorKind::rk4 ? "rk4" : "exponential"; }

IntegratorKind parse_integrator_kind(const std::string& s) {
  if (s == "rk4") return IntegratorKind::rk4;
  if (s == "exponential") return IntegratorKind::exponential;
  throw ConfigError("unknown integrator '" + s + "'");
}

double rk4_dt_max(const Model& m, const PulseSegment& seg, double safety) {
  const double rate = std::max({seg.amplitude, m.max_coupling(), m.decay().max_rate()});
  return 1.0 / (safety * rate);
}

void integrate_segment(const Model& m, StateVector& psi, const PulseSegment& seg, double dt_max, double t_begin,
                       std::optional<double> t_end) {
  const double end = t_end.value_or(seg.duration);
  const double span = end - t_begin;
  if (span <= 0.0) return;
  if (!(dt_max > 0.0)) throw ConfigError("dt_max must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(span / dt_max - 1e-9));
  const double h = span / static_cast<double>(n);
  const std::size_t dim = psi.dim();
  std::vector<cplx> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  auto y = psi.span();
  const double norm_before = psi.norm2();

  for (std::size_t step = 0; step < n; ++step) {
    const double t = t_begin + h * static_cast<double>(step);
    const double r0 = seg.rabi_at(t);
    const double rh = seg.rabi_at(t + 0.5 * h);
    const double r1 = seg.rabi_at(t + h);
    evaluate_rhs(m, seg.target, r0, y, k1);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    evaluate_rhs(m, seg.target, rh, tmp, k2);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    evaluate_rhs(m, seg.target, rh, tmp, k3);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
    evaluate_rhs(m, seg.target, r1, tmp, k4);
    for (std::size_t i = 0; i < dim; ++i) y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  const double norm_after = psi.norm2();
  if (!(norm_after <= norm_before * (1.0 + 1e-6) + 1e-300)) {
    throw NumericalError("RK4 integration unstable: norm grew from " + std::to_string(norm_before) + " to " +
                         std::to_string(norm_after));
  }
}

Evolution::Evolution(const Model& model, const Schedule& schedule, std::size_t substeps)
    : model_(model), schedule_(schedule) {
  if (substeps == 0) throw ConfigError("need at least one sub-step per segment");
  double t0 = 0.0;
  for (std::size_t s = 0; s < schedule.segments.size(); ++s) {
    const double T = schedule.segments[s].duration;
    for (std::size_t k = 0; k < substeps; ++k) {
      const double a = T * static_cast<double>(k) / static_cast<double>(substeps);
      const double b = T * static_cast<double>(k + 1) / static_cast<double>(substeps);
      steps_.push_back({s, a, b, t0 + b});
    }
    t0 += T;
  }
}

namespace {

class Rk4Evolution final : public Evolution {
 public:
  Rk4Evolution(const Model& m, const Schedule& s, const IntegratorOptions& o)
      : Evolution(m, s, o.substeps_per_segment), safety_(o.rk4_safety) {}

  void advance(StateVector& psi, std::size_t step) const override {
    const SubStep& st = steps_[step];
    const PulseSegment& seg = schedule_.segments[st.segment];
    integrate_segment(model_, psi, seg, rk4_dt_max(model_, seg, safety_), st.t_begin, st.t_end);
  }

 private:
  double safety_;
};

// The drive on addressed atoms A couples each atom's ground level g to R only. Basis
// states therefore split into blocks: the "active" atoms (in A, currently in g or R)
// span a 2^k block, everything else is frozen. A block's matrix depends only on which
// atoms are active and which frozen atoms sit in R.
struct BlockStructure {
  struct Key {
    std::size_t k = 0;
    std::vector<std::size_t> representative;  // member indices of one instance
  };
  std::vector<Key> keys;
  std::vector<std::uint32_t> instance_key;
  std::vector<std::size_t> member_begin;  // into members, size instances+1
  std::vector<std::size_t> members;

  BlockStructure(const Model& m, PulseTarget target) {
    const Basis& b = m.basis();
    const std::uint32_t addressed = m.addressed_atoms(target);
    const Level g = drive_ground_level(target);
    std::map<std::uint64_t, std::uint32_t> ids;
    member_begin.push_back(0);
    for (std::size_t idx = 0; idx < b.dim(); ++idx) {
      std::uint32_t active = 0, frozen_r = 0;
      bool base = true;
      std::vector<std::size_t> shifts;
      for (std::size_t a = 0; a < b.atoms(); ++a) {
        const Level lv = b.level(idx, a);
        if (addressed >> a & 1u) {
          if (lv == Level::R) { base = false; break; }
          if (lv == g) {
            active |= 1u << a;
            shifts.push_back((static_cast<std::size_t>(Level::R) - static_cast<std::size_t>(g)) * b.stride(a));
          }
        } else if (lv == Level::R) {
          frozen_r |= 1u << a;
        }
      }
      if (!base) continue;
      const std::size_t k = shifts.size();
      const std::size_t first = members.size();
      for (std::size_t local = 0; local < (std::size_t{1} << k); ++local) {
        std::size_t j = idx;
        for (std::size_t bit = 0; bit < k; ++bit)
          if (local >> bit & 1u) j += shifts[bit];
        members.push_back(j);
      }
      const std::uint64_t key = (std::uint64_t{active} << 32) | frozen_r;
      auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(keys.size()));
      if (inserted) keys.push_back({k, std::vector<std::size_t>(members.begin() + first, members.end())});
      instance_key.push_back(it->second);
      member_begin.push_back(members.size());
    }
  }

  std::size_t propagator_entries() const {
    std::size_t s = 0;
    for (const auto& k : keys) s += std::size_t{1} << (2 * k.k);
    return s;
  }
};

using PropagatorSet = std::vector<Eigen::MatrixXcd>;

class ExponentialEvolution final : public Evolution {
 public:
  ExponentialEvolution(const Model& m, const Schedule& s, const IntegratorOptions& o)
      : Evolution(m, s, o.substeps_per_segment) {
    for (auto t : {PulseTarget::data_0R, PulseTarget::ancilla_0R, PulseTarget::ancilla_1R})
      blocks_[static_cast<std::size_t>(t)] = std::make_unique<BlockStructure>(m, t);

    // Square segments need one propagator set each; shaped segments one per sub-step.
    std::size_t bytes = 0;
    step_set_.resize(steps_.size());
    std::vector<std::size_t> first_step_of_set;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
      const auto& seg = s.segments[steps_[i].segment];
      const bool reuse = seg.envelope == EnvelopeMode::square && i > 0 && steps_[i - 1].segment == steps_[i].segment;
      if (reuse) {
        step_set_[i] = step_set_[i - 1];
        continue;
      }
      step_set_[i] = first_step_of_set.size();
      first_step_of_set.push_back(i);
      bytes += blocks(seg.target).propagator_entries() * sizeof(cplx);
    }
    cached_ = bytes <= o.propagator_cache_bytes;
    if (cached_) {
      sets_.reserve(first_step_of_set.size());
      for (std::size_t i : first_step_of_set) sets_.push_back(compute(i));
    }
  }

  void advance(StateVector& psi, std::size_t step) const override {
    const BlockStructure& bs = blocks(schedule_.segments[steps_[step].segment].target);
    if (cached_) {
      apply(bs, sets_[step_set_[step]], psi);
    } else {
      apply(bs, compute(step), psi);
    }
  }

 private:
  const BlockStructure& blocks(PulseTarget t) const { return *blocks_[static_cast<std::size_t>(t)]; }

  PropagatorSet compute(std::size_t step) const {
    const SubStep& st = steps_[step];
    const PulseSegment& seg = schedule_.segments[st.segment];
    const double dt = st.t_end - st.t_begin;
    const double rabi = seg.rabi_at(0.5 * (st.t_begin + st.t_end));
    const BlockStructure& bs = blocks(seg.target);
    PropagatorSet set;
    set.reserve(bs.keys.size());
    for (const auto& key : bs.keys) {
      const auto n = static_cast<Eigen::Index>(std::size_t{1} << key.k);
      Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(n, n);
      for (Eigen::Index l = 0; l < n; ++l) {
        const std::size_t idx = key.representative[static_cast<std::size_t>(l)];
        gen(l, l) = cplx{-model_.half_decay(idx), -model_.energy(idx)} * dt;
        for (std::size_t bit = 0; bit < key.k; ++bit) gen(l ^ (Eigen::Index{1} << bit), l) = cplx{0.0, -rabi * dt};
      }
      set.push_back(gen.exp());
    }
    return set;
  }

  static void apply(const BlockStructure& bs, const PropagatorSet& set, StateVector& psi) {
    thread_local std::vector<cplx> in, out;
    for (std::size_t inst = 0; inst < bs.instance_key.size(); ++inst) {
      const std::size_t b = bs.member_begin[inst];
      const std::size_t n = bs.member_begin[inst + 1] - b;
      const std::size_t* mem = bs.members.data() + b;
      in.resize(n);
      out.assign(n, cplx{0.0, 0.0});
      bool any = false;
      for (std::size_t l = 0; l < n; ++l) {
        in[l] = psi[mem[l]];
        any = any || in[l] != cplx{0.0, 0.0};
      }
      if (!any) continue;
      const cplx* u = set[bs.instance_key[inst]].data();  // column-major
      for (std::size_t c = 0; c < n; ++c) {
        const cplx x = in[c];
        if (x == cplx{0.0, 0.0}) continue;
        const cplx* col = u + c * n;
        for (std::size_t r = 0; r < n; ++r) out[r] += col[r] * x;
      }
      for (std::size_t l = 0; l < n; ++l) psi[mem[l]] = out[l];
    }
  }

  std::array<std::unique_ptr<BlockStructure>, 3> blocks_;
  std::vector<std::size_t> step_set_;
  std::vector<PropagatorSet> sets_;
  bool cached_ = false;
};

}  // namespace

std::unique_ptr<Evolution> make_evolution(const Model& model, const Schedule& schedule, const IntegratorOptions& opts) {
  if (opts.kind == IntegratorKind::rk4) return std::make_unique<Rk4Evolution>(model, schedule, opts);
  return std::make_unique<ExponentialEvolution>(model, schedule, opts);
}

}  // namespace rydcopy
