#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rydcopy/rng.hpp"

namespace rydcopy {

/// Readout timing. The raw times are per emitted/scattered photon; dividing by the
/// detection fraction gives the per-detected-count times the Markov model uses.
/// Set detection_fraction = 1 to treat t_photon_us and t_bg_us as detected times.
struct ReadoutParams {
  double t_photon_us = 0.013;
  double t_bg_us = 0.19;
  double t_loss_us = 200.0;
  double t_meas_us = 6.0;
  double dt_us = 1e-3;
  double detection_fraction = 7.96e-3;

  double detected_photon_time() const { return t_photon_us / detection_fraction; }
  double detected_bg_time() const { return t_bg_us / detection_fraction; }
  /// Mean background counts per site over t_meas.
  double background_mean() const;
  std::size_t markov_steps() const;
  void validate() const;
};

struct CountDistribution {
  std::vector<double> pmf;
  double tail = 0.0;  // mass beyond pmf.size() - 1

  double mean() const;
  double total() const;
  double at(std::size_t m) const { return m < pmf.size() ? pmf[m] : 0.0; }
};

inline constexpr double kTruncationTail = 1e-12;

CountDistribution poisson_distribution(double mu);
CountDistribution delta_distribution(std::size_t m = 0);
/// Convolution with re-truncation; tails combine as 1 - (1-ta)(1-tb).
CountDistribution convolve(const CountDistribution& a, const CountDistribution& b);

/// log P_atom(n): an excited atom fluorescing until lost, loss time marginalized.
double log_p_atom(std::size_t n, const ReadoutParams& params);
/// Throws NumericalError if the truncated pmf deviates from 1 by more than 1e-8.
CountDistribution p_atom_analytic(const ReadoutParams& params);

struct SiteDistributions {
  CountDistribution p;  // occupied, excited site: P_atom * P_bg
  CountDistribution q;  // dark site: P_bg
};
SiteDistributions site_distributions(const ReadoutParams& params);

/// q^s = sum_n p^s_n P_atom^{*n} * P_bg^{*N}; returns {q0, q1}.
std::array<CountDistribution, 2> aggregated_distributions(std::span<const double> p0, std::span<const double> p1,
                                                          const ReadoutParams& params);
CountDistribution aggregated_distribution(std::span<const double> p, const ReadoutParams& params);

/// 1/2 - (1/4) sum_m |q0_m - q1_m|
double measurement_infidelity(const CountDistribution& q0, const CountDistribution& q1);
/// Same quantity as the error of the equal-prior optimal decision rule.
double bayes_decision_error(const CountDistribution& q0, const CountDistribution& q1);

/// Total variation distance between a pmf and an empirical histogram of counts.
double total_variation(const CountDistribution& d, std::span<const std::size_t> samples);

/// Per-site counts; sites 0..n_excited-1 hold the excited ancillae.
using MeasurementRecord = std::vector<std::size_t>;

/// Discrete-time Markov readout. Each step a trapped excited ancilla is lost w.p.
/// dt/T_loss, otherwise emits a count w.p. dt/T_photon; every site independently
/// records a background count w.p. dt/T_bg. Samples the step counts directly.
MeasurementRecord markov_sample(std::size_t n_excited, std::size_t n_sites, const ReadoutParams& params, Rng& rng);
MeasurementRecord markov_sample(std::size_t n_excited, std::size_t n_sites, const ReadoutParams& params,
                                std::uint64_t seed);
/// Step-by-step reference implementation of the same chain.
MeasurementRecord markov_sample_stepwise(std::size_t n_excited, std::size_t n_sites, const ReadoutParams& params,
                                         Rng& rng);

/// Per-site log P(m), log Q(m); tabulated inside the truncation, computed directly outside.
class SiteModel {
 public:
  explicit SiteModel(const ReadoutParams& params);
  double log_p(std::size_t m) const;
  double log_q(std::size_t m) const;

 private:
  ReadoutParams params_;
  std::vector<double> log_atom_, log_p_, log_q_;
};

struct MleDecision {
  int state = 1;
  std::array<double, 2> log_likelihood{};
  bool degenerate = false;  // p0 == p1: the decision carries no information
};

/// Log-domain elementary symmetric polynomials log e_0..log e_N of exp(log_r).
std::vector<double> log_elementary_symmetric(std::span<const double> log_r);

/// Atom-resolved maximum likelihood decision; exact ties go to state 1.
MleDecision mle_classify(std::span<const std::size_t> record, std::span<const double> p0, std::span<const double> p1,
                         const SiteModel& site);

struct MleEstimate {
  double infidelity = 0.0;
  double stderr_ = 0.0;
  std::array<double, 2> error_rate{};
  std::size_t records = 0;  // per hypothesis
};

/// Monte Carlo atom-resolved infidelity. Record i of hypothesis s is seeded by
/// derive_seed(seed, s, i), so the result does not depend on `workers`.
MleEstimate mle_infidelity(std::span<const double> p0, std::span<const double> p1, const ReadoutParams& params,
                           std::size_t n_records, std::uint64_t seed, std::size_t workers = 1);

/// Samples an index from a discrete distribution (need not be normalized).
std::size_t sample_discrete(std::span<const double> p, Rng& rng);

}  // namespace rydcopy
