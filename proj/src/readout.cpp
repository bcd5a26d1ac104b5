#include "rydcopy/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "rydcopy/error.hpp"
#include "rydcopy/parallel.hpp"
#include "rydcopy/special.hpp"

namespace rydcopy {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogFloor = std::log(1e-300);

// Only impossible counts are floored; finite log values keep their tail information.
double floored(double log_value) { return std::isinf(log_value) ? kLogFloor : log_value; }

void trim(CountDistribution& d) {
  double cut = 0.0;
  while (d.pmf.size() > 1 && cut + d.pmf.back() < 0.1 * kTruncationTail) {
    cut += d.pmf.back();
    d.pmf.pop_back();
  }
  d.tail += cut;
}

double log_binomial(std::size_t n, std::size_t k) {
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

}  // namespace

double ReadoutParams::background_mean() const {
  const double tb = detected_bg_time();
  return std::isinf(tb) ? 0.0 : t_meas_us / tb;
}

std::size_t ReadoutParams::markov_steps() const {
  return static_cast<std::size_t>(std::ceil(t_meas_us / dt_us - 1e-9));
}

void ReadoutParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0)) throw ConfigError(std::string("readout parameter ") + name + " must be positive");
  };
  positive(t_photon_us, "t_photon");
  positive(t_bg_us, "t_bg");
  positive(t_loss_us, "t_loss");
  positive(dt_us, "dt");
  positive(detection_fraction, "detection_fraction");
  if (!std::isfinite(t_photon_us) || !std::isfinite(dt_us)) throw ConfigError("t_photon and dt must be finite");
  if (detection_fraction > 1) throw ConfigError("detection_fraction must be at most 1");
  if (!(t_meas_us >= 0) || !std::isfinite(t_meas_us)) throw ConfigError("t_meas must be finite and nonnegative");
}

double CountDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) m += static_cast<double>(i) * pmf[i];
  return m;
}

double CountDistribution::total() const {
  double s = tail;
  for (double v : pmf) s += v;
  return s;
}

CountDistribution poisson_distribution(double mu) {
  if (!(mu >= 0) || !std::isfinite(mu)) throw ConfigError("Poisson mean must be finite and nonnegative");
  CountDistribution d;
  if (mu == 0) {
    d.pmf = {1.0};
    return d;
  }
  const auto hard = static_cast<std::size_t>(mu + 40.0 * std::sqrt(mu) + 100.0);
  double sum = 0.0;
  for (std::size_t k = 0; k <= hard; ++k) {
    const double v = std::exp(log_poisson_pmf(k, mu));
    d.pmf.push_back(v);
    sum += v;
    if (static_cast<double>(k) > mu && 1.0 - sum < kTruncationTail * 0.1) break;
  }
  d.tail = std::max(0.0, 1.0 - sum);
  trim(d);
  return d;
}

CountDistribution delta_distribution(std::size_t m) {
  CountDistribution d;
  d.pmf.assign(m + 1, 0.0);
  d.pmf[m] = 1.0;
  return d;
}

CountDistribution convolve(const CountDistribution& a, const CountDistribution& b) {
  CountDistribution c;
  c.pmf.assign(a.pmf.size() + b.pmf.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.pmf.size(); ++i) {
    if (a.pmf[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.pmf.size(); ++j) c.pmf[i + j] += a.pmf[i] * b.pmf[j];
  }
  c.tail = 1.0 - (1.0 - a.tail) * (1.0 - b.tail);
  trim(c);
  return c;
}

double log_p_atom(std::size_t n, const ReadoutParams& params) {
  const double tp = params.detected_photon_time();
  const double tl = params.t_loss_us;
  const double t = params.t_meas_us;
  double first = kNegInf;
  double second = log_poisson_pmf(n, t / tp);
  if (!std::isinf(tl)) {
    const double lambda = 1.0 / tp + 1.0 / tl;
    first = std::log(tp / (tl + tp)) + static_cast<double>(n) * std::log(tl / (tl + tp)) +
            log_regularized_lower_gamma_int(n + 1, lambda * t);
    second -= t / tl;
  }
  return log_add_exp(first, second);
}

CountDistribution p_atom_analytic(const ReadoutParams& params) {
  params.validate();
  const double mu = params.t_meas_us / params.detected_photon_time();
  const auto hard = static_cast<std::size_t>(mu + 60.0 * std::sqrt(mu) + 200.0);
  CountDistribution d;
  double sum = 0.0;
  for (std::size_t n = 0; n <= hard; ++n) {
    const double v = std::exp(log_p_atom(n, params));
    d.pmf.push_back(v);
    sum += v;
    if (static_cast<double>(n) > mu && std::abs(1.0 - sum) < kTruncationTail * 0.1) break;
  }
  if (std::abs(1.0 - sum) > 1e-8) throw NumericalError("P_atom is not normalized (sum " + std::to_string(sum) + ")");
  d.tail = std::max(0.0, 1.0 - sum);
  trim(d);
  return d;
}

SiteDistributions site_distributions(const ReadoutParams& params) {
  SiteDistributions s;
  s.q = poisson_distribution(params.background_mean());
  s.p = convolve(p_atom_analytic(params), s.q);
  return s;
}

CountDistribution aggregated_distribution(std::span<const double> p, const ReadoutParams& params) {
  if (p.empty()) throw ConfigError("excitation distribution must be non-empty");
  const std::size_t n_sites = p.size() - 1;
  const CountDistribution atom = p_atom_analytic(params);
  CountDistribution acc = poisson_distribution(static_cast<double>(n_sites) * params.background_mean());
  CountDistribution out;
  double weight = 0.0;
  for (std::size_t n = 0; n <= n_sites; ++n) {
    if (n > 0) acc = convolve(acc, atom);
    if (p[n] == 0.0) continue;
    if (out.pmf.size() < acc.pmf.size()) out.pmf.resize(acc.pmf.size(), 0.0);
    for (std::size_t m = 0; m < acc.pmf.size(); ++m) out.pmf[m] += p[n] * acc.pmf[m];
    out.tail += p[n] * acc.tail;
    weight += p[n];
  }
  if (!(weight > 0)) throw ConfigError("excitation distribution has zero mass");
  for (auto& v : out.pmf) v /= weight;
  out.tail /= weight;
  return out;
}

std::array<CountDistribution, 2> aggregated_distributions(std::span<const double> p0, std::span<const double> p1,
                                                          const ReadoutParams& params) {
  if (p0.size() != p1.size()) throw ConfigError("excitation distributions must have equal length");
  return {aggregated_distribution(p0, params), aggregated_distribution(p1, params)};
}

double measurement_infidelity(const CountDistribution& q0, const CountDistribution& q1) {
  const std::size_t n = std::max(q0.pmf.size(), q1.pmf.size());
  double s = 0.0;
  for (std::size_t m = 0; m < n; ++m) s += std::abs(q0.at(m) - q1.at(m));
  return std::clamp(0.5 - 0.25 * s, 0.0, 0.5);
}

double bayes_decision_error(const CountDistribution& q0, const CountDistribution& q1) {
  const std::size_t n = std::max(q0.pmf.size(), q1.pmf.size());
  double err = 0.0;
  for (std::size_t m = 0; m < n; ++m) err += q1.at(m) > q0.at(m) ? 0.5 * q0.at(m) : 0.5 * q1.at(m);
  return err;
}

double total_variation(const CountDistribution& d, std::span<const std::size_t> samples) {
  std::size_t top = d.pmf.size();
  for (auto s : samples) top = std::max(top, s + 1);
  std::vector<double> hist(top, 0.0);
  for (auto s : samples) hist[s] += 1.0;
  double tv = 0.0;
  for (std::size_t m = 0; m < top; ++m) tv += std::abs(hist[m] / static_cast<double>(samples.size()) - d.at(m));
  return 0.5 * tv;
}

MeasurementRecord markov_sample(std::size_t n_excited, std::size_t n_sites, const ReadoutParams& params, Rng& rng) {
  if (n_excited > n_sites) throw ConfigError("more excited ancillae than sites");
  const std::size_t steps = params.markov_steps();
  const double p_photon = params.dt_us / params.detected_photon_time();
  const double p_loss = params.dt_us / params.t_loss_us;
  const double p_bg = params.dt_us / params.detected_bg_time();
  if (p_photon > 1 || p_loss > 1 || p_bg > 1) throw ConfigError("Markov step dt too large for the readout rates");
  MeasurementRecord rec(n_sites, 0);
  for (std::size_t i = 0; i < n_excited; ++i) {
    std::size_t active = steps;
    if (p_loss > 0) {
      // steps survived before the loss step
      std::geometric_distribution<std::size_t> loss(p_loss);
      active = std::min(steps, loss(rng));
    }
    std::binomial_distribution<std::size_t> emit(active, p_photon);
    rec[i] += emit(rng);
  }
  if (p_bg > 0) {
    std::binomial_distribution<std::size_t> bg(steps, p_bg);
    for (auto& r : rec) r += bg(rng);
  }
  return rec;
}

MeasurementRecord markov_sample(std::size_t n_excited, std::size_t n_sites, const ReadoutParams& params,
                                std::uint64_t seed) {
  Rng rng(seed);
  return markov_sample(n_excited, n_sites, params, rng);
}

MeasurementRecord markov_sample_stepwise(std::size_t n_excited, std::size_t n_sites, const ReadoutParams& params,
                                         Rng& rng) {
  if (n_excited > n_sites) throw ConfigError("more excited ancillae than sites");
  const std::size_t steps = params.markov_steps();
  const double p_photon = params.dt_us / params.detected_photon_time();
  const double p_loss = params.dt_us / params.t_loss_us;
  const double p_bg = params.dt_us / params.detected_bg_time();
  MeasurementRecord rec(n_sites, 0);
  std::vector<char> trapped(n_sites, 0);
  std::fill(trapped.begin(), trapped.begin() + static_cast<std::ptrdiff_t>(n_excited), 1);
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 0; i < n_sites; ++i) {
      if (trapped[i]) {
        if (uniform01(rng) < p_loss)
          trapped[i] = 0;
        else if (uniform01(rng) < p_photon)
          ++rec[i];
      }
      if (uniform01(rng) < p_bg) ++rec[i];
    }
  }
  return rec;
}

SiteModel::SiteModel(const ReadoutParams& params) : params_(params) {
  const std::size_t size = site_distributions(params).p.pmf.size();
  for (std::size_t m = 0; m < size; ++m) log_atom_.push_back(log_p_atom(m, params_));
  for (std::size_t m = 0; m < size; ++m) {
    log_q_.push_back(floored(log_poisson_pmf(m, params_.background_mean())));
    log_p_.push_back(log_p(m));
  }
}

double SiteModel::log_p(std::size_t m) const {
  if (m < log_p_.size()) return log_p_[m];
  const double bg = params_.background_mean();
  double acc = kNegInf;
  for (std::size_t k = 0; k <= m; ++k) {
    const double la = k < log_atom_.size() ? log_atom_[k] : log_p_atom(k, params_);
    acc = log_add_exp(acc, la + log_poisson_pmf(m - k, bg));
  }
  return floored(acc);
}

double SiteModel::log_q(std::size_t m) const {
  if (m < log_q_.size()) return log_q_[m];
  return floored(log_poisson_pmf(m, params_.background_mean()));
}

std::vector<double> log_elementary_symmetric(std::span<const double> log_r) {
  std::vector<double> le(log_r.size() + 1, kNegInf);
  le[0] = 0.0;
  for (std::size_t i = 0; i < log_r.size(); ++i)
    for (std::size_t n = i + 1; n >= 1; --n) le[n] = log_add_exp(le[n], log_r[i] + le[n - 1]);
  return le;
}

MleDecision mle_classify(std::span<const std::size_t> record, std::span<const double> p0, std::span<const double> p1,
                         const SiteModel& site) {
  const std::size_t n_sites = record.size();
  if (p0.size() != n_sites + 1 || p1.size() != n_sites + 1)
    throw ConfigError("excitation distributions must have N + 1 entries");
  MleDecision d;
  d.degenerate = std::equal(p0.begin(), p0.end(), p1.begin());
  std::vector<double> log_r(n_sites);
  double base = 0.0;
  for (std::size_t i = 0; i < n_sites; ++i) {
    const double lq = site.log_q(record[i]);
    log_r[i] = site.log_p(record[i]) - lq;
    base += lq;
  }
  const auto le = log_elementary_symmetric(log_r);
  std::vector<double> terms(n_sites + 1);
  for (int s = 0; s < 2; ++s) {
    const auto p = s == 0 ? p0 : p1;
    for (std::size_t n = 0; n <= n_sites; ++n)
      terms[n] = (p[n] > 0 ? std::log(p[n]) : kNegInf) + le[n] - log_binomial(n_sites, n);
    d.log_likelihood[static_cast<std::size_t>(s)] = base + log_sum_exp(terms);
  }
  d.state = d.log_likelihood[1] >= d.log_likelihood[0] ? 1 : 0;
  return d;
}

std::size_t sample_discrete(std::span<const double> p, Rng& rng) {
  double total = 0.0;
  for (double v : p) total += v;
  double u = uniform01(rng) * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) continue;
    last = i;
    if (u < p[i]) return i;
    u -= p[i];
  }
  return last;
}

MleEstimate mle_infidelity(std::span<const double> p0, std::span<const double> p1, const ReadoutParams& params,
                           std::size_t n_records, std::uint64_t seed, std::size_t workers) {
  if (p0.size() != p1.size() || p0.empty()) throw ConfigError("excitation distributions must have equal length");
  if (std::equal(p0.begin(), p0.end(), p1.begin())) throw ConfigError("p0 == p1: classification is meaningless");
  if (n_records == 0) throw ConfigError("need at least one record per hypothesis");
  const std::size_t n_sites = p0.size() - 1;
  const SiteModel site(params);
  MleEstimate est;
  est.records = n_records;
  for (int s = 0; s < 2; ++s) {
    const auto p = s == 0 ? p0 : p1;
    std::vector<char> wrong(n_records, 0);
    parallel_for(n_records, workers, [&](std::size_t i) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s), i));
      const std::size_t n = sample_discrete(p, rng);
      const auto rec = markov_sample(n, n_sites, params, rng);
      wrong[i] = mle_classify(rec, p0, p1, site).state != s;
    });
    std::size_t errors = 0;
    for (char w : wrong) errors += static_cast<std::size_t>(w);
    est.error_rate[static_cast<std::size_t>(s)] = static_cast<double>(errors) / static_cast<double>(n_records);
  }
  const double e0 = est.error_rate[0], e1 = est.error_rate[1];
  const double n = static_cast<double>(n_records);
  est.infidelity = 0.5 * (e0 + e1);
  est.stderr_ = 0.5 * std::sqrt(e0 * (1 - e0) / n + e1 * (1 - e1) / n);
  return est;
}

}  // namespace rydcopy
