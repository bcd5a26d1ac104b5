#include "rydcopy/schedule.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "rydcopy/error.hpp"

namespace rydcopy {

namespace {

constexpr double kPi = std::numbers::pi;

double simpson(auto&& f, double a, double b, std::size_t intervals) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double s = f(a) + f(b);
  for (std::size_t k = 1; k < intervals; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + h * static_cast<double>(k));
  return s * h / 3.0;
}

}  // namespace

std::string to_string(PulseTarget t) {
  switch (t) {
    case PulseTarget::data_0R: return "data_0R";
    case PulseTarget::ancilla_0R: return "ancilla_0R";
    case PulseTarget::ancilla_1R: return "ancilla_1R";
  }
  return "?";
}

std::string to_string(EnvelopeMode m) { return m == EnvelopeMode::square ? "square" : "shaped"; }

EnvelopeMode parse_envelope_mode(const std::string& s) {
  if (s == "square") return EnvelopeMode::square;
  if (s == "shaped") return EnvelopeMode::shaped;
  throw ConfigError("unknown envelope mode '" + s + "'");
}

double envelope_value(EnvelopeMode mode, double t, double duration) {
  if (mode == EnvelopeMode::square) return 1.0;
  const double u = 1.0 - std::sin(kPi * t / duration);
  const double inner = 1.0 - u * u * u * u;
  return inner * inner * inner * inner;
}

double Schedule::total_time() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

double angular_from_mhz(double mhz) { return 2.0 * kPi * mhz; }

std::vector<double> pi_area_durations(std::size_t n, double omega) {
  if (n < 1) throw ConfigError("need at least one ancilla");
  if (!(omega > 0.0)) throw ConfigError("drive amplitude must be positive");
  std::vector<double> t;
  t.reserve(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    // H0 moves one of N-k ground atoms to R; H1 moves R into |1> with k atoms already there.
    t.push_back(kPi / (2.0 * omega * std::sqrt(static_cast<double>(n - k))));
    t.push_back(kPi / (2.0 * omega * std::sqrt(static_cast<double>(k + 1))));
  }
  return t;
}

double exact_gate_time(std::size_t n, double omega) {
  if (n < 1) throw ConfigError("need at least one ancilla");
  double s = 0.0;
  for (std::size_t m = 1; m <= n; ++m) s += 1.0 / std::sqrt(static_cast<double>(m));
  return kPi / omega * s + kPi / omega;
}

double approx_gate_time(std::size_t n, double omega) {
  return kPi / (2.0 * omega) * (4.0 * std::sqrt(static_cast<double>(n)) - 1.0);
}

double envelope_area_factor(EnvelopeMode mode) {
  if (mode == EnvelopeMode::square) return 1.0;
  const double mean = simpson([](double x) { return envelope_value(EnvelopeMode::shaped, x, 1.0); }, 0.0, 1.0, 4096);
  return 1.0 / mean;
}

double segment_area(const PulseSegment& seg, std::size_t intervals) {
  return simpson([&](double t) { return seg.amplitude * envelope_value(seg.envelope, t, seg.duration); }, 0.0,
                 seg.duration, intervals);
}

double solve_shaped_duration(double amplitude, double target_area, double rel_tol) {
  PulseSegment probe;
  probe.amplitude = amplitude;
  probe.envelope = EnvelopeMode::shaped;
  auto area = [&](double T) {
    probe.duration = T;
    return segment_area(probe, 1024);
  };
  double lo = target_area / amplitude;  // square pulse duration: a lower bound
  double hi = 2.0 * lo;
  for (int i = 0; area(hi) < target_area; ++i) {
    if (i > 60) throw NumericalError("shaped duration solve: could not bracket target area");
    hi *= 2.0;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (area(mid) < target_area ? lo : hi) = mid;
    if (hi - lo <= rel_tol * lo * 1e-3) break;
  }
  const double T = 0.5 * (lo + hi);
  if (std::abs(area(T) - target_area) > rel_tol * target_area) {
    throw NumericalError("shaped duration solve did not converge");
  }
  return T;
}

Schedule build_copy_schedule(std::size_t n, double omega, EnvelopeMode mode) {
  const auto durations = pi_area_durations(n, omega);
  Schedule s;
  s.num_ancillae = n;
  auto push = [&](PulseTarget target, double square_duration, int sign) {
    PulseSegment seg;
    seg.target = target;
    seg.amplitude = omega;
    seg.envelope = mode;
    seg.phase_sign = sign;
    seg.target_area = omega * square_duration;
    seg.duration = mode == EnvelopeMode::square ? square_duration : solve_shaped_duration(omega, seg.target_area);
    s.segments.push_back(seg);
  };
  push(PulseTarget::data_0R, kPi / (2.0 * omega), +1);
  for (std::size_t i = 0; i < durations.size(); ++i) {
    push(i % 2 == 0 ? PulseTarget::ancilla_0R : PulseTarget::ancilla_1R, durations[i], +1);
  }
  push(PulseTarget::data_0R, kPi / (2.0 * omega), -1);
  return s;
}

void write_schedule(std::ostream& os, const Schedule& s) {
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const auto& g = s.segments[i];
    os << "segment " << i << " target=" << to_string(g.target) << " envelope=" << to_string(g.envelope)
       << " phase=" << (g.phase_sign > 0 ? "+1" : "-1") << " amplitude_rad_per_us=" << g.amplitude
       << " duration_us=" << g.duration << " area_rad=" << g.target_area << '\n';
  }
  os << "total_us=" << s.total_time() << '\n';
  os.precision(old);
}

}  // namespace rydcopy
