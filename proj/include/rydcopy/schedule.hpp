#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace rydcopy {

/// Which transition a pulse drives: the data atom's |0>-|R>, or all ancillae on |0>-|R> / |1>-|R>.
enum class PulseTarget { data_0R, ancilla_0R, ancilla_1R };

enum class EnvelopeMode { square, shaped };

std::string to_string(PulseTarget t);
std::string to_string(EnvelopeMode m);
EnvelopeMode parse_envelope_mode(const std::string& s);

/// Normalized envelope in [0, 1]. The shaped form is (1 - (1 - sin(pi t/T))^4)^4.
double envelope_value(EnvelopeMode mode, double t, double duration);

struct PulseSegment {
  PulseTarget target = PulseTarget::ancilla_0R;
  double amplitude = 0.0;  // peak Omega_0, rad/µs
  double duration = 0.0;   // µs
  EnvelopeMode envelope = EnvelopeMode::square;
  int phase_sign = +1;
  double target_area = 0.0;  // integral of Omega(t) dt, rad

  double rabi_at(double t) const { return phase_sign * amplitude * envelope_value(envelope, t, duration); }
};

struct Schedule {
  std::vector<PulseSegment> segments;
  std::size_t num_ancillae = 0;

  double total_time() const;
};

/// Converts a frequency label in MHz (Omega/2pi) to rad/µs.
double angular_from_mhz(double mhz);

/// Durations t_1..t_2N of the alternating H0/H1 pulses, each a full transfer at the
/// collectively enhanced rate Omega*sqrt(n).
std::vector<double> pi_area_durations(std::size_t n_ancillae, double omega);

/// (pi/Omega) * sum_{n=1}^{N} n^{-1/2} + pi/Omega (the two data pulses).
double exact_gate_time(std::size_t n_ancillae, double omega);

/// Closed form (pi / 2 Omega) (4 sqrt(N) - 1).
double approx_gate_time(std::size_t n_ancillae, double omega);

/// T_shaped / T_square for equal pulse area; 1 for a square envelope.
double envelope_area_factor(EnvelopeMode mode = EnvelopeMode::shaped);

/// Area of one segment, integral_0^T Omega(t) dt, by composite Simpson.
double segment_area(const PulseSegment& seg, std::size_t intervals = 1024);

/// Bisection on the duration of a shaped pulse with peak `amplitude` until its area is
/// `target_area` (relative tolerance `rel_tol`).
double solve_shaped_duration(double amplitude, double target_area, double rel_tol = 1e-9);

/// U_d, (H0, H1) x N, U_d^-1.
Schedule build_copy_schedule(std::size_t n_ancillae, double omega, EnvelopeMode mode);

/// One line per segment plus a total line.
void write_schedule(std::ostream& os, const Schedule& s);

}  // namespace rydcopy
