#include "rydcopy/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rydcopy {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double log_poisson_pmf(std::size_t k, double mu) {
  if (mu < 0) throw std::invalid_argument("Poisson mean must be nonnegative");
  if (mu == 0) return k == 0 ? 0.0 : kNegInf;
  return -mu + static_cast<double>(k) * std::log(mu) - log_factorial(k);
}

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_sum_exp(std::span<const double> v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double log_regularized_lower_gamma_int(std::size_t n_plus_1, double x) {
  if (n_plus_1 == 0) throw std::invalid_argument("incomplete gamma order must be positive");
  if (x < 0) throw std::invalid_argument("incomplete gamma argument must be nonnegative");
  if (x == 0) return kNegInf;
  const std::size_t n = n_plus_1 - 1;
  if (static_cast<double>(n_plus_1) > x) {
    // P(n+1, x) = P(X >= n+1), X ~ Poisson(x): sum the decreasing upper tail.
    double log_term = log_poisson_pmf(n_plus_1, x);
    double acc = 0.0;
    double rel = 1.0;
    for (std::size_t k = n_plus_1; rel > 1e-17 && k < n_plus_1 + 100000; ++k) {
      acc += rel;
      rel *= x / static_cast<double>(k + 1);
    }
    return log_term + std::log(acc);
  }
  // Tail is at least ~1/2 here; 1 - CDF has no cancellation problem.
  double cdf = 0.0;
  for (std::size_t k = 0; k <= n; ++k) cdf += std::exp(log_poisson_pmf(k, x));
  return std::log1p(-std::min(cdf, 1.0));
}

double regularized_lower_gamma_int(std::size_t n_plus_1, double x) {
  return std::exp(log_regularized_lower_gamma_int(n_plus_1, x));
}

double lower_incomplete_gamma_int(std::size_t n_plus_1, double x) {
  return std::exp(log_factorial(n_plus_1 - 1) + log_regularized_lower_gamma_int(n_plus_1, x));
}

}  // namespace rydcopy
