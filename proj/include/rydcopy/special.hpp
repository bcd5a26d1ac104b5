#pragma once

#include <cstddef>
#include <span>

namespace rydcopy {

/// log(n!) for integer n.
double log_factorial(std::size_t n);

/// log of the Poisson pmf, -mu + k log mu - log k!. Handles mu == 0.
double log_poisson_pmf(std::size_t k, double mu);

/// Regularized lower incomplete gamma P(n+1, x) = 1 - e^-x sum_{k<=n} x^k/k!.
double regularized_lower_gamma_int(std::size_t n_plus_1, double x);
/// log P(n+1, x); stays finite where P underflows.
double log_regularized_lower_gamma_int(std::size_t n_plus_1, double x);
/// Unregularized gamma(n+1, x) = n! P(n+1, x).
double lower_incomplete_gamma_int(std::size_t n_plus_1, double x);

double log_add_exp(double a, double b);
double log_sum_exp(std::span<const double> v);

}  // namespace rydcopy
