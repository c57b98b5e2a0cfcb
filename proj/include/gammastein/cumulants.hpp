#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gammastein/poly.hpp"
#include "gammastein/targets.hpp"

namespace gammastein {

/// kappa_2 ... kappa_R of a target; values[r - 2] holds kappa_r.
struct CumulantSequence {
  std::vector<double> values;

  std::size_t max_order() const { return values.size() + 1; }
  double kappa(std::size_t r) const { return values.at(r - 2); }
};

/// Exact cumulants of orders 2..R. Throws std::domain_error if R < 2.
CumulantSequence cumulant_sequence(const TargetSpec& spec, std::size_t R);

/// P(x) = x prod (x - lambda_i).
Polynomial build_P(std::span<const double> lambdas);
/// Q = P^2.
Polynomial build_Q(const Polynomial& P);

/// sum_{r=2}^{deg Q} q_r kappa_r / (2^{r-1} (r-1)!), q_r the x^r coefficient
/// of Q. Requires cumulants up to order 2(d+1); throws std::domain_error
/// otherwise.
double delta_discrepancy(const CumulantSequence& kappa, std::span<const double> lambdas);

/// Approximate discrepancy from data: sample cumulants in place of exact
/// ones, with a delete-group jackknife standard error. Limited to
/// 2(d+1) <= 6, i.e. at most two distinct lambdas.
struct SampleDelta {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

SampleDelta delta_discrepancy_from_sample(std::span<const double> samples,
                                          std::span<const double> lambdas);

/// Raw moments E[F^0..F^n] from the mean and cumulants (orders 2..n needed),
/// via m_n = sum_{k=1}^n C(n-1, k-1) kappa_k m_{n-k}.
std::vector<double> moments_from_cumulants(double mean, const CumulantSequence& kappa,
                                           std::size_t n);

}  // namespace gammastein
