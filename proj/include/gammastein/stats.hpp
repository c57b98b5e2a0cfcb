#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gammastein {

/// Pairwise (cascade) summation. The summation tree depends only on the
/// length of the input.
double pairwise_sum(std::span<const double> values);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  std::size_t n = 0;
};

MeanEstimate estimate_mean(std::span<const double> values);

/// Power sums of (x - shift)^r for r = 0..max_order.
std::vector<double> shifted_power_sums(std::span<const double> values,
                                       double shift, std::size_t max_order);

/// Sample cumulant estimates of orders 1..max_order (max_order <= 6).
/// Orders 1..4 are the unbiased k-statistics; orders 5 and 6 are plug-in
/// estimates from central sample moments (bias O(1/n)).
std::vector<double> sample_cumulants(std::span<const double> values,
                                     std::size_t max_order);

struct CumulantEstimate {
  std::vector<double> values;      // entry r-1 holds the estimate of kappa_r
  std::vector<double> std_errors;  // delete-group jackknife
  /// Leave-one-group-out estimates, one vector per group, for jackknifing
  /// derived statistics.
  std::vector<std::vector<double>> replicates;
};

/// Jackknife standard error from leave-one-group-out replicate values.
double jackknife_std_error(std::span<const double> replicate_values);

/// sample_cumulants plus jackknife standard errors from `groups` contiguous
/// delete-one-group replicates.
CumulantEstimate sample_cumulants_with_se(std::span<const double> values,
                                          std::size_t max_order,
                                          std::size_t groups = 50);

/// Asymptotic Kolmogorov survival function Q(t) = 2 sum (-1)^{k-1} e^{-2k^2t^2}.
double kolmogorov_survival(double t);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value and the
/// small-sample correction sqrt(ne) + 0.12 + 0.11/sqrt(ne).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace gammastein
