#include "gammastein/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gammastein {

namespace {

constexpr std::size_t kPairwiseBlock = 128;

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Central sums C_r = sum (x - mean)^r from sums shifted by `shift`, where
// delta = mean - shift.
std::vector<double> recenter(const std::vector<double>& shifted, double delta) {
  const std::size_t m = shifted.size();
  std::vector<double> central(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    double acc = 0.0;
    double pw = 1.0;  // (-delta)^(r-j), built from j = r downwards
    for (std::size_t j = r + 1; j-- > 0;) {
      acc += binomial(r, j) * shifted[j] * pw;
      pw *= -delta;
    }
    central[r] = acc;
  }
  return central;
}

std::vector<double> cumulants_from_central(const std::vector<double>& c,
                                           std::size_t max_order, double mean) {
  const double n = c[0];
  std::vector<double> k(max_order, 0.0);
  k[0] = mean;
  if (max_order >= 2) k[1] = c[2] / (n - 1.0);
  if (max_order >= 3) k[2] = n * c[3] / ((n - 1.0) * (n - 2.0));
  if (max_order >= 4)
    k[3] = (n * (n + 1.0) * c[4] - 3.0 * (n - 1.0) * c[2] * c[2]) /
           ((n - 1.0) * (n - 2.0) * (n - 3.0));
  const double m2 = c[2] / n;
  const double m3 = max_order >= 3 ? c[3] / n : 0.0;
  if (max_order >= 5) {
    const double m5 = c[5] / n;
    k[4] = m5 - 10.0 * m3 * m2;
  }
  if (max_order >= 6) {
    const double m4 = c[4] / n;
    const double m6 = c[6] / n;
    k[5] = m6 - 15.0 * m4 * m2 - 10.0 * m3 * m3 + 30.0 * m2 * m2 * m2;
  }
  return k;
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= kPairwiseBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

MeanEstimate estimate_mean(std::span<const double> values) {
  MeanEstimate out;
  out.n = values.size();
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = pairwise_sum(values) / n;
  if (values.size() < 2) return out;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - out.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / (n - 1.0);
  out.std_error = std::sqrt(var / n);
  return out;
}

std::vector<double> shifted_power_sums(std::span<const double> values,
                                       double shift, std::size_t max_order) {
  // Block-wise accumulation, then a pairwise reduction over blocks.
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (values.size() + kBlock - 1) / kBlock;
  std::vector<std::vector<double>> per_order(max_order + 1,
                                             std::vector<double>(blocks, 0.0));
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(values.size(), lo + kBlock);
    std::vector<double> acc(max_order + 1, 0.0);
    for (std::size_t i = lo; i < hi; ++i) {
      const double d = values[i] - shift;
      double pw = 1.0;
      for (std::size_t r = 0; r <= max_order; ++r) {
        acc[r] += pw;
        pw *= d;
      }
    }
    for (std::size_t r = 0; r <= max_order; ++r) per_order[r][b] = acc[r];
  }
  std::vector<double> sums(max_order + 1, 0.0);
  for (std::size_t r = 0; r <= max_order; ++r) sums[r] = pairwise_sum(per_order[r]);
  return sums;
}

std::vector<double> sample_cumulants(std::span<const double> values,
                                     std::size_t max_order) {
  if (max_order < 1 || max_order > 6)
    throw std::domain_error("sample_cumulants: order must be in 1..6");
  if (values.size() <= max_order)
    throw std::domain_error("sample_cumulants: not enough samples");
  const double mean = pairwise_sum(values) / static_cast<double>(values.size());
  const auto central = shifted_power_sums(values, mean, std::max<std::size_t>(max_order, 2));
  return cumulants_from_central(central, max_order, mean);
}

CumulantEstimate sample_cumulants_with_se(std::span<const double> values,
                                          std::size_t max_order,
                                          std::size_t groups) {
  if (max_order < 1 || max_order > 6)
    throw std::domain_error("sample_cumulants: order must be in 1..6");
  if (groups < 2 || values.size() < groups * (max_order + 2))
    throw std::domain_error("sample_cumulants: not enough samples for jackknife");
  const std::size_t order = std::max<std::size_t>(max_order, 2);
  const double shift = pairwise_sum(values) / static_cast<double>(values.size());

  std::vector<std::vector<double>> group_sums(groups);
  const std::size_t n = values.size();
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t lo = g * n / groups;
    const std::size_t hi = (g + 1) * n / groups;
    group_sums[g] = shifted_power_sums(values.subspan(lo, hi - lo), shift, order);
  }
  std::vector<double> total(order + 1, 0.0);
  for (const auto& gs : group_sums)
    for (std::size_t r = 0; r <= order; ++r) total[r] += gs[r];

  auto estimate = [&](const std::vector<double>& sums) {
    const double delta = sums[1] / sums[0];
    return cumulants_from_central(recenter(sums, delta), max_order, shift + delta);
  };

  CumulantEstimate out;
  out.values = estimate(total);
  std::vector<std::vector<double>> reps(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    std::vector<double> loo(order + 1);
    for (std::size_t r = 0; r <= order; ++r) loo[r] = total[r] - group_sums[g][r];
    reps[g] = estimate(loo);
  }
  out.std_errors.assign(max_order, 0.0);
  std::vector<double> column(groups);
  for (std::size_t r = 0; r < max_order; ++r) {
    for (std::size_t g = 0; g < groups; ++g) column[g] = reps[g][r];
    out.std_errors[r] = jackknife_std_error(column);
  }
  out.replicates = std::move(reps);
  return out;
}

double jackknife_std_error(std::span<const double> replicate_values) {
  const double g = static_cast<double>(replicate_values.size());
  if (replicate_values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : replicate_values) mean += v;
  mean /= g;
  double ss = 0.0;
  for (double v : replicate_values) ss += (v - mean) * (v - mean);
  return std::sqrt((g - 1.0) / g * ss);
}

double kolmogorov_survival(double t) {
  if (t < 0.18) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += sign * term;
    if (term < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::domain_error("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult out;
  out.statistic = d;
  const double ne = std::sqrt(na * nb / (na + nb));
  out.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
  return out;
}

}  // namespace gammastein
