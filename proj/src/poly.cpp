#include "gammastein/poly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gammastein {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= kTrimThreshold)
    coeffs_.pop_back();
  if (coeffs_.empty() ||
      (coeffs_.size() == 1 && std::abs(coeffs_[0]) <= kTrimThreshold)) {
    coeffs_.assign(1, 0.0);
  }
}

Polynomial Polynomial::monomial(std::size_t k, double c) {
  std::vector<double> v(k + 1, 0.0);
  v[k] = c;
  return Polynomial(std::move(v));
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::complex<double> Polynomial::operator()(std::complex<double> z) const {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial();
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k)
    d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::scaled(double s) const {
  std::vector<double> out(coeffs_);
  for (double& c : out) c *= s;
  return Polynomial(std::move(out));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> out(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.coeff(k) + b.coeff(k);
  return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  return a + b.scaled(-1.0);
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  std::vector<double> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
      out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(out));
}

std::vector<double> SymmetricIndex::effective_values() const {
  if (!excluded) return values;
  if (*excluded >= values.size())
    throw std::domain_error("excluded index out of range");
  std::vector<double> out;
  out.reserve(values.size() - 1);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (i != *excluded) out.push_back(values[i]);
  return out;
}

std::vector<double> elementary_symmetric_all(std::span<const double> values) {
  std::vector<double> e(values.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t n = 0; n < values.size(); ++n)
    for (std::size_t k = n + 1; k >= 1; --k) e[k] += values[n] * e[k - 1];
  return e;
}

double elementary_symmetric(std::span<const double> values, std::size_t k) {
  if (k > values.size()) {
    throw std::domain_error("elementary_symmetric: order " + std::to_string(k) +
                            " exceeds number of values " +
                            std::to_string(values.size()));
  }
  return elementary_symmetric_all(values)[k];
}

double elementary_symmetric(const SymmetricIndex& index, std::size_t k) {
  const auto v = index.effective_values();
  return elementary_symmetric(v, k);
}

Polynomial poly_from_roots(std::span<const double> roots, double leading) {
  // coefficient of x^k is leading * (-1)^(d-k) e_{d-k}(roots)
  const auto e = elementary_symmetric_all(roots);
  const std::size_t d = roots.size();
  std::vector<double> c(d + 1);
  for (std::size_t k = 0; k <= d; ++k) {
    const double sign = ((d - k) % 2 == 0) ? 1.0 : -1.0;
    c[k] = leading * sign * e[d - k];
  }
  return Polynomial(std::move(c));
}

namespace {

void check_minor_inputs(const Matrix& c, std::span<const double> lambdas) {
  if (!c.is_square()) throw std::domain_error("principal_minor_sum: C is not square");
  if (!c.is_symmetric(1e-10))
    throw std::domain_error("principal_minor_sum: C is not symmetric");
  if (lambdas.size() != c.rows())
    throw std::domain_error("principal_minor_sum: lambdas length differs from C");
  if (c.rows() > 20) throw std::domain_error("principal_minor_sum: d too large");
}

}  // namespace

std::vector<double> principal_minor_sums(const Matrix& c,
                                         std::span<const double> lambdas) {
  check_minor_inputs(c, lambdas);
  const std::size_t d = c.rows();
  std::vector<double> r(d + 1, 0.0);
  r[0] = 1.0;
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    double prod = 1.0;
    for (std::size_t i = 0; i < d; ++i)
      if (mask & (1u << i)) prod *= lambdas[i];
    r[static_cast<std::size_t>(std::popcount(mask))] +=
        determinant(c.principal_submatrix(mask)) * prod;
  }
  return r;
}

double principal_minor_sum(const Matrix& c, std::span<const double> lambdas,
                           std::size_t j) {
  check_minor_inputs(c, lambdas);
  if (j > c.rows()) throw std::domain_error("principal_minor_sum: j exceeds d");
  if (j == 0) return 1.0;
  const std::size_t d = c.rows();
  double r = 0.0;
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != j) continue;
    double prod = 1.0;
    for (std::size_t i = 0; i < d; ++i)
      if (mask & (1u << i)) prod *= lambdas[i];
    r += determinant(c.principal_submatrix(mask)) * prod;
  }
  return r;
}

}  // namespace gammastein
