#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "gammastein/matrix.hpp"

namespace gammastein {

/// Dense univariate polynomial with real coefficients, ascending powers.
///
/// The coefficient vector is kept in canonical form: trailing coefficients
/// with magnitude at most kTrimThreshold are dropped on construction, and
/// the zero polynomial is stored as the single coefficient {0}.
class Polynomial {
 public:
  static constexpr double kTrimThreshold = 1e-13;

  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs)
      : Polynomial(std::vector<double>(coeffs)) {}

  static Polynomial constant(double c) { return Polynomial({c}); }
  static Polynomial monomial(std::size_t k, double c = 1.0);

  const std::vector<double>& coeffs() const { return coeffs_; }
  std::size_t degree() const { return coeffs_.size() - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

  /// Coefficient of x^k; zero beyond the degree.
  double coeff(std::size_t k) const {
    return k < coeffs_.size() ? coeffs_[k] : 0.0;
  }
  double max_abs_coeff() const;

  double operator()(double x) const;
  std::complex<double> operator()(std::complex<double> z) const;

  Polynomial derivative() const;
  Polynomial scaled(double s) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& p) {
    return p.scaled(s);
  }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<double> coeffs_;
};

inline Polynomial poly_add(const Polynomial& a, const Polynomial& b) {
  return a + b;
}
inline Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  return a * b;
}
inline Polynomial poly_scale(const Polynomial& p, double s) {
  return p.scaled(s);
}
inline Polynomial poly_derivative(const Polynomial& p) {
  return p.derivative();
}

/// Values used as arguments of the symmetric functions, optionally with one
/// entry left out (the "(lambda c)_k" tuple).
struct SymmetricIndex {
  std::vector<double> values;
  std::optional<std::size_t> excluded;

  std::vector<double> effective_values() const;
};

/// e_k(values) via the one-pass recurrence e_k <- e_k + v * e_{k-1}.
/// e_0 = 1. Throws std::domain_error if k > values.size().
double elementary_symmetric(std::span<const double> values, std::size_t k);
double elementary_symmetric(const SymmetricIndex& index, std::size_t k);

/// All of e_0 ... e_d in one pass.
std::vector<double> elementary_symmetric_all(std::span<const double> values);

/// leading * prod (x - r_i).
Polynomial poly_from_roots(std::span<const double> roots, double leading = 1.0);

/// r_j = sum over index sets S of size j of det(C_S) * prod_{i in S} lambda_i,
/// by bitmask enumeration with LU minors. r_0 = 1.
double principal_minor_sum(const Matrix& c, std::span<const double> lambdas,
                           std::size_t j);

/// r_0 ... r_d in a single sweep over subsets.
std::vector<double> principal_minor_sums(const Matrix& c,
                                         std::span<const double> lambdas);

}  // namespace gammastein
