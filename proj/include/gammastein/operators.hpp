#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gammastein/poly.hpp"
#include "gammastein/targets.hpp"

namespace gammastein {

/// Differential operator f -> sum_k p_k(x) f^(k)(x) with polynomial
/// coefficients. Stored exactly as constructed (no normalization); compare
/// operators with scalar_equivalent.
class SteinOperator {
 public:
  SteinOperator() : coeffs_{Polynomial()} {}
  /// Trailing zero coefficient polynomials are dropped.
  explicit SteinOperator(std::vector<Polynomial> coeff_polys);

  std::size_t order() const { return coeffs_.size() - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0].is_zero(); }
  const std::vector<Polynomial>& coeff_polys() const { return coeffs_; }
  /// p_k; the zero polynomial beyond the order.
  Polynomial coeff(std::size_t k) const {
    return k < coeffs_.size() ? coeffs_[k] : Polynomial();
  }

  /// sum_k p_k(x) derivs[k]; derivs must hold f, f', ..., f^(order).
  /// Throws std::invalid_argument otherwise.
  double apply(std::span<const double> derivs, double x) const;
  /// As above with f_derivs(x, order) returning the derivative vector.
  double apply(const std::function<std::vector<double>(double, std::size_t)>& f_derivs,
               double x) const;

  SteinOperator scaled(double s) const;

  friend bool operator==(const SteinOperator&, const SteinOperator&) = default;

 private:
  std::vector<Polynomial> coeffs_;
};

nlohmann::json to_json(const SteinOperator& op);
/// Throws SpecError("coeff_polys", ...) on malformed input.
SteinOperator operator_from_json(const nlohmann::json& doc);

/// A(i xi) phi'(xi) = i B(i xi) phi(xi); coefficient k multiplies (i xi)^k.
struct CfOde {
  Polynomial A;
  Polynomial B;
};

/// f -> x sum a_k f^(k) - sum b_k f^(k), i.e. p_k(x) = a_k x - b_k.
/// Throws SpecError if A(0) == 0.
SteinOperator from_cf_ode(const CfOde& ode);

/// CF ODE of the target, normalized so that A(0) = 1.
CfOde cf_ode_for(const TargetSpec& spec);

/// Closed-form operator for independent gamma combinations; requires
/// distinct lambdas.
SteinOperator gamma_combination_operator(const GammaCombination& spec);

/// a_l (l = 1..d+1) and b_l (l = 2..d+1) of the Malliavin construction,
/// indexed directly by l (unused slots are zero).
struct MalliavinCoefficients {
  std::vector<double> a;
  std::vector<double> b;
};

MalliavinCoefficients malliavin_coefficients(const SecondChaos& spec);

/// Order-d operator sum_{l=2}^{d+1} (b_l - a_{l-1} x) f^(d+2-l) - a_{d+1} x f
/// built from P(x) = x prod (x - lambda_i) and the target cumulants.
/// Throws UnsupportedError if any multiplicity exceeds 1.
SteinOperator second_chaos_operator_malliavin(const SecondChaos& spec);

SteinOperator multivariate_gamma_operator(const MultivariateGammaProjection& spec);

/// Second-order McKay Type I operator normalized by 1/(1 - c^2).
SteinOperator mckay_operator(const McKayI& m);

SteinOperator normal_operator(const NormalSpec& n);
SteinOperator variance_gamma_operator(const VarianceGamma& v);

/// s with op1 = s * op2 coefficient-wise, within tol relative to the largest
/// coefficient magnitude; nullopt if the operators are not proportional.
std::optional<double> scalar_equivalent(const SteinOperator& op1, const SteinOperator& op2,
                                        double tol = 1e-9);

enum class Route { Fourier, Malliavin, ClosedForm };

std::string route_name(Route r);
/// Throws SpecError("route", ...) for unknown names.
Route parse_route(const std::string& name);

/// Operator for the spec through the requested construction. Throws
/// UnsupportedError when the route does not apply to the spec kind.
SteinOperator build_operator(const TargetSpec& spec, Route route);

}  // namespace gammastein
