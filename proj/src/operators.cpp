#include "gammastein/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gammastein/cumulants.hpp"

namespace gammastein {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double sign_of_power(std::size_t k) { return k % 2 == 0 ? 1.0 : -1.0; }

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

CfOde normalized(Polynomial A, Polynomial B) {
  const double a0 = A.coeff(0);
  if (a0 == 0.0) throw SpecError("A", "A(0) must be nonzero");
  return {A.scaled(1.0 / a0), B.scaled(1.0 / a0)};
}

CfOde gamma_combination_ode(const GammaCombination& g) {
  const std::size_t d = g.terms.size();
  std::vector<double> nu(d);
  double r1 = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const auto& t = g.terms[i];
    nu[i] = 1.0 / (t.c * t.lambda);
    r1 += t.lambda * t.m * t.alpha * t.c;
  }
  // prod (nu_j - z) = (-1)^d prod (z - nu_j)
  const Polynomial A = poly_from_roots(nu, sign_of_power(d));
  Polynomial B = A.scaled(-r1);
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<double> others;
    for (std::size_t l = 0; l < d; ++l)
      if (l != k) others.push_back(nu[l]);
    const auto& t = g.terms[k];
    B = B + poly_from_roots(others, sign_of_power(d - 1)).scaled(t.m * t.alpha);
  }
  return normalized(A, B);
}

}  // namespace

SteinOperator::SteinOperator(std::vector<Polynomial> coeff_polys)
    : coeffs_(std::move(coeff_polys)) {
  while (coeffs_.size() > 1 && coeffs_.back().is_zero()) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.emplace_back();
}

double SteinOperator::apply(std::span<const double> derivs, double x) const {
  if (derivs.size() < coeffs_.size()) {
    throw std::invalid_argument("apply: operator of order " + std::to_string(order()) +
                                " needs " + std::to_string(coeffs_.size()) +
                                " derivative values, got " + std::to_string(derivs.size()));
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < coeffs_.size(); ++k) acc += coeffs_[k](x) * derivs[k];
  return acc;
}

double SteinOperator::apply(
    const std::function<std::vector<double>(double, std::size_t)>& f_derivs, double x) const {
  const auto d = f_derivs(x, order());
  return apply(d, x);
}

SteinOperator SteinOperator::scaled(double s) const {
  std::vector<Polynomial> out;
  out.reserve(coeffs_.size());
  for (const auto& p : coeffs_) out.push_back(p.scaled(s));
  return SteinOperator(std::move(out));
}

nlohmann::json to_json(const SteinOperator& op) {
  nlohmann::json polys = nlohmann::json::array();
  for (const auto& p : op.coeff_polys()) polys.push_back(p.coeffs());
  return nlohmann::json{{"coeff_polys", polys}};
}

SteinOperator operator_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("coeff_polys") || !doc["coeff_polys"].is_array())
    throw SpecError("coeff_polys", "expected an array of coefficient arrays");
  std::vector<Polynomial> polys;
  for (const auto& p : doc["coeff_polys"]) {
    if (!p.is_array()) throw SpecError("coeff_polys", "expected an array of coefficient arrays");
    std::vector<double> c;
    for (const auto& v : p) {
      if (!v.is_number()) throw SpecError("coeff_polys", "coefficients must be numbers");
      c.push_back(v.get<double>());
    }
    polys.emplace_back(std::move(c));
  }
  if (polys.empty()) throw SpecError("coeff_polys", "must be nonempty");
  return SteinOperator(std::move(polys));
}

SteinOperator from_cf_ode(const CfOde& ode) {
  if (ode.A.coeff(0) == 0.0) throw SpecError("A", "A(0) must be nonzero");
  const std::size_t n = std::max(ode.A.degree(), ode.B.degree()) + 1;
  std::vector<Polynomial> polys;
  polys.reserve(n);
  for (std::size_t k = 0; k < n; ++k) polys.push_back(Polynomial({-ode.B.coeff(k), ode.A.coeff(k)}));
  return SteinOperator(std::move(polys));
}

CfOde cf_ode_for(const TargetSpec& spec) {
  validate(spec);
  return std::visit(
      overloaded{
          [](const GammaCombination& g) { return gamma_combination_ode(g); },
          [](const SecondChaos& s) { return gamma_combination_ode(to_gamma_combination(s)); },
          [](const MultivariateGammaProjection& s) {
            const auto r = principal_minor_sums(s.C, s.lambdas);
            const std::size_t d = r.size() - 1;
            std::vector<double> dpoly(d + 1), dderiv(d, 0.0);
            for (std::size_t j = 0; j <= d; ++j) dpoly[j] = sign_of_power(j) * r[j];
            for (std::size_t j = 0; j < d; ++j)
              dderiv[j] = sign_of_power(j + 1) * static_cast<double>(j + 1) * r[j + 1];
            const Polynomial D(dpoly);
            const Polynomial B =
                (D.scaled(s.kappa_offset()) + Polynomial(dderiv)).scaled(-s.alpha);
            return normalized(D, B);
          },
          [](const McKayI& m) {
            const double k = 1.0 + 2.0 * m.a;
            return normalized(Polynomial({1.0 - m.c * m.c, 2.0 * m.c * m.b, -m.b * m.b}),
                              Polynomial({-k * m.b * m.c, k * m.b * m.b}));
          },
          [](const VarianceGamma& v) {
            const double g2 = v.alpha * v.alpha - v.beta * v.beta;
            return normalized(Polynomial({g2, -2.0 * v.beta, -1.0}),
                              Polynomial({v.mu * g2 + 2.0 * v.lambda * v.beta,
                                          2.0 * (v.lambda - v.mu * v.beta), -v.mu}));
          },
          [](const NormalSpec& n) {
            return normalized(Polynomial({1.0}), Polynomial({n.mu, n.sigma2}));
          },
      },
      spec);
}

SteinOperator gamma_combination_operator(const GammaCombination& spec) {
  validate(spec);
  const std::size_t d = spec.terms.size();
  std::vector<double> lc(d), w(d);
  double r1 = 0.0;
  double prod = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    const auto& t = spec.terms[i];
    lc[i] = t.lambda * t.c;
    w[i] = t.lambda * t.m * t.alpha * t.c;
    r1 += w[i];
    prod *= lc[i];
  }
  const auto e = elementary_symmetric_all(lc);
  std::vector<std::vector<double>> e_without(d);
  for (std::size_t k = 0; k < d; ++k) {
    SymmetricIndex idx{lc, k};
    e_without[k] = elementary_symmetric_all(idx.effective_values());
  }

  std::vector<Polynomial> polys(d + 1);
  polys[0] = Polynomial({0.0, 1.0});
  for (std::size_t l = 1; l + 1 <= d; ++l) {
    double constant = 0.0;
    for (std::size_t k = 0; k < d; ++k) constant += w[k] * (e[l] - e_without[k][l]);
    polys[l] = Polynomial({constant, e[l]}).scaled(sign_of_power(l));
  }
  polys[d] = Polynomial({r1, 1.0}).scaled(sign_of_power(d) * prod);
  return SteinOperator(std::move(polys));
}

MalliavinCoefficients malliavin_coefficients(const SecondChaos& spec) {
  validate(spec);
  const std::size_t d = spec.lambdas.size();
  const Polynomial P = build_P(spec.lambdas);
  const auto kappa = cumulant_sequence(spec, d + 1);
  MalliavinCoefficients out;
  out.a.assign(d + 2, 0.0);
  out.b.assign(d + 2, 0.0);
  for (std::size_t l = 1; l <= d + 1; ++l)
    out.a[l] = P.coeff(l) / std::ldexp(1.0, static_cast<int>(l) - 1);
  for (std::size_t l = 2; l <= d + 1; ++l) {
    double b = 0.0;
    for (std::size_t r = l; r <= d + 1; ++r)
      b += out.a[r] * kappa.kappa(r - l + 2) / factorial(r - l + 1);
    out.b[l] = b;
  }
  return out;
}

SteinOperator second_chaos_operator_malliavin(const SecondChaos& spec) {
  validate(spec);
  for (int m : spec.multiplicities)
    if (m != 1)
      throw UnsupportedError(
          "Malliavin construction needs all multiplicities equal to 1; use the closed form");
  const std::size_t d = spec.lambdas.size();
  const auto coef = malliavin_coefficients(spec);
  std::vector<Polynomial> polys(d + 1);
  polys[0] = Polynomial({0.0, -coef.a[d + 1]});
  for (std::size_t l = 2; l <= d + 1; ++l)
    polys[d + 2 - l] = Polynomial({coef.b[l], -coef.a[l - 1]});
  return SteinOperator(std::move(polys));
}

SteinOperator multivariate_gamma_operator(const MultivariateGammaProjection& spec) {
  validate(spec);
  auto r = principal_minor_sums(spec.C, spec.lambdas);
  const std::size_t d = r.size() - 1;
  r.push_back(0.0);  // r_{d+1} = 0
  const double ak = spec.alpha * spec.kappa_offset();
  std::vector<Polynomial> polys(d + 1);
  for (std::size_t j = 0; j <= d; ++j) {
    const double constant =
        r[j] * ak - spec.alpha * static_cast<double>(j + 1) * r[j + 1];
    polys[j] = Polynomial({constant, r[j]}).scaled(sign_of_power(j));
  }
  return SteinOperator(std::move(polys));
}

SteinOperator mckay_operator(const McKayI& m) {
  validate(m);
  const double denom = 1.0 - m.c * m.c;
  const double k = 1.0 + 2.0 * m.a;
  return SteinOperator({Polynomial({k * m.b * m.c / denom, 1.0}),
                        Polynomial({-k * m.b * m.b / denom, 2.0 * m.c * m.b / denom}),
                        Polynomial({0.0, -m.b * m.b / denom})});
}

SteinOperator normal_operator(const NormalSpec& n) {
  validate(n);
  return SteinOperator({Polynomial({-n.mu, 1.0}), Polynomial({-n.sigma2})});
}

SteinOperator variance_gamma_operator(const VarianceGamma& v) {
  validate(v);
  // (x-mu) f'' + (2 beta (x-mu) + 2 lambda) f' + (2 lambda beta - (alpha^2-beta^2)(x-mu)) f
  const double g2 = v.alpha * v.alpha - v.beta * v.beta;
  return SteinOperator({Polynomial({2.0 * v.lambda * v.beta + g2 * v.mu, -g2}),
                        Polynomial({2.0 * v.lambda - 2.0 * v.beta * v.mu, 2.0 * v.beta}),
                        Polynomial({-v.mu, 1.0})});
}

std::optional<double> scalar_equivalent(const SteinOperator& op1, const SteinOperator& op2,
                                        double tol) {
  if (op1.order() != op2.order()) return std::nullopt;
  if (op2.is_zero()) return op1.is_zero() ? std::optional<double>(1.0) : std::nullopt;
  const Polynomial& lead2 = op2.coeff_polys().back();
  std::size_t pivot = 0;
  for (std::size_t j = 1; j < lead2.coeffs().size(); ++j)
    if (std::abs(lead2.coeff(j)) > std::abs(lead2.coeff(pivot))) pivot = j;
  const double s = op1.coeff_polys().back().coeff(pivot) / lead2.coeff(pivot);

  double scale = 0.0;
  for (std::size_t k = 0; k <= op1.order(); ++k) {
    scale = std::max(scale, op1.coeff(k).max_abs_coeff());
    scale = std::max(scale, std::abs(s) * op2.coeff(k).max_abs_coeff());
  }
  for (std::size_t k = 0; k <= op1.order(); ++k) {
    const Polynomial p1 = op1.coeff(k), p2 = op2.coeff(k);
    const std::size_t n = std::max(p1.coeffs().size(), p2.coeffs().size());
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(p1.coeff(j) - s * p2.coeff(j)) > tol * scale) return std::nullopt;
  }
  return s;
}

std::string route_name(Route r) {
  switch (r) {
    case Route::Fourier: return "fourier";
    case Route::Malliavin: return "malliavin";
    case Route::ClosedForm: return "closed-form";
  }
  return "unknown";
}

Route parse_route(const std::string& name) {
  if (name == "fourier") return Route::Fourier;
  if (name == "malliavin") return Route::Malliavin;
  if (name == "closed-form") return Route::ClosedForm;
  throw SpecError("route", "unknown route '" + name + "' (fourier|malliavin|closed-form)");
}

SteinOperator build_operator(const TargetSpec& spec, Route route) {
  if (route == Route::Fourier) return from_cf_ode(cf_ode_for(spec));
  if (route == Route::Malliavin) {
    const auto* s = std::get_if<SecondChaos>(&spec);
    if (!s) throw UnsupportedError("malliavin route applies to second_chaos targets only");
    return second_chaos_operator_malliavin(*s);
  }
  return std::visit(
      overloaded{
          [](const GammaCombination& g) { return gamma_combination_operator(g); },
          [](const SecondChaos& s) { return gamma_combination_operator(to_gamma_combination(s)); },
          [](const MultivariateGammaProjection& s) { return multivariate_gamma_operator(s); },
          [](const McKayI& m) { return mckay_operator(m); },
          [](const VarianceGamma& v) { return variance_gamma_operator(v); },
          [](const NormalSpec& n) { return normal_operator(n); },
      },
      spec);
}

}  // namespace gammastein
