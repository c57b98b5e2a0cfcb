#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "gammastein/cumulants.hpp"
#include "gammastein/operators.hpp"

using namespace gammastein;
using cd = std::complex<double>;

namespace {

// Coefficient-wise check after rescaling got onto the reference normalization.
void check_matches(const SteinOperator& got, const SteinOperator& want, double tol = 1e-12) {
  const auto s = scalar_equivalent(want, got, 1e-9);
  REQUIRE(s.has_value());
  const auto scaled = got.scaled(*s);
  REQUIRE(scaled.order() == want.order());
  for (std::size_t k = 0; k <= want.order(); ++k)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(scaled.coeff(k).coeff(j) - want.coeff(k).coeff(j)) <= tol);
}

std::vector<double> distinct_values(std::mt19937_64& gen, std::size_t d) {
  std::uniform_real_distribution<double> u(0.3, 2.0);
  std::vector<double> v;
  while (v.size() < d) {
    const double x = (gen() % 2 ? -1.0 : 1.0) * u(gen);
    bool ok = true;
    for (double y : v) ok = ok && std::abs(x - y) > 0.05;
    if (ok) v.push_back(x);
  }
  return v;
}

double cf_ode_residual(const TargetSpec& spec, double xi) {
  const auto ode = cf_ode_for(spec);
  const double h = 1e-5;
  const cd dphi = (cf_eval(spec, xi + h) - cf_eval(spec, xi - h)) / (2 * h);
  const cd z(0, xi);
  const cd r = ode.A(z) * dphi - cd(0, 1) * ode.B(z) * cf_eval(spec, xi);
  return std::abs(r) / (1 + std::abs(dphi));
}

}  // namespace

TEST_CASE("apply") {
  const SteinOperator zero;
  const std::vector<double> d{1.0, 2.0, 3.0};
  CHECK(zero.apply(d, 1.7) == 0.0);
  const auto normal = normal_operator(NormalSpec{0.5, 2.0});
  for (double x : {-1.0, 0.0, 2.5})
    CHECK(normal.apply(std::vector<double>{x, 1.0}, x) == doctest::Approx(x * x - 0.5 * x - 2.0));
  CHECK_THROWS_AS(normal.apply(std::vector<double>{1.0}, 0.0), std::invalid_argument);
  // x f - 2 (x + d) f' with d = 3, f(x) = x at x = 1.
  const SteinOperator chi({Polynomial{0, 1}, Polynomial{-6, -2}});
  CHECK(chi.apply(std::vector<double>{1.0, 1.0}, 1.0) == doctest::Approx(1 - 2 * (1 + 3)));
  // linearity in f
  const std::vector<double> f{0.3, -1.2, 0.7}, g{2.0, 0.1, -0.4};
  const auto op = mckay_operator(McKayI{0.5, 1.0, 2.0});
  std::vector<double> fg(3);
  for (int i = 0; i < 3; ++i) fg[i] = 2 * f[i] - 3 * g[i];
  CHECK(op.apply(fg, 0.8) == doctest::Approx(2 * op.apply(f, 0.8) - 3 * op.apply(g, 0.8)));
}

TEST_CASE("from_cf_ode examples") {
  const auto normal = from_cf_ode({Polynomial{1}, Polynomial{0.5, 2.0}});
  CHECK(normal == SteinOperator({Polynomial{-0.5, 1}, Polynomial{-2.0}}));
  const double d = 3;
  const auto chi = from_cf_ode({Polynomial{1, -2}, Polynomial{0, 2 * d}});
  CHECK(chi == SteinOperator({Polynomial{0, 1}, Polynomial{-2 * d, -2}}));
  CHECK_THROWS_AS(from_cf_ode({Polynomial{0, 1}, Polynomial{1}}), std::invalid_argument);
}

TEST_CASE("chi-square ode from a single gamma term") {
  for (int d : {1, 2, 5}) {
    const auto ode = cf_ode_for(GammaCombination{{{1.0, 1, d / 2.0, 2.0}}});
    CHECK(ode.A == Polynomial{1, -2});
    CHECK(ode.B.coeff(0) == doctest::Approx(0.0));
    CHECK(ode.B.coeff(1) == doctest::Approx(2.0 * d));
  }
}

TEST_CASE("multivariate diagonal ode coefficients are signed minor sums") {
  MultivariateGammaProjection mv;
  mv.C = Matrix::diagonal(std::vector<double>{2.0, 1.0, 1.5});
  mv.alpha = 0.8;
  mv.lambdas = {1.0, -0.5, 0.25};
  mv.K = {0, 0, 0};
  const auto r = principal_minor_sums(mv.C, mv.lambdas);
  const auto ode = cf_ode_for(mv);
  for (std::size_t j = 0; j <= 3; ++j)
    CHECK(ode.A.coeff(j) == doctest::Approx((j % 2 ? -1.0 : 1.0) * r[j]));
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) CHECK(cf_ode_residual(mv, u(gen)) < 1e-8);
}

TEST_CASE("product normal closed form") {
  const GammaCombination gc{{{0.5, 1, 0.5, 2.0}, {-0.5, 1, 0.5, 2.0}}};
  const auto op = gamma_combination_operator(gc);
  CHECK(op == SteinOperator({Polynomial{0, 1}, Polynomial{-1}, Polynomial{0, -1}}));
  const auto mal = second_chaos_operator_malliavin(SecondChaos{{0.5, -0.5}, {1, 1}});
  check_matches(mal, SteinOperator({Polynomial{0, -1}, Polynomial{1}, Polynomial{0, 1}}));
}

TEST_CASE("single gamma term closed form") {
  for (int q : {1, 2, 4})
    for (double lam : {0.5, 1.3}) {
      const auto op = gamma_combination_operator(GammaCombination{{{lam, q, 0.5, 2.0}}});
      check_matches(op, SteinOperator({Polynomial{0, 1}, Polynomial{-2 * lam * q * lam, -2 * lam}}));
    }
}

TEST_CASE("two-eigenvalue malliavin operator") {
  for (auto [l1, l2] : {std::pair{1.0, -0.5}, std::pair{0.7, 2.0}, std::pair{-1.5, 0.4}}) {
    const auto op = second_chaos_operator_malliavin(SecondChaos{{l1, l2}, {1, 1}});
    const SteinOperator want({Polynomial{0, -1},
                              Polynomial{2 * (l1 * l1 + l2 * l2), 2 * (l1 + l2)},
                              Polynomial{-4 * (l1 + l2) * l1 * l2, -4 * l1 * l2}});
    // The printed display is 2^d times the construction from P.
    CHECK(scalar_equivalent(op, want).value_or(0.0) == doctest::Approx(0.25).epsilon(1e-12));
    check_matches(op, want);
  }
  CHECK_THROWS_AS(second_chaos_operator_malliavin(SecondChaos{{1.0, 2.0}, {1, 2}}),
                  UnsupportedError);
}

TEST_CASE("malliavin coefficients from P") {
  const auto mc = malliavin_coefficients(SecondChaos{{1.0, -0.5}, {1, 1}});
  // a_l = P^(l)(0) / (l! 2^(l-1)) with P'(0) = l1 l2, P''(0) = -2(l1 + l2), P'''(0) = 6.
  CHECK(mc.a[1] == doctest::Approx(-0.5));
  CHECK(mc.a[2] == doctest::Approx(-2.0 * 0.5 / (2.0 * 2.0)));
  CHECK(mc.a[3] == doctest::Approx(6.0 / (6.0 * 4.0)));
}

TEST_CASE("route equivalence on random combinations") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> pos(0.3, 2.5);
  for (std::size_t d = 1; d <= 6; ++d)
    for (int rep = 0; rep < 10; ++rep) {
      const auto lam = distinct_values(gen, d);
      GammaCombination gc;
      for (double l : lam) gc.terms.push_back({l, 1 + int(gen() % 3), pos(gen), pos(gen)});
      const auto closed = gamma_combination_operator(gc);
      CHECK(scalar_equivalent(closed, from_cf_ode(cf_ode_for(gc))).has_value());
      SecondChaos sc{lam, std::vector<int>(d, 1)};
      const auto mal = second_chaos_operator_malliavin(sc);
      const auto s = scalar_equivalent(mal, gamma_combination_operator(to_gamma_combination(sc)));
      REQUIRE(s.has_value());
      // Normalizing constant between the two constructions.
      CHECK(*s == doctest::Approx(-1.0 / std::pow(2.0, double(d))).epsilon(1e-9));
    }
}

TEST_CASE("fixed two-term combination agrees exactly across routes") {
  const GammaCombination gc{{{1.0, 1, 1.0, 1.0}, {2.0, 1, 1.0, 1.0}}};
  const auto s = scalar_equivalent(gamma_combination_operator(gc), from_cf_ode(cf_ode_for(gc)));
  REQUIRE(s.has_value());
  CHECK(*s == doctest::Approx(1.0));
  CHECK(gamma_combination_operator(gc) ==
        SteinOperator({Polynomial{0, 1}, Polynomial{-5, -3}, Polynomial{6, 2}}));
}

TEST_CASE("repeated lambdas raise") {
  CHECK_THROWS(gamma_combination_operator(GammaCombination{{{1.0, 1, 1.0, 1.0}, {1.0, 2, 1.0, 1.0}}}));
}

TEST_CASE("bivariate gamma sum operator") {
  const double c1 = 2.0, c12 = 0.5, c2 = 1.0, alpha = 1.3;
  MultivariateGammaProjection mv;
  mv.C = Matrix::from_rows({{c1, c12}, {c12, c2}});
  mv.alpha = alpha;
  mv.lambdas = {1.0, 1.0};
  mv.K = {0.0, 0.0};
  const double det = c1 * c2 - c12 * c12;
  const SteinOperator want({Polynomial{-alpha * (c1 + c2), 1},
                            Polynomial{2 * alpha * det, -(c1 + c2)}, Polynomial{0, det}});
  check_matches(multivariate_gamma_operator(mv), want);
}

TEST_CASE("general bivariate operator with offsets") {
  MultivariateGammaProjection mv;
  mv.C = Matrix::from_rows({{1.5, -0.4}, {-0.4, 0.8}});
  mv.alpha = 0.7;
  mv.lambdas = {1.2, -0.6};
  mv.K = {0.3, -1.1};
  const double l1 = 1.2, l2 = -0.6, a = 0.7;
  const double kap = l1 * 0.3 + l2 * -1.1;
  const double r1 = 1.5 * l1 + 0.8 * l2;
  const double det = 1.5 * 0.8 - 0.16;
  const SteinOperator want(
      {Polynomial{a * (kap - r1), 1},
       Polynomial{-a * (r1 * kap - 2 * det * l1 * l2), -r1},
       Polynomial{l1 * l2 * det * a * kap, l1 * l2 * det}});
  check_matches(multivariate_gamma_operator(mv), want);
  CHECK(mv.kappa_offset() == doctest::Approx(kap));
}

TEST_CASE("diagonal multivariate matches independent combination") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> pos(0.3, 2.5);
  for (std::size_t d = 1; d <= 5; ++d) {
    const auto lam = distinct_values(gen, d);
    std::vector<double> c(d);
    for (auto& x : c) x = pos(gen);
    const double alpha = pos(gen);
    MultivariateGammaProjection mv;
    mv.C = Matrix::diagonal(c);
    mv.alpha = alpha;
    mv.lambdas = lam;
    mv.K = c;  // K = diag(C) centers each marginal
    GammaCombination gc;
    for (std::size_t i = 0; i < d; ++i) gc.terms.push_back({lam[i], 1, alpha, c[i]});
    CHECK(scalar_equivalent(multivariate_gamma_operator(mv), gamma_combination_operator(gc))
              .has_value());
  }
}

TEST_CASE("mckay operator") {
  const McKayI m{0.5, 1.0, 2.0};
  const auto op = mckay_operator(m);
  CHECK(op.coeff(0).coeff(0) == doctest::Approx((1 + 2 * m.a) * m.b * m.c / (1 - m.c * m.c)));
  CHECK(op.coeff(2) == Polynomial{0, 1.0 / 3.0});
  // Unnormalized CF-derived form: ((1-c^2) x + (1+2a)bc) f + (2cbx - (1+2a)b^2) f' - b^2 x f''.
  const double q = 1 - m.c * m.c;
  const SteinOperator raw({Polynomial{(1 + 2 * m.a) * m.b * m.c, q},
                           Polynomial{-(1 + 2 * m.a) * m.b * m.b, 2 * m.c * m.b},
                           Polynomial{0, -m.b * m.b}});
  const auto s = scalar_equivalent(op, raw);
  REQUIRE(s.has_value());
  CHECK(*s == doctest::Approx(1 / q));
  const auto s2 = scalar_equivalent(op, from_cf_ode(cf_ode_for(m)));
  REQUIRE(s2.has_value());
  CHECK(*s2 == doctest::Approx(1.0));
}

TEST_CASE("variance gamma operator") {
  const VarianceGamma v{0.3, 2.0, 0.5, 1.5};
  const auto op = variance_gamma_operator(v);
  const auto s = scalar_equivalent(op, from_cf_ode(cf_ode_for(v)));
  REQUIRE(s.has_value());
  // Second-order coefficient is proportional to (x - mu).
  const auto p2 = op.coeff(2);
  CHECK(std::abs(p2(v.mu)) < 1e-12);
}

TEST_CASE("scalar equivalence") {
  const auto op = mckay_operator(McKayI{0.5, 1.0, 2.0});
  const auto s = scalar_equivalent(op, op.scaled(2.0));
  REQUIRE(s.has_value());
  CHECK(*s == doctest::Approx(0.5));
  auto polys = op.coeff_polys();
  polys.back() = polys.back() + Polynomial::monomial(3, 1.0);
  CHECK_FALSE(scalar_equivalent(op, SteinOperator(polys)).has_value());
  CHECK_FALSE(scalar_equivalent(op, normal_operator(NormalSpec{0, 1})).has_value());
}

TEST_CASE("cf ode residuals") {
  std::vector<TargetSpec> specs{NormalSpec{0.4, 1.7}, VarianceGamma{0.3, 2.0, 0.5, 1.5},
                                SecondChaos{{1.0}, {3}}, McKayI{0.5, 1.0, 2.0},
                                GammaCombination{{{1.0, 1, 1.5, 1.0}, {-0.5, 2, 0.75, 2.0}}}};
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (std::size_t s = 0; s < specs.size(); ++s)
    for (int i = 0; i < 50; ++i) {
      const double xi = u(gen);
      INFO("spec " << s << " xi " << xi);
      CHECK(cf_ode_residual(specs[s], xi) < 1e-7);
    }
}

TEST_CASE("operator json") {
  const auto op = mckay_operator(McKayI{0.5, 1.0, 2.0});
  CHECK(operator_from_json(to_json(op)) == op);
  CHECK_THROWS_AS(operator_from_json(nlohmann::json{{"coeffs", 1}}), SpecError);
}

TEST_CASE("routes") {
  CHECK(parse_route("fourier") == Route::Fourier);
  CHECK(parse_route("closed-form") == Route::ClosedForm);
  CHECK(route_name(Route::Malliavin) == "malliavin");
  CHECK_THROWS_AS(parse_route("spectral"), SpecError);
  CHECK_THROWS_AS(build_operator(McKayI{0.5, 1.0, 2.0}, Route::Malliavin), UnsupportedError);
}
