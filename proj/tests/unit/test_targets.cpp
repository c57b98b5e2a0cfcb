#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "gammastein/cumulants.hpp"
#include "gammastein/parallel.hpp"
#include "gammastein/stats.hpp"
#include "gammastein/targets.hpp"

using namespace gammastein;
using cd = std::complex<double>;

namespace {

MeanEstimate variance_estimate(const std::vector<double>& x) {
  const double m = estimate_mean(x).mean;
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - m) * (x[i] - m);
  return estimate_mean(sq);
}

cd empirical_cf(const std::vector<double>& x, double xi) {
  std::vector<double> re(x.size()), im(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    re[i] = std::cos(xi * x[i]);
    im[i] = std::sin(xi * x[i]);
  }
  return {pairwise_sum(re) / x.size(), pairwise_sum(im) / x.size()};
}

// Simpson integration of g on [a, b].
template <class G>
double simpson(G g, double a, double b, int n = 200000) {
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += g(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

MultivariateGammaProjection bivariate(double c1, double c12, double c2, double alpha,
                                      std::vector<double> lambdas) {
  MultivariateGammaProjection mv;
  mv.C = Matrix::from_rows({{c1, c12}, {c12, c2}});
  mv.alpha = alpha;
  mv.lambdas = std::move(lambdas);
  mv.K = {0.0, 0.0};
  return mv;
}

}  // namespace

TEST_CASE("second chaos sample mean") {
  const TargetSpec spec = SecondChaos{{1.0}, {1}};
  const auto x = sample(spec, 1000000, 42);
  CHECK(std::abs(estimate_mean(x).mean) <= 4.0 * std::sqrt(2.0 / 1e6));
}

TEST_CASE("single gamma term variance") {
  const TargetSpec spec = GammaCombination{{{1.0, 1, 2.0, 3.0}}};
  // Density oracle: scale-3 gamma with shape 2.
  const double kappa2 = simpson(
      [](double x) { return (x - 6.0) * (x - 6.0) * x * std::exp(-x / 3.0) / 9.0; }, 0.0,
      400.0);
  CHECK(kappa2 == doctest::Approx(18.0).epsilon(1e-8));
  CHECK(cumulant_sequence(spec, 2).kappa(2) == doctest::Approx(kappa2).epsilon(1e-8));
  const auto x = sample(spec, 1000000, 1);
  const auto v = variance_estimate(x);
  CHECK(std::abs(v.mean - 18.0) <= 4.0 * v.std_error);
  CHECK(std::abs(estimate_mean(x).mean) <= 4.0 * std::sqrt(18.0 / 1e6));
}

TEST_CASE("mckay sample mean and the bessel density") {
  const McKayI m{0.5, 1.0, 2.0};
  // Independent oracle: moments of x^a e^{-xc/b} I_a(x/b) by quadrature.
  auto pdf = [&](double x) {
    return std::pow(x, m.a) * std::exp(-x * m.c / m.b) * std::cyl_bessel_i(m.a, x / m.b);
  };
  const double z = simpson(pdf, 1e-12, 80.0);
  const double mean = simpson([&](double x) { return x * pdf(x); }, 1e-12, 80.0) / z;
  const double second = simpson([&](double x) { return x * x * pdf(x); }, 1e-12, 80.0) / z;
  CHECK(mean == doctest::Approx(4.0 / 3.0).epsilon(1e-7));
  const double closed_second =
      (2 * m.a + 1) * m.b * m.b * (2 * (m.a + 1) * m.c * m.c + 1) / std::pow(m.c * m.c - 1, 2);
  CHECK(second == doctest::Approx(closed_second).epsilon(1e-7));

  const auto x = sample(TargetSpec{m}, 1000000, 3);
  const auto est = estimate_mean(x);
  CHECK(std::abs(est.mean - 4.0 / 3.0) <= 4.0 * est.std_error);
  CHECK(target_mean(TargetSpec{m}) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("mckay from bivariate") {
  const auto m = mckay_from_bivariate(Matrix::from_rows({{2.0, 0.5}, {0.5, 1.0}}), 1.0);
  CHECK(m.a == doctest::Approx(0.5));
  CHECK(m.b == doctest::Approx(3.5 / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(m.c == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-13));
  // The coefficient-matching system between the bivariate and McKay operators.
  const double s = 3.0, det = 1.75, alpha = 1.0;
  const double q = 1.0 - m.c * m.c;
  CHECK(std::abs(m.b * m.c / q * (1 + 2 * m.a) + alpha * s) < 1e-12);
  CHECK(std::abs(2 * m.b * m.c / q + s) < 1e-12);
  CHECK(std::abs(m.b * m.b / q * (1 + 2 * m.a) + 2 * alpha * det) < 1e-12);
  CHECK(std::abs(m.b * m.b / q + det) < 1e-12);

  CHECK_THROWS_AS(mckay_from_bivariate(Matrix::identity(2), 1.0), SpecError);
  CHECK_THROWS_AS(mckay_from_bivariate(Matrix::from_rows({{1.0, 1.0}, {1.0, 1.0}}), 1.0),
                  SpecError);
  for (double alpha2 : {0.3, 1.7, 4.0})
    CHECK(mckay_from_bivariate(Matrix::from_rows({{2.0, 0.5}, {0.5, 1.0}}), alpha2).a ==
          doctest::Approx(alpha2 - 0.5));
}

TEST_CASE("levy decomposition") {
  const auto l = derive_levy_decomposition(McKayI{0.5, 1.0, 2.0});
  CHECK(l.shape == doctest::Approx(1.0));
  CHECK(l.rate1 == doctest::Approx(1.0));
  CHECK(l.rate2 == doctest::Approx(3.0));
  CHECK(l.levy_density(0.5) == doctest::Approx((std::exp(-0.5) + std::exp(-1.5)) / 0.5));
  for (const McKayI m : {McKayI{0.1, 0.7, 1.3}, McKayI{2.0, 3.0, 5.0}, McKayI{-0.3, 1.1, 1.01}}) {
    const auto d = derive_levy_decomposition(m);
    CHECK(d.rate1 * d.rate2 == doctest::Approx((m.c * m.c - 1) / (m.b * m.b)));
    CHECK(d.shape * (1 / d.rate1 + 1 / d.rate2) ==
          doctest::Approx((1 + 2 * m.a) * m.b * m.c / (m.c * m.c - 1)));
  }
}

TEST_CASE("validation") {
  CHECK_THROWS_AS(validate(McKayI{-0.6, 1.0, 2.0}), SpecError);
  CHECK_THROWS_AS(validate(McKayI{0.5, 0.0, 2.0}), SpecError);
  CHECK_THROWS_AS(validate(McKayI{0.5, 1.0, 1.0}), SpecError);
  CHECK_THROWS_AS(validate(SecondChaos{{1.0, 1.0}, {1, 1}}), SpecError);
  CHECK_THROWS_AS(validate(SecondChaos{{0.0}, {1}}), SpecError);
  CHECK_THROWS_AS(validate(GammaCombination{{{1.0, 0, 1.0, 1.0}}}), SpecError);
  CHECK_THROWS_AS(validate(GammaCombination{{{1.0, 1, 1.0, -1.0}}}), SpecError);
  CHECK_THROWS_AS(validate(VarianceGamma{0.0, 1.0, 1.0, 1.0}), SpecError);
  CHECK_THROWS_AS(validate(NormalSpec{0.0, 0.0}), SpecError);
  CHECK_THROWS_AS(validate(bivariate(1.0, 1.2, 1.0, 1.0, {1.0, 1.0})), SpecError);
  CHECK_NOTHROW(validate(bivariate(2.0, 0.5, 1.0, 1.0, {1.0, -1.0})));
}

TEST_CASE("json round trip") {
  const std::vector<TargetSpec> specs{
      GammaCombination{{{1.0, 1, 1.5, 1.0}, {-0.5, 2, 0.75, 2.0}}},
      SecondChaos{{1.0, -0.5}, {1, 3}},
      bivariate(2.0, 0.5, 1.0, 1.0, {1.0, -0.5}),
      McKayI{0.5, 1.0, 2.0},
      VarianceGamma{0.1, 2.0, 0.5, 1.5},
      NormalSpec{1.0, 2.0}};
  for (const auto& spec : specs) {
    const auto doc = to_json(spec);
    const auto back = spec_from_json(doc);
    CHECK(kind_name(back) == kind_name(spec));
    CHECK(to_json(back) == doc);
  }
  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"kind", "weibull"}}), SpecError);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"kind", "mckay_i"}, {"a", 0.5}}), SpecError);
  const auto sc = spec_from_json(nlohmann::json{{"kind", "second_chaos"}, {"lambdas", {1.0, 2.0}}});
  CHECK(std::get<SecondChaos>(sc).multiplicities == std::vector<int>{1, 1});
}

TEST_CASE("characteristic function closed forms") {
  for (const TargetSpec& spec :
       {TargetSpec{NormalSpec{1.0, 2.0}}, TargetSpec{SecondChaos{{1.0, -0.5}, {1, 2}}},
        TargetSpec{McKayI{0.5, 1.0, 2.0}}, TargetSpec{VarianceGamma{0.0, 2.0, 0.5, 1.5}},
        TargetSpec{bivariate(2.0, 0.5, 1.0, 0.7, {1.0, -0.5})}})
    CHECK(std::abs(cf_eval(spec, 0.0) - 1.0) < 1e-15);

  for (double xi : {-1.3, 0.2, 0.8, 3.0}) {
    const cd normal = std::exp(cd(0, 1.0 * xi) - 2.0 * xi * xi / 2.0);
    CHECK(std::abs(cf_eval(NormalSpec{1.0, 2.0}, xi) - normal) < 1e-14);
    for (int d : {1, 2, 5}) {
      const cd chi = std::exp(cd(0, -d * xi)) * std::pow(cd(1, -2 * xi), -d / 2.0);
      CHECK(std::abs(cf_eval(SecondChaos{{1.0}, {d}}, xi) - chi) < 1e-13);
    }
  }
}

TEST_CASE("gamma combination cf factorizes over terms") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.2, 2.0), x(-5.0, 5.0);
  for (int rep = 0; rep < 20; ++rep) {
    GammaCombination gc;
    for (int k = 0; k < 3; ++k) gc.terms.push_back({(k % 2 ? -1.0 : 1.0) * u(gen) + k, 1 + k, u(gen), u(gen)});
    const double xi = x(gen);
    cd prod = 1.0;
    for (const auto& t : gc.terms) {
      const double shape = t.m * t.alpha, scale = t.lambda * t.c;
      prod *= std::exp(cd(0, -shape * scale * xi)) * std::pow(cd(1, -scale * xi), -shape);
    }
    CHECK(std::abs(cf_eval(gc, xi) - prod) <= 1e-12 * std::abs(prod) + 1e-300);
  }
}

TEST_CASE("continuous log follows the argument past pi") {
  const std::vector<double> v{1.0, 2.0, 3.0, -0.5};
  // prod (1 - v_j z) as a polynomial in z, evaluated at z = i xi.
  Polynomial q{1.0};
  for (double vj : v) q = q * Polynomial{1.0, -vj};
  for (double xi : {0.3, 2.0, 10.0, 50.0}) {
    cd expected = 0.0;
    for (double vj : v) expected += std::log(cd(1.0, -vj * xi));
    const cd got = continuous_log_on_imaginary_axis(q, xi);
    CHECK(std::abs(got - expected) < 1e-10);
  }
}

TEST_CASE("empirical cf matches") {
  const std::vector<TargetSpec> specs{
      GammaCombination{{{1.0, 1, 1.5, 1.0}, {-0.5, 2, 0.75, 2.0}}},
      SecondChaos{{1.0, -0.5, 0.25}, {1, 1, 2}},
      McKayI{0.5, 1.0, 2.0},
      VarianceGamma{0.3, 2.0, 0.5, 1.5},
      NormalSpec{1.0, 2.0},
      bivariate(2.0, 0.5, 1.0, 1.0, {1.0, -0.5}),   // gaussian squares
      bivariate(2.0, 0.5, 1.0, 0.7, {1.0, 1.0}),    // sum of two independent gammas
      bivariate(2.0, 0.0, 1.0, 0.7, {1.0, -0.5})};  // diagonal
  const std::size_t n = 1000000;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const auto x = sample(specs[s], n, 100 + s);
    for (double xi : {0.1, 0.5, 1.0}) {
      INFO("spec " << s << " xi " << xi);
      CHECK(std::abs(empirical_cf(x, xi) - cf_eval(specs[s], xi)) <= 5.0 / std::sqrt(double(n)));
    }
  }
}

TEST_CASE("gaussian-squares sampler matches exact cumulants") {
  const auto mv = bivariate(2.0, 0.5, 1.0, 1.5, {1.0, -0.5});  // 2 alpha = 3 copies
  const auto x = sample_gaussian_squares(mv, 1000000, 8);
  const auto est = sample_cumulants_with_se(x, 4);
  const auto exact = cumulant_sequence(mv, 4);
  CHECK(std::abs(est.values[0] - target_mean(mv)) <= 4 * est.std_errors[0]);
  for (std::size_t r = 2; r <= 4; ++r) {
    INFO("order " << r);
    CHECK(std::abs(est.values[r - 1] - exact.kappa(r)) <= 4 * est.std_errors[r - 1]);
  }
}

TEST_CASE("unsupported multivariate samplers raise") {
  std::string reason;
  const auto general = bivariate(2.0, 0.5, 1.0, 0.7, {1.0, -0.5});
  CHECK_FALSE(is_sampleable(general, &reason));
  CHECK_FALSE(reason.empty());
  CHECK_THROWS_AS(sample(general, 10, 1), UnsupportedError);
  MultivariateGammaProjection d3;
  d3.C = Matrix::from_rows({{2.0, 0.3, 0.1}, {0.3, 1.0, 0.2}, {0.1, 0.2, 1.5}});
  d3.alpha = 0.7;
  d3.lambdas = {1.0, -0.5, 0.25};
  d3.K = {0, 0, 0};
  CHECK_THROWS_AS(sample(d3, 10, 1), UnsupportedError);
  d3.alpha = 1.0;
  CHECK(is_sampleable(d3));
}

TEST_CASE("sampling is reproducible across thread counts") {
  const TargetSpec spec = GammaCombination{{{1.0, 1, 1.5, 1.0}, {-0.5, 2, 0.75, 2.0}}};
  const std::size_t n = 5 * kChunkSize + 17;
  const auto a = sample(spec, n, 77, 1);
  const auto b = sample(spec, n, 77, 3);
  const auto c = sample(spec, n, 77, 8);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a != sample(spec, n, 78, 1));
  const auto prefix = sample(spec, kChunkSize, 77, 2);
  CHECK(std::equal(prefix.begin(), prefix.end(), a.begin()));
}
