#include "gammastein/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gammastein/cumulants.hpp"
#include "gammastein/parallel.hpp"
#include "gammastein/rng.hpp"
#include "gammastein/stats.hpp"

namespace gammastein {

namespace {

using json = nlohmann::json;

std::string format(const char* fmt, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double z_score(double estimate, double se) {
  if (se > 0.0) return estimate / se;
  return estimate == 0.0 ? 0.0 : std::copysign(INFINITY, estimate);
}

// Raw sample moments E[F^0..F^k] with standard errors, chunk-deterministic.
std::vector<MeanEstimate> raw_moments(std::span<const double> x, std::size_t k) {
  std::vector<MeanEstimate> out;
  std::vector<double> pw(x.size(), 1.0);
  out.push_back({1.0, 0.0, x.size()});
  for (std::size_t j = 1; j <= k; ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) pw[i] *= x[i];
    out.push_back(estimate_mean(pw));
  }
  return out;
}

}  // namespace

// ---- test functions ----

std::string TestFunction::name() const {
  return (kind == Kind::Polynomial ? "poly" : "damped") + std::to_string(degree);
}

std::vector<Polynomial> TestFunction::derivative_factors(std::size_t max_order) const {
  std::vector<Polynomial> out;
  out.reserve(max_order + 1);
  out.push_back(Polynomial::monomial(static_cast<std::size_t>(degree)));
  const Polynomial x({0.0, 1.0});
  for (std::size_t k = 1; k <= max_order; ++k) {
    const Polynomial& prev = out.back();
    // (Q e^{-x^2/2})' = (Q' - x Q) e^{-x^2/2}
    out.push_back(kind == Kind::Polynomial ? prev.derivative() : prev.derivative() - x * prev);
  }
  return out;
}

std::vector<double> TestFunction::derivatives(double x, std::size_t max_order) const {
  const auto factors = derivative_factors(max_order);
  const double w = kind == Kind::Polynomial ? 1.0 : std::exp(-0.5 * x * x);
  std::vector<double> out(max_order + 1);
  for (std::size_t k = 0; k <= max_order; ++k) out[k] = factors[k](x) * w;
  return out;
}

std::vector<TestFunction> damped_family(std::span<const int> degrees) {
  std::vector<TestFunction> out;
  for (int d : degrees) out.push_back(TestFunction::damped(d));
  return out;
}

std::vector<TestFunction> polynomial_family(std::span<const int> degrees) {
  std::vector<TestFunction> out;
  for (int d : degrees) out.push_back(TestFunction::polynomial(d));
  return out;
}

// ---- annihilation ----

VerificationReport annihilation_on_samples(const SteinOperator& op,
                                           std::span<const double> samples,
                                           std::span<const TestFunction> fns, double z_max,
                                           std::size_t threads) {
  VerificationReport report;
  report.n = samples.size();
  report.z_max = z_max;
  report.verdict = true;
  const std::size_t order = op.order();
  std::vector<double> values(samples.size());
  for (const auto& fn : fns) {
    const auto factors = fn.derivative_factors(order);
    const bool damped = fn.kind == TestFunction::Kind::DampedPolynomial;
    parallel_for(chunk_count(samples.size()), threads, [&](std::size_t chunk) {
      std::vector<double> derivs(order + 1);
      const std::size_t lo = chunk * kChunkSize;
      const std::size_t hi = std::min(samples.size(), lo + kChunkSize);
      for (std::size_t i = lo; i < hi; ++i) {
        const double x = samples[i];
        const double w = damped ? std::exp(-0.5 * x * x) : 1.0;
        for (std::size_t k = 0; k <= order; ++k) derivs[k] = factors[k](x) * w;
        values[i] = op.apply(derivs, x);
      }
    });
    const auto est = estimate_mean(values);
    FunctionResult r{fn.name(), est.mean, est.std_error, z_score(est.mean, est.std_error), false};
    r.pass = std::abs(r.z) <= z_max;
    report.verdict = report.verdict && r.pass;
    report.tests.push_back(r);
  }
  return report;
}

VerificationReport annihilation_test(const SteinOperator& op, const TargetSpec& spec,
                                     std::span<const TestFunction> fns, std::size_t n,
                                     std::uint64_t seed, const VerifyOptions& options) {
  if (fns.empty()) throw std::invalid_argument("annihilation_test: no test functions");
  auto run = [&](std::uint64_t s, std::size_t size) {
    const auto draws = sample(spec, size, s, options.threads);
    auto rep = annihilation_on_samples(op, draws, fns, options.z_max, options.threads);
    rep.seed = s;
    rep.target = kind_name(spec);
    return rep;
  };
  auto report = run(seed, n);
  if (!report.verdict && options.retry) {
    report = run(derive_seed(seed, 1), 2 * n);
    report.attempts = 2;
  }
  return report;
}

json to_json(const VerificationReport& report) {
  json tests = json::array();
  for (const auto& t : report.tests)
    tests.push_back({{"fn", t.fn}, {"estimate", t.estimate}, {"se", t.se}, {"z", t.z}, {"pass", t.pass}});
  return json{{"target", report.target},       {"tests", tests},
              {"verdict", report.verdict ? "pass" : "fail"},
              {"seed", report.seed},           {"n", report.n},
              {"z_max", report.z_max},         {"attempts", report.attempts}};
}

std::string to_text(const VerificationReport& report) {
  std::ostringstream os;
  os << format("target %s  n=%zu  seed=%llu  z_max=%.2f  attempts=%d\n", report.target.c_str(),
               report.n, static_cast<unsigned long long>(report.seed), report.z_max,
               report.attempts);
  os << format("%-10s %15s %13s %9s  %s\n", "fn", "estimate", "se", "z", "result");
  for (const auto& t : report.tests)
    os << format("%-10s %15.6e %13.6e %9.3f  %s\n", t.fn.c_str(), t.estimate, t.se, t.z,
                 t.pass ? "pass" : "FAIL");
  os << "verdict: " << (report.verdict ? "pass" : "fail") << "\n";
  return os.str();
}

// ---- McKay recursion ----

double mckay_recursion_residual(const McKayI& m, int n, std::span<const double> moments) {
  const double nn = n;
  return (1.0 - m.c * m.c) * moments[n + 1] +
         m.b * m.c * (1.0 + 2.0 * (m.a + nn)) * moments[n] -
         nn * m.b * m.b * (2.0 * m.a + nn) * moments[n - 1];
}

McKayRecursionReport mckay_recursion_test(const McKayI& m, int n_max, std::size_t samples,
                                          std::uint64_t seed, const VerifyOptions& options) {
  if (n_max < 2) throw std::invalid_argument("mckay_recursion_test: n_max must be >= 2");
  validate(m);
  McKayRecursionReport report;
  report.params = m;
  report.seed = seed;
  report.samples = samples;
  report.z_max = options.z_max;

  const auto draws = sample(m, samples, seed, options.threads);
  const auto mc = raw_moments(draws, static_cast<std::size_t>(n_max) + 1);
  const double mean = target_mean(m);
  const auto exact = moments_from_cumulants(
      mean, cumulant_sequence(m, static_cast<std::size_t>(n_max) + 1),
      static_cast<std::size_t>(n_max) + 1);

  std::vector<double> mc_means;
  for (const auto& e : mc) mc_means.push_back(e.mean);

  report.verdict = true;
  {
    const double c2 = m.c * m.c;
    const double expected_m1 = (1.0 + 2.0 * m.a) * m.b * m.c / (c2 - 1.0);
    const double expected_m2 =
        (2.0 * m.a + 1.0) * m.b * m.b * (2.0 * (m.a + 1.0) * c2 + 1.0) / ((c2 - 1.0) * (c2 - 1.0));
    for (int k : {1, 2}) {
      MomentCheck chk;
      chk.name = k == 1 ? "E[F]" : "E[F^2]";
      chk.estimate = mc[k].mean;
      chk.se = mc[k].std_error;
      chk.expected = k == 1 ? expected_m1 : expected_m2;
      chk.z = z_score(chk.estimate - chk.expected, chk.se);
      chk.pass = std::abs(chk.z) <= options.z_max;
      report.verdict = report.verdict && chk.pass;
      report.moments.push_back(chk);
    }
  }

  for (int n = 2; n <= n_max; ++n) {
    const double nn = n;
    const double t1 = (1.0 - m.c * m.c);
    const double t2 = m.b * m.c * (1.0 + 2.0 * (m.a + nn));
    const double t3 = -nn * m.b * m.b * (2.0 * m.a + nn);
    // per-draw residual g(F) has mean equal to the recursion residual
    std::vector<double> g(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
      const double x = draws[i];
      const double xn1 = std::pow(x, n - 1);
      g[i] = t1 * xn1 * x * x + t2 * xn1 * x + t3 * xn1;
    }
    const auto est = estimate_mean(g);
    const double scale = std::max({std::abs(t1 * mc_means[n + 1]), std::abs(t2 * mc_means[n]),
                                   std::abs(t3 * mc_means[n - 1])});
    const double exact_scale = std::max({std::abs(t1 * exact[n + 1]), std::abs(t2 * exact[n]),
                                         std::abs(t3 * exact[n - 1])});
    RecursionEntry e;
    e.n = n;
    e.residual = est.mean / scale;
    e.se = est.std_error / scale;
    e.z = z_score(e.residual, e.se);
    e.pass = std::abs(e.z) <= options.z_max;
    e.exact_residual = mckay_recursion_residual(m, n, exact) / exact_scale;
    report.exact_max_residual = std::max(report.exact_max_residual, std::abs(e.exact_residual));
    report.verdict = report.verdict && e.pass;
    report.recursion.push_back(e);
  }
  report.verdict = report.verdict && report.exact_max_residual < 1e-9;
  return report;
}

json to_json(const McKayRecursionReport& report) {
  json rec = json::array();
  for (const auto& e : report.recursion)
    rec.push_back({{"n", e.n}, {"residual", e.residual}, {"se", e.se}, {"z", e.z},
                   {"pass", e.pass}, {"exact_residual", e.exact_residual}});
  json mom = json::array();
  for (const auto& c : report.moments)
    mom.push_back({{"name", c.name}, {"estimate", c.estimate}, {"se", c.se},
                   {"expected", c.expected}, {"z", c.z}, {"pass", c.pass}});
  return json{{"params", {{"a", report.params.a}, {"b", report.params.b}, {"c", report.params.c}}},
              {"recursion", rec},
              {"moments", mom},
              {"exact_max_residual", report.exact_max_residual},
              {"verdict", report.verdict ? "pass" : "fail"},
              {"seed", report.seed},
              {"n", report.samples}};
}

std::string to_text(const McKayRecursionReport& report) {
  std::ostringstream os;
  os << format("mckay recursion  a=%g b=%g c=%g  n=%zu  seed=%llu\n", report.params.a,
               report.params.b, report.params.c, report.samples,
               static_cast<unsigned long long>(report.seed));
  for (const auto& c : report.moments)
    os << format("%-8s %14.6e (se %.3e) expected %14.6e  z=%7.3f  %s\n", c.name.c_str(),
                 c.estimate, c.se, c.expected, c.z, c.pass ? "pass" : "FAIL");
  for (const auto& e : report.recursion)
    os << format("n=%-3d residual %12.4e (se %.3e) z=%7.3f exact %10.3e  %s\n", e.n, e.residual,
                 e.se, e.z, e.exact_residual, e.pass ? "pass" : "FAIL");
  os << "verdict: " << (report.verdict ? "pass" : "fail") << "\n";
  return os.str();
}

// ---- identity in law ----

IdentityInLawReport identity_in_law_test(const Matrix& C, double alpha, std::size_t n,
                                         std::uint64_t seed, const VerifyOptions& options) {
  if (n < 10000) throw SpecError("n", "n too small (KS needs at least 10000 per sample)");
  IdentityInLawReport report;
  report.seed = seed;
  report.n = n;
  report.mckay = mckay_from_bivariate(C, alpha);

  MultivariateGammaProjection pair{C, alpha, {1.0, 1.0}, {0.0, 0.0}};
  validate(pair);
  std::vector<double> correlated;
  const double twice = 2.0 * alpha;
  if (C.is_diagonal()) {
    report.construction = "independent-gammas";
    correlated = sample(pair, n, derive_seed(seed, 11), options.threads);
  } else if (std::abs(twice - std::round(twice)) <= 1e-12 && std::round(twice) >= 1.0) {
    report.construction = "gaussian-squares";
    correlated = sample_gaussian_squares(pair, n, derive_seed(seed, 11), options.threads);
  } else {
    report.skipped = true;
    report.reason = "no correlated construction: C is not diagonal and 2*alpha is not an integer";
    return report;
  }
  const auto independent = sample(report.mckay, n, derive_seed(seed, 12), options.threads);

  const auto ks = ks_two_sample(correlated, independent);
  report.ks_statistic = ks.statistic;
  report.ks_p_value = ks.p_value;
  report.verdict = ks.p_value >= report.ks_level;

  const auto ca = sample_cumulants_with_se(correlated, 4);
  const auto cb = sample_cumulants_with_se(independent, 4);
  const auto exact = cumulant_sequence(report.mckay, 4);
  for (int r = 1; r <= 4; ++r) {
    CumulantComparison c;
    c.order = r;
    c.correlated = ca.values[r - 1];
    c.independent = cb.values[r - 1];
    c.exact = r == 1 ? target_mean(report.mckay) : exact.kappa(r);
    c.se = std::hypot(ca.std_errors[r - 1], cb.std_errors[r - 1]);
    c.z = z_score(c.correlated - c.independent, c.se);
    c.pass = std::abs(c.z) <= options.z_max;
    report.verdict = report.verdict && c.pass;
    report.cumulants.push_back(c);
  }
  return report;
}

json to_json(const IdentityInLawReport& report) {
  json cum = json::array();
  for (const auto& c : report.cumulants)
    cum.push_back({{"order", c.order}, {"correlated", c.correlated},
                   {"independent", c.independent}, {"exact", c.exact}, {"se", c.se},
                   {"z", c.z}, {"pass", c.pass}});
  json doc{{"mckay", {{"a", report.mckay.a}, {"b", report.mckay.b}, {"c", report.mckay.c}}},
           {"seed", report.seed},
           {"n", report.n}};
  if (report.skipped) {
    doc["verdict"] = "skipped";
    doc["reason"] = report.reason;
    return doc;
  }
  doc["construction"] = report.construction;
  doc["ks"] = {{"statistic", report.ks_statistic},
               {"p_value", report.ks_p_value},
               {"level", report.ks_level}};
  doc["cumulants"] = cum;
  doc["verdict"] = report.verdict ? "pass" : "fail";
  return doc;
}

std::string to_text(const IdentityInLawReport& report) {
  std::ostringstream os;
  os << format("identity in law  a=%g b=%g c=%g  n=%zu\n", report.mckay.a, report.mckay.b,
               report.mckay.c, report.n);
  if (report.skipped) {
    os << "skipped: " << report.reason << "\n";
    return os.str();
  }
  os << format("construction %s  KS D=%.5f p=%.4f (level %.2f)\n", report.construction.c_str(),
               report.ks_statistic, report.ks_p_value, report.ks_level);
  for (const auto& c : report.cumulants)
    os << format("k%d correlated %12.6e independent %12.6e exact %12.6e z=%7.3f  %s\n", c.order,
                 c.correlated, c.independent, c.exact, c.z, c.pass ? "pass" : "FAIL");
  os << "verdict: " << (report.verdict ? "pass" : "fail") << "\n";
  return os.str();
}

}  // namespace gammastein
