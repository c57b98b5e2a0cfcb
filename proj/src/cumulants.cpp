#include "gammastein/cumulants.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gammastein/stats.hpp"

namespace gammastein {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
  return f;
}

// Weight of kappa_r in the discrepancy: q_r / (2^{r-1} (r-1)!).
std::vector<double> delta_weights(std::span<const double> lambdas) {
  const Polynomial q = build_Q(build_P(lambdas));
  std::vector<double> w(q.degree() + 1, 0.0);
  for (std::size_t r = 2; r <= q.degree(); ++r)
    w[r] = q.coeff(r) / (std::ldexp(1.0, static_cast<int>(r) - 1) * factorial(r - 1));
  return w;
}

}  // namespace

CumulantSequence cumulant_sequence(const TargetSpec& spec, std::size_t R) {
  if (R < 2) throw std::domain_error("cumulant_sequence: R must be >= 2");
  validate(spec);
  CumulantSequence out;
  out.values.resize(R - 1);
  for (std::size_t r = 2; r <= R; ++r) {
    const double fact = factorial(r - 1);
    const int ri = static_cast<int>(r);
    out.values[r - 2] = std::visit(
        overloaded{
            [&](const GammaCombination& g) {
              double k = 0.0;
              for (const auto& t : g.terms) k += t.m * t.alpha * std::pow(t.lambda * t.c, ri);
              return fact * k;
            },
            [&](const SecondChaos& s) {
              double k = 0.0;
              for (std::size_t i = 0; i < s.lambdas.size(); ++i)
                k += s.multiplicities[i] * std::pow(s.lambdas[i], ri);
              return std::ldexp(1.0, ri - 1) * fact * k;
            },
            [&](const MultivariateGammaProjection& s) {
              // alpha (r-1)! tr((C Lambda)^r)
              const Matrix cl = s.C * Matrix::diagonal(s.lambdas);
              Matrix pw = cl;
              for (std::size_t k = 1; k < r; ++k) pw = pw * cl;
              return s.alpha * fact * trace(pw);
            },
            [&](const McKayI& m) {
              const auto l = derive_levy_decomposition(m);
              return l.shape * fact * (std::pow(1.0 / l.rate1, ri) + std::pow(1.0 / l.rate2, ri));
            },
            [&](const VarianceGamma& v) {
              const double p = v.alpha - v.beta, q = v.alpha + v.beta;
              return v.lambda * fact * (std::pow(p, -ri) + std::pow(-1.0 / q, ri));
            },
            [&](const NormalSpec& n) { return r == 2 ? n.sigma2 : 0.0; },
        },
        spec);
  }
  return out;
}

Polynomial build_P(std::span<const double> lambdas) {
  std::vector<double> roots{0.0};
  roots.insert(roots.end(), lambdas.begin(), lambdas.end());
  return poly_from_roots(roots, 1.0);
}

Polynomial build_Q(const Polynomial& P) { return P * P; }

double delta_discrepancy(const CumulantSequence& kappa, std::span<const double> lambdas) {
  const auto w = delta_weights(lambdas);
  const std::size_t needed = w.size() - 1;
  if (kappa.max_order() < needed) {
    throw std::domain_error("delta_discrepancy: needs cumulants up to order " +
                            std::to_string(needed));
  }
  double delta = 0.0;
  for (std::size_t r = 2; r <= needed; ++r) delta += w[r] * kappa.kappa(r);
  return delta;
}

SampleDelta delta_discrepancy_from_sample(std::span<const double> samples,
                                          std::span<const double> lambdas) {
  const auto w = delta_weights(lambdas);
  const std::size_t order = w.size() - 1;
  if (order > 6)
    throw std::domain_error("delta_discrepancy_from_sample: sample cumulants limited to order 6");
  const auto est = sample_cumulants_with_se(samples, order);
  auto combine = [&](const std::vector<double>& k) {
    double d = 0.0;
    for (std::size_t r = 2; r <= order; ++r) d += w[r] * k[r - 1];
    return d;
  };
  SampleDelta out;
  out.n = samples.size();
  out.value = combine(est.values);
  std::vector<double> reps;
  for (const auto& rep : est.replicates) reps.push_back(combine(rep));
  out.std_error = jackknife_std_error(reps);
  return out;
}

std::vector<double> moments_from_cumulants(double mean, const CumulantSequence& kappa,
                                           std::size_t n) {
  if (n >= 2 && kappa.max_order() < n)
    throw std::domain_error("moments_from_cumulants: not enough cumulants");
  auto k = [&](std::size_t r) { return r == 1 ? mean : kappa.kappa(r); };
  std::vector<double> m(n + 1, 0.0);
  m[0] = 1.0;
  for (std::size_t j = 1; j <= n; ++j) {
    double acc = 0.0;
    double binom = 1.0;  // C(j-1, i-1)
    for (std::size_t i = 1; i <= j; ++i) {
      acc += binom * k(i) * m[j - i];
      binom = binom * static_cast<double>(j - i) / static_cast<double>(i);
    }
    m[j] = acc;
  }
  return m;
}

}  // namespace gammastein
