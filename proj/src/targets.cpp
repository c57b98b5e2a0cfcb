#include "gammastein/targets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

#include "gammastein/parallel.hpp"
#include "gammastein/rng.hpp"

namespace gammastein {

namespace {

using json = nlohmann::json;
using cplx = std::complex<double>;
constexpr cplx kI{0.0, 1.0};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw SpecError(field, message);
}

bool finite(double v) { return std::isfinite(v); }

void require_distinct_nonzero(const std::vector<double>& lambdas,
                              const std::string& field) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    require(finite(lambdas[i]), field, "must be finite");
    require(lambdas[i] != 0.0, field, "entries must be nonzero");
    for (std::size_t j = 0; j < i; ++j)
      require(lambdas[i] != lambdas[j], field, "entries must be pairwise distinct");
  }
}

bool is_half_integer_shape(double alpha, int* dof) {
  const double twice = 2.0 * alpha;
  const double rounded = std::round(twice);
  if (rounded < 1.0 || std::abs(twice - rounded) > 1e-12) return false;
  if (dof) *dof = static_cast<int>(rounded);
  return true;
}

// Fills out[0..n) chunk-wise with draw(rng); deterministic in (n, seed).
std::vector<double> fill_chunks(std::size_t n, std::uint64_t seed, std::size_t threads,
                                const std::function<double(Rng&)>& draw) {
  std::vector<double> out(n);
  parallel_for(chunk_count(n), threads, [&](std::size_t chunk) {
    Rng rng(chunk_seed(seed, chunk));
    const std::size_t lo = chunk * kChunkSize;
    const std::size_t hi = std::min(n, lo + kChunkSize);
    for (std::size_t i = lo; i < hi; ++i) out[i] = draw(rng);
  });
  return out;
}

// ---- json helpers ----

double get_number(const json& doc, const std::string& field) {
  require(doc.contains(field), field, "missing");
  require(doc[field].is_number(), field, "expected a number");
  return doc[field].get<double>();
}

int get_int(const json& doc, const std::string& field) {
  require(doc.contains(field), field, "missing");
  require(doc[field].is_number_integer(), field, "expected an integer");
  return doc[field].get<int>();
}

std::vector<double> get_number_array(const json& doc, const std::string& field) {
  require(doc.contains(field), field, "missing");
  require(doc[field].is_array(), field, "expected an array");
  std::vector<double> out;
  for (const auto& v : doc[field]) {
    require(v.is_number(), field, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<int> get_int_array(const json& doc, const std::string& field) {
  require(doc.contains(field), field, "missing");
  require(doc[field].is_array(), field, "expected an array");
  std::vector<int> out;
  for (const auto& v : doc[field]) {
    require(v.is_number_integer(), field, "expected an array of integers");
    out.push_back(v.get<int>());
  }
  return out;
}

Matrix get_matrix(const json& doc, const std::string& field) {
  require(doc.contains(field), field, "missing");
  require(doc[field].is_array(), field, "expected nested arrays (row-major)");
  std::vector<std::vector<double>> rows;
  for (const auto& row : doc[field]) {
    require(row.is_array(), field, "expected nested arrays (row-major)");
    std::vector<double> r;
    for (const auto& v : row) {
      require(v.is_number(), field, "matrix entries must be numbers");
      r.push_back(v.get<double>());
    }
    rows.push_back(std::move(r));
  }
  try {
    return Matrix::from_rows(rows);
  } catch (const std::domain_error&) {
    throw SpecError(field, "rows have unequal length");
  }
}

double multivariate_step_bound(const std::vector<double>& r) {
  double m = 0.0;
  for (std::size_t j = 1; j < r.size(); ++j) m = std::max(m, std::abs(r[j]));
  return std::min(0.05, 0.25 / (1.0 + m));
}

Polynomial minor_polynomial(const MultivariateGammaProjection& s) {
  const auto r = principal_minor_sums(s.C, s.lambdas);
  std::vector<double> coeffs(r.size());
  for (std::size_t j = 0; j < r.size(); ++j) coeffs[j] = (j % 2 == 0 ? 1.0 : -1.0) * r[j];
  return Polynomial(std::move(coeffs));
}

}  // namespace

double MultivariateGammaProjection::kappa_offset() const {
  double k = 0.0;
  for (std::size_t j = 0; j < lambdas.size() && j < K.size(); ++j) k += lambdas[j] * K[j];
  return k;
}

std::string kind_name(const TargetSpec& spec) {
  return std::visit(overloaded{
                        [](const GammaCombination&) { return "gamma_combination"; },
                        [](const SecondChaos&) { return "second_chaos"; },
                        [](const MultivariateGammaProjection&) { return "multivariate_gamma"; },
                        [](const McKayI&) { return "mckay_i"; },
                        [](const VarianceGamma&) { return "variance_gamma"; },
                        [](const NormalSpec&) { return "normal"; },
                    },
                    spec);
}

void validate(const TargetSpec& spec) {
  std::visit(
      overloaded{
          [](const GammaCombination& g) {
            require(!g.terms.empty(), "terms", "must be nonempty");
            std::vector<double> lambdas;
            for (const auto& t : g.terms) {
              require(t.m >= 1, "m", "must be a positive integer");
              require(finite(t.alpha) && t.alpha > 0.0, "alpha", "must be > 0");
              require(finite(t.c) && t.c > 0.0, "c", "must be > 0");
              lambdas.push_back(t.lambda);
            }
            require_distinct_nonzero(lambdas, "lambda");
          },
          [](const SecondChaos& s) {
            require(!s.lambdas.empty(), "lambdas", "must be nonempty");
            require(s.multiplicities.size() == s.lambdas.size(), "multiplicities",
                    "must have the same length as lambdas");
            require_distinct_nonzero(s.lambdas, "lambdas");
            for (int m : s.multiplicities)
              require(m >= 1, "multiplicities", "must be positive integers");
          },
          [](const MultivariateGammaProjection& s) {
            const std::size_t d = s.C.rows();
            require(d >= 1 && s.C.is_square(), "C", "must be a nonempty square matrix");
            require(d <= 16, "C", "dimension above 16 is not supported");
            require(s.C.is_symmetric(1e-10), "C", "must be symmetric");
            require(cholesky(s.C).has_value(), "C", "must be positive definite");
            require(finite(s.alpha) && s.alpha > 0.0, "alpha", "must be > 0");
            require(s.lambdas.size() == d, "lambdas", "length must match C");
            require(s.K.size() == d, "K", "length must match C");
            for (double l : s.lambdas) require(finite(l), "lambdas", "must be finite");
            for (double k : s.K) require(finite(k), "K", "must be finite");
          },
          [](const McKayI& m) {
            require(finite(m.a) && m.a > -0.5, "a", "must be > -1/2");
            require(finite(m.b) && m.b > 0.0, "b", "must be > 0");
            require(finite(m.c) && m.c > 1.0, "c", "must be > 1");
          },
          [](const VarianceGamma& v) {
            require(finite(v.mu), "mu", "must be finite");
            require(finite(v.beta), "beta", "must be finite");
            require(finite(v.alpha) && v.alpha > std::abs(v.beta), "alpha",
                    "must satisfy alpha > |beta|");
            require(finite(v.lambda) && v.lambda > 0.0, "lambda", "must be > 0");
          },
          [](const NormalSpec& n) {
            require(finite(n.mu), "mu", "must be finite");
            require(finite(n.sigma2) && n.sigma2 > 0.0, "sigma2", "must be > 0");
          },
      },
      spec);
}

GammaCombination to_gamma_combination(const SecondChaos& spec) {
  GammaCombination g;
  for (std::size_t i = 0; i < spec.lambdas.size(); ++i)
    g.terms.push_back({spec.lambdas[i], spec.multiplicities[i], 0.5, 2.0});
  return g;
}

double target_mean(const TargetSpec& spec) {
  return std::visit(
      overloaded{
          [](const GammaCombination&) { return 0.0; },
          [](const SecondChaos&) { return 0.0; },
          [](const MultivariateGammaProjection& s) {
            double r1 = 0.0;
            for (std::size_t i = 0; i < s.lambdas.size(); ++i) r1 += s.lambdas[i] * s.C(i, i);
            return s.alpha * (r1 - s.kappa_offset());
          },
          [](const McKayI& m) { return (1.0 + 2.0 * m.a) * m.b * m.c / (m.c * m.c - 1.0); },
          [](const VarianceGamma& v) {
            return v.mu + 2.0 * v.lambda * v.beta / (v.alpha * v.alpha - v.beta * v.beta);
          },
          [](const NormalSpec& n) { return n.mu; },
      },
      spec);
}

double target_variance(const TargetSpec& spec) {
  return std::visit(
      overloaded{
          [](const GammaCombination& g) {
            double v = 0.0;
            for (const auto& t : g.terms)
              v += t.m * t.alpha * (t.lambda * t.c) * (t.lambda * t.c);
            return v;
          },
          [](const SecondChaos& s) {
            double v = 0.0;
            for (std::size_t i = 0; i < s.lambdas.size(); ++i)
              v += 2.0 * s.multiplicities[i] * s.lambdas[i] * s.lambdas[i];
            return v;
          },
          [](const MultivariateGammaProjection& s) {
            const Matrix cl = s.C * Matrix::diagonal(s.lambdas);
            return s.alpha * trace(cl * cl);
          },
          [](const McKayI& m) {
            const auto l = derive_levy_decomposition(m);
            return l.shape * (1.0 / (l.rate1 * l.rate1) + 1.0 / (l.rate2 * l.rate2));
          },
          [](const VarianceGamma& v) {
            const double p = v.alpha - v.beta, q = v.alpha + v.beta;
            return v.lambda * (1.0 / (p * p) + 1.0 / (q * q));
          },
          [](const NormalSpec& n) { return n.sigma2; },
      },
      spec);
}

// ---- serialization ----

json to_json(const TargetSpec& spec) {
  json doc = std::visit(
      overloaded{
          [](const GammaCombination& g) {
            json terms = json::array();
            for (const auto& t : g.terms)
              terms.push_back({{"lambda", t.lambda}, {"m", t.m}, {"alpha", t.alpha}, {"c", t.c}});
            return json{{"terms", terms}};
          },
          [](const SecondChaos& s) {
            return json{{"lambdas", s.lambdas}, {"multiplicities", s.multiplicities}};
          },
          [](const MultivariateGammaProjection& s) {
            return json{{"C", s.C.to_rows()},
                        {"alpha", s.alpha},
                        {"lambdas", s.lambdas},
                        {"K", s.K},
                        {"kappa_offset", s.kappa_offset()}};
          },
          [](const McKayI& m) { return json{{"a", m.a}, {"b", m.b}, {"c", m.c}}; },
          [](const VarianceGamma& v) {
            return json{{"mu", v.mu}, {"alpha", v.alpha}, {"beta", v.beta}, {"lambda", v.lambda}};
          },
          [](const NormalSpec& n) { return json{{"mu", n.mu}, {"sigma2", n.sigma2}}; },
      },
      spec);
  doc["kind"] = kind_name(spec);
  return doc;
}

TargetSpec spec_from_json(const json& doc) {
  require(doc.is_object(), "spec", "expected a JSON object");
  require(doc.contains("kind") && doc["kind"].is_string(), "kind", "missing or not a string");
  const std::string kind = doc["kind"].get<std::string>();
  TargetSpec spec;
  if (kind == "gamma_combination") {
    require(doc.contains("terms") && doc["terms"].is_array(), "terms", "expected an array");
    GammaCombination g;
    for (const auto& t : doc["terms"]) {
      require(t.is_object(), "terms", "expected objects");
      g.terms.push_back({get_number(t, "lambda"), get_int(t, "m"), get_number(t, "alpha"),
                         get_number(t, "c")});
    }
    spec = g;
  } else if (kind == "second_chaos") {
    SecondChaos s;
    s.lambdas = get_number_array(doc, "lambdas");
    if (doc.contains("multiplicities"))
      s.multiplicities = get_int_array(doc, "multiplicities");
    else
      s.multiplicities.assign(s.lambdas.size(), 1);
    spec = s;
  } else if (kind == "multivariate_gamma") {
    MultivariateGammaProjection s;
    s.C = get_matrix(doc, "C");
    s.alpha = get_number(doc, "alpha");
    s.lambdas = get_number_array(doc, "lambdas");
    if (doc.contains("K"))
      s.K = get_number_array(doc, "K");
    else
      s.K.assign(s.lambdas.size(), 0.0);
    spec = s;
    validate(spec);
    if (doc.contains("kappa_offset")) {
      const double given = get_number(doc, "kappa_offset");
      const double computed = s.kappa_offset();
      require(std::abs(given - computed) <= 1e-12 * (1.0 + std::abs(computed)),
              "kappa_offset", "inconsistent with K and lambdas");
    }
  } else if (kind == "mckay_i") {
    spec = McKayI{get_number(doc, "a"), get_number(doc, "b"), get_number(doc, "c")};
  } else if (kind == "variance_gamma") {
    spec = VarianceGamma{get_number(doc, "mu"), get_number(doc, "alpha"),
                         get_number(doc, "beta"), get_number(doc, "lambda")};
  } else if (kind == "normal") {
    spec = NormalSpec{get_number(doc, "mu"), get_number(doc, "sigma2")};
  } else {
    throw SpecError("kind", "unknown kind '" + kind + "'");
  }
  validate(spec);
  return spec;
}

// ---- sampling ----

bool is_sampleable(const TargetSpec& spec, std::string* reason) {
  const auto* mv = std::get_if<MultivariateGammaProjection>(&spec);
  if (!mv) return true;
  if (mv->C.is_diagonal() || is_half_integer_shape(mv->alpha, nullptr)) return true;
  if (mv->C.rows() == 2 && mv->lambdas[0] == mv->lambdas[1]) return true;
  if (reason)
    *reason =
        "unsupported sampler: non-diagonal C needs 2*alpha integer, or d = 2 with "
        "lambda_1 = lambda_2";
  return false;
}

std::vector<double> sample_gaussian_squares(const MultivariateGammaProjection& spec,
                                            std::size_t n, std::uint64_t seed,
                                            std::size_t threads) {
  int dof = 0;
  if (!is_half_integer_shape(spec.alpha, &dof))
    throw UnsupportedError("unsupported sampler: Gaussian-squares construction needs 2*alpha integer");
  const std::size_t d = spec.C.rows();
  Matrix half(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) half(i, j) = 0.5 * spec.C(i, j);
  const auto chol = cholesky(half);
  if (!chol) throw SpecError("C", "must be positive definite");
  const Matrix l = *chol;
  const double offset = spec.alpha * spec.kappa_offset();
  const auto lambdas = spec.lambdas;
  return fill_chunks(n, seed, threads, [&, d, dof](Rng& rng) {
    std::vector<double> gam(d, 0.0), z(d), w(d);
    for (int k = 0; k < dof; ++k) {
      for (std::size_t i = 0; i < d; ++i) w[i] = rng.normal();
      for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += l(i, j) * w[j];
        gam[i] += s * s;
      }
    }
    double f = 0.0;
    for (std::size_t i = 0; i < d; ++i) f += lambdas[i] * gam[i];
    return f - offset;
  });
}

std::vector<double> sample(const TargetSpec& spec, std::size_t n, std::uint64_t seed,
                           std::size_t threads) {
  validate(spec);
  return std::visit(
      overloaded{
          [&](const GammaCombination& g) {
            return fill_chunks(n, seed, threads, [&g](Rng& rng) {
              double f = 0.0;
              for (const auto& t : g.terms) {
                const double shape = t.m * t.alpha;
                f += t.lambda * (t.c * rng.gamma(shape) - shape * t.c);
              }
              return f;
            });
          },
          [&](const SecondChaos& s) {
            return fill_chunks(n, seed, threads, [&s](Rng& rng) {
              double f = 0.0;
              for (std::size_t i = 0; i < s.lambdas.size(); ++i) {
                double block = 0.0;
                for (int j = 0; j < s.multiplicities[i]; ++j) {
                  const double z = rng.normal();
                  block += z * z - 1.0;
                }
                f += s.lambdas[i] * block;
              }
              return f;
            });
          },
          [&](const MultivariateGammaProjection& s) -> std::vector<double> {
            const double offset = s.alpha * s.kappa_offset();
            if (s.C.is_diagonal()) {
              return fill_chunks(n, seed, threads, [&s, offset](Rng& rng) {
                double f = 0.0;
                for (std::size_t i = 0; i < s.lambdas.size(); ++i)
                  f += s.lambdas[i] * s.C(i, i) * rng.gamma(s.alpha);
                return f - offset;
              });
            }
            if (is_half_integer_shape(s.alpha, nullptr))
              return sample_gaussian_squares(s, n, seed, threads);
            if (s.C.rows() == 2 && s.lambdas[0] == s.lambdas[1]) {
              const auto levy = derive_levy_decomposition(mckay_from_bivariate(s.C, s.alpha));
              const double lambda = s.lambdas[0];
              return fill_chunks(n, seed, threads, [levy, lambda, offset](Rng& rng) {
                const double g = rng.gamma(levy.shape) / levy.rate1 +
                                 rng.gamma(levy.shape) / levy.rate2;
                return lambda * g - offset;
              });
            }
            std::string reason;
            is_sampleable(s, &reason);
            throw UnsupportedError(reason);
          },
          [&](const McKayI& m) {
            const auto levy = derive_levy_decomposition(m);
            return fill_chunks(n, seed, threads, [levy](Rng& rng) {
              return rng.gamma(levy.shape) / levy.rate1 + rng.gamma(levy.shape) / levy.rate2;
            });
          },
          [&](const VarianceGamma& v) {
            const double scale = 2.0 / (v.alpha * v.alpha - v.beta * v.beta);
            return fill_chunks(n, seed, threads, [v, scale](Rng& rng) {
              const double w = scale * rng.gamma(v.lambda);
              return v.mu + v.beta * w + std::sqrt(w) * rng.normal();
            });
          },
          [&](const NormalSpec& nrm) {
            const double sd = std::sqrt(nrm.sigma2);
            return fill_chunks(n, seed, threads,
                               [nrm, sd](Rng& rng) { return nrm.mu + sd * rng.normal(); });
          },
      },
      spec);
}

// ---- McKay / Levy ----

McKayI mckay_from_bivariate(const Matrix& C, double alpha) {
  require(C.rows() == 2 && C.cols() == 2, "C", "must be 2x2");
  require(C.is_symmetric(1e-10), "C", "must be symmetric");
  require(finite(alpha) && alpha > 0.0, "alpha", "must be > 0");
  const double c1 = C(0, 0), c2 = C(1, 1), c12 = C(0, 1);
  const double det = c1 * c2 - c12 * c12;
  require(det > 0.0, "C", "requires c1*c2 > c12^2");
  const double disc = (c1 + c2) * (c1 + c2) - 4.0 * det;
  require(disc > 0.0, "C", "requires (c1+c2)^2 > 4(c1*c2 - c12^2)");
  const double root = std::sqrt(disc);
  McKayI m{alpha - 0.5, 2.0 * det / root, (c1 + c2) / root};
  require(m.c > 1.0, "C", "requires resulting c > 1");
  return m;
}

double LevyDecomposition::levy_density(double x) const {
  return shape * (std::exp(-rate1 * x) + std::exp(-rate2 * x)) / x;
}

LevyDecomposition derive_levy_decomposition(const McKayI& m) {
  validate(m);
  return {m.a + 0.5, (m.c - 1.0) / m.b, (m.c + 1.0) / m.b};
}

// ---- characteristic functions ----

std::complex<double> continuous_log_on_imaginary_axis(const Polynomial& p, double xi,
                                                      double max_step) {
  if (!(p(0.0) > 0.0))
    throw std::domain_error("continuous_log_on_imaginary_axis: p(0) must be positive");
  const double two_pi = 2.0 * std::numbers::pi;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(xi) / max_step)));
  double arg = 0.0;
  cplx value = p(cplx{0.0, 0.0});
  for (std::size_t k = 1; k <= steps; ++k) {
    const double t = xi * static_cast<double>(k) / static_cast<double>(steps);
    value = p(cplx{0.0, t});
    double a = std::arg(value);
    a += two_pi * std::round((arg - a) / two_pi);
    arg = a;
  }
  return {std::log(std::abs(value)), arg};
}

std::complex<double> cf_eval(const TargetSpec& spec, double xi) {
  return std::visit(
      overloaded{
          [xi](const GammaCombination& g) {
            cplx lg = 0.0;
            for (const auto& t : g.terms) {
              const double shape = t.m * t.alpha;
              const double s = t.lambda * t.c;
              lg += -kI * xi * shape * s - shape * std::log(1.0 - kI * xi * s);
            }
            return std::exp(lg);
          },
          [xi](const SecondChaos& s) { return cf_eval(to_gamma_combination(s), xi); },
          [xi](const MultivariateGammaProjection& s) {
            const Polynomial dpoly = minor_polynomial(s);
            const auto log_d =
                continuous_log_on_imaginary_axis(dpoly, xi, multivariate_step_bound(dpoly.coeffs()));
            return std::exp(-kI * s.alpha * s.kappa_offset() * xi - s.alpha * log_d);
          },
          [xi](const McKayI& m) {
            const auto l = derive_levy_decomposition(m);
            return std::exp(-l.shape * std::log(1.0 - kI * xi / l.rate1) -
                            l.shape * std::log(1.0 - kI * xi / l.rate2));
          },
          [xi](const VarianceGamma& v) {
            const double p = v.alpha - v.beta, q = v.alpha + v.beta;
            return std::exp(kI * v.mu * xi - v.lambda * std::log(1.0 - kI * xi / p) -
                            v.lambda * std::log(1.0 + kI * xi / q));
          },
          [xi](const NormalSpec& n) { return std::exp(kI * n.mu * xi - 0.5 * n.sigma2 * xi * xi); },
      },
      spec);
}

}  // namespace gammastein
