#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gammastein/errors.hpp"
#include "gammastein/matrix.hpp"
#include "gammastein/poly.hpp"

namespace gammastein {

/// One summand lambda * (gamma(m * alpha, c) - m * alpha * c); c is a scale.
struct GammaTerm {
  double lambda = 1.0;
  int m = 1;
  double alpha = 1.0;
  double c = 1.0;
};

/// F = sum_i lambda_i (gamma_i(m_i alpha_i, c_i) - m_i alpha_i c_i), independent.
struct GammaCombination {
  std::vector<GammaTerm> terms;
};

/// F = sum_i lambda_i sum_{j in block i} (N_j^2 - 1).
struct SecondChaos {
  std::vector<double> lambdas;
  std::vector<int> multiplicities;
};

/// F = sum_i lambda_i (Gamma_i - alpha k_i) with Gamma a d-variate gamma
/// vector with characteristic function |I - i C T|^{-alpha}.
struct MultivariateGammaProjection {
  Matrix C;
  double alpha = 1.0;
  std::vector<double> lambdas;
  std::vector<double> K;

  /// kappa = sum_j lambda_j k_j.
  double kappa_offset() const;
};

/// McKay Type I: density proportional to x^a e^{-xc/b} I_a(x/b).
struct McKayI {
  double a = 0.0;
  double b = 1.0;
  double c = 2.0;
};

/// log phi(xi) = i mu xi + 2 lambda log gamma - lambda log(alpha^2 - (beta + i xi)^2).
struct VarianceGamma {
  double mu = 0.0;
  double alpha = 1.0;
  double beta = 0.0;
  double lambda = 1.0;
};

struct NormalSpec {
  double mu = 0.0;
  double sigma2 = 1.0;
};

using TargetSpec = std::variant<GammaCombination, SecondChaos,
                                MultivariateGammaProjection, McKayI,
                                VarianceGamma, NormalSpec>;

std::string kind_name(const TargetSpec& spec);

/// Throws SpecError naming the first violated constraint.
void validate(const TargetSpec& spec);

/// The equivalent independent-gamma form (alpha = 1/2, c = 2).
GammaCombination to_gamma_combination(const SecondChaos& spec);

double target_mean(const TargetSpec& spec);
double target_variance(const TargetSpec& spec);

// -- serialization ---------------------------------------------------------

nlohmann::json to_json(const TargetSpec& spec);
/// Parses and validates. Throws SpecError on missing/ill-typed fields.
TargetSpec spec_from_json(const nlohmann::json& doc);

// -- sampling --------------------------------------------------------------

/// Whether `sample` has an exact sampler for these parameters; when not,
/// `reason` explains why.
bool is_sampleable(const TargetSpec& spec, std::string* reason = nullptr);

/// n i.i.d. draws. Pure function of (spec, n, seed): chunk i of kChunkSize
/// draws uses its own stream, so the output does not depend on `threads`
/// (0 = default). Throws UnsupportedError if no exact sampler exists.
std::vector<double> sample(const TargetSpec& spec, std::size_t n,
                           std::uint64_t seed, std::size_t threads = 0);

/// Projection sampled through the Wishart-diagonal construction
/// Gamma_i = sum_{k <= 2 alpha} Z_{ik}^2, Z_k ~ N(0, C/2). Requires 2 alpha
/// to be a positive integer; throws UnsupportedError otherwise.
std::vector<double> sample_gaussian_squares(const MultivariateGammaProjection& spec,
                                            std::size_t n, std::uint64_t seed,
                                            std::size_t threads = 0);

// -- McKay / Levy ----------------------------------------------------------

/// (a, b, c) such that G_1 + G_2 for a bivariate gamma (C, alpha) is McKay I.
/// Throws SpecError naming the failing inequality.
McKayI mckay_from_bivariate(const Matrix& C, double alpha);

/// G_1 + G_2 = gamma(shape, rate1) + gamma(shape, rate2), independent, with
/// rates (not scales). Levy density shape * (e^{-rate1 x} + e^{-rate2 x}) / x.
struct LevyDecomposition {
  double shape = 0.0;
  double rate1 = 0.0;
  double rate2 = 0.0;

  double levy_density(double x) const;
};

LevyDecomposition derive_levy_decomposition(const McKayI& m);

// -- characteristic functions ----------------------------------------------

std::complex<double> cf_eval(const TargetSpec& spec, double xi);

/// log p(i xi) continued from xi = 0 (p(0) > 0 required) along the path
/// in steps of at most `max_step`, so the imaginary part has no branch jumps.
std::complex<double> continuous_log_on_imaginary_axis(const Polynomial& p, double xi,
                                                      double max_step = 0.05);

}  // namespace gammastein
