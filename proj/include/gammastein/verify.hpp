#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gammastein/operators.hpp"
#include "gammastein/targets.hpp"

namespace gammastein {

/// f(x) = x^n (Polynomial) or f(x) = x^n e^{-x^2/2} (DampedPolynomial).
struct TestFunction {
  enum class Kind { Polynomial, DampedPolynomial };

  Kind kind = Kind::DampedPolynomial;
  int degree = 0;

  static TestFunction polynomial(int n) { return {Kind::Polynomial, n}; }
  static TestFunction damped(int n) { return {Kind::DampedPolynomial, n}; }

  std::string name() const;

  /// f^(k)(x) = factors[k](x) * w(x), with w = 1 or e^{-x^2/2}.
  std::vector<Polynomial> derivative_factors(std::size_t max_order) const;

  /// f(x), f'(x), ..., f^(max_order)(x).
  std::vector<double> derivatives(double x, std::size_t max_order) const;
};

std::vector<TestFunction> damped_family(std::span<const int> degrees);
std::vector<TestFunction> polynomial_family(std::span<const int> degrees);

struct VerifyOptions {
  double z_max = 4.0;
  /// On failure, retry once with a fresh seed and twice the sample size.
  bool retry = true;
  std::size_t threads = 0;
};

struct FunctionResult {
  std::string fn;
  double estimate = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::string target;
  std::vector<FunctionResult> tests;
  bool verdict = false;
  std::uint64_t seed = 0;  // seed of the reported (final) attempt
  std::size_t n = 0;       // sample size of the reported attempt
  double z_max = 4.0;
  int attempts = 1;
};

nlohmann::json to_json(const VerificationReport& report);
std::string to_text(const VerificationReport& report);

/// Monte Carlo estimates of E[op f(F)] with F drawn from `spec`; passes iff
/// |estimate| <= z_max * SE for every f. Sampler errors propagate.
VerificationReport annihilation_test(const SteinOperator& op, const TargetSpec& spec,
                                     std::span<const TestFunction> fns, std::size_t n,
                                     std::uint64_t seed, const VerifyOptions& options = {});

/// Single pass over given draws (no retry).
VerificationReport annihilation_on_samples(const SteinOperator& op,
                                           std::span<const double> samples,
                                           std::span<const TestFunction> fns,
                                           double z_max = 4.0, std::size_t threads = 0);

// -- McKay moment recursion ------------------------------------------------

struct RecursionEntry {
  int n = 0;
  double residual = 0.0;  // normalized by the largest term magnitude
  double se = 0.0;        // same normalization
  double z = 0.0;
  bool pass = false;
  double exact_residual = 0.0;  // with moments from exact cumulants
};

struct MomentCheck {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double expected = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct McKayRecursionReport {
  McKayI params;
  std::vector<RecursionEntry> recursion;
  std::vector<MomentCheck> moments;  // E[F] and E[F^2] against closed forms
  double exact_max_residual = 0.0;
  bool verdict = false;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double z_max = 4.0;
};

/// Residuals of (1-c^2) E F^{n+1} + bc(1+2(a+n)) E F^n - n b^2 (2a+n) E F^{n-1}
/// for n = 2..n_max, from Monte Carlo moments and from exact moments.
McKayRecursionReport mckay_recursion_test(const McKayI& m, int n_max, std::size_t samples,
                                          std::uint64_t seed, const VerifyOptions& options = {});

/// The recursion residual (unnormalized) for given raw moments.
double mckay_recursion_residual(const McKayI& m, int n, std::span<const double> moments);

nlohmann::json to_json(const McKayRecursionReport& report);
std::string to_text(const McKayRecursionReport& report);

// -- identity in law -------------------------------------------------------

struct CumulantComparison {
  int order = 0;
  double correlated = 0.0;
  double independent = 0.0;
  double exact = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct IdentityInLawReport {
  bool skipped = false;
  std::string reason;
  McKayI mckay;
  std::string construction;  // "independent-gammas" or "gaussian-squares"
  double ks_statistic = 0.0;
  double ks_p_value = 0.0;
  double ks_level = 0.01;
  std::vector<CumulantComparison> cumulants;
  bool verdict = false;
  std::uint64_t seed = 0;
  std::size_t n = 0;
};

/// Compares G_1 + G_2 from a bivariate gamma (C, alpha) with the sum of the
/// two independent gammas of derive_levy_decomposition. Skips (with reason)
/// when no correlated construction exists for (C, alpha). Requires n >= 1e4.
IdentityInLawReport identity_in_law_test(const Matrix& C, double alpha, std::size_t n,
                                         std::uint64_t seed, const VerifyOptions& options = {});

nlohmann::json to_json(const IdentityInLawReport& report);
std::string to_text(const IdentityInLawReport& report);

}  // namespace gammastein
