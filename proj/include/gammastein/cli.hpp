#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gammastein::cli {

enum ExitCode : int { kOk = 0, kStatisticalFailure = 1, kInvalidInput = 2 };

struct CliConfig {
  std::string command;  // build-operator | verify | compare | mckay-map | levy-decompose | cumulants
  std::string spec_path;
  std::string route = "fourier";
  std::optional<std::string> against;        // second route for compare
  std::optional<std::string> operator_path;  // verify: read a built operator instead
  std::size_t n = 1000000;
  std::uint64_t seed = 1;
  std::vector<int> degrees{0, 1, 2, 3, 4, 5, 6};
  std::string output = "json";  // json | text
  std::optional<std::string> out_path;
  std::size_t order = 6;  // cumulants: highest order
  int n_max = 4;          // verify on McKay targets: highest recursion index
  std::size_t threads = 0;
};

inline constexpr std::size_t kMinVerifySamples = 10000;

/// Executes one command; the document goes to `out` (or config.out_path),
/// diagnostics to `err`. Returns an ExitCode value.
int run(const CliConfig& config, std::ostream& out, std::ostream& err);

}  // namespace gammastein::cli
