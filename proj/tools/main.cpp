#include <iostream>

#include <CLI11.hpp>

#include "gammastein/cli.hpp"

int main(int argc, char** argv) {
  using gammastein::cli::CliConfig;
  CLI::App app{"Stein operators for linear combinations of gamma-type random variables"};
  app.require_subcommand(1);

  CliConfig config;
  std::string against, operator_path, out_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--spec", config.spec_path, "target spec JSON file")->required();
    sub->add_option("--output", config.output, "json|text")
        ->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", out_path, "write the document to this path");
  };

  auto* build = app.add_subcommand("build-operator", "print the Stein operator as JSON");
  add_common(build);
  build->add_option("--route", config.route, "fourier|malliavin|closed-form");

  auto* verify = app.add_subcommand("verify", "Monte Carlo annihilation test");
  add_common(verify);
  verify->add_option("--route", config.route, "fourier|malliavin|closed-form");
  verify->add_option("--operator", operator_path, "operator JSON from build-operator");
  verify->add_option("--n", config.n, "samples");
  verify->add_option("--seed", config.seed, "seed");
  verify->add_option("--degrees", config.degrees, "damped test-function degrees")
      ->delimiter(',');
  verify->add_option("--n-max", config.n_max, "McKay recursion: highest n");

  auto* compare = app.add_subcommand("compare", "scalar equivalence of two constructions");
  add_common(compare);
  compare->add_option("--route", config.route, "first route");
  compare->add_option("--against", against, "second route");

  auto* mckay = app.add_subcommand("mckay-map", "McKay parameters of a bivariate gamma sum");
  add_common(mckay);
  auto* levy = app.add_subcommand("levy-decompose", "independent-gamma decomposition");
  add_common(levy);

  auto* cumulants = app.add_subcommand("cumulants", "exact cumulants and discrepancy");
  add_common(cumulants);
  cumulants->add_option("--order", config.order, "highest cumulant order");
  cumulants->add_option("--n", config.n, "samples for the sample-mode discrepancy (0 = off)");
  cumulants->add_option("--seed", config.seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gammastein::cli::kInvalidInput;
  }

  config.command = app.get_subcommands().front()->get_name();
  if (config.command == "cumulants" && cumulants->count("--n") == 0) config.n = 0;
  if (!against.empty()) config.against = against;
  if (!operator_path.empty()) config.operator_path = operator_path;
  if (!out_path.empty()) config.out_path = out_path;
  return gammastein::cli::run(config, std::cout, std::cerr);
}
