#include "gammastein/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "gammastein/cumulants.hpp"
#include "gammastein/operators.hpp"
#include "gammastein/targets.hpp"
#include "gammastein/verify.hpp"

namespace gammastein::cli {

namespace {

using json = nlohmann::json;

json read_json_file(const std::string& path, const std::string& field) {
  std::ifstream in(path);
  if (!in) throw SpecError(field, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError(field, std::string("invalid JSON: ") + e.what());
  }
}

TargetSpec load_spec(const CliConfig& config) {
  if (config.spec_path.empty()) throw SpecError("spec", "--spec is required");
  return spec_from_json(read_json_file(config.spec_path, "spec"));
}

std::string operator_text(const SteinOperator& op) {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t k = 0; k <= op.order(); ++k) {
    os << "p" << k << "(x) =";
    const Polynomial p = op.coeff(k);
    const auto& c = p.coeffs();
    for (std::size_t j = 0; j < c.size(); ++j) {
      os << (j == 0 ? " " : " + ") << c[j] + 0.0;
      if (j > 0) os << "*x" << (j > 1 ? "^" + std::to_string(j) : "");
    }
    os << "\n";
  }
  return os.str();
}

std::string render(const CliConfig& config, const json& doc, const std::string& text) {
  if (config.output == "text") return text;
  return doc.dump(2) + "\n";
}

// McKay parameters from a McKay spec, a d = 2 multivariate spec, or a bare
// {"C": ..., "alpha": ...} document.
McKayI mckay_from_document(const json& doc) {
  if (!doc.contains("kind") && doc.contains("C") && doc.contains("alpha")) {
    json wrapped = doc;
    wrapped["kind"] = "multivariate_gamma";
    if (!wrapped.contains("lambdas")) wrapped["lambdas"] = {1.0, 1.0};
    return mckay_from_document(wrapped);
  }
  const TargetSpec spec = spec_from_json(doc);
  if (const auto* m = std::get_if<McKayI>(&spec)) return *m;
  if (const auto* mv = std::get_if<MultivariateGammaProjection>(&spec)) {
    if (mv->C.rows() != 2) throw SpecError("C", "must be 2x2 for the McKay mapping");
    return mckay_from_bivariate(mv->C, mv->alpha);
  }
  throw SpecError("kind", "expected mckay_i or a bivariate multivariate_gamma spec");
}

int cmd_build_operator(const CliConfig& config, std::string& body) {
  const auto spec = load_spec(config);
  const auto op = build_operator(spec, parse_route(config.route));
  body = render(config, to_json(op), operator_text(op));
  return kOk;
}

int cmd_verify(const CliConfig& config, std::string& body) {
  if (config.n < kMinVerifySamples)
    throw SpecError("n", "n too small (minimum " + std::to_string(kMinVerifySamples) + ")");
  if (config.degrees.empty()) throw SpecError("degrees", "must be nonempty");
  for (int d : config.degrees)
    if (d < 0) throw SpecError("degrees", "must be nonnegative");
  const auto spec = load_spec(config);
  std::string reason;
  if (!is_sampleable(spec, &reason)) throw UnsupportedError(reason);
  const SteinOperator op =
      config.operator_path
          ? operator_from_json(read_json_file(*config.operator_path, "operator"))
          : build_operator(spec, parse_route(config.route));
  VerifyOptions options;
  options.threads = config.threads;
  const auto fns = damped_family(config.degrees);
  const auto report = annihilation_test(op, spec, fns, config.n, config.seed, options);
  json doc = to_json(report);
  std::string text = to_text(report);
  bool ok = report.verdict;
  if (const auto* m = std::get_if<McKayI>(&spec)) {
    const auto rec = mckay_recursion_test(*m, config.n_max, config.n, config.seed, options);
    doc["mckay_recursion"] = to_json(rec);
    text += to_text(rec);
    ok = ok && rec.verdict;
  }
  body = render(config, doc, text);
  return ok ? kOk : kStatisticalFailure;
}

int cmd_compare(const CliConfig& config, std::string& body) {
  const auto spec = load_spec(config);
  const Route first = parse_route(config.route);
  Route second;
  if (config.against) {
    second = parse_route(*config.against);
  } else {
    const bool malliavin_ok = std::holds_alternative<SecondChaos>(spec);
    second = first != Route::Malliavin && malliavin_ok ? Route::Malliavin : Route::ClosedForm;
    if (second == first) second = Route::Fourier;
  }
  const auto op1 = build_operator(spec, first);
  const auto op2 = build_operator(spec, second);
  const auto s = scalar_equivalent(op1, op2);
  json doc{{"route", route_name(first)},
           {"against", route_name(second)},
           {"equivalent", s.has_value()},
           {"scalar", s ? json(*s) : json(nullptr)},
           {"operator", to_json(op1)},
           {"against_operator", to_json(op2)}};
  std::ostringstream text;
  text << route_name(first) << " vs " << route_name(second) << ": ";
  if (s) {
    text.precision(15);
    text << "equivalent, " << route_name(first) << " = " << *s << " * " << route_name(second)
         << "\n";
  } else {
    text << "not equivalent\n";
  }
  body = render(config, doc, text.str());
  return s ? kOk : kStatisticalFailure;
}

int cmd_mckay_map(const CliConfig& config, std::string& body) {
  if (config.spec_path.empty()) throw SpecError("spec", "--spec is required");
  const auto m = mckay_from_document(read_json_file(config.spec_path, "spec"));
  json doc{{"kind", "mckay_i"}, {"a", m.a}, {"b", m.b}, {"c", m.c}};
  std::ostringstream text;
  text.precision(15);
  text << "a = " << m.a << "\nb = " << m.b << "\nc = " << m.c << "\n";
  body = render(config, doc, text.str());
  return kOk;
}

int cmd_levy_decompose(const CliConfig& config, std::string& body) {
  if (config.spec_path.empty()) throw SpecError("spec", "--spec is required");
  const auto m = mckay_from_document(read_json_file(config.spec_path, "spec"));
  const auto l = derive_levy_decomposition(m);
  json doc{{"mckay", {{"a", m.a}, {"b", m.b}, {"c", m.c}}},
           {"shape", l.shape},
           {"rate1", l.rate1},
           {"rate2", l.rate2},
           {"levy_density", {{"weight", l.shape}, {"rates", {l.rate1, l.rate2}},
                             {"form", "weight*(exp(-rate1*x)+exp(-rate2*x))/x, x>0"}}}};
  std::ostringstream text;
  text.precision(15);
  text << "G1 + G2 = gamma(shape " << l.shape << ", rate " << l.rate1 << ") + gamma(shape "
       << l.shape << ", rate " << l.rate2 << ")\n"
       << "levy density: " << l.shape << " * (exp(-" << l.rate1 << " x) + exp(-" << l.rate2
       << " x)) / x\n";
  body = render(config, doc, text.str());
  return kOk;
}

int cmd_cumulants(const CliConfig& config, std::string& body) {
  const auto spec = load_spec(config);
  if (config.order < 2) throw SpecError("order", "must be >= 2");
  const auto kappa = cumulant_sequence(spec, config.order);
  json list = json::array();
  std::ostringstream text;
  text.precision(15);
  text << "mean = " << target_mean(spec) << "\n";
  for (std::size_t r = 2; r <= kappa.max_order(); ++r) {
    list.push_back({{"order", r}, {"value", kappa.kappa(r)}});
    text << "kappa_" << r << " = " << kappa.kappa(r) << "\n";
  }
  json doc{{"kind", kind_name(spec)}, {"mean", target_mean(spec)}, {"cumulants", list}};
  if (const auto* s = std::get_if<SecondChaos>(&spec)) {
    const std::size_t needed = 2 * (s->lambdas.size() + 1);
    const auto full = cumulant_sequence(spec, needed);
    const double delta = delta_discrepancy(full, s->lambdas);
    json d{{"exact", delta}, {"orders_used", needed}};
    text << "delta (exact cumulants) = " << delta << "\n";
    if (needed <= 6 && config.n >= kMinVerifySamples) {
      const auto draws = sample(spec, config.n, config.seed, config.threads);
      const auto est = delta_discrepancy_from_sample(draws, s->lambdas);
      d["sample"] = {{"value", est.value}, {"se", est.std_error}, {"n", est.n},
                     {"approximate", true}, {"seed", config.seed}};
      text << "delta (sample cumulants, approximate) = " << est.value << " +/- "
           << est.std_error << "\n";
    }
    doc["delta"] = d;
  }
  body = render(config, doc, text.str());
  return kOk;
}

}  // namespace

int run(const CliConfig& config, std::ostream& out, std::ostream& err) {
  std::string body;
  int code = kOk;
  try {
    if (config.output != "json" && config.output != "text")
      throw SpecError("output", "must be json or text");
    if (config.command == "build-operator")
      code = cmd_build_operator(config, body);
    else if (config.command == "verify")
      code = cmd_verify(config, body);
    else if (config.command == "compare")
      code = cmd_compare(config, body);
    else if (config.command == "mckay-map")
      code = cmd_mckay_map(config, body);
    else if (config.command == "levy-decompose")
      code = cmd_levy_decompose(config, body);
    else if (config.command == "cumulants")
      code = cmd_cumulants(config, body);
    else
      throw SpecError("command", "unknown command '" + config.command + "'");
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  if (config.out_path) {
    std::ofstream file(*config.out_path);
    if (!file) {
      err << "error: out: cannot write '" << *config.out_path << "'\n";
      return kInvalidInput;
    }
    file << body;
  } else {
    out << body;
  }
  if (code == kStatisticalFailure) err << "statistical check failed\n";
  return code;
}

}  // namespace gammastein::cli
