// Thin wrapper: targets and reports cross the boundary as JSON text, the
// Python package turns them into dicts.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "gammastein/cumulants.hpp"
#include "gammastein/operators.hpp"
#include "gammastein/targets.hpp"
#include "gammastein/verify.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace gammastein;

namespace {

TargetSpec parse_spec(const std::string& text) { return spec_from_json(json::parse(text)); }

Matrix to_matrix(const std::vector<std::vector<double>>& rows) { return Matrix::from_rows(rows); }

}  // namespace

PYBIND11_MODULE(_gammastein, m) {
  m.doc() = "Stein operators for gamma-type targets";

  py::register_exception<SpecError>(m, "SpecError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_RuntimeError);

  m.def("validate_spec", [](const std::string& spec) { return to_json(parse_spec(spec)).dump(); });

  m.def(
      "build_operator",
      [](const std::string& spec, const std::string& route) {
        return to_json(build_operator(parse_spec(spec), parse_route(route))).dump();
      },
      py::arg("spec"), py::arg("route") = "fourier");

  m.def(
      "scalar_equivalent",
      [](const std::string& op1, const std::string& op2, double tol) {
        return scalar_equivalent(operator_from_json(json::parse(op1)),
                                 operator_from_json(json::parse(op2)), tol);
      },
      py::arg("op1"), py::arg("op2"), py::arg("tol") = 1e-9);

  m.def(
      "sample",
      [](const std::string& spec, std::size_t n, std::uint64_t seed, std::size_t threads) {
        auto draws = [&] {
          py::gil_scoped_release release;
          return sample(parse_spec(spec), n, seed, threads);
        }();
        return py::array_t<double>(static_cast<py::ssize_t>(draws.size()), draws.data());
      },
      py::arg("spec"), py::arg("n"), py::arg("seed"), py::arg("threads") = 0);

  m.def(
      "cf_eval",
      [](const std::string& spec, double xi) { return cf_eval(parse_spec(spec), xi); },
      py::arg("spec"), py::arg("xi"));

  m.def(
      "verify",
      [](const std::string& spec, const std::string& op_json, std::size_t n, std::uint64_t seed,
         const std::vector<int>& degrees, double z_max, std::size_t threads) {
        const auto target = parse_spec(spec);
        const auto op = operator_from_json(json::parse(op_json));
        VerifyOptions options;
        options.z_max = z_max;
        options.threads = threads;
        py::gil_scoped_release release;
        return to_json(annihilation_test(op, target, damped_family(degrees), n, seed, options))
            .dump();
      },
      py::arg("spec"), py::arg("operator"), py::arg("n"), py::arg("seed"), py::arg("degrees"),
      py::arg("z_max") = 4.0, py::arg("threads") = 0);

  m.def(
      "cumulants",
      [](const std::string& spec, std::size_t order) {
        return cumulant_sequence(parse_spec(spec), order).values;
      },
      py::arg("spec"), py::arg("order"));

  m.def(
      "delta_discrepancy",
      [](const std::vector<double>& kappa, const std::vector<double>& lambdas) {
        return delta_discrepancy(CumulantSequence{kappa}, lambdas);
      },
      py::arg("kappa"), py::arg("lambdas"));

  m.def(
      "mckay_from_bivariate",
      [](const std::vector<std::vector<double>>& C, double alpha) {
        const auto r = mckay_from_bivariate(to_matrix(C), alpha);
        return py::make_tuple(r.a, r.b, r.c);
      },
      py::arg("C"), py::arg("alpha"));

  m.def(
      "levy_decompose",
      [](double a, double b, double c) {
        const auto l = derive_levy_decomposition(McKayI{a, b, c});
        return py::make_tuple(l.shape, l.rate1, l.rate2);
      },
      py::arg("a"), py::arg("b"), py::arg("c"));

  m.def("elementary_symmetric",
        [](const std::vector<double>& values, std::size_t k) { return elementary_symmetric(values, k); });
  m.def("principal_minor_sum",
        [](const std::vector<std::vector<double>>& C, const std::vector<double>& lambdas,
           std::size_t j) { return principal_minor_sum(to_matrix(C), lambdas, j); });
}
