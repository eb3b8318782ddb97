#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clarkbmo/atomic.hpp"
#include "clarkbmo/bmo.hpp"
#include "clarkbmo/error.hpp"
#include "clarkbmo/harness.hpp"
#include "clarkbmo/operators.hpp"

namespace py = pybind11;
using namespace clarkbmo;

namespace {

MeasurePtr make_measure(const std::vector<double>& angles, const std::vector<double>& masses) {
  std::vector<CirclePoint> atoms(angles.begin(), angles.end());
  return std::make_shared<const DiscreteMeasure>(DiscreteMeasure::from_unsorted(std::move(atoms), masses));
}

std::vector<double> angles_of(const DiscreteMeasure& mu) {
  std::vector<double> a;
  for (const auto& p : mu.atoms()) a.push_back(p.angle());
  return a;
}

py::dict report_dict(const ExperimentReport& r) {
  py::dict d;
  d["experiment"] = r.experiment;
  d["passed"] = r.passed();
  d["failures"] = r.failures;
  d["metrics"] = r.metrics;
  py::list env;
  for (const auto& e : r.envelopes) {
    py::dict x;
    x["key"] = e.key;
    x["min_ratio"] = e.min_ratio;
    x["max_ratio"] = e.max_ratio;
    x["count"] = e.count;
    x["skipped"] = e.skipped;
    env.append(x);
  }
  d["envelopes"] = env;
  d["csv"] = to_csv(r);
  return d;
}

ExperimentConfig make_config(std::uint64_t seed, int trials, std::vector<std::size_t> n_values,
                             std::vector<std::size_t> degrees, std::size_t grid) {
  ExperimentConfig c;
  c.seed = seed;
  c.trials = trials;
  if (!n_values.empty()) c.n_values = std::move(n_values);
  if (!degrees.empty()) c.degree_values = std::move(degrees);
  c.grid_M = grid;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Clark measures, discrete BMO, atomic decompositions and truncated Hankel operators";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<BlaschkeProduct>(m, "BlaschkeProduct")
      .def(py::init<std::vector<cplx>, cplx>(), py::arg("zeros"), py::arg("gamma") = cplx(1.0))
      .def_static("monomial", &BlaschkeProduct::monomial)
      .def_property_readonly("zeros", &BlaschkeProduct::zeros)
      .def_property_readonly("gamma", &BlaschkeProduct::gamma)
      .def_property_readonly("degree", &BlaschkeProduct::degree)
      .def("__call__", &BlaschkeProduct::operator())
      .def("derivative", &BlaschkeProduct::derivative)
      .def("squared", &BlaschkeProduct::squared);

  m.def(
      "clark_measure",
      [](const BlaschkeProduct& theta, cplx alpha) {
        const auto cm = clark_measure(theta, alpha);
        py::dict d;
        d["angles"] = angles_of(cm.measure());
        d["masses"] = cm.measure().masses();
        d["c_alpha"] = cm.c_alpha;
        return d;
      },
      py::arg("theta"), py::arg("alpha") = cplx(1.0));

  m.def(
      "bmo_norm",
      [](const std::vector<double>& angles, const std::vector<double>& masses, const std::vector<cplx>& values) {
        return bmo_norm(SampledFunction(make_measure(angles, masses), values)).norm;
      },
      py::arg("angles"), py::arg("masses"), py::arg("values"));

  m.def(
      "atomic_norm",
      [](const std::vector<double>& angles, const std::vector<double>& masses, const std::vector<cplx>& values) {
        const SampledFunction f(make_measure(angles, masses), values);
        const auto d = cz_decompose(f);
        const auto lp = atomic_norm_lp(f);
        py::dict out;
        out["cz_weight"] = d.total_weight;
        out["cz_terms"] = d.terms.size();
        out["lp_lower"] = lp.lower;
        out["lp_upper"] = lp.upper;
        return out;
      },
      py::arg("angles"), py::arg("masses"), py::arg("values"));

  m.def(
      "embed_inverse",
      [](const BlaschkeProduct& theta, cplx alpha, const std::vector<cplx>& trace, cplx z) {
        return ModelSpaceFunction(clark_measure(theta, alpha), trace)(z);
      },
      py::arg("theta"), py::arg("alpha"), py::arg("trace"), py::arg("z"));

  m.def(
      "hankel_matrix_classical", [](const std::vector<cplx>& gamma) { return hankel_matrix_classical(gamma).entries; },
      py::arg("gamma"));

  m.def(
      "truncated_hankel_matrix",
      [](const BlaschkeProduct& theta, cplx alpha, const std::vector<cplx>& trace, std::size_t grid) {
        const auto nu = clark_measure(theta.squared(), alpha);
        return truncated_hankel_matrix(theta, alpha, SampledFunction(nu.base, trace), QuadratureGrid(grid)).entries;
      },
      py::arg("theta"), py::arg("alpha"), py::arg("trace"), py::arg("grid") = 4096);

  m.def("singular_values", &singular_values, py::arg("matrix"));
  m.def("operator_norm", &operator_norm, py::arg("matrix"));

  m.def(
      "corollary1",
      [](std::uint64_t seed, int trials, std::vector<std::size_t> n_values) {
        return report_dict(run_corollary1(make_config(seed, trials, std::move(n_values), {}, 4096)));
      },
      py::arg("seed") = 42, py::arg("trials") = 200, py::arg("n_values") = std::vector<std::size_t>{});

  m.def(
      "theorem3",
      [](std::uint64_t seed, int trials, std::vector<std::size_t> degrees, std::size_t grid) {
        return report_dict(run_theorem3(make_config(seed, trials, {}, std::move(degrees), grid)));
      },
      py::arg("seed") = 42, py::arg("trials") = 20, py::arg("degrees") = std::vector<std::size_t>{},
      py::arg("grid") = 4096);

  m.def(
      "verify_identities",
      [](std::uint64_t seed, double mass_scale) {
        ExperimentConfig c;
        c.seed = seed;
        py::dict out;
        for (const auto& chk : run_identity_suite(c, mass_scale).checks) {
          out[py::str(chk.name)] = py::make_tuple(chk.max_residual, chk.tolerance, chk.passed());
        }
        return out;
      },
      py::arg("seed") = 42, py::arg("mass_scale") = 1.0);

  m.def(
      "verify_report", [](const std::string& csv, int count, std::uint64_t seed) {
        const auto r = verify_report(csv, count, seed);
        return py::make_tuple(r.checked, r.max_deviation, r.failures);
      },
      py::arg("csv"), py::arg("count") = 10, py::arg("seed") = 42);
}
