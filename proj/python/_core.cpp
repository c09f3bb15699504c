// Python bindings for the main operations. Reports and structured results
// cross the boundary as JSON text and are decoded on the Python side.

#include "btlab/harness.hpp"
#include "btlab/oscillatory.hpp"
#include "btlab/symplin.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace btlab;

namespace {

Hamiltonian ham(const std::string& id, const std::map<std::string, double>& params) {
  return make_hamiltonian(id, params);
}

ExperimentConfig cfg(const std::string& text) { return config_from_json(nlohmann::json::parse(text)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Berezin-Toeplitz quantization lab on CP1 (native core)";

  // translators run newest first, so the base class goes in first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_RuntimeError);

  m.def("omega0", &omega0, py::arg("r"), py::arg("s"));
  m.def(
      "poincare_data",
      [](const Mat& A) {
        PoincareData pd = poincare_data(SymplecticMap::make(A));
        return py::dict(py::arg("nu") = pd.nuA, py::arg("Q") = pd.QA, py::arg("P") = pd.PA, py::arg("R") = pd.RA);
      },
      py::arg("matrix"));
  m.def(
      "polar_decompose",
      [](const Mat& A) {
        PolarFactors pf = polar_decompose(SymplecticMap::make(A));
        return py::make_tuple(pf.O, pf.P);
      },
      py::arg("matrix"));
  m.def(
      "gaussian_closed_form",
      [](const Mat& Q, const Vec& G, const Vec& H, double F) {
        return gaussian_closed_form(GaussianIdentityInputs::make(Q, G, H, F));
      },
      py::arg("Q"), py::arg("G"), py::arg("H"), py::arg("F") = 0.0);
  m.def(
      "model_phase_hessian",
      [](double tau, double fm) {
        ModelPhaseData d = model_phase_data(tau, fm);
        return py::make_tuple(Eigen::Matrix4d(d.hessian.cast<double>()), Eigen::Matrix4d(d.inverseHessian.cast<double>()),
                              d.signature);
      },
      py::arg("tau"), py::arg("fm"));

  py::class_<QuantumLevel>(m, "Level")
      .def_readonly("k", &QuantumLevel::k)
      .def_readonly("dim", &QuantumLevel::Nk)
      .def_readonly("szego_constant", &QuantumLevel::szegoConstant)
      .def_readonly("gram_condition", &QuantumLevel::gramCondition);
  m.def(
      "level", [](int k) { return level(cp1_model(), k); }, py::arg("k"));
  m.def("szego_kernel", &szego_eval, py::arg("level"), py::arg("x"), py::arg("y"));
  m.def(
      "toeplitz",
      [](const QuantumLevel& L, const std::function<cplx(const Vec3&)>& g) { return toeplitz(L, g).entries; },
      py::arg("level"), py::arg("symbol"));
  m.def(
      "evolution",
      [](const QuantumLevel& L, const std::string& id, double tau, const std::map<std::string, double>& params) {
        return evolution(L, ham(id, params), tau).entries;
      },
      py::arg("level"), py::arg("hamiltonian"), py::arg("tau"), py::arg("params") = std::map<std::string, double>{});
  m.def(
      "exact_weight_trace",
      [](const std::string& id, int k, double tau) { return exact_weight_trace(ham(id, {}), k, tau); },
      py::arg("hamiltonian"), py::arg("k"), py::arg("tau"));
  m.def(
      "predict_trace_fixed",
      [](const std::string& id, double tau0, int k, const std::map<std::string, double>& params) {
        Hamiltonian h = ham(id, params);
        return predict_trace_fixed(classify_period(h, tau0), h, {}, k).value;
      },
      py::arg("hamiltonian"), py::arg("tau0"), py::arg("k"), py::arg("params") = std::map<std::string, double>{});
  m.def(
      "predict_trace_rescaled",
      [](const std::string& id, int k, double tau, double C, const std::map<std::string, double>& params) {
        Hamiltonian h = ham(id, params);
        return predict_trace_rescaled(classify_period(h, 0.0), h, {}, k, tau, C > 0 ? C : std::abs(tau)).value;
      },
      py::arg("hamiltonian"), py::arg("k"), py::arg("tau"), py::arg("C") = 0.0,
      py::arg("params") = std::map<std::string, double>{});

  m.def(
      "_run", [](const std::string& kind, const std::string& config) {
        ExperimentConfig c = cfg(config);
        py::gil_scoped_release nogil;
        ConvergenceReport r = kind == "kernel-scaling" ? run_kernel_scaling(c)
                              : kind == "trace-fixed"  ? run_trace_fixed(c)
                              : kind == "trace-rescaled"
                                  ? run_trace_rescaled(c)
                                  : throw ArgumentError("unknown experiment '" + kind + "'");
        return report_json(r).dump();
      });
  m.def("_selftest", [](std::uint64_t seed) { return selftest(seed).dump(); });
}
