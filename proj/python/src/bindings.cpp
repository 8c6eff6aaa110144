#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gatesynth/bch.hpp"
#include "gatesynth/errors.hpp"
#include "gatesynth/hamlib.hpp"
#include "gatesynth/magnus.hpp"
#include "gatesynth/numerics.hpp"
#include "gatesynth/objective.hpp"
#include "gatesynth/pop.hpp"
#include "gatesynth/workbench.hpp"

namespace py = pybind11;
using namespace gatesynth;

namespace {

ProblemSpec make_problem(const CMatrix& h0, const CMatrix& hc, double horizon, int m, const std::string& control) {
  if (control == "poly") return {h0, hc, horizon, PolyControl{m}};
  if (control == "piecewise") return {h0, hc, horizon, PiecewiseControl{m}};
  throw InvalidArgument("control must be 'poly' or 'piecewise', got '" + control + "'");
}

py::list term_list(const Polynomial& p) {
  py::list out;
  for (const auto& [mono, c] : p.terms()) {
    py::tuple exps(p.ring().arity());
    for (int s = 0; s < p.ring().arity(); ++s) exps[static_cast<std::size_t>(s)] = mono[s];
    out.append(py::make_tuple(exps, c));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gate synthesis core";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", base.ptr());
  py::register_exception<BranchAmbiguity>(m, "BranchAmbiguity", base.ptr());

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def(py::init(&make_problem), py::arg("h0"), py::arg("hc"), py::arg("horizon"), py::arg("m"),
           py::arg("control") = "poly")
      .def_property_readonly("dim", &ProblemSpec::dim)
      .def_property_readonly("h0", &ProblemSpec::h0)
      .def_property_readonly("hc", &ProblemSpec::hc)
      .def_property_readonly("horizon", &ProblemSpec::horizon)
      .def_property_readonly("m", &ProblemSpec::control_count)
      .def_property_readonly("is_piecewise", &ProblemSpec::is_piecewise)
      .def("control_value", &ProblemSpec::control_value, py::arg("x"), py::arg("t"))
      .def("with_horizon", &ProblemSpec::with_horizon);

  py::class_<Polynomial>(m, "Polynomial")
      .def_property_readonly("degree", &Polynomial::degree)
      .def_property_readonly("arity", [](const Polynomial& p) { return p.ring().arity(); })
      .def("terms", &term_list, "List of (exponent tuple, coefficient) in grlex order.")
      .def("__call__", [](const Polynomial& p, const std::vector<double>& x) { return evaluate(p, x); })
      .def("__len__", &Polynomial::size);

  py::class_<PolyMatrix>(m, "PolyMatrix")
      .def_property_readonly("dim", &PolyMatrix::dim)
      .def_property_readonly("degree", &PolyMatrix::degree)
      .def("entry", [](const PolyMatrix& a, int i, int j) { return a(i, j); })
      .def("__call__", [](const PolyMatrix& a, const std::vector<double>& x) { return evaluate(a, x); });

  py::class_<SystemPair>(m, "SystemPair")
      .def_readonly("h0", &SystemPair::h0)
      .def_readonly("hc", &SystemPair::hc)
      .def_readonly("label", &SystemPair::label);
  m.def("ibmq3", &ibmq3);
  m.def("build_ising", &build_ising, py::arg("qubits"), py::arg("coupling") = 1.0);

  m.def("build_lambda", &build_lambda, py::arg("spec"), py::arg("order"));
  m.def("build_sigma", &build_sigma, py::arg("spec"), py::arg("order"));
  m.def("objective", &build_objective, py::arg("generator"), py::arg("omega"),
        "||G(x) - omega||_F^2 as a real polynomial in x.");

  py::class_<Propagation>(m, "Propagation")
      .def_readonly("unitary", &Propagation::unitary)
      .def_readonly("defect", &Propagation::defect)
      .def_readonly("steps", &Propagation::steps);
  m.def(
      "propagate_reference",
      [](const ProblemSpec& spec, const std::vector<double>& x) { return propagate_reference(spec, x); },
      py::arg("spec"), py::arg("x"));
  m.def("expm_antihermitian", &expm_antihermitian);
  m.def("principal_log", &principal_log, py::arg("u"), py::arg("branch_margin") = 1e-9);
  m.def("infidelity", &infidelity, py::arg("u"), py::arg("v"));

  py::class_<SynthesisResult>(m, "SynthesisResult")
      .def_readonly("x", &SynthesisResult::x)
      .def_readonly("value", &SynthesisResult::value)
      .def_readonly("bound", &SynthesisResult::bound)
      .def_readonly("gap", &SynthesisResult::gap)
      .def_readonly("relax_order", &SynthesisResult::relax_order)
      .def_property_readonly("status", [](const SynthesisResult& r) { return to_string(r.status); });
  m.def(
      "minimize",
      [](const Polynomial& p, double radius, int relax_order) {
        MinimizeConfig cfg;
        cfg.radius = radius;
        cfg.relax_order = relax_order;
        return minimize_global(p, cfg);
      },
      py::arg("p"), py::arg("radius") = 0.0, py::arg("relax_order") = 0,
      py::call_guard<py::gil_scoped_release>());

  py::class_<BenchConfig>(m, "BenchConfig")
      .def(py::init<>())
      .def_readwrite("system", &BenchConfig::system)
      .def_readwrite("qubits", &BenchConfig::qubits)
      .def_readwrite("coupling", &BenchConfig::coupling)
      .def_readwrite("controls", &BenchConfig::controls)
      .def_readwrite("piecewise", &BenchConfig::piecewise)
      .def_readwrite("order", &BenchConfig::order)
      .def_readwrite("horizon", &BenchConfig::horizon)
      .def_readwrite("trials", &BenchConfig::trials)
      .def_readwrite("seed", &BenchConfig::seed)
      .def_readwrite("relax_order", &BenchConfig::relax_order)
      .def_readwrite("ball", &BenchConfig::ball)
      .def_readwrite("threads", &BenchConfig::threads)
      .def("validate", &BenchConfig::validate)
      .def("spec", &make_spec);

  py::class_<Target>(m, "Target")
      .def_readonly("x", &Target::x)
      .def_readonly("unitary", &Target::unitary)
      .def_readonly("log", &Target::log)
      .def_readonly("rejections", &Target::rejections);
  m.def("gen_target", &gen_target, py::arg("spec"), py::arg("seed"), py::arg("trial"));

  py::class_<TrialRecord>(m, "TrialRecord")
      .def_readonly("trial", &TrialRecord::trial)
      .def_readonly("status", &TrialRecord::status)
      .def_readonly("message", &TrialRecord::message)
      .def_readonly("x_star", &TrialRecord::x_star)
      .def_readonly("x_hat", &TrialRecord::x_hat)
      .def_readonly("objective", &TrialRecord::objective)
      .def_readonly("bound", &TrialRecord::bound)
      .def_readonly("gap", &TrialRecord::gap)
      .def_readonly("infid_gen", &TrialRecord::infid_gen)
      .def_readonly("infid_prop", &TrialRecord::infid_prop)
      .def_readonly("total_ms", &TrialRecord::total_ms)
      .def("ok", &TrialRecord::ok);
  m.def(
      "synthesize",
      [](const BenchConfig& cfg, const Target& target) {
        cfg.validate();
        return synthesize(make_spec(cfg), cfg.order, target, make_minimize_config(cfg));
      },
      py::arg("config"), py::arg("target"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "run_fidelity_bench",
      [](const BenchConfig& cfg) { return run_fidelity_bench(cfg).records; }, py::arg("config"),
      py::call_guard<py::gil_scoped_release>());
}
