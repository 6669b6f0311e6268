#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pingpong/attacks.hpp"
#include "pingpong/control.hpp"
#include "pingpong/experiment.hpp"
#include "pingpong/protocol.hpp"
#include "pingpong/qstate.hpp"
#include "pingpong/session.hpp"

namespace py = pybind11;
using namespace pingpong;

namespace {

SubsystemLayout layout_from(const std::vector<std::pair<std::string, std::size_t>>& entries) {
  std::vector<Subsystem> subs;
  for (const auto& [label, dim] : entries) subs.push_back({label, dim});
  return SubsystemLayout(std::move(subs));
}

std::vector<std::pair<std::string, std::size_t>> layout_to(const SubsystemLayout& l) {
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& s : l.entries()) out.emplace_back(s.label, s.dim);
  return out;
}

ProtocolConfig make_cfg(std::size_t dim, const std::string& kind, std::uint64_t seed, double control_prob,
                        std::size_t cycles) {
  ProtocolConfig cfg;
  cfg.dim = dim;
  cfg.kind = parse_initial_kind(kind);
  cfg.seed = seed;
  cfg.control_prob = control_prob;
  cfg.n_cycles = cycles;
  cfg.validate();
  return cfg;
}

py::dict detection_dict(const DetectionReport& r) {
  py::dict d;
  d["analytic"] = r.analytic;
  d["empirical"] = r.empirical;
  d["trials"] = r.trials;
  d["failures"] = r.failures;
  d["ci"] = py::make_tuple(r.ci.low, r.ci.high);
  d["basis_trials"] = r.basis_trials;
  d["basis_failures"] = r.basis_failures;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Ping-pong quantum direct communication simulator";

  py::register_exception<CoherenceBreak>(m, "CoherenceBreak");

  py::class_<StateVector>(m, "StateVector")
      .def(py::init([](const std::vector<std::pair<std::string, std::size_t>>& layout, const Amplitudes& amps) {
             return StateVector(layout_from(layout), amps);
           }),
           py::arg("layout"), py::arg("amps"))
      .def_property_readonly("layout", [](const StateVector& s) { return layout_to(s.layout()); })
      .def_property_readonly("amps", [](const StateVector& s) { return Amplitudes(s.amps()); })
      .def("fidelity", &StateVector::fidelity)
      .def("__len__", &StateVector::dim);

  m.def("initial_state", [](const std::string& kind, std::size_t dim) { return make_initial_state(parse_initial_kind(kind), dim); },
        py::arg("kind"), py::arg("dim"));
  m.def("dense_encode",
        [](const StateVector& s, std::size_t mu, std::size_t nu, std::size_t dim) { return dense_encode(s, mu, nu, QuditAlgebra(dim)); },
        py::arg("state"), py::arg("mu"), py::arg("nu"), py::arg("dim"));
  m.def(
      "bob_decode",
      [](const StateVector& s, const std::string& kind, std::size_t dim) {
        const auto p = bob_decode(s, parse_initial_kind(kind), dim);
        return py::make_tuple(p.mu, p.nu);
      },
      py::arg("state"), py::arg("kind"), py::arg("dim"));
  m.def(
      "reduced_density",
      [](const StateVector& s, const std::vector<std::string>& keep) { return Matrix(partial_trace(s, keep).rho); },
      py::arg("state"), py::arg("keep"));
  m.def(
      "trace_distance",
      [](const StateVector& a, const StateVector& b, const std::vector<std::string>& keep) {
        return trace_distance(partial_trace(a, keep), partial_trace(b, keep));
      },
      py::arg("a"), py::arg("b"), py::arg("keep"));

  py::class_<Eavesdropper>(m, "Eavesdropper")
      .def_property_readonly("name", &Eavesdropper::name)
      .def_property_readonly("travel_dim", &Eavesdropper::travel_dim)
      .def_property_readonly("ancilla_layout", [](const Eavesdropper& e) { return layout_to(e.ancilla_layout()); })
      .def_property_readonly("coupling", [](const Eavesdropper& e) { return Matrix(e.coupling().matrix()); })
      .def("couple", &Eavesdropper::couple)
      .def("decouple", &Eavesdropper::decouple)
      .def(
          "validate",
          [](const Eavesdropper& e) {
            if (!e.detection() || !e.probes()) throw std::invalid_argument(e.name() + " has no state families");
            const auto r = validate_coupling(e.coupling(), *e.detection(), *e.probes(), e.travel_dim());
            return py::make_tuple(r.passed, r.max_residual);
          });

  m.def("make_attack", &make_attack, py::arg("name"), py::arg("dim") = 2, py::arg("seed") = 1);
  m.def("cpbs", [] { return Matrix(cpbs().matrix()); });

  py::class_<ControlMode>(m, "ControlMode")
      .def_property_readonly("name", &ControlMode::name)
      .def_property_readonly("dim", &ControlMode::dim)
      .def("passes", &ControlMode::passes, py::arg("basis_id"), py::arg("alice"), py::arg("bob"))
      .def("with_weights", &ControlMode::with_weights);

  m.def(
      "make_control",
      [](const std::string& name, std::size_t dim, const std::string& kind) { return make_control(name, dim, parse_initial_kind(kind)); },
      py::arg("name"), py::arg("dim") = 2, py::arg("kind") = "qubit");
  m.def(
      "analytic_pdet", [](const Eavesdropper& e, const ControlMode& c) { return analytic_pdet(e, c); }, py::arg("eve"),
      py::arg("control"));
  m.def(
      "empirical_pdet",
      [](const Eavesdropper& e, const ControlMode& c, std::size_t trials, std::uint64_t seed, unsigned jobs) {
        const auto cfg = make_cfg(c.dim(), to_string(c.kind()), seed, 1.0, 1);
        DetectionReport r;
        {
          py::gil_scoped_release release;
          r = empirical_pdet(e, c, cfg, trials, jobs);
        }
        return detection_dict(r);
      },
      py::arg("eve"), py::arg("control"), py::arg("trials"), py::arg("seed") = 1, py::arg("jobs") = 1);
  m.def(
      "wilson_interval",
      [](std::size_t k, std::size_t n) {
        const auto ci = wilson_interval(k, n);
        return py::make_tuple(ci.low, ci.high);
      },
      py::arg("successes"), py::arg("trials"));

  m.def(
      "run_session",
      [](const Eavesdropper& e, const ControlMode& c, std::size_t cycles, double control_prob, std::uint64_t seed) {
        const auto cfg = make_cfg(c.dim(), to_string(c.kind()), seed, control_prob, cycles);
        RngStream mrng(seed, 1);
        const auto stats = summarize(run_session(cfg, random_message(cfg.dim, cycles, mrng), e, c));
        py::dict d;
        d["message_cycles"] = stats.message_cycles;
        d["control_cycles"] = stats.control_cycles;
        d["control_failures"] = stats.control_failures;
        d["message_integrity"] = stats.message_integrity();
        d["eve_mu_accuracy"] = stats.eve_mu_accuracy();
        d["eve_nu_accuracy"] = stats.eve_nu_accuracy();
        return d;
      },
      py::arg("eve"), py::arg("control"), py::arg("cycles"), py::arg("control_prob") = 0.5, py::arg("seed") = 1);

  m.def(
      "run_experiments",
      [](const std::string& spec_json, const std::string& format, unsigned jobs) {
        const auto spec = parse_spec_json(spec_json);
        const auto fmt = parse_report_format(format);
        ExperimentReport rep;
        {
          py::gil_scoped_release release;
          rep = run_experiments(spec, jobs);
        }
        return render(rep, fmt);
      },
      py::arg("spec_json"), py::arg("format") = "json", py::arg("jobs") = 1);
}
