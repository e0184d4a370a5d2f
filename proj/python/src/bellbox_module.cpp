#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bellbox/audit.hpp"
#include "bellbox/chsh.hpp"
#include "bellbox/correlation.hpp"
#include "bellbox/harness.hpp"
#include "bellbox/optimize.hpp"
#include "bellbox/spacetime.hpp"
#include "bellbox/version.hpp"

namespace py = pybind11;
using namespace bellbox;

PYBIND11_MODULE(_core, m) {
  m.doc() = "CHSH correlation models, causality audits, bound optimizers, and "
            "jamming light-cone geometry";
  m.attr("__version__") = kVersion;

  // correlation models
  py::enum_<ModelKind>(m, "ModelKind")
      .value("LHV_SAW", ModelKind::LhvSaw)
      .value("QUANTUM_SINGLET", ModelKind::QuantumSinglet)
      .value("SUPERQUANTUM_PR", ModelKind::SuperquantumPr)
      .value("JAMMED", ModelKind::Jammed);
  py::enum_<RampKind>(m, "RampKind")
      .value("SMOOTH_SINE", RampKind::SmoothSine)
      .value("LINEAR", RampKind::Linear);
  py::enum_<JamMode>(m, "JamMode")
      .value("CLASSICAL_SAW", JamMode::ClassicalSaw)
      .value("ZERO", JamMode::Zero);
  py::enum_<Party>(m, "Party").value("A", Party::A).value("B", Party::B);

  py::class_<CorrelationModel>(m, "CorrelationModel")
      .def_property_readonly("kind", &CorrelationModel::kind)
      .def_property_readonly("ramp", &CorrelationModel::ramp)
      .def_property_readonly("jam_mode", &CorrelationModel::jam_mode)
      .def("inner", &CorrelationModel::inner)
      .def("name", &CorrelationModel::name)
      .def("__repr__",
           [](const CorrelationModel& c) { return "CorrelationModel(" + c.name() + ")"; });

  m.def("lhv_saw", &CorrelationModel::lhv_saw);
  m.def("quantum_singlet", &CorrelationModel::quantum_singlet);
  m.def("superquantum_pr", &CorrelationModel::superquantum_pr,
        py::arg("ramp") = RampKind::SmoothSine);
  m.def("apply_jamming", &apply_jamming, py::arg("model"),
        py::arg("mode") = JamMode::ClassicalSaw);

  m.def("fold_angle", &fold_angle);
  m.def("relative_angle", &relative_angle);
  m.def("correlation", &correlation, py::arg("model"), py::arg("theta"));

  py::class_<JointDistribution>(m, "JointDistribution")
      .def_readonly("p_pp", &JointDistribution::p_pp)
      .def_readonly("p_pm", &JointDistribution::p_pm)
      .def_readonly("p_mp", &JointDistribution::p_mp)
      .def_readonly("p_mm", &JointDistribution::p_mm)
      .def("marginal_a", &JointDistribution::marginal_a)
      .def("marginal_b", &JointDistribution::marginal_b)
      .def("correlation", &JointDistribution::correlation);
  m.def("joint_distribution", &joint_distribution, py::arg("model"), py::arg("theta"));

  m.def(
      "sample_pairs",
      [](const CorrelationModel& model, double theta, long long n, std::uint64_t seed) {
        std::vector<std::pair<int, int>> out;
        out.reserve(static_cast<std::size_t>(n));
        for (long long i = 0; i < n; ++i) {
          RandomStream rng = RandomStream::derive(seed, static_cast<std::uint64_t>(i));
          out.push_back(sample_pair(model, theta, rng));
        }
        return out;
      },
      py::arg("model"), py::arg("theta"), py::arg("n"), py::arg("seed") = 42,
      "n outcome pairs; trial i uses the stream derived from (seed, i)");

  // chsh
  py::class_<SettingsQuad>(m, "SettingsQuad")
      .def(py::init([](double a, double a_prime, double b, double b_prime) {
             return SettingsQuad{a, a_prime, b, b_prime};
           }),
           py::arg("a"), py::arg("a_prime"), py::arg("b"), py::arg("b_prime"))
      .def_readwrite("a", &SettingsQuad::a)
      .def_readwrite("a_prime", &SettingsQuad::a_prime)
      .def_readwrite("b", &SettingsQuad::b)
      .def_readwrite("b_prime", &SettingsQuad::b_prime);
  py::class_<ChshTerm>(m, "ChshTerm")
      .def_readonly("name", &ChshTerm::name)
      .def_readonly("relative_angle", &ChshTerm::relative_angle)
      .def_readonly("correlation", &ChshTerm::correlation)
      .def_readonly("sign", &ChshTerm::sign);
  py::class_<ChshReport>(m, "ChshReport")
      .def_readonly("value", &ChshReport::value)
      .def_readonly("terms", &ChshReport::terms)
      .def_readonly("standard_error", &ChshReport::standard_error)
      .def_readonly("n_per_pair", &ChshReport::n_per_pair);
  m.def("canonical_quad", &canonical_quad);
  m.def("chsh_value", &chsh_value, py::arg("model"), py::arg("quad"));
  m.def("chsh_estimate", &chsh_estimate, py::arg("model"), py::arg("quad"),
        py::arg("n_per_pair"), py::arg("seed") = 42, py::arg("threads") = 1);
  m.def("chsh_grid_max", &chsh_grid_max, py::arg("model"), py::arg("n_per_axis"));

  // audits
  py::enum_<AuditMode>(m, "AuditMode")
      .value("ANALYTIC", AuditMode::Analytic)
      .value("EMPIRICAL", AuditMode::Empirical);
  py::class_<AuditReport>(m, "AuditReport")
      .def_readonly("passed", &AuditReport::passed)
      .def_readonly("max_deviation", &AuditReport::max_deviation)
      .def_readonly("threshold", &AuditReport::threshold)
      .def_readonly("mode", &AuditReport::mode)
      .def_readonly("worst_case", &AuditReport::worst_case);
  m.def("marginal", &marginal, py::arg("model"), py::arg("local"), py::arg("remote"),
        py::arg("party"));
  m.def("nonsignaling_audit_analytic",
        py::overload_cast<const CorrelationModel&, int>(&nonsignaling_audit_analytic),
        py::arg("model"), py::arg("grid_size") = 100);
  m.def("unary_audit",
        py::overload_cast<const CorrelationModel&, const CorrelationModel&, int>(&unary_audit),
        py::arg("original"), py::arg("jammed"), py::arg("grid_size") = 100);

  // optimizers
  py::enum_<OptMethod>(m, "OptMethod")
      .value("ENUMERATION", OptMethod::Enumeration)
      .value("CONTINUOUS", OptMethod::Continuous)
      .value("LINEAR_PROGRAM", OptMethod::LinearProgram);
  py::class_<DeterministicStrategy>(m, "DeterministicStrategy")
      .def_readonly("a", &DeterministicStrategy::a)
      .def_readonly("a_prime", &DeterministicStrategy::a_prime)
      .def_readonly("b", &DeterministicStrategy::b)
      .def_readonly("b_prime", &DeterministicStrategy::b_prime)
      .def("chsh", &DeterministicStrategy::chsh);
  py::class_<NsBox>(m, "NsBox")
      .def_readonly("p", &NsBox::p)
      .def("prob", py::overload_cast<int, int, int, int>(&NsBox::prob, py::const_))
      .def("correlation", &NsBox::correlation)
      .def("marginal_a", &NsBox::marginal_a)
      .def("marginal_b", &NsBox::marginal_b)
      .def("chsh", &NsBox::chsh)
      .def_static("uniform", &NsBox::uniform)
      .def_static("from_strategy", &NsBox::from_strategy);
  m.def("nonsignaling_audit_box", &nonsignaling_audit_box, py::arg("box"),
        py::arg("threshold") = 1e-9);
  py::class_<OptimumReport>(m, "OptimumReport")
      .def_readonly("value", &OptimumReport::value)
      .def_readonly("method", &OptimumReport::method)
      .def_readonly("iterations", &OptimumReport::iterations)
      .def_readonly("min_value", &OptimumReport::min_value)
      .def_readonly("strategy", &OptimumReport::strategy)
      .def_readonly("maximizers", &OptimumReport::maximizers)
      .def_readonly("angles", &OptimumReport::angles)
      .def_readonly("box", &OptimumReport::box);
  m.def("lhv_max_chsh", &lhv_max_chsh);
  m.def("tsirelson_search", &tsirelson_search, py::arg("tolerance") = 1e-6,
        py::arg("restarts") = 10, py::arg("seed") = 42);
  m.def("nonsignaling_lp_max_chsh", &nonsignaling_lp_max_chsh);

  // spacetime
  py::enum_<IntervalClass>(m, "IntervalClass")
      .value("TIMELIKE", IntervalClass::Timelike)
      .value("LIGHTLIKE", IntervalClass::Lightlike)
      .value("SPACELIKE", IntervalClass::Spacelike);
  py::class_<Event>(m, "Event")
      .def(py::init([](double t, std::vector<double> x) {
             return Event{t, std::move(x)};
           }),
           py::arg("t"), py::arg("x"))
      .def_readwrite("t", &Event::t)
      .def_readwrite("x", &Event::x)
      .def_property_readonly("dim", &Event::dim)
      .def("__repr__", [](const Event& e) { return "Event(" + emit_event(e) + ")"; });
  py::class_<JammingConfig>(m, "JammingConfig")
      .def(py::init([](Event a, Event b, Event j) {
             return JammingConfig{std::move(a), std::move(b), std::move(j)};
           }),
           py::arg("a"), py::arg("b"), py::arg("j"))
      .def_readwrite("a", &JammingConfig::a)
      .def_readwrite("b", &JammingConfig::b)
      .def_readwrite("j", &JammingConfig::j);
  py::class_<ConfigVerdict>(m, "ConfigVerdict")
      .def_readonly("premises_ok", &ConfigVerdict::premises_ok)
      .def_readonly("binary_ok", &ConfigVerdict::binary_ok)
      .def_readonly("binary_exact", &ConfigVerdict::binary_exact)
      .def_readonly("reversal", &ConfigVerdict::reversal)
      .def_readonly("witness", &ConfigVerdict::witness)
      .def_readonly("min_slack", &ConfigVerdict::min_slack);
  m.def("interval_class", &interval_class);
  m.def("in_forward_cone", &in_forward_cone, py::arg("apex"), py::arg("p"));
  m.def("cone_slack", &cone_slack, py::arg("j"), py::arg("p"));
  m.def("overlap_earliest", &overlap_earliest);
  m.def("overlap_apex_1d", &overlap_apex_1d);
  m.def("binary_condition", &binary_condition, py::arg("config"),
        py::arg("search_budget") = 64);
  m.def("config_verdict", &config_verdict, py::arg("config"), py::arg("search_budget") = 64);
  m.def("boost_1d", &boost_1d, py::arg("event"), py::arg("v"));

  py::class_<CausalGraph::Node>(m, "CausalNode")
      .def_readonly("config", &CausalGraph::Node::config)
      .def_readonly("role", &CausalGraph::Node::role)
      .def_readonly("event", &CausalGraph::Node::event);
  py::class_<CausalGraph>(m, "CausalGraph")
      .def_readonly("nodes", &CausalGraph::nodes)
      .def_readonly("acyclic", &CausalGraph::acyclic)
      .def_readonly("cycle", &CausalGraph::cycle)
      .def_property_readonly("edges", [](const CausalGraph& g) {
        std::vector<std::tuple<int, int, std::string>> out;
        for (const auto& e : g.edges) {
          const char* kind = e.kind == CausalGraph::EdgeKind::Causal
                                 ? "causal"
                                 : (e.kind == CausalGraph::EdgeKind::Jamming ? "jamming"
                                                                             : "both");
          out.emplace_back(e.from, e.to, kind);
        }
        return out;
      });
  m.def(
      "causal_loop_check",
      [](const std::vector<JammingConfig>& configs) {
        return causal_loop_check(std::span<const JammingConfig>(configs));
      },
      py::arg("configs"));

  // harness
  m.def(
      "run_config",
      [](const std::string& text) {
        const RunResult r = run(parse_config(text));
        return py::make_tuple(r.text, r.verdict_failed);
      },
      py::arg("config_text"),
      "execute a key = value experiment config; returns (result_text, verdict_failed)");
  m.def("emit_config", &emit_config);
  m.def("parse_event", &parse_event);
}
