#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <utility>
#include <vector>

#include "rbnet/errors.hpp"
#include "rbnet/execution.hpp"
#include "rbnet/graph.hpp"
#include "rbnet/minsky.hpp"
#include "rbnet/petri.hpp"
#include "rbnet/policy.hpp"
#include "rbnet/protocol.hpp"
#include "rbnet/saturation.hpp"
#include "rbnet/semantics.hpp"
#include "rbnet/transforms.hpp"

namespace py = pybind11;
using namespace rbnet;

namespace {

std::vector<Edge> edges_from_pairs(const std::vector<std::pair<int32_t, int32_t>>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [u, v] : pairs) edges.emplace_back(u, v);
  return edges;
}

std::vector<std::pair<int32_t, int32_t>> pairs_from_edges(const std::vector<Edge>& edges) {
  std::vector<std::pair<int32_t, int32_t>> pairs;
  pairs.reserve(edges.size());
  for (const Edge& e : edges) pairs.emplace_back(e.u, e.v);
  return pairs;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "verification toolkit for reconfigurable broadcast networks";
  py::register_exception<Error>(m, "Error");

  py::enum_<ActionKind>(m, "ActionKind")
      .value("Broadcast", ActionKind::Broadcast)
      .value("Receive", ActionKind::Receive);

  py::class_<Transition>(m, "Transition")
      .def_readonly("source", &Transition::source)
      .def_readonly("kind", &Transition::kind)
      .def_readonly("message", &Transition::message)
      .def_readonly("target", &Transition::target);

  py::class_<Protocol>(m, "Protocol")
      .def_static("parse", &Protocol::parse, py::arg("text"))
      .def_static("load", &Protocol::load_file, py::arg("path"))
      .def_property_readonly("num_states", &Protocol::num_states)
      .def_property_readonly("num_messages", &Protocol::num_messages)
      .def("state_name", &Protocol::state_name, py::arg("state"))
      .def("message_name", &Protocol::message_name, py::arg("message"))
      .def("state_id", &Protocol::state_id, py::arg("name"))
      .def("message_id", &Protocol::message_id, py::arg("name"))
      .def_property_readonly("initial_states", &Protocol::initial_states)
      .def_property_readonly("target_set",
                             [](const Protocol& p) { return p.target_set(); })
      .def("is_initial", &Protocol::is_initial, py::arg("state"))
      .def("is_target", &Protocol::is_target, py::arg("state"))
      .def_property_readonly("transitions",
                             [](const Protocol& p) { return p.transitions(); })
      .def("to_dsl", &Protocol::to_dsl)
      .def("__repr__", [](const Protocol& p) {
        return "<Protocol states=" + std::to_string(p.num_states()) +
               " messages=" + std::to_string(p.num_messages()) + ">";
      });

  py::class_<Config>(m, "Config")
      .def(py::init([](const std::vector<int32_t>& labels,
                       const std::vector<std::pair<int32_t, int32_t>>& edges) {
             return Config(labels, edges_from_pairs(edges));
           }),
           py::arg("labels"), py::arg("edges") = std::vector<std::pair<int32_t, int32_t>>{})
      .def_property_readonly("num_nodes", &Config::num_nodes)
      .def_property_readonly("labels", [](const Config& c) { return c.labels(); })
      .def_property_readonly("edges", [](const Config& c) { return pairs_from_edges(c.edges()); })
      .def("label", &Config::label, py::arg("node"))
      .def("neighbors", &Config::neighbors, py::arg("node"))
      .def("degree", &Config::degree, py::arg("node"))
      .def("__eq__", [](const Config& a, const Config& b) { return a == b; })
      .def("__repr__", [](const Config& c) {
        return "<Config nodes=" + std::to_string(c.num_nodes()) +
               " edges=" + std::to_string(c.edges().size()) + ">";
      });

  m.def("juxtapose", &juxtapose, py::arg("a"), py::arg("b"));
  m.def("power", &power, py::arg("config"), py::arg("n"));
  m.def("distance", &distance, py::arg("a"), py::arg("b"));
  m.def("distance_strict", &distance_strict, py::arg("a"), py::arg("b"));
  m.def("node_distance", &node_distance, py::arg("a"), py::arg("b"), py::arg("node"));
  m.def("to_dot", &to_dot, py::arg("config"), py::arg("protocol"));
  m.def(
      "analyze_topology",
      [](const Config& c) {
        const TopologyReport r = analyze_topology(c);
        py::dict d;
        d["max_degree"] = r.max_degree;
        d["longest_path_edges"] = r.longest_path_edges;
        d["diameter"] = r.diameter;
        return d;
      },
      py::arg("config"));

  py::class_<ReconfStep>(m, "ReconfStep")
      .def(py::init([](const std::vector<std::pair<int32_t, int32_t>>& add,
                       const std::vector<std::pair<int32_t, int32_t>>& remove) {
             return ReconfStep{edges_from_pairs(add), edges_from_pairs(remove)};
           }),
           py::arg("add") = std::vector<std::pair<int32_t, int32_t>>{},
           py::arg("remove") = std::vector<std::pair<int32_t, int32_t>>{})
      .def_property_readonly("add", [](const ReconfStep& s) { return pairs_from_edges(s.add); })
      .def_property_readonly("remove",
                             [](const ReconfStep& s) { return pairs_from_edges(s.remove); })
      .def_property_readonly("size", &ReconfStep::size)
      .def_property_readonly("trivial", &ReconfStep::trivial)
      .def("__eq__", [](const ReconfStep& a, const ReconfStep& b) { return a == b; });

  py::class_<CommStep>(m, "CommStep")
      .def(py::init([](int32_t from, int32_t message, int32_t to,
                       const std::vector<std::pair<int32_t, int32_t>>& recv) {
             CommStep s;
             s.from = from;
             s.message = message;
             s.to = to;
             s.recv = recv;
             return s;
           }),
           py::arg("from_node"), py::arg("message"), py::arg("to"),
           py::arg("recv") = std::vector<std::pair<int32_t, int32_t>>{})
      .def_readonly("from_node", &CommStep::from)
      .def_readonly("message", &CommStep::message)
      .def_readonly("to", &CommStep::to)
      .def_readonly("recv", &CommStep::recv)
      .def("__eq__", [](const CommStep& a, const CommStep& b) { return a == b; });

  py::class_<Execution>(m, "Execution")
      .def(py::init([](const Config& initial, const std::vector<Step>& steps) {
             return Execution{initial, steps};
           }),
           py::arg("initial"), py::arg("steps") = std::vector<Step>{})
      .def_readwrite("initial", &Execution::initial)
      .def_readwrite("steps", &Execution::steps)
      .def_property_readonly("num_comm_steps", &Execution::num_comm_steps)
      .def_property_readonly("num_reconf_steps", &Execution::num_reconf_steps)
      .def("__eq__", [](const Execution& a, const Execution& b) { return a == b; })
      .def("__repr__", [](const Execution& e) {
        return "<Execution nodes=" + std::to_string(e.initial.num_nodes()) +
               " steps=" + std::to_string(e.steps.size()) + ">";
      });

  m.def("apply_step", &apply_step, py::arg("protocol"), py::arg("config"), py::arg("step"));
  m.def("replay", &replay, py::arg("protocol"), py::arg("execution"));
  m.def("all_initial", &all_initial, py::arg("protocol"), py::arg("config"));
  m.def("all_target", &all_target, py::arg("protocol"), py::arg("config"));
  m.def("visits_target", &visits_target, py::arg("protocol"), py::arg("execution"));
  m.def("trace_from_json", &execution_from_json, py::arg("text"), py::arg("protocol"));
  m.def("trace_to_json", &execution_to_json, py::arg("execution"), py::arg("protocol"),
        py::arg("protocol_ref") = "");
  m.def("load_trace", &execution_load_file, py::arg("path"), py::arg("protocol"));

  py::class_<Bound>(m, "Bound")
      .def_static("parse", &Bound::parse, py::arg("text"))
      .def("eval", &Bound::eval, py::arg("n"))
      .def_property_readonly("diverges", &Bound::diverges)
      .def("__repr__", [](const Bound& b) { return "<Bound " + b.to_string() + ">"; })
      .def("__str__", &Bound::to_string);

  py::class_<ConstraintPolicy>(m, "ConstraintPolicy")
      .def_static("parse", &ConstraintPolicy::parse, py::arg("text"))
      .def_static("unconstrained", &ConstraintPolicy::unconstrained)
      .def_static("k_constrained", &ConstraintPolicy::k_constrained, py::arg("k"))
      .def_static("strongly_k_constrained", &ConstraintPolicy::strongly_k_constrained,
                  py::arg("k"))
      .def_static("k_balanced", &ConstraintPolicy::k_balanced, py::arg("k"))
      .def_static("k_locally_constrained", &ConstraintPolicy::k_locally_constrained, py::arg("k"))
      .def_static("f_constrained", &ConstraintPolicy::f_constrained, py::arg("f"))
      .def_readwrite("degree_bound", &ConstraintPolicy::degree_bound)
      .def_readwrite("path_bound", &ConstraintPolicy::path_bound)
      .def("__repr__",
           [](const ConstraintPolicy& p) { return "<ConstraintPolicy " + p.regime_string() + ">"; })
      .def("__str__", &ConstraintPolicy::regime_string);

  py::class_<CheckEntry>(m, "CheckEntry")
      .def_readonly("name", &CheckEntry::name)
      .def_readonly("ok", &CheckEntry::ok)
      .def_readonly("first_violation", &CheckEntry::first_violation)
      .def_readonly("detail", &CheckEntry::detail);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("ok", &ValidationReport::ok)
      .def_readonly("num_comm", &ValidationReport::num_comm)
      .def_readonly("num_reconf_steps", &ValidationReport::num_reconf_steps)
      .def_readonly("total_rewired", &ValidationReport::total_rewired)
      .def_readonly("checks", &ValidationReport::checks);

  m.def("validate_execution", &validate_execution, py::arg("protocol"), py::arg("execution"),
        py::arg("policy"));
  m.def(
      "potential_sequence",
      [](const Execution& e, int64_t k) {
        const PotentialInfo info = potential_sequence(e, k);
        py::dict d;
        d["values"] = info.values;
        d["tape"] = info.tape;
        d["kappa"] = info.kappa;
        py::list phases;
        for (const PhaseInfo& ph : info.phases) {
          py::dict pd;
          pd["begin"] = ph.begin;
          pd["end"] = ph.end;
          pd["nonneg"] = ph.nonneg;
          pd["kappa"] = ph.kappa;
          phases.append(pd);
        }
        d["phases"] = phases;
        return d;
      },
      py::arg("execution"), py::arg("k"));

  py::enum_<Verdict>(m, "Verdict")
      .value("FoundWitness", Verdict::FoundWitness)
      .value("ExhaustedNoWitness", Verdict::ExhaustedNoWitness)
      .value("BudgetExceeded", Verdict::BudgetExceeded);

  py::enum_<InitialEdges>(m, "InitialEdges")
      .value("All", InitialEdges::All)
      .value("EmptyOnly", InitialEdges::EmptyOnly);

  py::class_<SearchBudget>(m, "SearchBudget")
      .def(py::init<>())
      .def_readwrite("max_states", &SearchBudget::max_states)
      .def_readwrite("max_depth", &SearchBudget::max_depth)
      .def_readwrite("threads", &SearchBudget::threads)
      .def_readwrite("max_rounds", &SearchBudget::max_rounds);

  py::class_<SearchStats>(m, "SearchStats")
      .def_readonly("states", &SearchStats::states)
      .def_readonly("frontier_peak", &SearchStats::frontier_peak)
      .def_readonly("depth", &SearchStats::depth);

  py::class_<SearchResult>(m, "SearchResult")
      .def_readonly("verdict", &SearchResult::verdict)
      .def_readonly("witness", &SearchResult::witness)
      .def_readonly("stats", &SearchResult::stats);

  m.def("search_synchronizing_execution", &search_synchronizing_execution, py::arg("protocol"),
        py::arg("nodes"), py::arg("policy"), py::arg("budget") = SearchBudget{},
        py::arg("initial_edges") = InitialEdges::All);
  m.def("abstract_synchronizable", &abstract_synchronizable, py::arg("protocol"),
        py::arg("nodes"));

  py::class_<SaturationCertificate>(m, "SaturationCertificate")
      .def_readonly("synchronizable", &SaturationCertificate::synchronizable)
      .def_readonly("final_set", &SaturationCertificate::final_set)
      .def_readonly("iterations", &SaturationCertificate::iterations);

  m.def("decide_synchronization_unconstrained", &decide_synchronization_unconstrained,
        py::arg("protocol"));
  m.def("decide_coverability_unconstrained", &decide_coverability_unconstrained,
        py::arg("protocol"), py::arg("state"));
  m.def("forward_saturation", &forward_saturation, py::arg("protocol"), py::arg("seed"),
        py::arg("restrict_to"));
  m.def("backward_saturation", &backward_saturation, py::arg("protocol"), py::arg("seed"),
        py::arg("restrict_to"));

  m.def("to_id_constrained", &to_id_constrained, py::arg("protocol"), py::arg("execution"));
  m.def("to_f_constrained", &to_f_constrained, py::arg("protocol"), py::arg("execution"),
        py::arg("f"));
  m.def("to_one_locally_constrained", &to_one_locally_constrained, py::arg("protocol"),
        py::arg("execution"));
  m.def("lift_one_to_k", &lift_one_to_k, py::arg("protocol"), py::arg("execution"), py::arg("k"));
  m.def("weak_to_strong", &weak_to_strong, py::arg("protocol"), py::arg("execution"),
        py::arg("k"));
  m.def("balanced_to_constrained_k1", &balanced_to_constrained_k1, py::arg("protocol"),
        py::arg("execution"), py::arg("copies"));

  py::class_<MinskyMachine>(m, "MinskyMachine")
      .def_static("parse", &MinskyMachine::parse, py::arg("text"))
      .def_static("load", &MinskyMachine::load_file, py::arg("path"))
      .def_readonly("locations", &MinskyMachine::locations)
      .def("__repr__", [](const MinskyMachine& mm) {
        return "<MinskyMachine locations=" + std::to_string(mm.locations.size()) + ">";
      });

  m.def("encode_minsky", &encode_minsky, py::arg("machine"));

  py::class_<PetriTransition>(m, "PetriTransition")
      .def_readonly("name", &PetriTransition::name)
      .def_readonly("pre", &PetriTransition::pre)
      .def_readonly("post", &PetriTransition::post);

  py::class_<PetriNet>(m, "PetriNet")
      .def_readonly("places", &PetriNet::places)
      .def_readonly("transitions", &PetriNet::transitions)
      .def_readonly("initial_marking", &PetriNet::initial_marking)
      .def_readonly("final_marking", &PetriNet::final_marking)
      .def("place_id", &PetriNet::place_id, py::arg("name"))
      .def("__eq__", [](const PetriNet& a, const PetriNet& b) { return a == b; })
      .def("__repr__", [](const PetriNet& n) {
        return "<PetriNet places=" + std::to_string(n.places.size()) +
               " transitions=" + std::to_string(n.transitions.size()) + ">";
      });

  py::class_<PetriReachability> reach(m, "PetriReachability");
  py::enum_<PetriReachability::Status>(reach, "Status")
      .value("Reached", PetriReachability::Status::Reached)
      .value("NotReachedWithinCap", PetriReachability::Status::NotReachedWithinCap)
      .value("BudgetExceeded", PetriReachability::Status::BudgetExceeded);
  reach.def_readonly("status", &PetriReachability::status)
      .def_readonly("firing", &PetriReachability::firing)
      .def_readonly("explored", &PetriReachability::explored);

  m.def("compile_to_petri", &compile_to_petri, py::arg("protocol"), py::arg("k"));
  m.def(
      "bounded_marking_reachability",
      [](const PetriNet& net, int64_t token_cap, int64_t max_markings) {
        return bounded_marking_reachability(net, token_cap, max_markings);
      },
      py::arg("net"), py::arg("token_cap"), py::arg("max_markings") = 2'000'000);
  m.def("replay_firing", &replay_firing, py::arg("net"), py::arg("firing"));
  m.def("export_net", &export_net, py::arg("net"), py::arg("format"));
  m.def("import_net", &import_net, py::arg("text"), py::arg("format"));
}
