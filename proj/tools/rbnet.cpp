// Command line frontend. JSON on stdout, human notes on stderr.
// Exit codes: 0 property holds / artifact produced, 1 property fails or no
// witness, 2 usage or input error, 3 budget exceeded.

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

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

namespace {

using nlohmann::ordered_json;

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

std::string strip_code_prefix(const rbnet::Error& err) {
  const std::string what = err.what();
  const std::string prefix = std::string(rbnet::error_code_name(err.code())) + ": ";
  return what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) rbnet::fail(rbnet::ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) rbnet::fail(rbnet::ErrorCode::ParseError, "cannot write '" + path + "'");
  out << text;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string dir_of(const std::string& path) {
  const size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string() : path.substr(0, slash + 1);
}

// Protocol for a trace: the --protocol flag, else the trace's protocol_ref
// resolved relative to the trace file.
rbnet::Protocol protocol_for_trace(const std::string& trace_path, const std::string& trace_text,
                                   const std::string& protocol_flag, std::string* ref_out) {
  if (!protocol_flag.empty()) {
    if (ref_out) *ref_out = protocol_flag;
    return rbnet::Protocol::load_file(protocol_flag);
  }
  ordered_json doc;
  try {
    doc = ordered_json::parse(trace_text);
  } catch (const std::exception& ex) {
    rbnet::fail(rbnet::ErrorCode::ParseError, std::string("trace is not valid JSON: ") + ex.what());
  }
  if (!doc.contains("protocol_ref") || !doc["protocol_ref"].is_string())
    rbnet::fail(rbnet::ErrorCode::ParseError,
                "trace has no protocol_ref; pass --protocol <file.rbn>");
  const std::string ref = doc["protocol_ref"].get<std::string>();
  if (ref_out) *ref_out = ref;
  std::ifstream direct(ref);
  if (direct) return rbnet::Protocol::load_file(ref);
  return rbnet::Protocol::load_file(dir_of(trace_path) + ref);
}

int64_t default_state_budget() {
  if (const char* env = std::getenv("RBNET_BUDGET_STATES")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
    rbnet::fail(rbnet::ErrorCode::ParseError, "RBNET_BUDGET_STATES must be a positive integer");
  }
  return rbnet::SearchBudget{}.max_states;
}

ordered_json stats_json(const rbnet::SearchStats& stats) {
  return ordered_json{
      {"states", stats.states}, {"frontier_peak", stats.frontier_peak}, {"depth", stats.depth}};
}

ordered_json checks_json(const rbnet::ValidationReport& report) {
  ordered_json checks = ordered_json::array();
  for (const rbnet::CheckEntry& c : report.checks)
    checks.push_back(ordered_json{{"name", c.name},
                                  {"ok", c.ok},
                                  {"first_violation", c.first_violation},
                                  {"detail", c.detail}});
  return checks;
}

// Transition graph of a protocol in graphviz syntax.
std::string protocol_dot(const rbnet::Protocol& protocol) {
  std::ostringstream out;
  out << "digraph protocol {\n";
  for (int32_t q = 0; q < protocol.num_states(); ++q) {
    out << "  \"" << protocol.state_name(q) << "\"";
    std::vector<std::string> attrs;
    if (protocol.is_initial(q)) attrs.push_back("shape=doublecircle");
    if (protocol.is_target(q)) attrs.push_back("style=filled fillcolor=lightgrey");
    if (!attrs.empty()) {
      out << " [";
      for (size_t i = 0; i < attrs.size(); ++i) out << (i ? " " : "") << attrs[i];
      out << "]";
    }
    out << ";\n";
  }
  for (const rbnet::Transition& t : protocol.transitions())
    out << "  \"" << protocol.state_name(t.source) << "\" -> \""
        << protocol.state_name(t.target) << "\" [label=\""
        << (t.kind == rbnet::ActionKind::Broadcast ? "!" : "?")
        << protocol.message_name(t.message) << "\"];\n";
  out << "}\n";
  return out.str();
}

struct CheckArgs {
  std::string protocol_path;
  std::string policy_text = "unconstrained";
  int32_t nodes = -1;
  int32_t degree_bound = -1;
  int32_t path_bound = -1;
  int64_t states = -1;
  int32_t depth = -1;
  int64_t rounds = 0;
  int32_t threads = 1;
  bool exhaust = false;
  bool stats = false;
  std::string initial_edges = "all";
  std::string witness_path;
};

int cmd_check(const CheckArgs& a) {
  const rbnet::Protocol protocol = rbnet::Protocol::load_file(a.protocol_path);
  rbnet::ConstraintPolicy policy = rbnet::ConstraintPolicy::parse(a.policy_text);
  if (a.degree_bound >= 0) policy.degree_bound = a.degree_bound;
  if (a.path_bound >= 0) policy.path_bound = a.path_bound;
  if (!protocol.target_set())
    rbnet::fail(rbnet::ErrorCode::PreconditionViolated, "protocol has no target set");

  if (a.nodes < 0) {
    if (policy.regime != rbnet::Regime::Unconstrained || policy.degree_bound || policy.path_bound)
      rbnet::fail(rbnet::ErrorCode::PreconditionViolated,
                  "constrained policies need --nodes; saturation covers only --policy unconstrained");
    const rbnet::SaturationCertificate cert = rbnet::decide_synchronization_unconstrained(protocol);
    ordered_json final_set = ordered_json::array();
    for (int32_t q : cert.final_set) final_set.push_back(protocol.state_name(q));
    emit(ordered_json{{"command", "check"},
                      {"mode", "saturation"},
                      {"policy", policy.regime_string()},
                      {"synchronizable", cert.synchronizable},
                      {"iterations", cert.iterations},
                      {"final_set", final_set}});
    std::cerr << (cert.synchronizable ? "synchronizable" : "not synchronizable")
              << " under unconstrained reconfiguration\n";
    return cert.synchronizable ? 0 : 1;
  }

  rbnet::SearchBudget budget;
  budget.max_states = a.states > 0 ? a.states : default_state_budget();
  if (a.depth > 0) budget.max_depth = a.depth;
  if (a.exhaust) budget.max_depth = std::numeric_limits<int32_t>::max();
  budget.threads = a.threads;
  budget.max_rounds = a.rounds;
  rbnet::InitialEdges edges;
  if (a.initial_edges == "all")
    edges = rbnet::InitialEdges::All;
  else if (a.initial_edges == "empty")
    edges = rbnet::InitialEdges::EmptyOnly;
  else
    rbnet::fail(rbnet::ErrorCode::ParseError, "--initial-edges must be all or empty");

  const rbnet::SearchResult result =
      rbnet::search_synchronizing_execution(protocol, a.nodes, policy, budget, edges);
  ordered_json j{{"command", "check"},
                 {"mode", "search"},
                 {"policy", policy.regime_string()},
                 {"nodes", a.nodes},
                 {"initial_edges", a.initial_edges},
                 {"verdict", rbnet::verdict_name(result.verdict)}};
  if (result.witness) {
    ordered_json w{{"num_steps", static_cast<int64_t>(result.witness->steps.size())},
                   {"num_comm", result.witness->num_comm_steps()}};
    if (!a.witness_path.empty()) {
      write_file(a.witness_path,
                 rbnet::execution_to_json(*result.witness, protocol, a.protocol_path));
      w["file"] = a.witness_path;
    }
    j["witness"] = w;
  }
  j["stats"] = stats_json(result.stats);
  emit(j);
  if (a.stats)
    std::cerr << "states=" << result.stats.states << " frontier_peak=" << result.stats.frontier_peak
              << " depth=" << result.stats.depth << "\n";
  switch (result.verdict) {
    case rbnet::Verdict::FoundWitness:
      std::cerr << "witness found\n";
      return 0;
    case rbnet::Verdict::ExhaustedNoWitness:
      std::cerr << "search space exhausted, no witness\n";
      return 1;
    case rbnet::Verdict::BudgetExceeded:
      std::cerr << "budget exceeded before a verdict\n";
      return 3;
  }
  return 2;
}

struct ValidateArgs {
  std::string trace_path;
  std::string protocol_path;
  std::string policy_text = "unconstrained";
  int32_t degree_bound = -1;
  int32_t path_bound = -1;
};

int cmd_validate(const ValidateArgs& a) {
  const std::string text = read_file(a.trace_path);
  const rbnet::Protocol protocol = protocol_for_trace(a.trace_path, text, a.protocol_path, nullptr);
  rbnet::ConstraintPolicy policy = rbnet::ConstraintPolicy::parse(a.policy_text);
  if (a.degree_bound >= 0) policy.degree_bound = a.degree_bound;
  if (a.path_bound >= 0) policy.path_bound = a.path_bound;
  const rbnet::Execution e = rbnet::execution_from_json(text, protocol);

  // Replay step by step so a failure reports its step index at exit 1
  // instead of surfacing as an input error.
  rbnet::Config cur = e.initial;
  for (size_t i = 0; i < e.steps.size(); ++i) {
    if (i > 0 && rbnet::is_comm(e.steps[i]) == rbnet::is_comm(e.steps[i - 1])) {
      emit(ordered_json{{"command", "validate"},
                        {"policy", policy.regime_string()},
                        {"ok", false},
                        {"replay_error",
                         ordered_json{{"code", "AlternationViolation"},
                                      {"step", i},
                                      {"message", "two adjacent steps of the same kind"}}}});
      std::cerr << "replay failed at step " << i << "\n";
      return 1;
    }
    try {
      cur = rbnet::apply_step(protocol, cur, e.steps[i]);
    } catch (const rbnet::Error& err) {
      emit(ordered_json{{"command", "validate"},
                        {"policy", policy.regime_string()},
                        {"ok", false},
                        {"replay_error", ordered_json{{"code", rbnet::error_code_name(err.code())},
                                                      {"step", i},
                                                      {"message", strip_code_prefix(err)}}}});
      std::cerr << "replay failed at step " << i << "\n";
      return 1;
    }
  }

  const rbnet::ValidationReport report = rbnet::validate_execution(protocol, e, policy);
  emit(ordered_json{{"command", "validate"},
                    {"policy", policy.regime_string()},
                    {"ok", report.ok},
                    {"num_comm", report.num_comm},
                    {"num_reconf_steps", report.num_reconf_steps},
                    {"total_rewired", report.total_rewired},
                    {"all_initial", rbnet::all_initial(protocol, e.initial)},
                    {"visits_target", rbnet::visits_target(protocol, e)},
                    {"checks", checks_json(report)}});
  std::cerr << (report.ok ? "valid" : "invalid") << " under " << policy.regime_string() << "\n";
  return report.ok ? 0 : 1;
}

struct TransformArgs {
  std::string trace_path;
  std::string protocol_path;
  std::string kind;
  std::string f_text = "identity";
  int64_t k = 1;
  int64_t copies = 1;
  std::string out_path;
};

int cmd_transform(const TransformArgs& a) {
  const std::string text = read_file(a.trace_path);
  std::string ref;
  const rbnet::Protocol protocol = protocol_for_trace(a.trace_path, text, a.protocol_path, &ref);
  const rbnet::Execution e = rbnet::execution_from_json(text, protocol);

  rbnet::Execution out;
  if (a.kind == "id")
    out = rbnet::to_id_constrained(protocol, e);
  else if (a.kind == "f")
    out = rbnet::to_f_constrained(protocol, e, rbnet::Bound::parse(a.f_text));
  else if (a.kind == "1loc")
    out = rbnet::to_one_locally_constrained(protocol, e);
  else if (a.kind == "lift-k")
    out = rbnet::lift_one_to_k(protocol, e, a.k);
  else if (a.kind == "strong")
    out = rbnet::weak_to_strong(protocol, e, a.k);
  else if (a.kind == "balanced")
    out = rbnet::balanced_to_constrained_k1(protocol, e, a.copies);
  else
    rbnet::fail(rbnet::ErrorCode::ParseError,
                "--kind must be one of id, f, 1loc, lift-k, strong, balanced");

  const std::string serialized = rbnet::execution_to_json(out, protocol, ref);
  if (a.out_path.empty()) {
    std::cout << serialized;
    std::cerr << "transformed trace on stdout\n";
    return 0;
  }
  write_file(a.out_path, serialized);
  emit(ordered_json{{"command", "transform"},
                    {"kind", a.kind},
                    {"nodes", out.initial.num_nodes()},
                    {"num_steps", static_cast<int64_t>(out.steps.size())},
                    {"num_comm", out.num_comm_steps()},
                    {"out", a.out_path}});
  std::cerr << "wrote " << a.out_path << "\n";
  return 0;
}

struct CompileArgs {
  std::string input_path;
  std::string target;
  int64_t k = 1;
  std::string format = "pnml";
  std::string out_path;
  int64_t verify_cap = 0;
  int64_t max_markings = 2'000'000;
};

int cmd_compile(const CompileArgs& a) {
  if (a.target == "petri") {
    const rbnet::Protocol protocol = rbnet::Protocol::load_file(a.input_path);
    const rbnet::PetriNet net = rbnet::compile_to_petri(protocol, a.k);
    const std::string text = rbnet::export_net(net, a.format);
    // Emitted artifacts must survive the toolkit's own reader.
    if (!(rbnet::import_net(text, a.format) == net))
      rbnet::fail(rbnet::ErrorCode::InternalError, "exported net does not re-import equal");
    ordered_json j{{"command", "compile"},
                   {"target", "petri"},
                   {"k", a.k},
                   {"format", a.format},
                   {"places", static_cast<int64_t>(net.places.size())},
                   {"transitions", static_cast<int64_t>(net.transitions.size())}};
    if (!a.out_path.empty()) {
      write_file(a.out_path, text);
      j["out"] = a.out_path;
    } else {
      j["text"] = text;
    }
    int rc = 0;
    if (a.verify_cap > 0) {
      const rbnet::PetriReachability r =
          rbnet::bounded_marking_reachability(net, a.verify_cap, a.max_markings);
      const char* status = r.status == rbnet::PetriReachability::Status::Reached
                               ? "Reached"
                               : r.status == rbnet::PetriReachability::Status::NotReachedWithinCap
                                     ? "NotReachedWithinCap"
                                     : "BudgetExceeded";
      j["reachability"] = ordered_json{{"status", status},
                                       {"firing_length", static_cast<int64_t>(r.firing.size())},
                                       {"explored", r.explored}};
      rc = r.status == rbnet::PetriReachability::Status::Reached
               ? 0
               : r.status == rbnet::PetriReachability::Status::NotReachedWithinCap ? 1 : 3;
    }
    emit(j);
    std::cerr << "compiled " << net.places.size() << " places, " << net.transitions.size()
              << " transitions\n";
    return rc;
  }
  if (a.target == "protocol-from-minsky") {
    const rbnet::MinskyMachine machine = rbnet::MinskyMachine::load_file(a.input_path);
    const rbnet::Protocol protocol = rbnet::encode_minsky(machine);
    const std::string dsl = protocol.to_dsl();
    rbnet::Protocol::parse(dsl);
    ordered_json j{{"command", "compile"},
                   {"target", "protocol-from-minsky"},
                   {"states", protocol.num_states()},
                   {"messages", protocol.num_messages()},
                   {"transitions", static_cast<int64_t>(protocol.transitions().size())}};
    if (!a.out_path.empty()) {
      write_file(a.out_path, dsl);
      j["out"] = a.out_path;
    } else {
      j["text"] = dsl;
    }
    emit(j);
    std::cerr << "encoded " << protocol.num_states() << " states\n";
    return 0;
  }
  rbnet::fail(rbnet::ErrorCode::ParseError, "--target must be petri or protocol-from-minsky");
}

struct DotArgs {
  std::string input_path;
  std::string protocol_path;
  std::string out_path;
  int64_t step = -1;
};

int cmd_dot(const DotArgs& a) {
  std::string dot;
  int64_t nodes = 0;
  if (ends_with(a.input_path, ".json")) {
    const std::string text = read_file(a.input_path);
    const rbnet::Protocol protocol =
        protocol_for_trace(a.input_path, text, a.protocol_path, nullptr);
    const rbnet::Execution e = rbnet::execution_from_json(text, protocol);
    const std::vector<rbnet::Config> configs = rbnet::replay(protocol, e);
    const int64_t idx = a.step < 0 ? static_cast<int64_t>(configs.size()) - 1 : a.step;
    if (idx < 0 || idx >= static_cast<int64_t>(configs.size()))
      rbnet::fail(rbnet::ErrorCode::InvalidNode, "--step out of range");
    dot = rbnet::to_dot(configs[idx], protocol);
    nodes = configs[idx].num_nodes();
  } else {
    const rbnet::Protocol protocol = rbnet::Protocol::load_file(a.input_path);
    dot = protocol_dot(protocol);
    nodes = protocol.num_states();
  }
  write_file(a.out_path, dot);
  emit(ordered_json{{"command", "dot"}, {"out", a.out_path}, {"nodes", nodes}});
  std::cerr << "wrote " << a.out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification toolkit for reconfigurable broadcast networks"};
  app.require_subcommand(1);

  CheckArgs check;
  CLI::App* c = app.add_subcommand("check", "decide synchronization for a protocol");
  c->add_option("protocol", check.protocol_path, "protocol file (.rbn)")->required();
  c->add_option("--policy", check.policy_text,
                "unconstrained | k=K | strong=K | local=K | balanced=K | f=<bound>");
  c->add_option("--nodes", check.nodes, "network size for bounded search");
  c->add_option("--degree-bound", check.degree_bound, "max degree in every configuration");
  c->add_option("--path-bound", check.path_bound, "max simple path length in every configuration");
  c->add_option("--states", check.states, "state budget (default 5000000 or RBNET_BUDGET_STATES)");
  c->add_option("--depth", check.depth, "depth budget (default 200)");
  c->add_option("--rounds", check.rounds, "relaxation round budget for balanced policies");
  c->add_option("--threads", check.threads, "worker threads for level expansion");
  c->add_flag("--exhaust", check.exhaust, "lift the depth cap so only the state budget stops search");
  c->add_flag("--stats", check.stats, "print search statistics on stderr");
  c->add_option("--initial-edges", check.initial_edges, "all | empty");
  c->add_option("--witness", check.witness_path, "write a found witness trace here");

  ValidateArgs validate;
  CLI::App* v = app.add_subcommand("validate", "replay a trace and check policy compliance");
  v->add_option("trace", validate.trace_path, "trace file (.json)")->required();
  v->add_option("--protocol", validate.protocol_path, "protocol file (.rbn)");
  v->add_option("--policy", validate.policy_text, "policy to validate against");
  v->add_option("--degree-bound", validate.degree_bound, "max degree in every configuration");
  v->add_option("--path-bound", validate.path_bound, "max simple path length in every configuration");

  TransformArgs transform;
  CLI::App* t = app.add_subcommand("transform", "rewrite a trace into a constrained regime");
  t->add_option("trace", transform.trace_path, "trace file (.json)")->required();
  t->add_option("--protocol", transform.protocol_path, "protocol file (.rbn)");
  t->add_option("--kind", transform.kind, "id | f | 1loc | lift-k | strong | balanced")->required();
  t->add_option("--f", transform.f_text,
                "bound for --kind f: identity | floor_sqrt | floor_log2 | const:K | linear:A,B");
  t->add_option("--k", transform.k, "k for --kind lift-k and strong");
  t->add_option("--copies", transform.copies, "copy count for --kind balanced");
  t->add_option("--out", transform.out_path, "output trace file (default: trace on stdout)");

  CompileArgs compile;
  CLI::App* p = app.add_subcommand("compile", "compile to a Petri net or from a counter machine");
  p->add_option("input", compile.input_path, "input file (.rbn or .mm)")->required();
  p->add_option("--target", compile.target, "petri | protocol-from-minsky")->required();
  p->add_option("--k", compile.k, "reconfiguration budget per phase for --target petri");
  p->add_option("--format", compile.format, "pnml | dotnet");
  p->add_option("--out", compile.out_path, "output file (default: text inline in JSON)");
  p->add_option("--verify-cap", compile.verify_cap,
                "run bounded marking reachability with this token cap");
  p->add_option("--max-markings", compile.max_markings, "marking budget for --verify-cap");

  DotArgs dot;
  CLI::App* d = app.add_subcommand("dot", "render a protocol or a trace configuration as graphviz");
  d->add_option("input", dot.input_path, "protocol (.rbn) or trace (.json)")->required();
  d->add_option("--protocol", dot.protocol_path, "protocol file for a trace input");
  d->add_option("--step", dot.step, "configuration index for a trace (default: final)");
  d->add_option("--out", dot.out_path, "output dot file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (c->parsed()) return cmd_check(check);
    if (v->parsed()) return cmd_validate(validate);
    if (t->parsed()) return cmd_transform(transform);
    if (p->parsed()) return cmd_compile(compile);
    if (d->parsed()) return cmd_dot(dot);
  } catch (const rbnet::Error& err) {
    emit(ordered_json{
        {"command", command},
        {"error", ordered_json{{"code", rbnet::error_code_name(err.code())},
                               {"message", strip_code_prefix(err)}}}});
    std::cerr << "error: " << err.what() << "\n";
    return err.code() == rbnet::ErrorCode::BudgetUnbounded ? 3 : 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}
