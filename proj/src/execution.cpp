#include "rbnet/execution.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rbnet/protocol.hpp"

namespace rbnet {

int64_t Execution::num_comm_steps() const {
  return std::count_if(steps.begin(), steps.end(), [](const Step& s) { return is_comm(s); });
}

int64_t Execution::num_reconf_steps() const {
  return std::count_if(steps.begin(), steps.end(), [](const Step& s) { return is_reconf(s); });
}

Config apply_reconf(const Config& c, const ReconfStep& step) {
  std::set<Edge> adds(step.add.begin(), step.add.end());
  std::set<Edge> removes(step.remove.begin(), step.remove.end());
  if (adds.size() != step.add.size() || removes.size() != step.remove.size())
    fail(ErrorCode::InvalidEdge, "duplicate edge in reconfiguration step");
  for (const Edge& e : adds)
    if (removes.count(e))
      fail(ErrorCode::InvalidEdge, "edge {" + std::to_string(e.u) + "," + std::to_string(e.v) +
                                       "} both added and removed");
  Config out = c;
  for (const Edge& e : step.remove) out.remove_edge(e.u, e.v);
  for (const Edge& e : step.add) out.add_edge(e.u, e.v);
  return out;
}

Config apply_comm(const Protocol& protocol, const Config& c, const CommStep& step) {
  if (step.from < 0 || step.from >= c.num_nodes())
    fail(ErrorCode::InvalidNode, "broadcaster " + std::to_string(step.from) + " out of range");
  const int32_t src = c.label(step.from);
  bool found = false;
  for (const Transition& t : protocol.broadcasts_from(src))
    if (t.message == step.message && t.target == step.to) found = true;
  if (!found)
    fail(ErrorCode::DisabledStep, "state " + protocol.state_name(src) + " has no broadcast of " +
                                      protocol.message_name(step.message) + " to " +
                                      protocol.state_name(step.to));

  // Every neighbor must be able to receive the message, otherwise the
  // broadcast is disabled.
  std::vector<int32_t> receivers = c.neighbors(step.from);
  for (int32_t w : receivers)
    if (!protocol.can_receive(c.label(w), step.message))
      fail(ErrorCode::DisabledStep, "neighbor " + std::to_string(w) + " in state " +
                                        protocol.state_name(c.label(w)) + " cannot receive " +
                                        protocol.message_name(step.message));

  if (!std::is_sorted(step.recv.begin(), step.recv.end()))
    fail(ErrorCode::InvalidSchedule, "receiver list must be sorted by node");
  std::vector<int32_t> listed;
  for (const auto& [node, target] : step.recv) listed.push_back(node);
  if (listed != receivers)
    fail(ErrorCode::DisabledStep, "receiver list must cover exactly the broadcaster's neighbors");

  Config out = c;
  out.set_label(step.from, step.to);
  for (const auto& [node, target] : step.recv) {
    const auto& options = protocol.receive_targets(c.label(node), step.message);
    if (!std::binary_search(options.begin(), options.end(), target))
      fail(ErrorCode::DisabledStep, "state " + protocol.state_name(c.label(node)) +
                                        " cannot move to " + protocol.state_name(target) +
                                        " on " + protocol.message_name(step.message));
    out.set_label(node, target);
  }
  return out;
}

Config apply_step(const Protocol& protocol, const Config& c, const Step& step) {
  if (is_comm(step)) return apply_comm(protocol, c, std::get<CommStep>(step));
  return apply_reconf(c, std::get<ReconfStep>(step));
}

std::vector<Config> replay(const Protocol& protocol, const Execution& e) {
  for (int32_t label : e.initial.labels())
    if (label < 0 || label >= protocol.num_states())
      fail(ErrorCode::LabelMismatch, "configuration label out of range for the protocol");
  std::vector<Config> configs;
  configs.reserve(e.steps.size() + 1);
  configs.push_back(e.initial);
  for (size_t i = 0; i < e.steps.size(); ++i) {
    if (i > 0 && is_comm(e.steps[i]) == is_comm(e.steps[i - 1]))
      fail(ErrorCode::AlternationViolation,
           "steps " + std::to_string(i - 1) + " and " + std::to_string(i) +
               " have the same kind; steps must alternate");
    configs.push_back(apply_step(protocol, configs.back(), e.steps[i]));
  }
  return configs;
}

bool all_initial(const Protocol& protocol, const Config& c) {
  for (int32_t label : c.labels())
    if (!protocol.is_initial(label)) return false;
  return true;
}

bool all_target(const Protocol& protocol, const Config& c) {
  if (!protocol.target_set()) return false;
  for (int32_t label : c.labels())
    if (!protocol.is_target(label)) return false;
  return true;
}

bool visits_target(const Protocol& protocol, const Execution& e) {
  for (const Config& c : replay(protocol, e))
    if (all_target(protocol, c)) return true;
  return false;
}

namespace {

using json = nlohmann::ordered_json;

json edge_list_to_json(const std::vector<Edge>& edges) {
  json out = json::array();
  for (const Edge& e : edges) out.push_back({e.u, e.v});
  return out;
}

std::vector<Edge> edge_list_from_json(const json& j) {
  std::vector<Edge> out;
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2)
      fail(ErrorCode::ParseError, "edge must be a two element array");
    out.push_back(Edge(item[0].get<int32_t>(), item[1].get<int32_t>()));
  }
  return out;
}

int32_t require_state(const Protocol& protocol, const std::string& name) {
  auto id = protocol.state_id(name);
  if (!id) fail(ErrorCode::ParseError, "unknown state " + name);
  return *id;
}

}  // namespace

std::string execution_to_json(const Execution& e, const Protocol& protocol,
                              const std::string& protocol_ref) {
  json root;
  if (!protocol_ref.empty()) root["protocol_ref"] = protocol_ref;
  json initial;
  initial["nodes"] = e.initial.num_nodes();
  json labels = json::array();
  for (int32_t label : e.initial.labels()) labels.push_back(protocol.state_name(label));
  initial["labels"] = std::move(labels);
  initial["edges"] = edge_list_to_json(e.initial.edges());
  root["initial"] = std::move(initial);
  json steps = json::array();
  for (const Step& step : e.steps) {
    json item;
    if (is_reconf(step)) {
      const auto& r = std::get<ReconfStep>(step);
      item["reconf"] = {{"add", edge_list_to_json(r.add)}, {"remove", edge_list_to_json(r.remove)}};
    } else {
      const auto& c = std::get<CommStep>(step);
      json comm;
      comm["from"] = c.from;
      comm["msg"] = protocol.message_name(c.message);
      comm["to"] = protocol.state_name(c.to);
      json recv = json::object();
      for (const auto& [node, target] : c.recv)
        recv[std::to_string(node)] = protocol.state_name(target);
      comm["recv"] = std::move(recv);
      item["comm"] = std::move(comm);
    }
    steps.push_back(std::move(item));
  }
  root["steps"] = std::move(steps);
  return root.dump(2) + "\n";
}

Execution execution_from_json(const std::string& text, const Protocol& protocol) {
  json root;
  try {
    root = json::parse(text);
  } catch (const std::exception& ex) {
    fail(ErrorCode::ParseError, std::string("invalid JSON: ") + ex.what());
  }
  if (!root.contains("initial")) fail(ErrorCode::ParseError, "trace is missing 'initial'");
  const json& initial = root["initial"];
  if (!initial.contains("labels") || !initial["labels"].is_array())
    fail(ErrorCode::ParseError, "initial configuration needs a 'labels' array");
  std::vector<int32_t> labels;
  for (const auto& name : initial["labels"])
    labels.push_back(require_state(protocol, name.get<std::string>()));
  if (initial.contains("nodes") &&
      initial["nodes"].get<int64_t>() != static_cast<int64_t>(labels.size()))
    fail(ErrorCode::ParseError, "'nodes' does not match the number of labels");
  std::vector<Edge> edges;
  if (initial.contains("edges")) edges = edge_list_from_json(initial["edges"]);

  Execution e;
  e.initial = Config(std::move(labels), std::move(edges));

  Config current = e.initial;
  bool have_prev = false;
  bool prev_comm = false;
  if (root.contains("steps")) {
    for (const auto& item : root["steps"]) {
      if (item.contains("reconf")) {
        const json& r = item["reconf"];
        ReconfStep step;
        if (r.contains("add")) step.add = edge_list_from_json(r["add"]);
        if (r.contains("remove")) step.remove = edge_list_from_json(r["remove"]);
        if (have_prev && !prev_comm)
          fail(ErrorCode::AlternationViolation, "two adjacent reconfiguration steps in trace");
        current = apply_reconf(current, step);
        e.steps.emplace_back(std::move(step));
        have_prev = true;
        prev_comm = false;
      } else if (item.contains("comm")) {
        const json& c = item["comm"];
        if (!c.contains("from") || !c.contains("msg"))
          fail(ErrorCode::ParseError, "communication step needs 'from' and 'msg'");
        CommStep step;
        step.from = c["from"].get<int32_t>();
        auto msg = protocol.message_id(c["msg"].get<std::string>());
        if (!msg) fail(ErrorCode::ParseError, "unknown message " + c["msg"].get<std::string>());
        step.message = *msg;
        if (step.from < 0 || step.from >= current.num_nodes())
          fail(ErrorCode::InvalidNode, "broadcaster out of range in trace");
        if (c.contains("to")) {
          step.to = require_state(protocol, c["to"].get<std::string>());
        } else {
          std::vector<int32_t> options;
          for (const Transition& t : protocol.broadcasts_from(current.label(step.from)))
            if (t.message == step.message) options.push_back(t.target);
          if (options.empty())
            fail(ErrorCode::DisabledStep, "broadcaster cannot send the requested message");
          if (options.size() > 1)
            fail(ErrorCode::AmbiguousChoice,
                 "broadcast target is ambiguous; specify 'to' in the trace");
          step.to = options[0];
        }
        for (int32_t w : current.neighbors(step.from)) {
          const auto& options = protocol.receive_targets(current.label(w), step.message);
          if (options.empty())
            fail(ErrorCode::DisabledStep,
                 "neighbor " + std::to_string(w) + " cannot receive the broadcast message");
          std::string key = std::to_string(w);
          if (c.contains("recv") && c["recv"].contains(key)) {
            step.recv.emplace_back(w, require_state(protocol, c["recv"][key].get<std::string>()));
          } else if (options.size() == 1) {
            step.recv.emplace_back(w, options[0]);
          } else {
            fail(ErrorCode::AmbiguousChoice,
                 "receiver " + key + " has several reception targets; specify it in 'recv'");
          }
        }
        if (have_prev && prev_comm)
          fail(ErrorCode::AlternationViolation, "two adjacent communication steps in trace");
        current = apply_comm(protocol, current, step);
        e.steps.emplace_back(std::move(step));
        have_prev = true;
        prev_comm = true;
      } else {
        fail(ErrorCode::ParseError, "step must contain 'comm' or 'reconf'");
      }
    }
  }
  return e;
}

Execution execution_load_file(const std::string& path, const Protocol& protocol) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return execution_from_json(buf.str(), protocol);
}

}  // namespace rbnet
