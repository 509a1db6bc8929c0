#include "rbnet/protocol.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace rbnet {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NodeSetMismatch: return "NodeSetMismatch";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::InvalidNode: return "InvalidNode";
    case ErrorCode::InvalidEdge: return "InvalidEdge";
    case ErrorCode::AlternationViolation: return "AlternationViolation";
    case ErrorCode::DisabledStep: return "DisabledStep";
    case ErrorCode::AmbiguousChoice: return "AmbiguousChoice";
    case ErrorCode::NotCommBounded: return "NotCommBounded";
    case ErrorCode::NotBalanced: return "NotBalanced";
    case ErrorCode::NotDiverging: return "NotDiverging";
    case ErrorCode::InsufficientCopies: return "InsufficientCopies";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::BudgetUnbounded: return "BudgetUnbounded";
    case ErrorCode::UnknownFormat: return "UnknownFormat";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::InternalError: return "InternalError";
  }
  return "Error";
}

Protocol::Protocol(std::vector<std::string> state_names, std::vector<std::string> message_names,
                   std::vector<int32_t> initial_states, std::vector<Transition> transitions,
                   std::optional<std::vector<int32_t>> target_set)
    : state_names_(std::move(state_names)),
      message_names_(std::move(message_names)),
      initial_states_(std::move(initial_states)),
      transitions_(std::move(transitions)),
      target_set_(std::move(target_set)) {
  if (state_names_.empty()) fail(ErrorCode::ParseError, "protocol needs at least one state");
  if (message_names_.empty()) fail(ErrorCode::ParseError, "protocol needs at least one message");
  {
    std::set<std::string> seen;
    for (const auto& s : state_names_)
      if (!seen.insert(s).second) fail(ErrorCode::ParseError, "duplicate state name " + s);
    seen.clear();
    for (const auto& m : message_names_)
      if (!seen.insert(m).second) fail(ErrorCode::ParseError, "duplicate message name " + m);
  }
  auto check_state = [&](int32_t s, const char* what) {
    if (s < 0 || s >= num_states()) fail(ErrorCode::ParseError, std::string("bad state id in ") + what);
  };
  for (int32_t s : initial_states_) check_state(s, "initial states");
  std::sort(initial_states_.begin(), initial_states_.end());
  initial_states_.erase(std::unique(initial_states_.begin(), initial_states_.end()),
                        initial_states_.end());
  if (target_set_) {
    for (int32_t s : *target_set_) check_state(s, "target set");
    std::sort(target_set_->begin(), target_set_->end());
    target_set_->erase(std::unique(target_set_->begin(), target_set_->end()), target_set_->end());
  }
  for (const Transition& t : transitions_) {
    check_state(t.source, "transition");
    check_state(t.target, "transition");
    if (t.message < 0 || t.message >= num_messages())
      fail(ErrorCode::ParseError, "bad message id in transition");
  }
  std::sort(transitions_.begin(), transitions_.end());
  transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());

  broadcasts_by_state_.resize(num_states());
  receive_targets_.resize(static_cast<size_t>(num_states()) * num_messages());
  for (const Transition& t : transitions_) {
    if (t.kind == ActionKind::Broadcast) {
      broadcasts_by_state_[t.source].push_back(t);
    } else {
      receive_targets_[static_cast<size_t>(t.source) * num_messages() + t.message].push_back(
          t.target);
    }
  }
  for (auto& v : broadcasts_by_state_)
    std::sort(v.begin(), v.end(), [](const Transition& a, const Transition& b) {
      return std::tie(a.message, a.target) < std::tie(b.message, b.target);
    });
  for (auto& v : receive_targets_) std::sort(v.begin(), v.end());
}

std::optional<int32_t> Protocol::state_id(const std::string& name) const {
  for (int32_t i = 0; i < num_states(); ++i)
    if (state_names_[i] == name) return i;
  return std::nullopt;
}

std::optional<int32_t> Protocol::message_id(const std::string& name) const {
  for (int32_t i = 0; i < num_messages(); ++i)
    if (message_names_[i] == name) return i;
  return std::nullopt;
}

bool Protocol::is_initial(int32_t s) const {
  return std::binary_search(initial_states_.begin(), initial_states_.end(), s);
}

bool Protocol::is_target(int32_t s) const {
  if (!target_set_) return false;
  return std::binary_search(target_set_->begin(), target_set_->end(), s);
}

const std::vector<Transition>& Protocol::broadcasts_from(int32_t state) const {
  return broadcasts_by_state_.at(state);
}

const std::vector<int32_t>& Protocol::receive_targets(int32_t state, int32_t message) const {
  return receive_targets_.at(static_cast<size_t>(state) * num_messages() + message);
}

bool Protocol::can_receive(int32_t state, int32_t message) const {
  return !receive_targets(state, message).empty();
}

bool Protocol::message_broadcast_somewhere(int32_t message) const {
  for (int32_t s = 0; s < num_states(); ++s)
    for (const Transition& t : broadcasts_by_state_[s])
      if (t.message == message) return true;
  return false;
}

Protocol Protocol::reversed() const {
  std::vector<Transition> rev;
  rev.reserve(transitions_.size());
  for (const Transition& t : transitions_)
    rev.push_back(Transition{t.target, t.kind, t.message, t.source});
  return Protocol(state_names_, message_names_, initial_states_, std::move(rev), target_set_);
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

}  // namespace

Protocol Protocol::parse(const std::string& text) {
  std::vector<std::string> states, messages;
  std::map<std::string, int32_t> state_ids, message_ids;
  std::vector<int32_t> initial;
  std::optional<std::vector<int32_t>> target;
  struct RawTransition {
    std::string src, msg, dst;
    ActionKind kind;
    int line;
  };
  std::vector<RawTransition> raw;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto intern = [](std::vector<std::string>& names, std::map<std::string, int32_t>& ids,
                   const std::string& name) {
    auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    int32_t id = static_cast<int32_t>(names.size());
    names.push_back(name);
    ids.emplace(name, id);
    return id;
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    const std::string& head = toks[0];
    if (head == "states") {
      for (size_t i = 1; i < toks.size(); ++i) intern(states, state_ids, toks[i]);
    } else if (head == "msg") {
      for (size_t i = 1; i < toks.size(); ++i) intern(messages, message_ids, toks[i]);
    } else if (head == "init") {
      for (size_t i = 1; i < toks.size(); ++i) {
        auto it = state_ids.find(toks[i]);
        if (it == state_ids.end())
          fail(ErrorCode::ParseError,
               "line " + std::to_string(lineno) + ": unknown state " + toks[i]);
        initial.push_back(it->second);
      }
    } else if (head == "target") {
      if (!target) target.emplace();
      for (size_t i = 1; i < toks.size(); ++i) {
        auto it = state_ids.find(toks[i]);
        if (it == state_ids.end())
          fail(ErrorCode::ParseError,
               "line " + std::to_string(lineno) + ": unknown state " + toks[i]);
        target->push_back(it->second);
      }
    } else {
      // transition: <state> !msg <state>  or  <state> ?msg <state>
      if (toks.size() != 3 || toks[1].size() < 2 || (toks[1][0] != '!' && toks[1][0] != '?'))
        fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": cannot parse '" + line +
                                        "' (expected '<src> !m <dst>' or '<src> ?m <dst>')");
      RawTransition rt;
      rt.src = toks[0];
      rt.dst = toks[2];
      rt.msg = toks[1].substr(1);
      rt.kind = toks[1][0] == '!' ? ActionKind::Broadcast : ActionKind::Receive;
      rt.line = lineno;
      raw.push_back(std::move(rt));
    }
  }
  std::vector<Transition> transitions;
  for (const RawTransition& rt : raw) {
    auto s = state_ids.find(rt.src);
    auto d = state_ids.find(rt.dst);
    auto m = message_ids.find(rt.msg);
    if (s == state_ids.end())
      fail(ErrorCode::ParseError, "line " + std::to_string(rt.line) + ": unknown state " + rt.src);
    if (d == state_ids.end())
      fail(ErrorCode::ParseError, "line " + std::to_string(rt.line) + ": unknown state " + rt.dst);
    if (m == message_ids.end())
      fail(ErrorCode::ParseError,
           "line " + std::to_string(rt.line) + ": unknown message " + rt.msg);
    transitions.push_back(Transition{s->second, rt.kind, m->second, d->second});
  }
  return Protocol(std::move(states), std::move(messages), std::move(initial),
                  std::move(transitions), std::move(target));
}

Protocol Protocol::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string Protocol::to_dsl() const {
  std::ostringstream out;
  out << "states";
  for (const auto& s : state_names_) out << ' ' << s;
  out << '\n';
  out << "msg";
  for (const auto& m : message_names_) out << ' ' << m;
  out << '\n';
  out << "init";
  for (int32_t s : initial_states_) out << ' ' << state_names_[s];
  out << '\n';
  if (target_set_) {
    out << "target";
    for (int32_t s : *target_set_) out << ' ' << state_names_[s];
    out << '\n';
  }
  for (const Transition& t : transitions_) {
    out << state_names_[t.source] << ' ' << (t.kind == ActionKind::Broadcast ? '!' : '?')
        << message_names_[t.message] << ' ' << state_names_[t.target] << '\n';
  }
  return out.str();
}

}  // namespace rbnet
