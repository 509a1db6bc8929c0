#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rbnet/graph.hpp"

namespace rbnet {

class Protocol;

// Edge rewiring step; empty add and remove lists make it trivial.
struct ReconfStep {
  std::vector<Edge> add;
  std::vector<Edge> remove;

  bool trivial() const { return add.empty() && remove.empty(); }
  int64_t size() const { return static_cast<int64_t>(add.size() + remove.size()); }

  bool operator==(const ReconfStep&) const = default;
};

// One broadcast: node `from` sends `message` moving to state `to`. The step
// is enabled only when every neighbor of `from` can receive the message;
// `recv` records each neighbor's chosen post state, sorted by node.
struct CommStep {
  int32_t from = 0;
  int32_t message = 0;
  int32_t to = 0;
  std::vector<std::pair<int32_t, int32_t>> recv;

  bool operator==(const CommStep&) const = default;
};

using Step = std::variant<CommStep, ReconfStep>;

inline bool is_comm(const Step& s) { return std::holds_alternative<CommStep>(s); }
inline bool is_reconf(const Step& s) { return std::holds_alternative<ReconfStep>(s); }

struct Execution {
  Config initial;
  std::vector<Step> steps;

  int64_t num_comm_steps() const;
  int64_t num_reconf_steps() const;

  bool operator==(const Execution&) const = default;
};

Config apply_reconf(const Config& c, const ReconfStep& step);
Config apply_comm(const Protocol& protocol, const Config& c, const CommStep& step);
Config apply_step(const Protocol& protocol, const Config& c, const Step& step);

// All configurations visited, starting with e.initial. Throws
// AlternationViolation when two adjacent steps have the same kind and
// DisabledStep / InvalidEdge when a step does not apply.
std::vector<Config> replay(const Protocol& protocol, const Execution& e);

bool all_initial(const Protocol& protocol, const Config& c);
bool all_target(const Protocol& protocol, const Config& c);

// True when some visited configuration has every label in the target set.
bool visits_target(const Protocol& protocol, const Execution& e);

// Trace serialization. Parsing resolves omitted broadcast targets and
// receiver choices when they are unique and throws AmbiguousChoice otherwise;
// the returned execution always has them filled in.
Execution execution_from_json(const std::string& text, const Protocol& protocol);
std::string execution_to_json(const Execution& e, const Protocol& protocol,
                              const std::string& protocol_ref = "");
Execution execution_load_file(const std::string& path, const Protocol& protocol);

}  // namespace rbnet
