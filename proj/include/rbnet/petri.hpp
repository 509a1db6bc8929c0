#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rbnet/protocol.hpp"

namespace rbnet {

// Place-transition net. Pre and post are sorted place-id multisets stored
// with repetition (an id listed twice consumes or produces two tokens).
struct PetriTransition {
  std::string name;
  std::vector<int32_t> pre;
  std::vector<int32_t> post;

  bool operator==(const PetriTransition&) const = default;
};

struct PetriNet {
  std::vector<std::string> places;
  std::vector<PetriTransition> transitions;
  std::vector<int64_t> initial_marking;
  std::vector<int64_t> final_marking;

  int32_t place_id(const std::string& name) const;

  bool operator==(const PetriNet&) const = default;
};

// Net simulating k-constrained executions over degree-at-most-1 topologies.
// Isolated nodes live in per-state places, linked nodes in per-unordered-pair
// places. Phase places pstart/psimul/pcheck/pend plus preconf_1..k carry a
// single control token: the start phase seeds any number of nodes, each
// communication hands the token to preconf_1, up to k link changes walk it
// back to psimul, and the check phase absorbs tokens of target states only.
// Reaching the final marking (one token in pend) means every seeded node
// ended in a target state. Place count is |Q| + |Q|(|Q|+1)/2 + k + 4.
PetriNet compile_to_petri(const Protocol& protocol, int64_t k);

struct PetriReachability {
  enum class Status : uint8_t { Reached, NotReachedWithinCap, BudgetExceeded };
  Status status = Status::NotReachedWithinCap;
  // Transition indices reaching the final marking; empty unless Reached.
  std::vector<int32_t> firing;
  int64_t explored = 0;
};

// Breadth-first search over markings where every place holds at most
// token_cap tokens; successors above the cap are pruned, so NotReachedWithinCap
// is only conclusive relative to the cap. on_marking, when set, sees every
// explored marking.
PetriReachability bounded_marking_reachability(
    const PetriNet& net, int64_t token_cap, int64_t max_markings = 2'000'000,
    const std::function<void(const std::vector<int64_t>&)>& on_marking = {});

// Applies the firing sequence to the initial marking; DisabledStep when some
// transition is not enabled.
std::vector<int64_t> replay_firing(const PetriNet& net, const std::vector<int32_t>& firing);

// format is "pnml" (XML) or "dotnet" (line based: `tr`, `pl`, `final` lines).
// Both formats round-trip through import_net.
std::string export_net(const PetriNet& net, const std::string& format);
PetriNet import_net(const std::string& text, const std::string& format);

}  // namespace rbnet
