#pragma once

#include <vector>

#include "rbnet/execution.hpp"

namespace rbnet {

// Interleaving descriptor for shuffling two executions on disjoint nodes.
// First/Second advance one input; MergeReconf consumes the next step of
// both inputs, which must both be reconfigurations, as a single step.
enum class ShuffleToken { First, Second, MergeReconf };

struct ShuffleSchedule {
  std::vector<ShuffleToken> tokens;
  // With repair set, alternation violations are patched: a trivial
  // reconfiguration is inserted between adjacent communications, adjacent
  // reconfigurations are merged.  Otherwise they raise InvalidSchedule.
  bool repair = false;
};

// The shuffle of two executions: initial configuration is the juxtaposition,
// steps are interleaved per the schedule with the second input's nodes
// shifted past the first's.  The schedule must consume both inputs exactly.
Execution shuffle(const Execution& a, const Execution& b, const ShuffleSchedule& schedule);

// All of a, then all of b, with repair enabled.
ShuffleSchedule sequential_schedule(const Execution& a, const Execution& b);

}  // namespace rbnet
