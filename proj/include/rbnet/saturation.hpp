#pragma once

#include <cstdint>
#include <vector>

#include "rbnet/protocol.hpp"

namespace rbnet {

struct SaturationIteration {
  std::vector<int32_t> forward;
  std::vector<int32_t> backward;
};

// Certificate for the unconstrained synchronization decision: the final
// fixpoint set together with the per-iteration forward/backward sets.
struct SaturationCertificate {
  bool synchronizable = false;
  std::vector<int32_t> final_set;
  int64_t iterations = 0;
  std::vector<SaturationIteration> history;
};

// Least fixpoint of: start from seed within restrict_to; a broadcast
// (q,!m,q') with q in the set and q' in restrict_to adds q'; a receive
// (p,?m,p') with p in the set and p' in restrict_to adds p' once some
// broadcast of m can fire inside the set/restriction.
std::vector<int32_t> forward_saturation(const Protocol& protocol,
                                        const std::vector<int32_t>& seed,
                                        const std::vector<int32_t>& restrict_to);

// forward_saturation on the protocol with every transition reversed.
std::vector<int32_t> backward_saturation(const Protocol& protocol,
                                         const std::vector<int32_t>& seed,
                                         const std::vector<int32_t>& restrict_to);

// Iterated intersection of forward closure from the initial states and
// backward closure from the target states, both restricted to the current
// set; synchronizable iff the fixpoint is nonempty.  Sound and complete
// for unconstrained reconfiguration at some node count.
SaturationCertificate decide_synchronization_unconstrained(const Protocol& protocol);

// Can some reachable configuration contain a node in state f.
bool decide_coverability_unconstrained(const Protocol& protocol, int32_t f);

}  // namespace rbnet
