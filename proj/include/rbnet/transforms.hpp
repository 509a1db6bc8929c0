#pragma once

#include <cstdint>

#include "rbnet/execution.hpp"
#include "rbnet/policy.hpp"

namespace rbnet {

class Protocol;

// Every transform replays its input, builds the rewritten execution, and
// machine-checks the result against the promised validator before returning.
// An output that fails its own postcondition raises InternalError.

// Inserts one rewiring step before each communication so the broadcaster's
// neighborhood matches the recorded receivers exactly; the input's own
// reconfiguration steps are dropped. Output passes FConstrained(Identity),
// preserves final label counts, and ends with a communication step.
Execution to_id_constrained(const Protocol& protocol, const Execution& e);

// k parallel copies of to_id_constrained(e) on disjoint nodes, where k is
// minimal with f(k * |initial|) >= |initial|. Requires f non-decreasing and
// diverging (NotDiverging otherwise) and e initial and synchronizing.
Execution to_f_constrained(const Protocol& protocol, const Execution& e, const Bound& f);

// r staggered copies, r = max reconfiguration size (at least 1). Each output
// step changes at most one edge incident to any node, so the result passes
// KLocallyConstrained(1); it ends in the r-fold power of e's final config.
// Input must start and end with a communication step.
Execution to_one_locally_constrained(const Protocol& protocol, const Execution& e);

// m copies, m = smallest even integer >= k + 2, scheduled in copy pairs with
// cross-copy padding edges so every reconfiguration step rewires exactly k
// edges. Input must be 1-constrained, initial, and synchronizing; the output
// passes both KConstrained(k) and StronglyKConstrained(k).
Execution lift_one_to_k(const Protocol& protocol, const Execution& e, int64_t k);

// Same padding engine for a weakly k-constrained input; the auxiliary copies
// replay e, so the whole output still synchronizes and passes
// StronglyKConstrained(k) on m copies.
Execution weak_to_strong(const Protocol& protocol, const Execution& e, int64_t k);

// Schedules N copies of a 1-balanced execution into a single 1-constrained
// one: every output reconfiguration changes at most one edge. Requires
// N >= kappa^2 + kappa (InsufficientCopies otherwise) where kappa counts
// repeated atomic reconfigurations; the output runs from the N-fold power of
// e's initial configuration to the N-fold power of its final one.
Execution balanced_to_constrained_k1(const Protocol& protocol, const Execution& e, int64_t N);

}  // namespace rbnet
