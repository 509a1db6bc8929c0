#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbnet/policy.hpp"
#include "rbnet/protocol.hpp"

namespace rbnet {

// Every enabled communication step of c, ordered by broadcaster, then
// (message, broadcaster target), then receiver choices lexicographically.
std::vector<CommStep> enabled_communications(const Protocol& protocol, const Config& c);

// Every reconfiguration step the policy's per-step budget allows on c whose
// result satisfies the policy's topology predicates; includes the trivial
// step when the input itself satisfies them. Throws BudgetUnbounded for
// Unconstrained with more than 6 nodes and for the balanced regime, which
// has no per-step budget.
std::vector<ReconfStep> successor_reconfigurations(const Config& c, const ConstraintPolicy& policy);

// Node multiset per state; exact for unconstrained reconfiguration, where
// any subset of receptive nodes can be the broadcaster's neighborhood.
struct AbstractConfig {
  std::vector<int64_t> counts;

  int64_t total() const;
  bool operator==(const AbstractConfig&) const = default;
  bool operator<(const AbstractConfig& o) const { return counts < o.counts; }
};

std::vector<AbstractConfig> abstract_step(const Protocol& protocol, const AbstractConfig& a);
// All multisets reachable from any n-node initial multiset.
std::vector<AbstractConfig> abstract_reachable(const Protocol& protocol, int32_t n);
// True when some reachable n-node multiset has support inside the target set.
bool abstract_synchronizable(const Protocol& protocol, int32_t n);

enum class Verdict : uint8_t { FoundWitness, ExhaustedNoWitness, BudgetExceeded };
const char* verdict_name(Verdict v);

enum class InitialEdges : uint8_t { All, EmptyOnly };

struct SearchBudget {
  int64_t max_states = 5'000'000;
  int32_t max_depth = 200;
  int32_t threads = 1;
  // Relaxation rounds for the balanced decision; 0 picks a default.
  int64_t max_rounds = 0;
};

struct SearchStats {
  int64_t states = 0;
  int64_t frontier_peak = 0;
  int32_t depth = 0;
};

struct SearchResult {
  Verdict verdict = Verdict::ExhaustedNoWitness;
  std::optional<Execution> witness;
  SearchStats stats;
};

// Breadth-first search over isomorphism-reduced configurations for an
// execution from an n-node initial configuration that visits an all-target
// configuration under the policy. ExhaustedNoWitness is a proof for this n.
// The balanced regime is decided exactly via shortest-path relaxation over
// the configuration graph instead of BFS.
SearchResult search_synchronizing_execution(const Protocol& protocol, int32_t n,
                                            const ConstraintPolicy& policy,
                                            const SearchBudget& budget = {},
                                            InitialEdges initial_edges = InitialEdges::All);

}  // namespace rbnet
