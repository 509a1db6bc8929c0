#include "rbnet/semantics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <thread>
#include <unordered_map>

#include "rbnet/canonical.hpp"

namespace rbnet {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::FoundWitness: return "FoundWitness";
    case Verdict::ExhaustedNoWitness: return "ExhaustedNoWitness";
    case Verdict::BudgetExceeded: return "BudgetExceeded";
  }
  return "";
}

std::vector<CommStep> enabled_communications(const Protocol& protocol, const Config& c) {
  std::vector<CommStep> out;
  for (int32_t from = 0; from < c.num_nodes(); ++from) {
    const auto nb = c.neighbors(from);
    for (const Transition& t : protocol.broadcasts_from(c.label(from))) {
      bool enabled = true;
      for (int32_t w : nb)
        if (!protocol.can_receive(c.label(w), t.message)) {
          enabled = false;
          break;
        }
      if (!enabled) continue;
      // Cartesian product of receiver choices, first neighbor most significant.
      std::vector<size_t> choice(nb.size(), 0);
      while (true) {
        CommStep step;
        step.from = from;
        step.message = t.message;
        step.to = t.target;
        for (size_t r = 0; r < nb.size(); ++r)
          step.recv.emplace_back(nb[r],
                                 protocol.receive_targets(c.label(nb[r]), t.message)[choice[r]]);
        out.push_back(std::move(step));
        size_t r = nb.size();
        while (r > 0) {
          --r;
          if (++choice[r] < protocol.receive_targets(c.label(nb[r]), t.message).size()) break;
          choice[r] = 0;
          if (r == 0) {
            r = SIZE_MAX;
            break;
          }
        }
        if (nb.empty() || r == SIZE_MAX) break;
      }
    }
  }
  return out;
}

namespace {

// Per-step budget in toggled edges; nullopt when any subset is allowed.
struct ReconfBudget {
  int64_t max_size = 0;
  bool exact = false;
  bool per_node = false;
  bool unbounded = false;
};

ReconfBudget reconf_budget(const ConstraintPolicy& policy, int32_t n) {
  ReconfBudget b;
  switch (policy.regime) {
    case Regime::Unconstrained:
      if (n > 6)
        fail(ErrorCode::BudgetUnbounded,
             "unconstrained reconfiguration enumeration supports at most 6 nodes");
      b.unbounded = true;
      return b;
    case Regime::KConstrained:
      b.max_size = policy.k;
      return b;
    case Regime::StronglyKConstrained:
      b.max_size = policy.k;
      b.exact = true;
      return b;
    case Regime::KLocallyConstrained:
      b.max_size = policy.k;
      b.per_node = true;
      return b;
    case Regime::FConstrained:
      b.max_size = std::max<int64_t>(policy.f.eval(n), 0);
      return b;
    case Regime::KBalanced:
      fail(ErrorCode::BudgetUnbounded,
           "the balanced regime bounds whole executions, not single steps");
  }
  fail(ErrorCode::InternalError, "unknown regime");
}

using u128 = unsigned __int128;

int packed_degree(u128 edges, int n, int v) {
  int d = 0;
  for (int w = 0; w < n; ++w)
    if (w != v && ((edges >> edge_bit(v, w)) & 1)) ++d;
  return d;
}

int packed_longest_path(u128 edges, int n) {
  int best = 0;
  uint32_t visited = 0;
  auto dfs = [&](auto&& self, int v, int len) -> void {
    best = std::max(best, len);
    visited |= 1u << v;
    for (int w = 0; w < n; ++w)
      if (w != v && !((visited >> w) & 1) && ((edges >> edge_bit(v, w)) & 1))
        self(self, w, len + 1);
    visited &= ~(1u << v);
  };
  for (int v = 0; v < n; ++v) dfs(dfs, v, 0);
  return best;
}

bool packed_topology_ok(u128 edges, int n, const ConstraintPolicy& policy) {
  if (policy.degree_bound)
    for (int v = 0; v < n; ++v)
      if (packed_degree(edges, n, v) > *policy.degree_bound) return false;
  if (policy.path_bound && packed_longest_path(edges, n) > *policy.path_bound) return false;
  return true;
}

// Visits toggle masks allowed by the budget in a fixed order: the trivial
// mask first, then by subset size, combinations in index order; unbounded
// budgets use plain numeric order.
template <typename F>
void for_each_toggle(int universe, const ReconfBudget& b, F&& fn) {
  if (b.unbounded) {
    const u128 limit = static_cast<u128>(1) << universe;
    for (u128 mask = 0; mask < limit; ++mask) fn(mask);
    return;
  }
  if (b.per_node) {
    // Pair index i joins nodes (u,v); track per-node toggle counts.
    std::vector<int> node_u(universe), node_v(universe);
    for (int v = 1, i = 0; i < universe; ++v)
      for (int u = 0; u < v; ++u, ++i) {
        node_u[i] = u;
        node_v[i] = v;
      }
    std::vector<int64_t> used(32, 0);
    u128 mask = 0;
    auto rec = [&](auto&& self, int i) -> void {
      if (i == universe) {
        fn(mask);
        return;
      }
      self(self, i + 1);
      if (used[node_u[i]] < b.max_size && used[node_v[i]] < b.max_size) {
        ++used[node_u[i]];
        ++used[node_v[i]];
        mask |= static_cast<u128>(1) << i;
        self(self, i + 1);
        mask &= ~(static_cast<u128>(1) << i);
        --used[node_u[i]];
        --used[node_v[i]];
      }
    };
    rec(rec, 0);
    return;
  }
  const int64_t hi = std::min<int64_t>(b.max_size, universe);
  const int64_t lo = b.exact ? hi : 0;
  if (b.exact && b.max_size > universe) return;
  for (int64_t size = lo; size <= hi; ++size) {
    if (size == 0) {
      fn(static_cast<u128>(0));
      continue;
    }
    std::vector<int> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      u128 mask = 0;
      for (int i : idx) mask |= static_cast<u128>(1) << i;
      fn(mask);
      int64_t p = size - 1;
      while (p >= 0 && idx[p] == universe - size + p) --p;
      if (p < 0) break;
      ++idx[p];
      for (int64_t q = p + 1; q < size; ++q) idx[q] = idx[q - 1] + 1;
    }
  }
}

ReconfStep toggles_to_step(const Config& c, u128 mask, int n) {
  ReconfStep step;
  for (int v = 1, i = 0; v < n; ++v)
    for (int u = 0; u < v; ++u, ++i)
      if ((mask >> i) & 1) {
        if (c.has_edge(u, v)) step.remove.push_back(Edge(u, v));
        else step.add.push_back(Edge(u, v));
      }
  return step;
}

}  // namespace

std::vector<ReconfStep> successor_reconfigurations(const Config& c,
                                                   const ConstraintPolicy& policy) {
  const PackedConfig p = pack_config(c);
  const int universe = packed_edge_universe(p.n);
  const ReconfBudget budget = reconf_budget(policy, p.n);
  std::vector<ReconfStep> out;
  for_each_toggle(universe, budget, [&](u128 mask) {
    if (!packed_topology_ok(p.edges ^ mask, p.n, policy)) return;
    out.push_back(toggles_to_step(c, mask, p.n));
  });
  return out;
}

int64_t AbstractConfig::total() const {
  return std::accumulate(counts.begin(), counts.end(), int64_t{0});
}

std::vector<AbstractConfig> abstract_step(const Protocol& protocol, const AbstractConfig& a) {
  if (static_cast<int32_t>(a.counts.size()) != protocol.num_states())
    fail(ErrorCode::PreconditionViolated, "abstract configuration size mismatch");
  std::set<std::vector<int64_t>> results;
  for (int32_t q = 0; q < protocol.num_states(); ++q) {
    if (a.counts[q] <= 0) continue;
    for (const Transition& t : protocol.broadcasts_from(q)) {
      std::vector<int64_t> base = a.counts;
      --base[q];
      // Receivers: any sub-multiset of the remaining nodes whose state can
      // receive the message, each picking one reception target.
      std::vector<int64_t> cur = base;
      auto rec = [&](auto&& self, int32_t s) -> void {
        if (s == protocol.num_states()) {
          std::vector<int64_t> done = cur;
          ++done[t.target];
          results.insert(std::move(done));
          return;
        }
        const auto& options = protocol.receive_targets(s, t.message);
        if (options.empty() || base[s] == 0) {
          self(self, s + 1);
          return;
        }
        // Split base[s] nodes into stayers plus movers per target.
        std::vector<int64_t> moves(options.size(), 0);
        auto split = [&](auto&& inner, size_t oi, int64_t remaining) -> void {
          if (oi == options.size()) {
            for (size_t m = 0; m < options.size(); ++m) {
              cur[s] -= moves[m];
              cur[options[m]] += moves[m];
            }
            self(self, s + 1);
            for (size_t m = 0; m < options.size(); ++m) {
              cur[s] += moves[m];
              cur[options[m]] -= moves[m];
            }
            return;
          }
          for (int64_t take = 0; take <= remaining; ++take) {
            moves[oi] = take;
            inner(inner, oi + 1, remaining - take);
          }
          moves[oi] = 0;
        };
        split(split, 0, base[s]);
      };
      rec(rec, 0);
    }
  }
  std::vector<AbstractConfig> out;
  out.reserve(results.size());
  for (auto& counts : results) out.push_back(AbstractConfig{counts});
  return out;
}

std::vector<AbstractConfig> abstract_reachable(const Protocol& protocol, int32_t n) {
  if (n < 1) fail(ErrorCode::PreconditionViolated, "need at least one node");
  std::set<std::vector<int64_t>> seen;
  std::vector<AbstractConfig> frontier;
  // All n-node multisets over the initial states.
  const auto& initial = protocol.initial_states();
  std::vector<int64_t> counts(protocol.num_states(), 0);
  auto seed = [&](auto&& self, size_t i, int32_t remaining) -> void {
    if (i + 1 == initial.size()) {
      counts[initial[i]] = remaining;
      if (seen.insert(counts).second) frontier.push_back(AbstractConfig{counts});
      counts[initial[i]] = 0;
      return;
    }
    for (int32_t take = 0; take <= remaining; ++take) {
      counts[initial[i]] = take;
      self(self, i + 1, remaining - take);
    }
    counts[initial[i]] = 0;
  };
  seed(seed, 0, n);
  while (!frontier.empty()) {
    std::vector<AbstractConfig> next;
    for (const AbstractConfig& a : frontier)
      for (AbstractConfig& succ : abstract_step(protocol, a))
        if (seen.insert(succ.counts).second) next.push_back(std::move(succ));
    frontier = std::move(next);
  }
  std::vector<AbstractConfig> out;
  out.reserve(seen.size());
  for (const auto& counts : seen) out.push_back(AbstractConfig{counts});
  return out;
}

bool abstract_synchronizable(const Protocol& protocol, int32_t n) {
  if (!protocol.target_set())
    fail(ErrorCode::PreconditionViolated, "protocol has no target set");
  for (const AbstractConfig& a : abstract_reachable(protocol, n)) {
    bool ok = true;
    for (int32_t q = 0; q < protocol.num_states(); ++q)
      if (a.counts[q] > 0 && !protocol.is_target(q)) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

namespace {

struct StepRec {
  uint8_t kind = 0;  // 0 seed, 1 communication, 2 reconfiguration
  uint8_t from = 0;
  uint8_t msg = 0;
  uint8_t to = 0;
  uint64_t recv = 0;  // receiver choice index, 4 bits per neighbor rank
  u128 toggles = 0;
};

struct StateRec {
  PackedConfig cfg;
  uint32_t parent = UINT32_MAX;
  uint8_t parity = 0;  // 0: communication next, 1: reconfiguration next
  StepRec step;
};

struct DedupKey {
  PackedConfig canon;
  uint8_t parity = 0;
  bool operator==(const DedupKey& o) const { return parity == o.parity && canon == o.canon; }
};

struct DedupKeyHash {
  size_t operator()(const DedupKey& k) const {
    return PackedConfigHash{}(k.canon) * 1315423911u + k.parity;
  }
};

struct Candidate {
  DedupKey key;
  StateRec rec;
};

bool packed_all_target(const Protocol& protocol, const PackedConfig& cfg) {
  for (int i = 0; i < cfg.n; ++i)
    if (!protocol.is_target(cfg.labels[i])) return false;
  return true;
}

std::vector<int> packed_neighbors(const PackedConfig& cfg, int from) {
  std::vector<int> nb;
  for (int w = 0; w < cfg.n; ++w)
    if (w != from && ((cfg.edges >> edge_bit(from, w)) & 1)) nb.push_back(w);
  return nb;
}

// Successor generation for one state, in the deterministic expansion order.
void expand_state(const Protocol& protocol, const StateRec& state, uint32_t self_index,
                  const ConstraintPolicy& policy, const ReconfBudget& budget,
                  std::vector<Candidate>& out) {
  const PackedConfig& cfg = state.cfg;
  if (state.parity == 0) {
    for (int from = 0; from < cfg.n; ++from) {
      const auto nb = packed_neighbors(cfg, from);
      for (const Transition& t : protocol.broadcasts_from(cfg.labels[from])) {
        bool enabled = true;
        for (int w : nb)
          if (!protocol.can_receive(cfg.labels[w], t.message)) {
            enabled = false;
            break;
          }
        if (!enabled) continue;
        std::vector<size_t> choice(nb.size(), 0);
        while (true) {
          Candidate cand;
          cand.rec.cfg = cfg;
          cand.rec.cfg.labels[from] = static_cast<uint8_t>(t.target);
          cand.rec.parent = self_index;
          cand.rec.parity = 1;
          cand.rec.step.kind = 1;
          cand.rec.step.from = static_cast<uint8_t>(from);
          cand.rec.step.msg = static_cast<uint8_t>(t.message);
          cand.rec.step.to = static_cast<uint8_t>(t.target);
          for (size_t r = 0; r < nb.size(); ++r) {
            const auto& options = protocol.receive_targets(cfg.labels[nb[r]], t.message);
            if (choice[r] >= 16)
              fail(ErrorCode::InternalError, "receiver fan-out exceeds packed choice width");
            cand.rec.cfg.labels[nb[r]] = static_cast<uint8_t>(options[choice[r]]);
            cand.rec.step.recv |= static_cast<uint64_t>(choice[r]) << (4 * r);
          }
          cand.key.canon = canonicalize(cand.rec.cfg);
          cand.key.parity = 1;
          out.push_back(std::move(cand));
          size_t r = nb.size();
          bool wrapped = true;
          while (r > 0) {
            --r;
            if (++choice[r] <
                protocol.receive_targets(cfg.labels[nb[r]], t.message).size()) {
              wrapped = false;
              break;
            }
            choice[r] = 0;
          }
          if (nb.empty() || wrapped) break;
        }
      }
    }
  } else {
    const int universe = packed_edge_universe(cfg.n);
    for_each_toggle(universe, budget, [&](u128 mask) {
      const u128 next_edges = cfg.edges ^ mask;
      if (!packed_topology_ok(next_edges, cfg.n, policy)) return;
      Candidate cand;
      cand.rec.cfg = cfg;
      cand.rec.cfg.edges = next_edges;
      cand.rec.parent = self_index;
      cand.rec.parity = 0;
      cand.rec.step.kind = 2;
      cand.rec.step.toggles = mask;
      cand.key.canon = canonicalize(cand.rec.cfg);
      cand.key.parity = 0;
      out.push_back(std::move(cand));
    });
  }
}

Execution build_witness(const Protocol& protocol, const std::vector<StateRec>& states,
                        uint32_t goal) {
  std::vector<uint32_t> chain;
  for (uint32_t at = goal; at != UINT32_MAX; at = states[at].parent) chain.push_back(at);
  std::reverse(chain.begin(), chain.end());
  Execution e;
  e.initial = unpack_config(states[chain[0]].cfg);
  for (size_t i = 1; i < chain.size(); ++i) {
    const StateRec& st = states[chain[i]];
    const PackedConfig& parent = states[chain[i - 1]].cfg;
    if (st.step.kind == 1) {
      CommStep step;
      step.from = st.step.from;
      step.message = st.step.msg;
      step.to = st.step.to;
      const auto nb = packed_neighbors(parent, st.step.from);
      for (size_t r = 0; r < nb.size(); ++r) {
        const auto& options = protocol.receive_targets(parent.labels[nb[r]], st.step.msg);
        step.recv.emplace_back(nb[r], options[(st.step.recv >> (4 * r)) & 15]);
      }
      e.steps.emplace_back(std::move(step));
    } else {
      const Config parent_cfg = unpack_config(parent);
      e.steps.emplace_back(toggles_to_step(parent_cfg, st.step.toggles, parent.n));
    }
  }
  return e;
}

// Non-decreasing label vectors over the initial states.
void for_each_initial_labeling(const Protocol& protocol, int32_t n,
                               const std::function<void(const std::array<uint8_t, 16>&)>& fn) {
  const auto& initial = protocol.initial_states();
  std::array<uint8_t, 16> labels{};
  auto rec = [&](auto&& self, int32_t node, size_t min_choice) -> void {
    if (node == n) {
      fn(labels);
      return;
    }
    for (size_t c = min_choice; c < initial.size(); ++c) {
      labels[node] = static_cast<uint8_t>(initial[c]);
      self(self, node + 1, c);
    }
  };
  rec(rec, 0, 0);
}

// Graph masks respecting the policy's topology bounds, ascending pair order
// with degree pruning.
void for_each_seed_graph(int32_t n, const ConstraintPolicy& policy,
                         const std::function<void(u128)>& fn) {
  const int universe = packed_edge_universe(n);
  std::vector<int> node_u(universe), node_v(universe);
  for (int v = 1, i = 0; i < universe; ++v)
    for (int u = 0; u < v; ++u, ++i) {
      node_u[i] = u;
      node_v[i] = v;
    }
  std::vector<int> degree(n, 0);
  u128 mask = 0;
  auto rec = [&](auto&& self, int i) -> void {
    if (i == universe) {
      if (!policy.path_bound || packed_longest_path(mask, n) <= *policy.path_bound) fn(mask);
      return;
    }
    self(self, i + 1);
    if (!policy.degree_bound || (degree[node_u[i]] < *policy.degree_bound &&
                                 degree[node_v[i]] < *policy.degree_bound)) {
      ++degree[node_u[i]];
      ++degree[node_v[i]];
      mask |= static_cast<u128>(1) << i;
      self(self, i + 1);
      mask &= ~(static_cast<u128>(1) << i);
      --degree[node_u[i]];
      --degree[node_v[i]];
    }
  };
  rec(rec, 0);
}

SearchResult bfs_search(const Protocol& protocol, int32_t n, const ConstraintPolicy& policy,
                        const SearchBudget& budget, InitialEdges initial_edges) {
  const ReconfBudget step_budget = reconf_budget(policy, n);

  std::vector<StateRec> states;
  std::unordered_map<DedupKey, uint32_t, DedupKeyHash> dedup;
  SearchResult result;
  result.verdict = Verdict::ExhaustedNoWitness;

  int32_t goal_state = -1;
  auto insert = [&](const DedupKey& key, const StateRec& rec) -> bool {
    auto [it, fresh] = dedup.emplace(key, static_cast<uint32_t>(states.size()));
    if (!fresh) return true;
    if (static_cast<int64_t>(states.size()) >= budget.max_states) {
      result.verdict = Verdict::BudgetExceeded;
      return false;
    }
    states.push_back(rec);
    if (packed_all_target(protocol, rec.cfg)) {
      goal_state = static_cast<int32_t>(states.size()) - 1;
      return false;
    }
    return true;
  };

  bool aborted = false;
  for_each_initial_labeling(protocol, n, [&](const std::array<uint8_t, 16>& labels) {
    if (aborted) return;
    auto seed_with = [&](u128 edges) {
      if (aborted) return;
      StateRec rec;
      rec.cfg.n = static_cast<uint8_t>(n);
      rec.cfg.labels = labels;
      rec.cfg.edges = edges;
      const PackedConfig canon = canonicalize(rec.cfg);
      rec.parity = 0;
      if (!insert(DedupKey{canon, 0}, rec)) {
        aborted = true;
        return;
      }
      if (initial_edges == InitialEdges::EmptyOnly) {
        rec.parity = 1;
        if (!insert(DedupKey{canon, 1}, rec)) aborted = true;
      }
    };
    if (initial_edges == InitialEdges::EmptyOnly) {
      seed_with(0);
    } else {
      for_each_seed_graph(n, policy, seed_with);
    }
  });

  result.stats.states = static_cast<int64_t>(states.size());
  if (goal_state >= 0) {
    result.verdict = Verdict::FoundWitness;
    result.witness = build_witness(protocol, states, goal_state);
    return result;
  }
  if (aborted) {
    result.verdict = Verdict::BudgetExceeded;
    return result;
  }

  size_t lo = 0, hi = states.size();
  const int threads = std::max(1, budget.threads);
  while (lo < hi) {
    result.stats.frontier_peak =
        std::max(result.stats.frontier_peak, static_cast<int64_t>(hi - lo));
    if (result.stats.depth >= budget.max_depth) {
      result.verdict = Verdict::BudgetExceeded;
      return result;
    }

    // Expand the level in disjoint chunks, then merge in chunk order so the
    // outcome is identical for any thread count.
    const size_t count = hi - lo;
    const size_t chunks = std::min<size_t>(threads, count);
    std::vector<std::vector<Candidate>> buffers(chunks);
    auto worker = [&](size_t c) {
      const size_t begin = lo + count * c / chunks;
      const size_t end = lo + count * (c + 1) / chunks;
      for (size_t i = begin; i < end; ++i)
        expand_state(protocol, states[i], static_cast<uint32_t>(i), policy, step_budget,
                     buffers[c]);
    };
    if (chunks <= 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (size_t c = 0; c < chunks; ++c) pool.emplace_back(worker, c);
      for (auto& t : pool) t.join();
    }
    for (const auto& buffer : buffers) {
      for (const Candidate& cand : buffer) {
        if (!insert(cand.key, cand.rec)) {
          if (goal_state >= 0) {
            result.stats.states = static_cast<int64_t>(states.size());
            result.stats.depth += 1;
            result.verdict = Verdict::FoundWitness;
            result.witness = build_witness(protocol, states, goal_state);
            return result;
          }
          result.stats.states = static_cast<int64_t>(states.size());
          return result;  // budget exceeded
        }
      }
    }
    lo = hi;
    hi = states.size();
    result.stats.depth += 1;
    result.stats.states = static_cast<int64_t>(states.size());
  }
  return result;
}

}  // namespace

SearchResult decide_balanced_synchronization(const Protocol& protocol, int32_t n, int64_t k,
                                             const SearchBudget& budget,
                                             InitialEdges initial_edges,
                                             const ConstraintPolicy& policy);

SearchResult search_synchronizing_execution(const Protocol& protocol, int32_t n,
                                            const ConstraintPolicy& policy,
                                            const SearchBudget& budget,
                                            InitialEdges initial_edges) {
  if (n < 1) fail(ErrorCode::PreconditionViolated, "need at least one node");
  if (n > 16) fail(ErrorCode::BudgetUnbounded, "explicit search supports at most 16 nodes");
  if (!protocol.target_set())
    fail(ErrorCode::PreconditionViolated, "protocol has no target set");
  if (protocol.num_states() > 256)
    fail(ErrorCode::BudgetUnbounded, "explicit search supports at most 256 states");
  if (policy.regime == Regime::KBalanced)
    return decide_balanced_synchronization(protocol, n, policy.k, budget, initial_edges, policy);
  return bfs_search(protocol, n, policy, budget, initial_edges);
}

}  // namespace rbnet
