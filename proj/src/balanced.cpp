// Exact decision for the balanced regime: a synchronizing execution with
// total rewiring at most k*(communications - 1) exists iff some
// communication-final state with the target flag has shortest-walk weight
// <= 0, where communications weigh -k (the first 0) and each rewired edge
// weighs +1.  Persistent negative drift is a pumpable cycle, so it also
// means yes.
#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "rbnet/canonical.hpp"
#include "rbnet/execution.hpp"
#include "rbnet/policy.hpp"
#include "rbnet/semantics.hpp"

namespace rbnet {
namespace {

using u128 = unsigned __int128;

constexpr int64_t INF = INT64_MAX / 4;
constexpr int64_t kStateLimit = 2'000'000;
constexpr int64_t kDefaultRounds = 512;
constexpr int64_t kAssemblyLimit = 5'000'000;

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

struct CommOut {
  uint32_t lp = 0;  // labeling after the broadcast
  uint8_t msg = 0;
};

// Layered state space: B-states sit right before a communication, A-states
// right after one.  The flag records whether an all-target configuration
// has been visited.
struct Node {
  uint8_t layer = 0;  // 0: B, 1: A
  uint8_t fl = 0;
  uint32_t l = 0;
  uint32_t g = 0;
  bool operator==(const Node& o) const {
    return layer == o.layer && fl == o.fl && l == o.l && g == o.g;
  }
};

uint64_t node_key(const Node& nd) {
  return nd.layer | (static_cast<uint64_t>(nd.fl) << 1) | (static_cast<uint64_t>(nd.l) << 2) |
         (static_cast<uint64_t>(nd.g) << 33);
}

// Edge arriving at a node: a communication (v, msg) or a reconfiguration.
struct StepInto {
  uint8_t kind = 0;  // 0 none, 1 communication, 2 reconfiguration
  uint8_t v = 0;
  uint8_t msg = 0;
};

using NodePath = std::vector<std::pair<Node, StepInto>>;

struct PredA {
  uint8_t kind = 0;  // 0 none, 2 step
  uint8_t v = 0;
  uint8_t msg = 0;
  uint8_t fl_src = 0;
  uint32_t l_src = 0;
};

struct PredB {
  uint8_t kind = 0;  // 0 none, 1 seed, 2 step
  uint32_t g_src = 0;
};

struct Decider {
  const Protocol& proto;
  const ConstraintPolicy& policy;
  int n;
  int64_t k;
  InitialEdges mode;

  int Q = 0;
  int pairs = 0;
  int64_t lcount = 0;
  int64_t gcount = 0;
  std::vector<int64_t> powq;
  std::vector<uint8_t> is_init_state, is_tgt_state;
  std::vector<uint8_t> is_init_l, is_tgt_l;
  std::vector<uint8_t> allowed;  // per graph, topology bounds
  std::vector<std::vector<CommOut>> comm_table;

  std::vector<int64_t> dist_a, dist_b;
  std::vector<PredA> pred_a;
  std::vector<PredB> pred_b;
  std::vector<uint8_t> live_a, live_b;

  Decider(const Protocol& p, const ConstraintPolicy& pol, int n_, int64_t k_, InitialEdges m)
      : proto(p), policy(pol), n(n_), k(k_), mode(m) {}

  size_t idx(uint8_t fl, uint32_t l, uint32_t g) const {
    return (static_cast<size_t>(fl) * lcount + l) * gcount + g;
  }
  size_t slice(uint8_t fl, uint32_t l) const { return static_cast<size_t>(fl) * lcount + l; }

  std::array<uint8_t, 16> digits(uint32_t l) const {
    std::array<uint8_t, 16> d{};
    int64_t rest = l;
    for (int i = 0; i < n; ++i) {
      d[i] = static_cast<uint8_t>(rest % Q);
      rest /= Q;
    }
    return d;
  }

  int nbr_mask(uint32_t g, int v) const {
    int m = 0;
    for (int w = 0; w < n; ++w)
      if (w != v && ((g >> edge_bit(v, w)) & 1)) m |= 1 << w;
    return m;
  }

  Config make_config(uint32_t l, uint32_t g) const {
    const auto d = digits(l);
    std::vector<int32_t> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = d[i];
    std::vector<Edge> edges;
    for (int v = 1; v < n; ++v)
      for (int u = 0; u < v; ++u)
        if ((g >> edge_bit(u, v)) & 1) edges.emplace_back(u, v);
    return Config(std::move(labels), std::move(edges));
  }

  void build_tables() {
    Q = proto.num_states();
    pairs = packed_edge_universe(n);
    if (pairs > 21)
      fail(ErrorCode::BudgetUnbounded, "balanced decision graph space exceeds the state limit");
    gcount = int64_t{1} << pairs;
    powq.assign(n + 1, 1);
    lcount = 1;
    for (int i = 0; i < n; ++i) {
      powq[i] = lcount;
      lcount *= Q;
      if (lcount > kStateLimit)
        fail(ErrorCode::BudgetUnbounded,
             "balanced decision labeling space exceeds the state limit");
    }
    powq[n] = lcount;
    if (lcount * gcount > kStateLimit)
      fail(ErrorCode::BudgetUnbounded, "balanced decision state space exceeds the state limit");

    is_init_state.assign(Q, 0);
    is_tgt_state.assign(Q, 0);
    for (int q = 0; q < Q; ++q) {
      is_init_state[q] = proto.is_initial(q) ? 1 : 0;
      is_tgt_state[q] = proto.is_target(q) ? 1 : 0;
    }
    is_init_l.assign(lcount, 0);
    is_tgt_l.assign(lcount, 0);
    for (int64_t l = 0; l < lcount; ++l) {
      const auto d = digits(static_cast<uint32_t>(l));
      bool init = true, tgt = true;
      for (int i = 0; i < n; ++i) {
        init = init && is_init_state[d[i]] != 0;
        tgt = tgt && is_tgt_state[d[i]] != 0;
      }
      is_init_l[l] = init ? 1 : 0;
      is_tgt_l[l] = tgt ? 1 : 0;
    }

    allowed.assign(gcount, 1);
    if (policy.degree_bound || policy.path_bound) {
      for (int64_t g = 0; g < gcount; ++g) {
        bool ok = true;
        if (policy.degree_bound)
          for (int v = 0; v < n && ok; ++v)
            ok = packed_degree(static_cast<u128>(g), n, v) <= *policy.degree_bound;
        if (ok && policy.path_bound)
          ok = packed_longest_path(static_cast<u128>(g), n) <= *policy.path_bound;
        allowed[g] = ok ? 1 : 0;
      }
    }

    comm_table.assign((static_cast<size_t>(lcount) * n) << n, {});
    for (int64_t l = 0; l < lcount; ++l) {
      const auto d = digits(static_cast<uint32_t>(l));
      for (int v = 0; v < n; ++v) {
        const auto& bc = proto.broadcasts_from(d[v]);
        if (bc.empty()) continue;
        for (int nb = 0; nb < (1 << n); ++nb) {
          if ((nb >> v) & 1) continue;
          auto& out = comm_table[((static_cast<size_t>(l) * n + v) << n) | nb];
          std::vector<int> nbrs;
          for (int w = 0; w < n; ++w)
            if ((nb >> w) & 1) nbrs.push_back(w);
          for (const Transition& t : bc) {
            bool enabled = true;
            for (int w : nbrs)
              if (!proto.can_receive(d[w], t.message)) {
                enabled = false;
                break;
              }
            if (!enabled) continue;
            std::vector<size_t> choice(nbrs.size(), 0);
            while (true) {
              int64_t lp = l + (t.target - d[v]) * powq[v];
              for (size_t r = 0; r < nbrs.size(); ++r) {
                const int w = nbrs[r];
                lp += (proto.receive_targets(d[w], t.message)[choice[r]] - d[w]) * powq[w];
              }
              out.push_back(CommOut{static_cast<uint32_t>(lp), static_cast<uint8_t>(t.message)});
              size_t r = nbrs.size();
              bool wrapped = true;
              while (r > 0) {
                --r;
                if (++choice[r] < proto.receive_targets(d[nbrs[r]], t.message).size()) {
                  wrapped = false;
                  break;
                }
                choice[r] = 0;
              }
              if (nbrs.empty() || wrapped) break;
            }
          }
        }
      }
    }
  }

  const std::vector<CommOut>& outs(uint32_t l, int v, int nb) const {
    return comm_table[((static_cast<size_t>(l) * n + v) << n) | nb];
  }

  bool seed_labeling(uint32_t l) const { return is_init_l[l] != 0; }
  bool seed_graph(uint32_t g) const {
    if (!allowed[g]) return false;
    return mode == InitialEdges::All || g == 0;
  }

  // Boolean forward reachability, then backward co-reachability towards
  // flagged communication-final states; only states on some seed-to-goal
  // walk take part in the weighted relaxation.
  void compute_live() {
    std::vector<uint8_t> reach_a(dist_a.size(), 0), reach_b(dist_b.size(), 0);
    std::vector<uint8_t> slice_expanded(2 * lcount, 0);
    std::vector<Node> queue;
    for (int64_t l = 0; l < lcount; ++l) {
      if (!seed_labeling(static_cast<uint32_t>(l))) continue;
      for (int64_t g = 0; g < gcount; ++g)
        if (seed_graph(static_cast<uint32_t>(g))) {
          reach_b[idx(0, l, g)] = 1;
          queue.push_back(Node{0, 0, static_cast<uint32_t>(l), static_cast<uint32_t>(g)});
        }
    }
    for (size_t head = 0; head < queue.size(); ++head) {
      const Node nd = queue[head];
      if (nd.layer == 0) {
        for (int v = 0; v < n; ++v)
          for (const CommOut& e : outs(nd.l, v, nbr_mask(nd.g, v))) {
            const uint8_t flp = nd.fl | is_tgt_l[e.lp];
            const size_t t = idx(flp, e.lp, nd.g);
            if (!reach_a[t]) {
              reach_a[t] = 1;
              queue.push_back(Node{1, flp, e.lp, nd.g});
            }
          }
      } else {
        auto& done = slice_expanded[slice(nd.fl, nd.l)];
        if (done) continue;
        done = 1;
        for (int64_t g = 0; g < gcount; ++g) {
          if (!allowed[g]) continue;
          const size_t t = idx(nd.fl, nd.l, g);
          if (!reach_b[t]) {
            reach_b[t] = 1;
            queue.push_back(Node{0, nd.fl, nd.l, static_cast<uint32_t>(g)});
          }
        }
      }
    }

    // A-states reconfigure to any allowed graph, so co-reachability is
    // uniform per (flag, labeling) slice on the A side.
    std::vector<uint8_t> co_a_slice(2 * lcount, 0);
    std::vector<uint8_t> co_b(dist_b.size(), 0);
    for (int64_t l = 0; l < lcount; ++l) co_a_slice[slice(1, static_cast<uint32_t>(l))] = 1;
    bool changed = true;
    while (changed) {
      changed = false;
      for (uint8_t fl = 0; fl < 2; ++fl)
        for (int64_t l = 0; l < lcount; ++l)
          for (int64_t g = 0; g < gcount; ++g) {
            const size_t s = idx(fl, l, g);
            if (co_b[s] || !reach_b[s]) continue;
            bool hit = false;
            for (int v = 0; v < n && !hit; ++v)
              for (const CommOut& e :
                   outs(static_cast<uint32_t>(l), v, nbr_mask(static_cast<uint32_t>(g), v))) {
                const uint8_t flp = fl | is_tgt_l[e.lp];
                if (co_a_slice[slice(flp, e.lp)]) {
                  hit = true;
                  break;
                }
              }
            if (hit) {
              co_b[s] = 1;
              co_a_slice[slice(fl, static_cast<uint32_t>(l))] = 1;
              changed = true;
            }
          }
    }

    live_a.assign(dist_a.size(), 0);
    live_b.assign(dist_b.size(), 0);
    for (uint8_t fl = 0; fl < 2; ++fl)
      for (int64_t l = 0; l < lcount; ++l) {
        const bool co = co_a_slice[slice(fl, static_cast<uint32_t>(l))] != 0;
        for (int64_t g = 0; g < gcount; ++g) {
          const size_t s = idx(fl, l, g);
          live_a[s] = (reach_a[s] && co) ? 1 : 0;
          live_b[s] = (reach_b[s] && co_b[s]) ? 1 : 0;
        }
      }
  }

  // Exact min-plus transform over the graph hypercube with unit edge costs,
  // carrying the argmin source graph.
  void hypercube(std::vector<int64_t>& d, std::vector<uint32_t>& src) const {
    for (int64_t g = 0; g < gcount; ++g) src[g] = static_cast<uint32_t>(g);
    for (int b = 0; b < pairs; ++b) {
      const int64_t step = int64_t{1} << b;
      for (int64_t g = 0; g < gcount; ++g) {
        if (g & step) continue;
        const int64_t h = g | step;
        const int64_t dg = d[g], dh = d[h];
        const uint32_t sg = src[g], sh = src[h];
        if (dh + 1 < dg) {
          d[g] = dh + 1;
          src[g] = sh;
        }
        if (dg + 1 < dh) {
          d[h] = dg + 1;
          src[h] = sg;
        }
      }
    }
  }

  SearchResult run(const SearchBudget& budget) {
    build_tables();
    SearchResult result;
    result.verdict = Verdict::ExhaustedNoWitness;

    // All-target initial labelings admit the empty execution.
    for (int32_t q = 0; q < Q; ++q)
      if (is_init_state[q] && is_tgt_state[q]) {
        std::vector<int32_t> labels(n, q);
        result.verdict = Verdict::FoundWitness;
        result.witness = Execution{Config(std::move(labels), {}), {}};
        return result;
      }

    dist_a.assign(static_cast<size_t>(2) * lcount * gcount, INF);
    dist_b.assign(dist_a.size(), INF);
    pred_a.assign(dist_a.size(), {});
    pred_b.assign(dist_b.size(), {});
    compute_live();

    int64_t live_count = 0;
    bool goal_reachable = false;
    for (size_t s = 0; s < live_a.size(); ++s) {
      live_count += live_a[s] + live_b[s];
      if (live_a[s] && s >= static_cast<size_t>(lcount) * gcount) goal_reachable = true;
    }
    result.stats.states = live_count;
    if (!goal_reachable) return result;

    const int64_t threshold = -k * (live_count + 2) - 1;
    const int64_t max_rounds = budget.max_rounds > 0 ? budget.max_rounds : kDefaultRounds;

    std::vector<uint8_t> dirty(2 * lcount, 0);
    std::vector<size_t> dirty_list;
    Node goal_node{}, breach_node{};
    bool have_goal = false, have_breach = false;

    auto relax_from_b = [&](uint8_t fl, uint32_t l, uint32_t g, int64_t weight) {
      const int64_t db = dist_b[idx(fl, l, g)];
      for (int v = 0; v < n; ++v)
        for (const CommOut& e : outs(l, v, nbr_mask(g, v))) {
          const uint8_t flp = fl | is_tgt_l[e.lp];
          const size_t t = idx(flp, e.lp, g);
          if (!live_a[t]) continue;
          const int64_t cand = db + weight;
          if (cand < dist_a[t]) {
            dist_a[t] = cand;
            pred_a[t] = PredA{2, static_cast<uint8_t>(v), e.msg, fl, l};
            if (!dirty[slice(flp, e.lp)]) {
              dirty[slice(flp, e.lp)] = 1;
              dirty_list.push_back(slice(flp, e.lp));
            }
            if (flp == 1 && cand <= 0 && !have_goal) {
              have_goal = true;
              goal_node = Node{1, flp, e.lp, g};
            }
            if (cand < threshold && !have_breach) {
              have_breach = true;
              breach_node = Node{1, flp, e.lp, g};
            }
          }
        }
    };

    // Round 1: seeds enter right before their first communication, which
    // carries weight 0.
    for (int64_t l = 0; l < lcount && !have_goal; ++l) {
      if (!seed_labeling(static_cast<uint32_t>(l))) continue;
      for (int64_t g = 0; g < gcount && !have_goal; ++g) {
        if (!seed_graph(static_cast<uint32_t>(g))) continue;
        const size_t s = idx(0, l, g);
        if (!live_b[s]) continue;
        dist_b[s] = 0;
        pred_b[s] = PredB{1, static_cast<uint32_t>(g)};
        relax_from_b(0, static_cast<uint32_t>(l), static_cast<uint32_t>(g), 0);
      }
    }

    std::vector<int64_t> tmp(gcount);
    std::vector<uint32_t> src(gcount);
    int64_t rounds = 1;
    result.stats.depth = rounds;
    while (!have_goal && !have_breach) {
      if (dirty_list.empty()) break;
      if (rounds >= max_rounds) {
        result.verdict = Verdict::BudgetExceeded;
        return result;
      }
      std::vector<size_t> work;
      work.swap(dirty_list);
      std::sort(work.begin(), work.end());
      std::fill(dirty.begin(), dirty.end(), 0);
      result.stats.frontier_peak =
          std::max(result.stats.frontier_peak, static_cast<int64_t>(work.size()));
      for (size_t sl : work) {
        if (have_goal || have_breach) break;
        const uint8_t fl = static_cast<uint8_t>(sl / lcount);
        const uint32_t l = static_cast<uint32_t>(sl % lcount);
        for (int64_t g = 0; g < gcount; ++g) tmp[g] = dist_a[idx(fl, l, g)];
        hypercube(tmp, src);
        for (int64_t g = 0; g < gcount && !have_goal && !have_breach; ++g) {
          const size_t s = idx(fl, l, g);
          if (!live_b[s] || !allowed[g]) continue;
          if (tmp[g] < dist_b[s]) {
            dist_b[s] = tmp[g];
            pred_b[s] = PredB{2, src[g]};
            relax_from_b(fl, l, static_cast<uint32_t>(g), -k);
          }
        }
      }
      ++rounds;
      result.stats.depth = rounds;
    }

    if (have_goal || have_breach) {
      try {
        result.witness = extract_witness(have_goal ? goal_node : breach_node, have_goal);
        result.verdict = Verdict::FoundWitness;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BudgetUnbounded) throw;
        result.verdict = Verdict::BudgetExceeded;
      }
      return result;
    }
    return result;  // converged without a non-positive flagged state
  }

  // The predecessor edge arriving at nd; fills prev unless nd is a seed.
  StepInto pred_edge(const Node& nd, Node& prev) const {
    if (nd.layer == 1) {
      const PredA& p = pred_a[idx(nd.fl, nd.l, nd.g)];
      if (p.kind != 2) fail(ErrorCode::InternalError, "missing communication predecessor");
      prev = Node{0, p.fl_src, p.l_src, nd.g};
      return StepInto{1, p.v, p.msg};
    }
    const PredB& p = pred_b[idx(nd.fl, nd.l, nd.g)];
    if (p.kind == 1) return StepInto{0, 0, 0};  // seed
    if (p.kind != 2) fail(ErrorCode::InternalError, "missing reconfiguration predecessor");
    prev = Node{1, nd.fl, nd.l, p.g_src};
    return StepInto{2, 0, 0};
  }

  // Forward breadth-first search over live states, fewest steps, used to
  // stitch pumped witnesses together.
  NodePath bfs_path(const std::vector<Node>& sources,
                    const std::function<bool(const Node&)>& goal) const {
    struct Item {
      Node nd;
      int64_t parent;
      StepInto step;
    };
    std::vector<Item> arena;
    std::unordered_map<uint64_t, size_t> seen;
    for (const Node& s : sources) {
      if (seen.count(node_key(s))) continue;
      seen[node_key(s)] = arena.size();
      arena.push_back(Item{s, -1, {}});
    }
    for (size_t head = 0; head < arena.size(); ++head) {
      const Item it = arena[head];
      if (goal(it.nd)) {
        NodePath path;
        for (int64_t at = static_cast<int64_t>(head); at >= 0; at = arena[at].parent)
          path.emplace_back(arena[at].nd, arena[at].step);
        std::reverse(path.begin(), path.end());
        return path;
      }
      auto visit = [&](const Node& nd, const StepInto& step, bool live) {
        if (!live) return;
        const uint64_t key = node_key(nd);
        if (seen.count(key)) return;
        seen[key] = arena.size();
        arena.push_back(Item{nd, static_cast<int64_t>(head), step});
      };
      if (it.nd.layer == 0) {
        for (int v = 0; v < n; ++v)
          for (const CommOut& e : outs(it.nd.l, v, nbr_mask(it.nd.g, v))) {
            const uint8_t flp = it.nd.fl | is_tgt_l[e.lp];
            visit(Node{1, flp, e.lp, it.nd.g}, StepInto{1, static_cast<uint8_t>(v), e.msg},
                  live_a[idx(flp, e.lp, it.nd.g)] != 0);
          }
      } else {
        for (int64_t g = 0; g < gcount; ++g) {
          if (!allowed[g]) continue;
          visit(Node{0, it.nd.fl, it.nd.l, static_cast<uint32_t>(g)}, StepInto{2, 0, 0},
                live_b[idx(it.nd.fl, it.nd.l, g)] != 0);
        }
      }
    }
    fail(ErrorCode::InternalError, "path stitching failed on a live state");
  }

  // Steps along a node path; each entry's StepInto describes the edge
  // arriving at it, the first entry is the path start.
  void append_steps(Execution& e, const NodePath& path) const {
    for (size_t i = 1; i < path.size(); ++i) {
      const Node& prev = path[i - 1].first;
      const Node& cur = path[i].first;
      const StepInto& step = path[i].second;
      if (step.kind == 1) {
        CommStep cs;
        cs.from = step.v;
        cs.message = step.msg;
        const auto d = digits(cur.l);
        cs.to = d[step.v];
        for (int w = 0; w < n; ++w)
          if (w != step.v && ((prev.g >> edge_bit(step.v, w)) & 1))
            cs.recv.emplace_back(w, d[w]);
        e.steps.emplace_back(std::move(cs));
      } else {
        ReconfStep rs;
        const uint32_t diff = prev.g ^ cur.g;
        for (int v = 1; v < n; ++v)
          for (int u = 0; u < v; ++u)
            if ((diff >> edge_bit(u, v)) & 1) {
              if ((prev.g >> edge_bit(u, v)) & 1) rs.remove.push_back(Edge(u, v));
              else rs.add.push_back(Edge(u, v));
            }
        e.steps.emplace_back(std::move(rs));
      }
    }
  }

  std::vector<Node> seed_nodes() const {
    std::vector<Node> out;
    for (int64_t l = 0; l < lcount; ++l) {
      if (!seed_labeling(static_cast<uint32_t>(l))) continue;
      for (int64_t g = 0; g < gcount; ++g)
        if (seed_graph(static_cast<uint32_t>(g)) && live_b[idx(0, l, g)])
          out.push_back(Node{0, 0, static_cast<uint32_t>(l), static_cast<uint32_t>(g)});
    }
    return out;
  }

  Execution finish(Execution e) const {
    const ValidationReport report = validate_execution(proto, e, policy);
    if (!report.ok || !visits_target(proto, e))
      fail(ErrorCode::InternalError, "constructed balanced witness failed validation");
    return e;
  }

  Execution extract_witness(const Node& from, bool from_is_goal) {
    // Walk recorded predecessors; either a seed is reached directly or the
    // walk closes a negative cycle which gets pumped.
    NodePath back;  // back[i].second = edge arriving at back[i] from back[i+1]
    std::unordered_map<uint64_t, size_t> pos;
    Node cur = from;
    back.emplace_back(cur, StepInto{});
    pos[node_key(cur)] = 0;
    while (true) {
      Node prev;
      const StepInto step = pred_edge(cur, prev);
      if (step.kind == 0) {
        if (!from_is_goal) fail(ErrorCode::InternalError, "drift walk reached a seed");
        NodePath path(back.rbegin(), back.rend());
        Execution e;
        e.initial = make_config(path.front().first.l, path.front().first.g);
        append_steps(e, path);
        return finish(std::move(e));
      }
      back.back().second = step;
      const auto it = pos.find(node_key(prev));
      if (it != pos.end()) {
        const size_t p = it->second;
        const Node entry = prev;
        // Forward cycle entry -> back[last] -> ... -> back[p] (= entry).
        NodePath cycle;
        cycle.emplace_back(entry, StepInto{});
        for (size_t i = back.size(); i-- > p;) cycle.emplace_back(back[i].first, back[i].second);
        // Forward tail entry -> back[p-1] -> ... -> back[0] (= from).
        NodePath tail;
        tail.emplace_back(entry, StepInto{});
        for (size_t i = p; i-- > 0;) tail.emplace_back(back[i].first, back[i].second);
        const NodePath p2 =
            from_is_goal ? tail
                         : bfs_path({entry},
                                    [&](const Node& nd) { return nd.layer == 1 && nd.fl == 1; });
        const NodePath p1 = bfs_path(seed_nodes(), [&](const Node& nd) { return nd == entry; });
        return finish(pump(p1, cycle, p2));
      }
      back.emplace_back(prev, StepInto{});
      pos[node_key(prev)] = back.size() - 1;
      cur = prev;
    }
  }

  // Repeats the cycle often enough that the whole execution is balanced.
  Execution pump(const NodePath& p1, const NodePath& cycle, const NodePath& p2) const {
    // Path weight with every communication at -k plus the rewired edges;
    // the single first-communication discount of +k is added afterwards.
    auto raw_weight = [&](const NodePath& path) {
      int64_t w = 0;
      for (size_t i = 1; i < path.size(); ++i) {
        if (path[i].second.kind == 1) w += -k;
        else w += std::popcount(path[i - 1].first.g ^ path[i].first.g);
      }
      return w;
    };
    const int64_t wc = raw_weight(cycle);
    if (wc >= 0) fail(ErrorCode::InternalError, "pumped cycle is not negative");
    const int64_t base = raw_weight(p1) + raw_weight(p2) + k;
    const int64_t copies = base > 0 ? (base + (-wc) - 1) / (-wc) : 0;
    const int64_t total_steps = static_cast<int64_t>(p1.size()) - 1 +
                                copies * (static_cast<int64_t>(cycle.size()) - 1) +
                                static_cast<int64_t>(p2.size()) - 1;
    if (total_steps > kAssemblyLimit)
      fail(ErrorCode::BudgetUnbounded, "pumped witness exceeds the assembly budget");
    Execution e;
    e.initial = make_config(p1.front().first.l, p1.front().first.g);
    append_steps(e, p1);
    for (int64_t c = 0; c < copies; ++c) append_steps(e, cycle);
    append_steps(e, p2);
    return e;
  }
};

}  // namespace

SearchResult decide_balanced_synchronization(const Protocol& protocol, int32_t n, int64_t k,
                                             const SearchBudget& budget,
                                             InitialEdges initial_edges,
                                             const ConstraintPolicy& policy) {
  Decider d(protocol, policy, n, k, initial_edges);
  return d.run(budget);
}

}  // namespace rbnet
