#include "rbnet/transforms.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "rbnet/errors.hpp"
#include "rbnet/protocol.hpp"

namespace rbnet {
namespace {

constexpr int64_t kMaxOutputSteps = 5'000'000;
constexpr int64_t kMaxOutputNodes = 65'536;
constexpr size_t kScheduleMemoLimit = 1'000'000;

std::vector<int64_t> label_counts(const Protocol& protocol, const Config& c) {
  std::vector<int64_t> counts(protocol.num_states(), 0);
  for (int32_t q : c.labels()) ++counts[q];
  return counts;
}

// Replays e (validating every step) and also checks the all-initial start.
std::vector<Config> require_initial_input(const Protocol& protocol, const Execution& e) {
  if (!all_initial(protocol, e.initial))
    fail(ErrorCode::PreconditionViolated, "input execution does not start from initial states");
  return replay(protocol, e);
}

void require_synchronizing(const Protocol& protocol, const Config& final_config) {
  if (!all_target(protocol, final_config))
    fail(ErrorCode::PreconditionViolated,
         "input execution does not end with every label in the target set");
}

CommStep shift_comm(const CommStep& c, int32_t offset) {
  CommStep out = c;
  out.from += offset;
  for (auto& entry : out.recv) entry.first += offset;
  return out;
}

ReconfStep shift_reconf(const ReconfStep& r, int32_t offset) {
  ReconfStep out;
  out.add.reserve(r.add.size());
  out.remove.reserve(r.remove.size());
  for (const Edge& ed : r.add) out.add.emplace_back(ed.u + offset, ed.v + offset);
  for (const Edge& ed : r.remove) out.remove.emplace_back(ed.u + offset, ed.v + offset);
  return out;
}

Step shift_step(const Step& s, int32_t offset) {
  if (is_comm(s)) return shift_comm(std::get<CommStep>(s), offset);
  return shift_reconf(std::get<ReconfStep>(s), offset);
}

void sort_reconf(ReconfStep& r) {
  std::sort(r.add.begin(), r.add.end());
  std::sort(r.remove.begin(), r.remove.end());
}

// Validates the output against the promised policy and the scaled final
// label counts; returns the output's final configuration.
Config require_output(const Protocol& protocol, const Execution& out, const ConstraintPolicy& policy,
                      const std::vector<int64_t>& input_final_counts, int64_t factor) {
  ValidationReport report = validate_execution(protocol, out, policy);
  if (!report.ok)
    fail(ErrorCode::InternalError, "transform output violates its promised constraint");
  std::vector<Config> configs = replay(protocol, out);
  std::vector<int64_t> counts = label_counts(protocol, configs.back());
  for (size_t q = 0; q < counts.size(); ++q)
    if (counts[q] != factor * input_final_counts[q])
      fail(ErrorCode::InternalError, "transform output does not scale the final label counts");
  return configs.back();
}

// Strict alternation (already enforced by replay) split into comm steps with
// the reconfigurations around them.
struct NormalForm {
  ReconfStep leading;
  std::vector<CommStep> comms;
  // between[i] sits between comms[i] and comms[i + 1].
  std::vector<ReconfStep> between;
  ReconfStep trailing;
};

NormalForm normal_form(const Execution& e) {
  NormalForm nf;
  size_t i = 0;
  if (!e.steps.empty() && is_reconf(e.steps.front())) {
    nf.leading = std::get<ReconfStep>(e.steps.front());
    i = 1;
  }
  while (i < e.steps.size()) {
    nf.comms.push_back(std::get<CommStep>(e.steps[i]));
    ++i;
    if (i < e.steps.size()) {
      ReconfStep r = std::get<ReconfStep>(e.steps[i]);
      ++i;
      if (i < e.steps.size())
        nf.between.push_back(std::move(r));
      else
        nf.trailing = std::move(r);
    }
  }
  return nf;
}

// Shared engine for lift_one_to_k and weak_to_strong: m copies advance in
// pairs (A, B); each reconfiguration is padded to exactly k edge changes with
// absent cross-copy edges avoiding A's copy, added before A's communication
// and removed again before B's. A trailing reconfiguration does not change
// labels and is dropped.
Execution pad_to_exact_k(const Protocol& protocol, const Execution& e, int64_t k) {
  if (k < 1) fail(ErrorCode::PreconditionViolated, "k must be at least 1");
  std::vector<Config> configs = require_initial_input(protocol, e);
  std::vector<int64_t> final_counts = label_counts(protocol, configs.back());

  int64_t m = k + 2;
  if (m % 2 != 0) ++m;
  const int32_t n0 = e.initial.num_nodes();
  if (m * n0 > kMaxOutputNodes)
    fail(ErrorCode::BudgetUnbounded, "output would exceed the node limit");

  NormalForm nf = normal_form(e);
  const int64_t num_comms = static_cast<int64_t>(nf.comms.size());

  Execution out;
  out.initial = power(e.initial, static_cast<int32_t>(m));
  if (num_comms == 0) {
    require_output(protocol, out, ConstraintPolicy::strongly_k_constrained(k), final_counts, m);
    return out;
  }
  if (num_comms * m * 2 > kMaxOutputSteps)
    fail(ErrorCode::BudgetUnbounded, "output would exceed the step limit");

  // pres[i] = reconfiguration applied before comm i (trivial when absent).
  std::vector<ReconfStep> pres(num_comms);
  pres[0] = nf.leading;
  for (int64_t i = 1; i < num_comms; ++i) pres[i] = nf.between[i - 1];

  Config cur = out.initial;
  const int32_t total_nodes = cur.num_nodes();

  // First `count` absent edges joining two distinct copies, neither of which
  // is `avoid_copy`, in lexicographic order. Cross-copy edges only ever come
  // from pads and pads are gone between pairs, so the same edges are present
  // again at removal time.
  auto pick_pads = [&](int64_t count, int32_t avoid_copy) {
    std::vector<Edge> pads;
    for (int32_t u = 0; u < total_nodes && static_cast<int64_t>(pads.size()) < count; ++u) {
      if (u / n0 == avoid_copy) continue;
      for (int32_t v = u + 1; v < total_nodes && static_cast<int64_t>(pads.size()) < count; ++v) {
        if (v / n0 == avoid_copy || v / n0 == u / n0) continue;
        if (!cur.has_edge(u, v)) pads.emplace_back(u, v);
      }
    }
    if (static_cast<int64_t>(pads.size()) < count)
      fail(ErrorCode::InternalError, "not enough cross-copy pad edges");
    return pads;
  };

  auto emit = [&](Step s) {
    cur = apply_step(protocol, cur, s);
    out.steps.push_back(std::move(s));
  };

  for (int64_t i = 0; i < num_comms; ++i) {
    const int64_t s = pres[i].size();
    if (s > k)
      fail(ErrorCode::PreconditionViolated, "input reconfiguration exceeds the target bound");
    for (int64_t t = 0; t < m / 2; ++t) {
      const int32_t a = static_cast<int32_t>(2 * t);
      const int32_t b = a + 1;
      std::vector<Edge> pads = pick_pads(k - s, a);
      ReconfStep ra = shift_reconf(pres[i], a * n0);
      ra.add.insert(ra.add.end(), pads.begin(), pads.end());
      sort_reconf(ra);
      emit(std::move(ra));
      emit(shift_comm(nf.comms[i], a * n0));
      ReconfStep rb = shift_reconf(pres[i], b * n0);
      rb.remove.insert(rb.remove.end(), pads.begin(), pads.end());
      sort_reconf(rb);
      emit(std::move(rb));
      emit(shift_comm(nf.comms[i], b * n0));
    }
  }

  ValidationReport weak = validate_execution(protocol, out, ConstraintPolicy::k_constrained(k));
  if (!weak.ok) fail(ErrorCode::InternalError, "padded output is not k-constrained");
  require_output(protocol, out, ConstraintPolicy::strongly_k_constrained(k), final_counts, m);
  return out;
}

// One tape symbol: a communication or a single-edge toggle of a
// reconfiguration step, in input order with removals before additions.
struct TapeItem {
  bool comm = false;
  int64_t step_index = 0;
  bool add = false;
  Edge edge;
};

std::vector<TapeItem> atomic_tape(const Execution& e) {
  std::vector<TapeItem> tape;
  for (size_t si = 0; si < e.steps.size(); ++si) {
    if (is_comm(e.steps[si])) {
      tape.push_back({true, static_cast<int64_t>(si), false, Edge{}});
    } else {
      ReconfStep rs = std::get<ReconfStep>(e.steps[si]);
      sort_reconf(rs);
      for (const Edge& ed : rs.remove) tape.push_back({false, static_cast<int64_t>(si), false, ed});
      for (const Edge& ed : rs.add) tape.push_back({false, static_cast<int64_t>(si), true, ed});
    }
  }
  return tape;
}

// Complete search for a copy schedule, used when the greedy pass deadlocks.
// States are memoized on the sorted position multiset plus slot parity; the
// tape is the same for every copy, so that is the whole schedulability state.
std::vector<int32_t> exact_schedule(const std::vector<TapeItem>& tape, int64_t n_copies) {
  const int64_t tape_len = static_cast<int64_t>(tape.size());
  std::vector<int64_t> pos(n_copies, 0);
  std::vector<int32_t> schedule;
  std::unordered_set<std::string> dead[2];
  size_t memo_total = 0;

  auto state_key = [&]() {
    std::vector<int64_t> sorted(pos);
    std::sort(sorted.begin(), sorted.end());
    std::string key;
    key.reserve(sorted.size() * 2);
    for (int64_t p : sorted) {
      key.push_back(static_cast<char>(p & 0xff));
      key.push_back(static_cast<char>((p >> 8) & 0xff));
    }
    return key;
  };
  auto all_done = [&]() {
    for (int64_t p : pos)
      if (p != tape_len) return false;
    return true;
  };
  // Distinct next positions of the wanted symbol kind, one representative
  // copy each, furthest first with final-symbol positions last.
  auto candidates = [&](bool want_comm) {
    std::set<int64_t> seen;
    std::vector<std::pair<int64_t, int32_t>> cands;
    for (int32_t c = 0; c < n_copies; ++c) {
      int64_t p = pos[c];
      if (p == tape_len || tape[p].comm != want_comm) continue;
      if (seen.insert(p).second) cands.push_back({p, c});
    }
    std::sort(cands.begin(), cands.end(), [&](const auto& x, const auto& y) {
      const bool xf = x.first == tape_len - 1;
      const bool yf = y.first == tape_len - 1;
      if (xf != yf) return yf;
      return x.first > y.first;
    });
    return cands;
  };

  std::function<bool(int)> dfs = [&](int parity) -> bool {
    if (all_done()) return true;
    std::string key = state_key();
    if (dead[parity].count(key)) return false;
    if (parity == 0) {
      for (const auto& [p, c] : candidates(true)) {
        ++pos[c];
        schedule.push_back(c);
        if (dfs(1)) return true;
        schedule.pop_back();
        --pos[c];
      }
    } else {
      for (const auto& [p, c] : candidates(false)) {
        ++pos[c];
        schedule.push_back(c);
        if (dfs(0)) return true;
        schedule.pop_back();
        --pos[c];
      }
      schedule.push_back(-1);
      if (dfs(0)) return true;
      schedule.pop_back();
    }
    dead[parity].insert(std::move(key));
    if (++memo_total > kScheduleMemoLimit)
      fail(ErrorCode::BudgetUnbounded, "copy schedule search exceeded its budget");
    return false;
  };

  if (!dfs(0)) fail(ErrorCode::InternalError, "no copy schedule found");
  return schedule;
}

// Greedy schedule: comm slots go to the furthest copy not sitting at its
// final communication, then to a fresh copy, then to a held-back finisher.
// The reconfiguration slot after a comm prefers that copy's own next toggle,
// then the furthest pending toggle, and is trivial otherwise.
bool greedy_schedule(const std::vector<TapeItem>& tape, int64_t n_copies,
                     std::vector<int32_t>& schedule) {
  const int64_t tape_len = static_cast<int64_t>(tape.size());
  std::vector<int64_t> pos(n_copies, 0);
  std::vector<char> started(n_copies, 0);
  int64_t done = 0;
  while (done < n_copies) {
    int32_t pick = -1;
    for (int32_t c = 0; c < n_copies; ++c)
      if (started[c] && pos[c] < tape_len && tape[pos[c]].comm && pos[c] != tape_len - 1)
        if (pick == -1 || pos[c] > pos[pick]) pick = c;
    if (pick == -1) {
      for (int32_t c = 0; c < n_copies; ++c)
        if (!started[c]) {
          pick = c;
          break;
        }
    }
    if (pick == -1) {
      for (int32_t c = 0; c < n_copies; ++c)
        if (started[c] && pos[c] == tape_len - 1) {
          pick = c;
          break;
        }
    }
    if (pick == -1) return false;
    started[pick] = 1;
    schedule.push_back(pick);
    if (++pos[pick] == tape_len) ++done;
    if (done == n_copies) break;

    int32_t rp = -1;
    if (pos[pick] < tape_len && !tape[pos[pick]].comm) rp = pick;
    if (rp == -1)
      for (int32_t c = 0; c < n_copies; ++c)
        if (started[c] && pos[c] < tape_len && !tape[pos[c]].comm)
          if (rp == -1 || pos[c] > pos[rp]) rp = c;
    schedule.push_back(rp);
    if (rp != -1 && ++pos[rp] == tape_len) ++done;
  }
  return true;
}

}  // namespace

Execution to_id_constrained(const Protocol& protocol, const Execution& e) {
  std::vector<Config> configs = require_initial_input(protocol, e);
  std::vector<int64_t> final_counts = label_counts(protocol, configs.back());

  Execution out;
  out.initial = e.initial;
  Config cur = e.initial;
  for (const Step& s : e.steps) {
    if (!is_comm(s)) continue;
    const CommStep& c = std::get<CommStep>(s);
    std::set<int32_t> desired;
    for (const auto& entry : c.recv) desired.insert(entry.first);
    ReconfStep rw;
    for (int32_t w : cur.neighbors(c.from))
      if (!desired.count(w)) rw.remove.emplace_back(c.from, w);
    for (int32_t w : desired)
      if (!cur.has_edge(c.from, w)) rw.add.emplace_back(c.from, w);
    sort_reconf(rw);
    cur = apply_reconf(cur, rw);
    cur = apply_comm(protocol, cur, c);
    out.steps.emplace_back(std::move(rw));
    out.steps.emplace_back(c);
  }
  require_output(protocol, out, ConstraintPolicy::f_constrained(Bound::identity()), final_counts, 1);
  return out;
}

Execution to_f_constrained(const Protocol& protocol, const Execution& e, const Bound& f) {
  if (!f.diverges() || (f.kind == BoundKind::Linear && f.a < 0))
    fail(ErrorCode::NotDiverging, "bound " + f.to_string() + " does not diverge");
  std::vector<Config> configs = require_initial_input(protocol, e);
  require_synchronizing(protocol, configs.back());
  std::vector<int64_t> final_counts = label_counts(protocol, configs.back());

  const int64_t n0 = e.initial.num_nodes();
  int64_t k = 1;
  while (f.eval(k * n0) < n0) {
    ++k;
    if (k * n0 > kMaxOutputNodes)
      fail(ErrorCode::BudgetUnbounded,
           "bound " + f.to_string() + " grows too slowly below the node limit");
  }

  Execution base = to_id_constrained(protocol, e);
  if (static_cast<int64_t>(base.steps.size()) * k > kMaxOutputSteps)
    fail(ErrorCode::BudgetUnbounded, "output would exceed the step limit");

  Execution out;
  out.initial = power(e.initial, static_cast<int32_t>(k));
  for (int64_t c = 0; c < k; ++c)
    for (const Step& s : base.steps)
      out.steps.push_back(shift_step(s, static_cast<int32_t>(c * n0)));
  require_output(protocol, out, ConstraintPolicy::f_constrained(f), final_counts, k);
  return out;
}

Execution to_one_locally_constrained(const Protocol& protocol, const Execution& e) {
  std::vector<Config> configs = require_initial_input(protocol, e);
  if (e.steps.empty() || !is_comm(e.steps.front()) || !is_comm(e.steps.back()))
    fail(ErrorCode::NotCommBounded, "input must start and end with a communication step");
  require_synchronizing(protocol, configs.back());
  std::vector<int64_t> final_counts = label_counts(protocol, configs.back());

  NormalForm nf = normal_form(e);
  const int64_t num_comms = static_cast<int64_t>(nf.comms.size());
  int64_t r = 1;
  for (const ReconfStep& rs : nf.between) r = std::max(r, rs.size());

  // Single-edge toggles of the reconfiguration after comm i, removals first.
  struct Toggle {
    bool add;
    Edge edge;
  };
  std::vector<std::vector<Toggle>> toggles(num_comms);
  for (size_t i = 0; i < nf.between.size(); ++i) {
    ReconfStep rs = nf.between[i];
    sort_reconf(rs);
    for (const Edge& ed : rs.remove) toggles[i].push_back({false, ed});
    for (const Edge& ed : rs.add) toggles[i].push_back({true, ed});
  }

  const int32_t n0 = e.initial.num_nodes();
  const int64_t total_slots = num_comms * r;
  if (total_slots * 2 > kMaxOutputSteps)
    fail(ErrorCode::BudgetUnbounded, "output would exceed the step limit");
  if (r * n0 > kMaxOutputNodes)
    fail(ErrorCode::BudgetUnbounded, "output would exceed the node limit");

  // Copy c fires comm i at slot i*r + c + 1; its j-th toggle after that comm
  // lands in the bundle following slot i*r + c + 1 + j. Consecutive comms of
  // one copy are r slots apart and toggles number at most r, so every toggle
  // is applied before its copy's next communication.
  std::vector<std::vector<std::pair<int32_t, Toggle>>> bundles(total_slots);
  for (int64_t c = 0; c < r; ++c)
    for (int64_t i = 0; i + 1 < num_comms; ++i) {
      const int64_t slot = i * r + c + 1;
      for (size_t j = 0; j < toggles[i].size(); ++j)
        bundles[slot + j].push_back({static_cast<int32_t>(c), toggles[i][j]});
    }

  Execution out;
  out.initial = power(e.initial, static_cast<int32_t>(r));
  for (int64_t t = 1; t <= total_slots; ++t) {
    const int64_t c = (t - 1) % r;
    const int64_t i = (t - 1) / r;
    out.steps.push_back(shift_comm(nf.comms[i], static_cast<int32_t>(c * n0)));
    if (t == total_slots) break;
    ReconfStep bundle;
    for (const auto& [copy, tog] : bundles[t]) {
      Edge ed(tog.edge.u + copy * n0, tog.edge.v + copy * n0);
      (tog.add ? bundle.add : bundle.remove).push_back(ed);
    }
    sort_reconf(bundle);
    out.steps.emplace_back(std::move(bundle));
  }

  Config out_final = require_output(protocol, out, ConstraintPolicy::k_locally_constrained(1),
                                    final_counts, r);
  if (!(out_final == power(configs.back(), static_cast<int32_t>(r))))
    fail(ErrorCode::InternalError,
         "output does not end in the power of the input's final configuration");
  return out;
}

Execution lift_one_to_k(const Protocol& protocol, const Execution& e, int64_t k) {
  if (k < 1) fail(ErrorCode::PreconditionViolated, "k must be at least 1");
  ValidationReport rep = validate_execution(protocol, e, ConstraintPolicy::k_constrained(1));
  if (!rep.ok) fail(ErrorCode::PreconditionViolated, "input is not 1-constrained");
  require_synchronizing(protocol, replay(protocol, e).back());
  return pad_to_exact_k(protocol, e, k);
}

Execution weak_to_strong(const Protocol& protocol, const Execution& e, int64_t k) {
  if (k < 1) fail(ErrorCode::PreconditionViolated, "k must be at least 1");
  ValidationReport rep = validate_execution(protocol, e, ConstraintPolicy::k_constrained(k));
  if (!rep.ok) fail(ErrorCode::PreconditionViolated, "input is not k-constrained");
  return pad_to_exact_k(protocol, e, k);
}

Execution balanced_to_constrained_k1(const Protocol& protocol, const Execution& e, int64_t n_copies) {
  if (n_copies < 1) fail(ErrorCode::PreconditionViolated, "need at least one copy");
  std::vector<Config> configs = require_initial_input(protocol, e);

  ValidationReport rep = validate_execution(protocol, e, ConstraintPolicy::k_balanced(1));
  if (!rep.ok) fail(ErrorCode::NotBalanced, "input is not 1-balanced");

  PotentialInfo pot = potential_sequence(e, 1);
  const int64_t kappa = pot.kappa;
  if (n_copies < kappa * kappa + kappa)
    fail(ErrorCode::InsufficientCopies,
         "need at least " + std::to_string(kappa * kappa + kappa) + " copies, got " +
             std::to_string(n_copies));
  // Repeated toggles owned by a phase fit in half its span.
  for (const PhaseInfo& ph : pot.phases)
    if (ph.kappa > (ph.end - ph.begin) / 2)
      fail(ErrorCode::InternalError, "phase owns more repeated toggles than half its span");

  std::vector<TapeItem> tape = atomic_tape(e);
  const int64_t tape_len = static_cast<int64_t>(tape.size());
  if (n_copies * tape_len * 2 > kMaxOutputSteps)
    fail(ErrorCode::BudgetUnbounded, "output would exceed the step limit");
  const int32_t n0 = e.initial.num_nodes();
  if (n_copies * n0 > kMaxOutputNodes)
    fail(ErrorCode::BudgetUnbounded, "output would exceed the node limit");

  std::vector<int32_t> schedule;
  if (!greedy_schedule(tape, n_copies, schedule)) {
    schedule.clear();
    schedule = exact_schedule(tape, n_copies);
  }

  Execution out;
  out.initial = power(e.initial, static_cast<int32_t>(n_copies));
  Config cur = out.initial;
  std::vector<int64_t> pos(n_copies, 0);
  for (size_t idx = 0; idx < schedule.size(); ++idx) {
    const int32_t c = schedule[idx];
    if (idx % 2 == 0) {
      const TapeItem& item = tape[pos[c]++];
      Step s = shift_comm(std::get<CommStep>(e.steps[item.step_index]), c * n0);
      cur = apply_step(protocol, cur, s);
      out.steps.push_back(std::move(s));
    } else {
      ReconfStep rs;
      if (c >= 0) {
        const TapeItem& item = tape[pos[c]++];
        Edge ed(item.edge.u + c * n0, item.edge.v + c * n0);
        (item.add ? rs.add : rs.remove).push_back(ed);
      }
      cur = apply_reconf(cur, rs);
      out.steps.emplace_back(std::move(rs));
    }
  }

  std::vector<int64_t> final_counts = label_counts(protocol, configs.back());
  Config out_final = require_output(protocol, out, ConstraintPolicy::k_constrained(1),
                                    final_counts, n_copies);
  if (!(out_final == power(configs.back(), static_cast<int32_t>(n_copies))))
    fail(ErrorCode::InternalError,
         "output does not end in the power of the input's final configuration");
  return out;
}

}  // namespace rbnet
