#pragma once

// Seeded random inputs shared by the property and acceptance suites.

#include <algorithm>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rbnet/execution.hpp"
#include "rbnet/graph.hpp"
#include "rbnet/protocol.hpp"
#include "rbnet/semantics.hpp"

namespace testgen {

inline rbnet::Protocol random_protocol(std::mt19937& rng, int max_states = 6,
                                       int max_messages = 3, int max_transitions = 14) {
  std::uniform_int_distribution<int> state_count(2, max_states);
  std::uniform_int_distribution<int> message_count(1, max_messages);
  const int ns = state_count(rng);
  const int nm = message_count(rng);
  std::vector<std::string> states, messages;
  for (int i = 0; i < ns; ++i) states.push_back("s" + std::to_string(i));
  for (int i = 0; i < nm; ++i) messages.push_back("m" + std::to_string(i));

  std::uniform_int_distribution<int> coin(0, 99);
  auto random_subset = [&](int size) {
    std::vector<int32_t> out;
    for (int i = 0; i < size; ++i)
      if (coin(rng) < 40) out.push_back(i);
    if (out.empty()) out.push_back(std::uniform_int_distribution<int>(0, size - 1)(rng));
    return out;
  };
  const std::vector<int32_t> initial = random_subset(ns);
  const std::vector<int32_t> target = random_subset(ns);

  std::uniform_int_distribution<int> transition_count(1, max_transitions);
  std::uniform_int_distribution<int> state_pick(0, ns - 1);
  std::uniform_int_distribution<int> message_pick(0, nm - 1);
  std::set<std::tuple<int32_t, int, int32_t, int32_t>> seen;
  std::vector<rbnet::Transition> transitions;
  const int want = transition_count(rng);
  for (int i = 0; i < want; ++i) {
    rbnet::Transition t;
    t.source = state_pick(rng);
    t.kind = coin(rng) < 50 ? rbnet::ActionKind::Broadcast : rbnet::ActionKind::Receive;
    t.message = message_pick(rng);
    t.target = state_pick(rng);
    if (seen.insert({t.source, static_cast<int>(t.kind), t.message, t.target}).second)
      transitions.push_back(t);
  }
  return rbnet::Protocol(states, messages, initial, transitions, target);
}

inline rbnet::Config random_initial_config(std::mt19937& rng, const rbnet::Protocol& p,
                                           int32_t n, bool allow_edges) {
  const std::vector<int32_t>& init = p.initial_states();
  std::uniform_int_distribution<size_t> pick(0, init.size() - 1);
  std::vector<int32_t> labels;
  for (int32_t i = 0; i < n; ++i) labels.push_back(init[pick(rng)]);
  std::vector<rbnet::Edge> edges;
  if (allow_edges && n >= 2) {
    std::uniform_int_distribution<int> coin(0, 99);
    for (int32_t u = 0; u < n; ++u)
      for (int32_t v = u + 1; v < n; ++v)
        if (coin(rng) < 25) edges.emplace_back(u, v);
  }
  return rbnet::Config(std::move(labels), std::move(edges));
}

// Valid execution built by a random alternating walk; reconfigurations
// toggle up to two random node pairs. May be empty when nothing is enabled.
inline rbnet::Execution random_walk(std::mt19937& rng, const rbnet::Protocol& p,
                                    const rbnet::Config& start, int max_steps) {
  rbnet::Execution e{start, {}};
  rbnet::Config cur = start;
  std::uniform_int_distribution<int> coin(0, 99);
  bool next_comm = coin(rng) < 50;
  for (int s = 0; s < max_steps; ++s) {
    if (next_comm) {
      const std::vector<rbnet::CommStep> comms = rbnet::enabled_communications(p, cur);
      if (comms.empty()) break;
      const rbnet::CommStep& step =
          comms[std::uniform_int_distribution<size_t>(0, comms.size() - 1)(rng)];
      cur = rbnet::apply_comm(p, cur, step);
      e.steps.emplace_back(step);
    } else {
      rbnet::ReconfStep step;
      if (cur.num_nodes() >= 2) {
        std::uniform_int_distribution<int32_t> node(0, cur.num_nodes() - 1);
        std::set<std::pair<int32_t, int32_t>> picked;
        const int toggles = std::uniform_int_distribution<int>(0, 2)(rng);
        for (int t = 0; t < toggles; ++t) {
          int32_t u = node(rng), v = node(rng);
          if (u == v) continue;
          if (u > v) std::swap(u, v);
          if (!picked.insert({u, v}).second) continue;
          if (cur.has_edge(u, v))
            step.remove.emplace_back(u, v);
          else
            step.add.emplace_back(u, v);
        }
      }
      cur = rbnet::apply_reconf(cur, step);
      e.steps.emplace_back(std::move(step));
    }
    next_comm = !next_comm;
  }
  return e;
}

// Drops leading and trailing reconfiguration steps; the initial
// configuration absorbs a dropped leading reconfiguration.
inline rbnet::Execution trim_to_comm_bounded(const rbnet::Execution& e) {
  rbnet::Execution out = e;
  while (!out.steps.empty() && rbnet::is_reconf(out.steps.front())) {
    out.initial = rbnet::apply_reconf(out.initial, std::get<rbnet::ReconfStep>(out.steps.front()));
    out.steps.erase(out.steps.begin());
  }
  while (!out.steps.empty() && rbnet::is_reconf(out.steps.back())) out.steps.pop_back();
  return out;
}

}  // namespace testgen
