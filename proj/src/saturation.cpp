#include "rbnet/saturation.hpp"

#include <algorithm>

namespace rbnet {

namespace {

std::vector<int32_t> sorted_members(const std::vector<char>& in_set) {
  std::vector<int32_t> out;
  for (size_t q = 0; q < in_set.size(); ++q)
    if (in_set[q]) out.push_back(static_cast<int32_t>(q));
  return out;
}

std::vector<int32_t> intersect(const std::vector<int32_t>& a, const std::vector<int32_t>& b) {
  std::vector<int32_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

std::vector<int32_t> forward_saturation(const Protocol& protocol,
                                        const std::vector<int32_t>& seed,
                                        const std::vector<int32_t>& restrict_to) {
  const int32_t Q = protocol.num_states();
  const int32_t M = protocol.num_messages();
  std::vector<char> in_restrict(Q, 0), in_set(Q, 0), msg_enabled(M, 0);
  for (int32_t s : restrict_to) {
    if (s < 0 || s >= Q) fail(ErrorCode::PreconditionViolated, "state id out of range");
    in_restrict[s] = 1;
  }

  // Receive transitions grouped by message for the enabling rule.
  std::vector<std::vector<std::pair<int32_t, int32_t>>> receives_by_msg(M);
  for (const Transition& t : protocol.transitions())
    if (t.kind == ActionKind::Receive) receives_by_msg[t.message].emplace_back(t.source, t.target);

  std::vector<int32_t> stack;
  auto add = [&](int32_t s) {
    if (in_restrict[s] && !in_set[s]) {
      in_set[s] = 1;
      stack.push_back(s);
    }
  };
  for (int32_t s : seed) {
    if (s < 0 || s >= Q) fail(ErrorCode::PreconditionViolated, "state id out of range");
    add(s);
  }

  while (!stack.empty()) {
    const int32_t q = stack.back();
    stack.pop_back();
    for (const Transition& t : protocol.broadcasts_from(q)) {
      if (!in_restrict[t.target]) continue;
      add(t.target);
      if (!msg_enabled[t.message]) {
        msg_enabled[t.message] = 1;
        for (const auto& [p, pp] : receives_by_msg[t.message])
          if (in_set[p]) add(pp);
      }
    }
    for (int32_t m = 0; m < M; ++m) {
      if (!msg_enabled[m]) continue;
      for (int32_t pp : protocol.receive_targets(q, m)) add(pp);
    }
  }
  return sorted_members(in_set);
}

std::vector<int32_t> backward_saturation(const Protocol& protocol,
                                         const std::vector<int32_t>& seed,
                                         const std::vector<int32_t>& restrict_to) {
  return forward_saturation(protocol.reversed(), seed, restrict_to);
}

SaturationCertificate decide_synchronization_unconstrained(const Protocol& protocol) {
  if (!protocol.target_set())
    fail(ErrorCode::PreconditionViolated, "protocol has no target set");
  SaturationCertificate cert;
  std::vector<int32_t> current(protocol.num_states());
  for (int32_t q = 0; q < protocol.num_states(); ++q) current[q] = q;
  while (true) {
    const std::vector<int32_t> fwd =
        forward_saturation(protocol, intersect(protocol.initial_states(), current), current);
    const std::vector<int32_t> bwd =
        backward_saturation(protocol, intersect(*protocol.target_set(), current), current);
    std::vector<int32_t> next = intersect(fwd, bwd);
    cert.history.push_back(SaturationIteration{fwd, bwd});
    ++cert.iterations;
    if (next == current) break;
    current = std::move(next);
  }
  cert.final_set = current;
  cert.synchronizable = !current.empty();
  return cert;
}

bool decide_coverability_unconstrained(const Protocol& protocol, int32_t f) {
  if (f < 0 || f >= protocol.num_states())
    fail(ErrorCode::PreconditionViolated, "state id out of range");
  std::vector<int32_t> all(protocol.num_states());
  for (int32_t q = 0; q < protocol.num_states(); ++q) all[q] = q;
  const std::vector<int32_t> reach = forward_saturation(protocol, protocol.initial_states(), all);
  return std::binary_search(reach.begin(), reach.end(), f);
}

}  // namespace rbnet
