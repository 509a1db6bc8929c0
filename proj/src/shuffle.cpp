#include "rbnet/shuffle.hpp"

#include <algorithm>

namespace rbnet {

namespace {

Step shift_step(const Step& s, int32_t offset) {
  if (is_comm(s)) {
    CommStep out = std::get<CommStep>(s);
    out.from += offset;
    for (auto& [node, target] : out.recv) node += offset;
    return out;
  }
  const ReconfStep& in = std::get<ReconfStep>(s);
  ReconfStep out;
  for (const Edge& e : in.add) out.add.push_back(Edge(e.u + offset, e.v + offset));
  for (const Edge& e : in.remove) out.remove.push_back(Edge(e.u + offset, e.v + offset));
  return out;
}

ReconfStep merge_reconfs(const ReconfStep& a, const ReconfStep& b) {
  ReconfStep out = a;
  out.add.insert(out.add.end(), b.add.begin(), b.add.end());
  out.remove.insert(out.remove.end(), b.remove.begin(), b.remove.end());
  std::sort(out.add.begin(), out.add.end());
  std::sort(out.remove.begin(), out.remove.end());
  return out;
}

}  // namespace

Execution shuffle(const Execution& a, const Execution& b, const ShuffleSchedule& schedule) {
  const int32_t offset = a.initial.num_nodes();
  std::vector<Step> steps;
  auto push = [&](Step s) {
    if (!steps.empty() && is_comm(steps.back()) == is_comm(s)) {
      if (!schedule.repair)
        fail(ErrorCode::InvalidSchedule, "adjacent steps of the same kind need repair");
      if (is_comm(s)) {
        steps.emplace_back(ReconfStep{});
      } else {
        steps.back() = merge_reconfs(std::get<ReconfStep>(steps.back()), std::get<ReconfStep>(s));
        return;
      }
    }
    steps.push_back(std::move(s));
  };

  size_t ia = 0, ib = 0;
  for (const ShuffleToken token : schedule.tokens) {
    switch (token) {
      case ShuffleToken::First:
        if (ia >= a.steps.size())
          fail(ErrorCode::InvalidSchedule, "schedule overruns the first input");
        push(a.steps[ia++]);
        break;
      case ShuffleToken::Second:
        if (ib >= b.steps.size())
          fail(ErrorCode::InvalidSchedule, "schedule overruns the second input");
        push(shift_step(b.steps[ib++], offset));
        break;
      case ShuffleToken::MergeReconf:
        if (ia >= a.steps.size() || ib >= b.steps.size())
          fail(ErrorCode::InvalidSchedule, "merge token overruns an input");
        if (is_comm(a.steps[ia]) || is_comm(b.steps[ib]))
          fail(ErrorCode::InvalidSchedule, "merge token needs reconfigurations on both inputs");
        push(merge_reconfs(std::get<ReconfStep>(a.steps[ia]),
                           std::get<ReconfStep>(shift_step(b.steps[ib], offset))));
        ++ia;
        ++ib;
        break;
    }
  }
  if (ia != a.steps.size() || ib != b.steps.size())
    fail(ErrorCode::InvalidSchedule, "schedule does not consume both inputs");
  return Execution{juxtapose(a.initial, b.initial), std::move(steps)};
}

ShuffleSchedule sequential_schedule(const Execution& a, const Execution& b) {
  ShuffleSchedule s;
  s.repair = true;
  s.tokens.assign(a.steps.size(), ShuffleToken::First);
  s.tokens.insert(s.tokens.end(), b.steps.size(), ShuffleToken::Second);
  return s;
}

}  // namespace rbnet
