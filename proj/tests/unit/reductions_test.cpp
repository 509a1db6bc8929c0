#include <doctest.h>

#include <numeric>
#include <string>
#include <vector>

#include "rbnet/errors.hpp"
#include "rbnet/minsky.hpp"
#include "rbnet/petri.hpp"
#include "rbnet/protocol.hpp"

using namespace rbnet;

namespace {

std::string asset(const std::string& name) { return std::string(RBNET_ASSETS_DIR "/") + name; }

Protocol chain_protocol() {
  return Protocol::parse(
      "states s0 s1 s2\n"
      "msg x y\n"
      "init s0\n"
      "target s2\n"
      "s0 !x s1\n"
      "s1 !y s2\n"
      "s0 ?x s0\n"
      "s0 ?y s0\n"
      "s1 ?x s1\n"
      "s1 ?y s1\n"
      "s2 ?x s2\n"
      "s2 ?y s2\n");
}

}  // namespace

TEST_CASE("counter machine parsing") {
  const MinskyMachine m = MinskyMachine::load_file(asset("inc2.mm"));
  CHECK(m.locations == std::vector<std::string>{"L0", "L1", "L2"});
  CHECK(m.initial_location() == "L0");

  CHECK_THROWS_AS(MinskyMachine::parse("L0: inc c1 -> L1\n"), Error);
  CHECK_THROWS_AS(MinskyMachine::parse("L0: halt\nL0: halt\n"), Error);
  CHECK_THROWS_AS(MinskyMachine::parse("L0: inc c3 -> L0\n"), Error);
  CHECK_THROWS_AS(MinskyMachine::parse(""), Error);

  const MinskyMachine t = MinskyMachine::parse(
      "A: testdec c2 -> B | C\n"
      "B: inc c1 -> A\n"
      "C: halt\n");
  CHECK(t.locations.size() == 3);
}

TEST_CASE("encoding sizes are fixed by the machine shape") {
  const MinskyMachine one = MinskyMachine::parse("L0: inc c1 -> H\nH: halt\n");
  const Protocol p = encode_minsky(one);
  CHECK(p.num_states() == 47);
  CHECK(p.num_messages() == 28);

  const MinskyMachine two = MinskyMachine::load_file(asset("inc2.mm"));
  const Protocol q = encode_minsky(two);
  // one more location and one more incrementation gadget
  CHECK(q.num_states() == 56);
  CHECK(q.num_messages() == 28);

  // initial roles: one controller, two counters, five helpers
  CHECK(p.initial_states().size() == 8);
  REQUIRE(p.target_set());
  // halt location, both counter values and retirements, five helpers done
  CHECK(p.target_set()->size() == 10);
}

TEST_CASE("encoded protocols are receive-complete and round trip") {
  const Protocol p = encode_minsky(MinskyMachine::parse("L0: inc c1 -> H\nH: halt\n"));
  for (int32_t q = 0; q < p.num_states(); ++q)
    for (int32_t m = 0; m < p.num_messages(); ++m) CHECK(p.can_receive(q, m));

  const Protocol back = Protocol::parse(p.to_dsl());
  CHECK(back.num_states() == p.num_states());
  CHECK(back.num_messages() == p.num_messages());
  CHECK(back.transitions().size() == p.transitions().size());
}

TEST_CASE("compiled nets satisfy the place formula") {
  const Protocol chain = chain_protocol();
  const PetriNet k2 = compile_to_petri(chain, 2);
  // 3 states + 6 unordered pairs + 4 phase places + 2 reconf levels
  CHECK(k2.places.size() == 15);
  CHECK(k2.place_id("pstart") >= 0);
  CHECK(k2.place_id("preconf_2") >= 0);
  CHECK_THROWS_AS(k2.place_id("preconf_3"), Error);

  const Protocol fig = Protocol::load_file(asset("fig1.rbn"));
  const PetriNet net = compile_to_petri(fig, 1);
  CHECK(net.places.size() == 10 + 55 + 4 + 1);

  CHECK(std::accumulate(net.initial_marking.begin(), net.initial_marking.end(), int64_t{0}) == 1);
  CHECK(net.initial_marking[net.place_id("pstart")] == 1);
  CHECK(net.final_marking[net.place_id("pend")] == 1);

  CHECK_THROWS_AS(compile_to_petri(chain, 0), Error);
  const Protocol no_target = Protocol::parse("states a\nmsg m\ninit a\na !m a\n");
  CHECK_THROWS_AS(compile_to_petri(no_target, 1), Error);
}

TEST_CASE("marking reachability mirrors a tiny synchronization") {
  // one node: seed s0, simulate x then y solo, absorb s2, finish
  const PetriNet net = compile_to_petri(chain_protocol(), 1);
  const PetriReachability r = bounded_marking_reachability(net, 2);
  REQUIRE(r.status == PetriReachability::Status::Reached);
  CHECK_FALSE(r.firing.empty());
  CHECK(replay_firing(net, r.firing) == net.final_marking);
}

TEST_CASE("exactly one phase token circulates") {
  const PetriNet net = compile_to_petri(chain_protocol(), 2);
  std::vector<int32_t> control = {net.place_id("pstart"), net.place_id("psimul"),
                                  net.place_id("pcheck"), net.place_id("pend"),
                                  net.place_id("preconf_1"), net.place_id("preconf_2")};
  int64_t seen = 0;
  bounded_marking_reachability(net, 2, 200000, [&](const std::vector<int64_t>& marking) {
    ++seen;
    int64_t total = 0;
    for (int32_t p : control) total += marking[p];
    CHECK(total == 1);
  });
  CHECK(seen > 0);
}

TEST_CASE("firing replay rejects disabled transitions") {
  const PetriNet net = compile_to_petri(chain_protocol(), 1);
  // begin_sim needs the start token the seed transitions consume last
  std::vector<int32_t> bogus = {0, 0};
  bool threw = false;
  try {
    // index 0 seeds a state and keeps pstart, so firing it twice is fine;
    // an out-of-range index must throw instead
    replay_firing(net, {0, 0});
    replay_firing(net, {static_cast<int32_t>(net.transitions.size())});
  } catch (const Error& err) {
    threw = true;
    CHECK(err.code() == ErrorCode::PreconditionViolated);
  }
  CHECK(threw);

  // firing a communication before begin_sim is disabled
  int32_t solo = -1;
  for (size_t i = 0; i < net.transitions.size(); ++i)
    if (net.transitions[i].name.rfind("solo_", 0) == 0) solo = static_cast<int32_t>(i);
  REQUIRE(solo >= 0);
  try {
    replay_firing(net, {solo});
    FAIL("expected DisabledStep");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::DisabledStep);
  }
}

TEST_CASE("reachability budgets are reported") {
  const PetriNet net = compile_to_petri(chain_protocol(), 1);
  const PetriReachability r = bounded_marking_reachability(net, 2, 3);
  CHECK(r.status == PetriReachability::Status::BudgetExceeded);
  CHECK(r.explored <= 3);
}

TEST_CASE("net export and import round trip in both formats") {
  const PetriNet net = compile_to_petri(Protocol::load_file(asset("fig1.rbn")), 2);
  for (const char* format : {"dotnet", "pnml"}) {
    const std::string text = export_net(net, format);
    const PetriNet back = import_net(text, format);
    CHECK(back == net);
  }
  CHECK_THROWS_AS(export_net(net, "xml"), Error);
  CHECK_THROWS_AS(import_net("", "xml"), Error);
}
