#include <doctest.h>

#include <string>
#include <vector>

#include "rbnet/errors.hpp"
#include "rbnet/execution.hpp"
#include "rbnet/policy.hpp"
#include "rbnet/protocol.hpp"

using namespace rbnet;

namespace {

std::string asset(const std::string& name) { return std::string(RBNET_ASSETS_DIR "/") + name; }

// s0 -!x-> s1 -!y-> s2 with passive receivers, for handmade executions.
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

CommStep comm(int32_t from, int32_t msg, int32_t to,
              std::vector<std::pair<int32_t, int32_t>> recv = {}) {
  CommStep c;
  c.from = from;
  c.message = msg;
  c.to = to;
  c.recv = std::move(recv);
  return c;
}

const CheckEntry& regime_check(const ValidationReport& r) { return r.checks.front(); }

}  // namespace

TEST_CASE("bound parsing and divergence") {
  CHECK(Bound::parse("identity").eval(7) == 7);
  CHECK(Bound::parse("floor_sqrt").eval(9) == 3);
  CHECK(Bound::parse("floor_sqrt").eval(8) == 2);
  CHECK(Bound::parse("floor_log2").eval(8) == 3);
  CHECK(Bound::parse("const:4").eval(100) == 4);
  CHECK(Bound::parse("linear:2,1").eval(5) == 11);

  CHECK(Bound::parse("identity").diverges());
  CHECK(Bound::parse("floor_sqrt").diverges());
  CHECK(Bound::parse("floor_log2").diverges());
  CHECK_FALSE(Bound::parse("const:4").diverges());
  CHECK(Bound::parse("linear:2,1").diverges());
  CHECK_FALSE(Bound::parse("linear:0,9").diverges());
  CHECK_THROWS_AS(Bound::parse("cubic"), Error);
}

TEST_CASE("policy parsing round trips through regime_string") {
  for (const char* text :
       {"unconstrained", "k=1", "k=2", "strong=2", "local=1", "balanced=3", "f=identity",
        "f=floor_sqrt", "f=const:3", "f=linear:2,0"}) {
    const ConstraintPolicy p = ConstraintPolicy::parse(text);
    CHECK(p.regime_string() == text);
  }
  CHECK_THROWS_AS(ConstraintPolicy::parse("k=0"), Error);
  CHECK_THROWS_AS(ConstraintPolicy::parse("mystery"), Error);
}

TEST_CASE("bundled trace validates under the regimes it should") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const Execution e = execution_load_file(asset("fig2.trace.json"), p);

  const ValidationReport two = validate_execution(p, e, ConstraintPolicy::k_constrained(2));
  CHECK(two.ok);
  CHECK(two.num_comm == 4);
  CHECK(two.num_reconf_steps == 3);
  CHECK(two.total_rewired == 4);

  const ValidationReport one = validate_execution(p, e, ConstraintPolicy::k_constrained(1));
  CHECK_FALSE(one.ok);
  CHECK(regime_check(one).first_violation == 1);

  // the two singleton reconfigurations break exactness at 2
  const ValidationReport strong =
      validate_execution(p, e, ConstraintPolicy::strongly_k_constrained(2));
  CHECK_FALSE(strong.ok);
  CHECK(regime_check(strong).first_violation == 3);

  // the size-2 step touches node 0 twice
  const ValidationReport local1 =
      validate_execution(p, e, ConstraintPolicy::k_locally_constrained(1));
  CHECK_FALSE(local1.ok);
  CHECK(regime_check(local1).first_violation == 1);
  CHECK(validate_execution(p, e, ConstraintPolicy::k_locally_constrained(2)).ok);

  // 4 edges rewired, budgets k*(4-1)
  CHECK_FALSE(validate_execution(p, e, ConstraintPolicy::k_balanced(1)).ok);
  CHECK(validate_execution(p, e, ConstraintPolicy::k_balanced(2)).ok);

  CHECK(validate_execution(p, e, ConstraintPolicy::f_constrained(Bound::parse("identity"))).ok);
  CHECK_FALSE(
      validate_execution(p, e, ConstraintPolicy::f_constrained(Bound::parse("const:1"))).ok);
  CHECK(validate_execution(p, e, ConstraintPolicy::unconstrained()).ok);
}

TEST_CASE("topology predicates are checked on every configuration") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const Execution e = execution_load_file(asset("fig2.trace.json"), p);

  ConstraintPolicy policy = ConstraintPolicy::k_constrained(2);
  policy.degree_bound = 2;
  policy.path_bound = 2;
  const ValidationReport ok = validate_execution(p, e, policy);
  CHECK(ok.ok);
  CHECK(ok.checks.size() == 3);

  policy.degree_bound = 1;
  const ValidationReport tight = validate_execution(p, e, policy);
  CHECK_FALSE(tight.ok);
  // the initial configuration is a 2-star already
  CHECK(tight.checks[1].first_violation == 0);
}

TEST_CASE("empty executions satisfy every regime") {
  const Protocol p = chain_protocol();
  Execution e;
  e.initial = Config({0, 0}, {});
  for (const char* text : {"unconstrained", "k=1", "strong=2", "local=1", "balanced=1",
                           "f=identity", "f=const:0"}) {
    const ValidationReport r = validate_execution(p, e, ConstraintPolicy::parse(text));
    CHECK(r.ok);
    CHECK(r.num_comm == 0);
  }
}

TEST_CASE("potential sequence frozen values") {
  const Protocol p = chain_protocol();

  Execution small;
  small.initial = Config({0, 0}, {});
  small.steps.emplace_back(comm(0, 0, 1));
  small.steps.emplace_back(ReconfStep{{Edge(0, 1)}, {}});
  small.steps.emplace_back(comm(0, 1, 2, {{1, 0}}));
  REQUIRE(replay(p, small).size() == 4);
  const PotentialInfo a = potential_sequence(small, 1);
  CHECK(a.values == std::vector<int64_t>{0, 1, 0, 1});
  CHECK(a.tape == "BRB");
  CHECK(a.kappa == 0);

  Execution wide;
  wide.initial = Config({0, 0, 0}, {});
  wide.steps.emplace_back(comm(0, 0, 1));
  wide.steps.emplace_back(ReconfStep{{Edge(0, 1), Edge(0, 2)}, {}});
  wide.steps.emplace_back(comm(0, 1, 2, {{1, 0}, {2, 0}}));
  REQUIRE(replay(p, wide).size() == 4);
  const PotentialInfo b = potential_sequence(wide, 1);
  CHECK(b.values == std::vector<int64_t>{0, 1, -1, 0});
  CHECK(b.tape == "BRRB");
  CHECK(b.kappa == 1);
}

TEST_CASE("potential requires communications at both ends") {
  const Protocol p = chain_protocol();
  Execution e;
  e.initial = Config({0, 0}, {});
  CHECK_THROWS_AS(potential_sequence(e, 1), Error);

  e.steps.emplace_back(ReconfStep{});
  CHECK_THROWS_AS(potential_sequence(e, 1), Error);

  e.steps.clear();
  e.steps.emplace_back(comm(0, 0, 1));
  e.steps.emplace_back(ReconfStep{{Edge(0, 1)}, {}});
  CHECK_THROWS_AS(potential_sequence(e, 1), Error);
}

TEST_CASE("kappa counts repeated reconfiguration tape cells") {
  const Protocol p = chain_protocol();
  // B R(0) B R(2) B over three nodes: tape BBRRB, one repeated cell
  Execution e;
  e.initial = Config({0, 0, 0}, {});
  e.steps.emplace_back(comm(0, 0, 1));
  e.steps.emplace_back(ReconfStep{});
  e.steps.emplace_back(comm(1, 0, 1));
  e.steps.emplace_back(ReconfStep{{Edge(0, 1), Edge(0, 2)}, {}});
  e.steps.emplace_back(comm(2, 0, 1, {{0, 1}}));
  REQUIRE(replay(p, e).size() == 6);
  const PotentialInfo info = potential_sequence(e, 1);
  CHECK(info.tape == "BBRRB");
  CHECK(info.kappa == 1);
  REQUIRE(info.phases.size() == 1);
  CHECK(info.phases[0].begin == 0);
  CHECK(info.phases[0].end == 4);
  CHECK(info.phases[0].nonneg);
  CHECK(info.phases[0].kappa == 1);
}
