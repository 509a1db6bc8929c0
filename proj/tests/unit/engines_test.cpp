#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "rbnet/errors.hpp"
#include "rbnet/execution.hpp"
#include "rbnet/policy.hpp"
#include "rbnet/protocol.hpp"
#include "rbnet/saturation.hpp"
#include "rbnet/semantics.hpp"

using namespace rbnet;

namespace {

std::string asset(const std::string& name) { return std::string(RBNET_ASSETS_DIR "/") + name; }

std::vector<std::string> names(const Protocol& p, std::vector<int32_t> states) {
  std::vector<std::string> out;
  for (int32_t q : states) out.push_back(p.state_name(q));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("enabled communications respect the all-neighbors rule") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const int32_t q0 = *p.state_id("q0");
  const int32_t q1 = *p.state_id("q1");

  // two linked q0 nodes: either may broadcast a, the other picks q5 or q7
  const std::vector<CommStep> pairs = enabled_communications(p, Config({q0, q0}, {Edge(0, 1)}));
  CHECK(pairs.size() == 4);
  CHECK(pairs.front().from == 0);

  // a q1 neighbor receives a into the sink, so the broadcast stays enabled
  const std::vector<CommStep> mixed = enabled_communications(p, Config({q0, q1}, {Edge(0, 1)}));
  // node 0 sends a (q1 -> sink); node 1 sends b (q0 -> sink)
  CHECK(mixed.size() == 2);

  // isolated nodes broadcast solo
  const std::vector<CommStep> solo = enabled_communications(p, Config({q0}, {}));
  CHECK(solo.size() == 1);
  CHECK(solo[0].recv.empty());
}

TEST_CASE("reconfiguration successors match the per-step budgets") {
  const Config empty3({0, 0, 0}, {});
  // at most one change: the trivial step plus one toggle per node pair
  const std::vector<ReconfStep> k1 =
      successor_reconfigurations(empty3, ConstraintPolicy::k_constrained(1));
  CHECK(k1.size() == 4);
  CHECK(k1.front().trivial());

  // exactly two changes from the empty triangle: choose two of three edges
  const std::vector<ReconfStep> s2 =
      successor_reconfigurations(empty3, ConstraintPolicy::strongly_k_constrained(2));
  CHECK(s2.size() == 3);
  for (const ReconfStep& r : s2) CHECK(r.size() == 2);

  // unconstrained: any of the 2^3 edge subsets
  const std::vector<ReconfStep> all =
      successor_reconfigurations(empty3, ConstraintPolicy::unconstrained());
  CHECK(all.size() == 8);

  const Config big({0, 0, 0, 0, 0, 0, 0}, {});
  CHECK_THROWS_AS(successor_reconfigurations(big, ConstraintPolicy::unconstrained()), Error);

  // local budget: every node incident to at most one change; the first
  // successor is the trivial step
  const std::vector<ReconfStep> loc =
      successor_reconfigurations(empty3, ConstraintPolicy::k_locally_constrained(1));
  CHECK(loc.front().trivial());
  for (const ReconfStep& r : loc) CHECK(r.size() <= 1);
}

TEST_CASE("saturation reproduces the bundled protocol's certificate") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  std::vector<int32_t> all;
  for (int32_t q = 0; q < p.num_states(); ++q) all.push_back(q);

  const std::vector<int32_t> fwd = forward_saturation(p, p.initial_states(), all);
  CHECK(fwd.size() == 10);

  const std::vector<int32_t> bwd = backward_saturation(p, *p.target_set(), all);
  CHECK(names(p, bwd) ==
        sorted({"q0", "q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8"}));

  const SaturationCertificate cert = decide_synchronization_unconstrained(p);
  CHECK(cert.synchronizable);
  CHECK(cert.iterations == 2);
  CHECK(names(p, cert.final_set) ==
        sorted({"q0", "q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8"}));

  CHECK(decide_coverability_unconstrained(p, *p.state_id("q8")));
  CHECK(decide_coverability_unconstrained(p, *p.state_id("sink")));
}

TEST_CASE("saturation answers no when the target needs an impossible broadcast") {
  const Protocol p = Protocol::parse(
      "states a b\n"
      "msg m\n"
      "init a\n"
      "target b\n"
      "a ?m b\n");
  const SaturationCertificate cert = decide_synchronization_unconstrained(p);
  CHECK_FALSE(cert.synchronizable);
  CHECK(cert.final_set.empty());
  CHECK_FALSE(decide_coverability_unconstrained(p, 1));
}

TEST_CASE("bounded search finds the minimal network size") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const ConstraintPolicy un = ConstraintPolicy::unconstrained();

  CHECK(search_synchronizing_execution(p, 1, un).verdict == Verdict::ExhaustedNoWitness);
  CHECK(search_synchronizing_execution(p, 2, un).verdict == Verdict::ExhaustedNoWitness);

  const SearchResult three = search_synchronizing_execution(p, 3, un);
  REQUIRE(three.verdict == Verdict::FoundWitness);
  REQUIRE(three.witness);
  CHECK(all_initial(p, three.witness->initial));
  CHECK(visits_target(p, *three.witness));
  CHECK(validate_execution(p, *three.witness, un).ok);
}

TEST_CASE("two-constrained witness at three nodes has four communications") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const ConstraintPolicy k2 = ConstraintPolicy::k_constrained(2);
  const SearchResult r = search_synchronizing_execution(p, 3, k2);
  REQUIRE(r.verdict == Verdict::FoundWitness);
  REQUIRE(r.witness);
  CHECK(r.witness->num_comm_steps() == 4);
  CHECK(r.witness->steps.size() == 7);
  CHECK(validate_execution(p, *r.witness, k2).ok);
  CHECK(visits_target(p, *r.witness));
}

TEST_CASE("one-constrained search exhausts at three nodes") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const SearchResult r = search_synchronizing_execution(p, 3, ConstraintPolicy::k_constrained(1));
  CHECK(r.verdict == Verdict::ExhaustedNoWitness);
}

TEST_CASE("empty-only seeding still synchronizes with a leading reconfiguration") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const SearchResult r = search_synchronizing_execution(p, 3, ConstraintPolicy::unconstrained(),
                                                        {}, InitialEdges::EmptyOnly);
  REQUIRE(r.verdict == Verdict::FoundWitness);
  CHECK(r.witness->initial.edges().empty());
  CHECK(validate_execution(p, *r.witness, ConstraintPolicy::unconstrained()).ok);
}

TEST_CASE("search results are deterministic across thread counts") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const ConstraintPolicy k2 = ConstraintPolicy::k_constrained(2);
  SearchBudget one;
  one.threads = 1;
  SearchBudget four;
  four.threads = 4;
  const SearchResult a = search_synchronizing_execution(p, 3, k2, one);
  const SearchResult b = search_synchronizing_execution(p, 3, k2, four);
  REQUIRE(a.verdict == b.verdict);
  REQUIRE(a.witness);
  REQUIRE(b.witness);
  CHECK(*a.witness == *b.witness);
  CHECK(a.stats.states == b.stats.states);
  CHECK(a.stats.depth == b.stats.depth);
}

TEST_CASE("budget exceeded is reported instead of a wrong verdict") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  SearchBudget tiny;
  tiny.max_states = 2;
  const SearchResult r =
      search_synchronizing_execution(p, 3, ConstraintPolicy::k_constrained(2), tiny);
  CHECK(r.verdict == Verdict::BudgetExceeded);
}

TEST_CASE("balanced synchronization is decided exactly") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));

  const SearchResult yes = search_synchronizing_execution(p, 3, ConstraintPolicy::k_balanced(2));
  REQUIRE(yes.verdict == Verdict::FoundWitness);
  REQUIRE(yes.witness);
  CHECK(validate_execution(p, *yes.witness, ConstraintPolicy::k_balanced(2)).ok);
  CHECK(visits_target(p, *yes.witness));
  CHECK(all_initial(p, yes.witness->initial));

  // four edge changes are unavoidable but only three are allowed
  const SearchResult no = search_synchronizing_execution(p, 3, ConstraintPolicy::k_balanced(1));
  CHECK(no.verdict == Verdict::ExhaustedNoWitness);
}

TEST_CASE("abstract reachability agrees with unconstrained search on tiny protocols") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  CHECK_FALSE(abstract_synchronizable(p, 1));
  CHECK_FALSE(abstract_synchronizable(p, 2));
  CHECK(abstract_synchronizable(p, 3));
  CHECK(abstract_synchronizable(p, 4));
}
