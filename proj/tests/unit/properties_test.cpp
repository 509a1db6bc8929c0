#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "generators.hpp"
#include "rbnet/canonical.hpp"
#include "rbnet/errors.hpp"
#include "rbnet/execution.hpp"
#include "rbnet/graph.hpp"
#include "rbnet/policy.hpp"
#include "rbnet/protocol.hpp"
#include "rbnet/semantics.hpp"
#include "rbnet/shuffle.hpp"

using namespace rbnet;

TEST_CASE("node distances sum to twice the edge distance") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> size(1, 9);
  std::uniform_int_distribution<int> coin(0, 99);
  for (int iter = 0; iter < 200; ++iter) {
    const int n = size(rng);
    std::vector<int32_t> labels(n, 0);
    Config a(labels, {});
    Config b(labels, {});
    for (int32_t u = 0; u < n; ++u)
      for (int32_t v = u + 1; v < n; ++v) {
        if (coin(rng) < 30) a.add_edge(u, v);
        if (coin(rng) < 30) b.add_edge(u, v);
      }
    int64_t sum = 0;
    for (int32_t v = 0; v < n; ++v) sum += node_distance(a, b, v);
    CHECK(sum == 2 * distance(a, b));
    CHECK(distance(a, b) == distance(b, a));
  }
}

TEST_CASE("random walks replay cleanly and budgets are monotone") {
  std::mt19937 rng(23);
  for (int iter = 0; iter < 60; ++iter) {
    const Protocol p = testgen::random_protocol(rng);
    const Config start = testgen::random_initial_config(rng, p, 4, true);
    const Execution e = testgen::random_walk(rng, p, start, 12);
    const std::vector<Config> trace = replay(p, e);
    CHECK(trace.size() == e.steps.size() + 1);

    CHECK(validate_execution(p, e, ConstraintPolicy::unconstrained()).ok);
    const ValidationReport r2 = validate_execution(p, e, ConstraintPolicy::k_constrained(2));
    const ValidationReport r3 = validate_execution(p, e, ConstraintPolicy::k_constrained(3));
    if (r2.ok) CHECK(r3.ok);
    const ValidationReport strict =
        validate_execution(p, e, ConstraintPolicy::strongly_k_constrained(2));
    if (strict.ok) CHECK(r2.ok);

    CHECK(r2.num_comm == e.num_comm_steps());
    CHECK(r2.num_reconf_steps == e.num_reconf_steps());
    int64_t rewired = 0;
    for (const Step& s : e.steps)
      if (is_reconf(s)) rewired += std::get<ReconfStep>(s).size();
    CHECK(r2.total_rewired == rewired);
  }
}

TEST_CASE("communication-bounded constrained walks are balanced") {
  std::mt19937 rng(37);
  int checked = 0;
  for (int iter = 0; iter < 120; ++iter) {
    const Protocol p = testgen::random_protocol(rng);
    const Config start = testgen::random_initial_config(rng, p, 4, true);
    const Execution e = testgen::trim_to_comm_bounded(testgen::random_walk(rng, p, start, 14));
    if (e.steps.empty()) continue;
    for (int64_t k = 1; k <= 2; ++k) {
      if (!validate_execution(p, e, ConstraintPolicy::k_constrained(k)).ok) continue;
      // alternation gives one reconfiguration between consecutive
      // communications, so the rewiring total stays within the balance budget
      CHECK(validate_execution(p, e, ConstraintPolicy::k_balanced(k)).ok);
      ++checked;
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("canonical form ignores node order") {
  std::mt19937 rng(53);
  std::uniform_int_distribution<int> size(1, 7);
  std::uniform_int_distribution<int> label(0, 3);
  std::uniform_int_distribution<int> coin(0, 99);
  for (int iter = 0; iter < 200; ++iter) {
    const int n = size(rng);
    std::vector<int32_t> labels(n);
    for (int32_t& l : labels) l = label(rng);
    std::vector<Edge> edges;
    for (int32_t u = 0; u < n; ++u)
      for (int32_t v = u + 1; v < n; ++v)
        if (coin(rng) < 40) edges.emplace_back(u, v);
    const Config c(labels, edges);
    CHECK(unpack_config(pack_config(c)) == c);

    std::vector<int32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int32_t> plabels(n);
    for (int32_t v = 0; v < n; ++v) plabels[perm[v]] = labels[v];
    std::vector<Edge> pedges;
    for (const Edge& e : edges) pedges.emplace_back(perm[e.u], perm[e.v]);
    const Config shuffled(plabels, pedges);

    CHECK(canonicalize(pack_config(c)) == canonicalize(pack_config(shuffled)));
  }
}

TEST_CASE("sequential shuffles juxtapose independent runs") {
  const Protocol p = Protocol::parse(
      "states s0 s1\n"
      "msg x\n"
      "init s0\n"
      "target s1\n"
      "s0 !x s1\n");
  const CommStep solo{0, 0, 1, {}};
  const Execution a{Config({0}, {}), {solo}};
  const Execution b{Config({0}, {}), {solo}};

  // without repair the two communications collide
  CHECK_THROWS_AS(shuffle(a, b, ShuffleSchedule{{ShuffleToken::First, ShuffleToken::Second}, false}),
                  Error);
  // a schedule must consume both inputs exactly
  CHECK_THROWS_AS(shuffle(a, b, ShuffleSchedule{{ShuffleToken::First}, true}), Error);
  CHECK_THROWS_AS(
      shuffle(a, b, ShuffleSchedule{{ShuffleToken::MergeReconf, ShuffleToken::MergeReconf}, true}),
      Error);

  const Execution s = shuffle(a, b, sequential_schedule(a, b));
  const std::vector<Config> trace = replay(p, s);
  CHECK(trace.back() == juxtapose(replay(p, a).back(), replay(p, b).back()));
  CHECK(s.num_comm_steps() == 2);

  std::mt19937 rng(71);
  for (int iter = 0; iter < 40; ++iter) {
    const Protocol q = testgen::random_protocol(rng);
    const Execution e1 = testgen::random_walk(rng, q, testgen::random_initial_config(rng, q, 2, true), 8);
    const Execution e2 = testgen::random_walk(rng, q, testgen::random_initial_config(rng, q, 3, true), 8);
    const Execution merged = shuffle(e1, e2, sequential_schedule(e1, e2));
    const std::vector<Config> t = replay(q, merged);
    CHECK(t.back() == juxtapose(replay(q, e1).back(), replay(q, e2).back()));
    CHECK(merged.num_comm_steps() == e1.num_comm_steps() + e2.num_comm_steps());
  }
}

TEST_CASE("found witnesses hold up and search is deterministic") {
  std::mt19937 rng(97);
  SearchBudget budget;
  budget.max_states = 200000;
  budget.max_depth = 60;
  int found = 0;
  for (int iter = 0; iter < 30; ++iter) {
    const Protocol p = testgen::random_protocol(rng);
    const ConstraintPolicy policy = ConstraintPolicy::k_constrained(1);
    const SearchResult r = search_synchronizing_execution(p, 3, policy, budget);
    if (r.verdict == Verdict::FoundWitness) {
      ++found;
      REQUIRE(r.witness);
      CHECK(all_initial(p, r.witness->initial));
      CHECK(visits_target(p, *r.witness));
      CHECK(validate_execution(p, *r.witness, policy).ok);
    }

    SearchBudget wide = budget;
    wide.threads = 4;
    const SearchResult r4 = search_synchronizing_execution(p, 3, policy, wide);
    CHECK(r4.verdict == r.verdict);
    CHECK(r4.stats.states == r.stats.states);
    CHECK((r4.witness.has_value() == r.witness.has_value()));
    if (r.witness && r4.witness) CHECK(*r4.witness == *r.witness);
  }
  CHECK(found > 0);
}

TEST_CASE("counting abstraction matches unconstrained search on small sizes") {
  std::mt19937 rng(131);
  SearchBudget budget;
  budget.max_states = 400000;
  budget.max_depth = 80;
  for (int iter = 0; iter < 20; ++iter) {
    const Protocol p = testgen::random_protocol(rng, 5, 2, 10);
    for (int32_t n = 1; n <= 3; ++n) {
      const SearchResult r =
          search_synchronizing_execution(p, n, ConstraintPolicy::unconstrained(), budget);
      REQUIRE(r.verdict != Verdict::BudgetExceeded);
      CHECK(abstract_synchronizable(p, n) == (r.verdict == Verdict::FoundWitness));
    }
  }
}
