#include <doctest.h>

#include <map>
#include <string>
#include <vector>

#include "rbnet/errors.hpp"
#include "rbnet/execution.hpp"
#include "rbnet/policy.hpp"
#include "rbnet/protocol.hpp"
#include "rbnet/transforms.hpp"

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

CommStep comm(int32_t from, int32_t msg, int32_t to,
              std::vector<std::pair<int32_t, int32_t>> recv = {}) {
  CommStep c;
  c.from = from;
  c.message = msg;
  c.to = to;
  c.recv = std::move(recv);
  return c;
}

std::map<int32_t, int64_t> label_counts(const Config& c) {
  std::map<int32_t, int64_t> counts;
  for (int32_t l : c.labels()) ++counts[l];
  return counts;
}

std::map<int32_t, int64_t> scaled(std::map<int32_t, int64_t> counts, int64_t factor) {
  for (auto& [state, n] : counts) n *= factor;
  return counts;
}

void check_scaled_final(const Protocol& p, const Execution& in, const Execution& out,
                        int64_t factor) {
  const Config fin_in = replay(p, in).back();
  const Config fin_out = replay(p, out).back();
  CHECK(label_counts(fin_out) == scaled(label_counts(fin_in), factor));
}

// both nodes climb to s2 through solo broadcasts; 1-constrained, trivial
// reconfigurations only
Execution two_node_sync(const Protocol& p) {
  Execution e;
  e.initial = Config({0, 0}, {});
  e.steps.emplace_back(comm(0, 0, 1));
  e.steps.emplace_back(ReconfStep{});
  e.steps.emplace_back(comm(1, 0, 1));
  e.steps.emplace_back(ReconfStep{});
  e.steps.emplace_back(comm(0, 1, 2));
  e.steps.emplace_back(ReconfStep{});
  e.steps.emplace_back(comm(1, 1, 2));
  REQUIRE(replay(p, e).size() == 8);
  REQUIRE(visits_target(p, e));
  return e;
}

}  // namespace

TEST_CASE("rewiring to the receiver set gives identity-bounded steps") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const Execution e = execution_load_file(asset("fig2.trace.json"), p);

  const Execution out = to_id_constrained(p, e);
  CHECK(out.num_comm_steps() == e.num_comm_steps());
  CHECK(validate_execution(p, out,
                           ConstraintPolicy::f_constrained(Bound::parse("identity")))
            .ok);
  CHECK(is_comm(out.steps.back()));
  CHECK(visits_target(p, out));
  check_scaled_final(p, e, out, 1);

  // empty input stays empty
  Execution empty;
  empty.initial = e.initial;
  const Execution still = to_id_constrained(p, empty);
  CHECK(still.steps.empty());
}

TEST_CASE("divergent bounds scale to the minimal sufficient copy count") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const Execution e = execution_load_file(asset("fig2.trace.json"), p);

  // floor_sqrt needs nine nodes before the budget covers three
  const Execution out = to_f_constrained(p, e, Bound::parse("floor_sqrt"));
  CHECK(out.initial.num_nodes() == 9);
  CHECK(validate_execution(p, out,
                           ConstraintPolicy::f_constrained(Bound::parse("floor_sqrt")))
            .ok);
  CHECK(visits_target(p, out));
  check_scaled_final(p, e, out, 3);

  // the identity bound needs exactly one copy and reduces to the plain rewiring
  const Execution ident = to_f_constrained(p, e, Bound::parse("identity"));
  CHECK(ident == to_id_constrained(p, e));

  CHECK_THROWS_AS(to_f_constrained(p, e, Bound::parse("const:5")), Error);
  CHECK_THROWS_AS(to_f_constrained(p, e, Bound::parse("linear:0,9")), Error);
}

TEST_CASE("locally constrained staging spreads changes over copies") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const Execution e = execution_load_file(asset("fig2.trace.json"), p);

  // the largest reconfiguration has two changes, so two copies suffice
  const Execution out = to_one_locally_constrained(p, e);
  CHECK(out.initial.num_nodes() == 6);
  CHECK(validate_execution(p, out, ConstraintPolicy::k_locally_constrained(1)).ok);
  CHECK(visits_target(p, out));
  check_scaled_final(p, e, out, 2);
  const Config fin = replay(p, out).back();
  CHECK(fin == power(replay(p, e).back(), 2));

  // an execution that opens with a reconfiguration is rejected
  Execution shifted;
  shifted.initial = e.initial;
  shifted.steps.push_back(ReconfStep{});
  shifted.steps.insert(shifted.steps.end(), e.steps.begin(), e.steps.end());
  try {
    to_one_locally_constrained(p, shifted);
    FAIL("expected NotCommBounded");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NotCommBounded);
  }
}

TEST_CASE("lifting a one-constrained run to exact k") {
  const Protocol p = chain_protocol();
  const Execution e = two_node_sync(p);

  const Execution out = lift_one_to_k(p, e, 2);
  // smallest even copy count above k: four copies of two nodes
  CHECK(out.initial.num_nodes() == 8);
  CHECK(validate_execution(p, out, ConstraintPolicy::k_constrained(2)).ok);
  CHECK(validate_execution(p, out, ConstraintPolicy::strongly_k_constrained(2)).ok);
  CHECK(visits_target(p, out));
  check_scaled_final(p, e, out, 4);

  const Execution out3 = lift_one_to_k(p, e, 3);
  CHECK(out3.initial.num_nodes() == 12);
  CHECK(validate_execution(p, out3, ConstraintPolicy::strongly_k_constrained(3)).ok);

  // a two-constrained input is rejected
  const Protocol fig = Protocol::load_file(asset("fig1.rbn"));
  const Execution fig2 = execution_load_file(asset("fig2.trace.json"), fig);
  try {
    lift_one_to_k(fig, fig2, 2);
    FAIL("expected PreconditionViolated");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::PreconditionViolated);
  }
}

TEST_CASE("weak steps become exactly k without needing synchronization") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const Execution e = execution_load_file(asset("fig2.trace.json"), p);

  const Execution out = weak_to_strong(p, e, 2);
  CHECK(validate_execution(p, out, ConstraintPolicy::strongly_k_constrained(2)).ok);
  check_scaled_final(p, e, out, 4);

  // a non-synchronizing prefix is still accepted
  Execution prefix;
  prefix.initial = e.initial;
  prefix.steps.assign(e.steps.begin(), e.steps.begin() + 3);
  REQUIRE_FALSE(visits_target(p, prefix));
  const Execution half = weak_to_strong(p, prefix, 2);
  CHECK(validate_execution(p, half, ConstraintPolicy::strongly_k_constrained(2)).ok);
  check_scaled_final(p, prefix, half, 4);

  try {
    weak_to_strong(p, e, 1);
    FAIL("expected PreconditionViolated");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::PreconditionViolated);
  }
}

TEST_CASE("balanced runs compile to one-constrained copies") {
  const Protocol p = chain_protocol();

  SUBCASE("zero repeated cells: sequential copies") {
    const Execution e = two_node_sync(p);
    const Execution out = balanced_to_constrained_k1(p, e, 3);
    CHECK(out.initial.num_nodes() == 6);
    CHECK(validate_execution(p, out, ConstraintPolicy::k_constrained(1)).ok);
    const Config fin = replay(p, out).back();
    CHECK(fin == power(replay(p, e).back(), 3));
  }

  SUBCASE("one repeated cell needs two copies") {
    // B R(0) B R(2) B: balanced for k=1, kappa = 1
    Execution e;
    e.initial = Config({0, 0, 0}, {});
    e.steps.emplace_back(comm(0, 0, 1));
    e.steps.emplace_back(ReconfStep{});
    e.steps.emplace_back(comm(1, 0, 1));
    e.steps.emplace_back(ReconfStep{{Edge(0, 1), Edge(0, 2)}, {}});
    e.steps.emplace_back(comm(2, 0, 1, {{0, 1}}));
    REQUIRE(replay(p, e).size() == 6);
    REQUIRE(validate_execution(p, e, ConstraintPolicy::k_balanced(1)).ok);

    try {
      balanced_to_constrained_k1(p, e, 1);
      FAIL("expected InsufficientCopies");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::InsufficientCopies);
    }

    const Execution out = balanced_to_constrained_k1(p, e, 2);
    CHECK(out.initial.num_nodes() == 6);
    CHECK(validate_execution(p, out, ConstraintPolicy::k_constrained(1)).ok);
    const Config fin = replay(p, out).back();
    CHECK(fin == power(replay(p, e).back(), 2));
  }

  SUBCASE("unbalanced input is rejected") {
    const Protocol fig = Protocol::load_file(asset("fig1.rbn"));
    const Execution fig2 = execution_load_file(asset("fig2.trace.json"), fig);
    try {
      balanced_to_constrained_k1(fig, fig2, 4);
      FAIL("expected NotBalanced");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::NotBalanced);
    }
  }
}
