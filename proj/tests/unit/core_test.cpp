#include <doctest.h>

#include <string>
#include <vector>

#include "rbnet/errors.hpp"
#include "rbnet/execution.hpp"
#include "rbnet/graph.hpp"
#include "rbnet/protocol.hpp"

using namespace rbnet;

namespace {
std::string asset(const std::string& name) { return std::string(RBNET_ASSETS_DIR "/") + name; }
}  // namespace

TEST_CASE("bundled protocol parses with the expected shape") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  CHECK(p.num_states() == 10);
  CHECK(p.num_messages() == 4);
  CHECK(p.transitions().size() == 45);
  REQUIRE(p.state_id("q0"));
  CHECK(p.initial_states() == std::vector<int32_t>{*p.state_id("q0")});
  REQUIRE(p.target_set());
  CHECK(p.target_set()->size() == 3);
  CHECK(p.is_target(*p.state_id("q4")));
  CHECK(p.is_target(*p.state_id("q6")));
  CHECK(p.is_target(*p.state_id("q8")));
  CHECK_FALSE(p.is_target(*p.state_id("q0")));

  // every state can receive every message after sink completion
  for (int32_t q = 0; q < p.num_states(); ++q)
    for (int32_t m = 0; m < p.num_messages(); ++m) CHECK(p.can_receive(q, m));
}

TEST_CASE("protocol DSL round trips") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const Protocol q = Protocol::parse(p.to_dsl());
  CHECK(q.num_states() == p.num_states());
  CHECK(q.num_messages() == p.num_messages());
  CHECK(q.to_dsl() == p.to_dsl());
}

TEST_CASE("protocol parse errors") {
  CHECK_THROWS_AS(Protocol::parse("states a\nmsg m\ninit a\na !m b\n"), Error);
  CHECK_THROWS_AS(Protocol::parse("states a b\nmsg m\ninit a\na m b\n"), Error);
  CHECK_THROWS_AS(Protocol::parse("states a b\nmsg m\ninit c\n"), Error);
}

TEST_CASE("edges normalize and configs compare") {
  const Edge e(2, 1);
  CHECK(e.u == 1);
  CHECK(e.v == 2);
  CHECK_THROWS_AS(Edge(3, 3), Error);

  Config c({0, 1, 2}, {Edge(0, 1)});
  CHECK(c.num_nodes() == 3);
  CHECK(c.has_edge(1, 0));
  CHECK(c.degree(0) == 1);
  CHECK(c.neighbors(0) == std::vector<int32_t>{1});
  c.add_edge(0, 2);
  CHECK(c.degree(0) == 2);
  c.remove_edge(0, 1);
  CHECK_FALSE(c.has_edge(0, 1));
  CHECK_THROWS_AS(c.add_edge(0, 2), Error);
  CHECK_THROWS_AS(c.remove_edge(0, 1), Error);
}

TEST_CASE("distance is the symmetric difference on comparable configs") {
  const Config a({5, 5, 5}, {Edge(0, 1), Edge(1, 2)});
  const Config b({5, 5, 5}, {Edge(1, 2), Edge(0, 2)});
  CHECK(distance(a, b) == 2);
  CHECK(distance(a, a) == 0);
  CHECK(node_distance(a, b, 0) == 2);
  CHECK(node_distance(a, b, 1) == 1);
  CHECK(node_distance(a, b, 2) == 1);

  const Config other_labels({5, 5, 6}, {});
  CHECK(distance(a, other_labels) == 0);
  CHECK_THROWS_AS(distance_strict(a, other_labels), Error);
  const Config other_size({5, 5}, {});
  CHECK(distance(a, other_size) == 0);
  CHECK_THROWS_AS(distance_strict(a, other_size), Error);
}

TEST_CASE("juxtaposition shifts the second configuration") {
  const Config a({1, 2}, {Edge(0, 1)});
  const Config b({3}, {});
  const Config j = juxtapose(a, b);
  CHECK(j.num_nodes() == 3);
  CHECK(j.labels() == std::vector<int32_t>{1, 2, 3});
  CHECK(j.edges() == std::vector<Edge>{Edge(0, 1)});

  const Config p = power(a, 3);
  CHECK(p.num_nodes() == 6);
  CHECK(p.edges() == std::vector<Edge>{Edge(0, 1), Edge(2, 3), Edge(4, 5)});
  CHECK_THROWS_AS(power(a, 0), Error);
}

TEST_CASE("topology analysis of a star and a path") {
  // star with five leaves: longest simple path has two edges
  std::vector<Edge> star;
  for (int32_t leaf = 1; leaf <= 5; ++leaf) star.emplace_back(0, leaf);
  const TopologyReport s = analyze_topology(Config({0, 0, 0, 0, 0, 0}, star));
  CHECK(s.max_degree == 5);
  CHECK(s.longest_path_edges == 2);
  CHECK(s.diameter == 2);

  const Config path({0, 0, 0, 0}, {Edge(0, 1), Edge(1, 2), Edge(2, 3)});
  const TopologyReport r = analyze_topology(path);
  CHECK(r.max_degree == 2);
  CHECK(r.longest_path_edges == 3);
  CHECK(r.diameter == 3);

  CHECK(satisfies_path_bound(path, 3));
  CHECK_FALSE(satisfies_path_bound(path, 2));
  CHECK(satisfies_degree_bound(path, 2));
  CHECK_FALSE(satisfies_degree_bound(path, 1));
}

TEST_CASE("bundled trace replays to the target configuration") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const Execution e = execution_load_file(asset("fig2.trace.json"), p);
  CHECK(e.initial.num_nodes() == 3);
  CHECK(e.steps.size() == 7);
  CHECK(e.num_comm_steps() == 4);
  CHECK(e.num_reconf_steps() == 3);

  const std::vector<Config> configs = replay(p, e);
  CHECK(configs.size() == 8);
  CHECK(all_initial(p, configs.front()));
  CHECK(all_target(p, configs.back()));
  CHECK(visits_target(p, e));
  CHECK(configs.back().labels() ==
        std::vector<int32_t>{*p.state_id("q4"), *p.state_id("q6"), *p.state_id("q8")});
}

TEST_CASE("trace JSON round trips") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  const Execution e = execution_load_file(asset("fig2.trace.json"), p);
  const std::string text = execution_to_json(e, p, "fig1.rbn");
  const Execution back = execution_from_json(text, p);
  CHECK(back == e);
  CHECK(execution_to_json(back, p, "fig1.rbn") == text);
}

TEST_CASE("trace parsing resolves unique choices and rejects ambiguous ones") {
  const Protocol p = Protocol::load_file(asset("fig1.rbn"));
  // node 1 broadcasts c from q5; receiver q2 has exactly one reception of c
  const char* unique = R"({
    "initial": {"labels": ["q2", "q5"], "edges": [[0, 1]]},
    "steps": [{"comm": {"from": 1, "msg": "c"}}]
  })";
  const Execution e = execution_from_json(unique, p);
  const CommStep& c = std::get<CommStep>(e.steps[0]);
  CHECK(c.to == *p.state_id("q6"));
  REQUIRE(c.recv.size() == 1);
  CHECK(c.recv[0].second == *p.state_id("q3"));

  // receiver q0 can move to q5 or q7 on a; the trace must disambiguate
  const char* ambiguous = R"({
    "initial": {"labels": ["q0", "q0"], "edges": [[0, 1]]},
    "steps": [{"comm": {"from": 0, "msg": "a"}}]
  })";
  try {
    execution_from_json(ambiguous, p);
    FAIL("expected AmbiguousChoice");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::AmbiguousChoice);
  }
}

TEST_CASE("communication requires every neighbor to receive") {
  const Protocol p = Protocol::parse(
      "states s0 s1 s2\n"
      "msg m\n"
      "init s0\n"
      "s0 !m s1\n"
      "s1 ?m s2\n");
  // neighbor in s0 has no reception of m, so the broadcast is disabled
  const Config linked({0, 0}, {Edge(0, 1)});
  CommStep step;
  step.from = 0;
  step.message = 0;
  step.to = 1;
  CHECK_THROWS_AS(apply_comm(p, linked, step), Error);

  // without the link the same broadcast fires solo
  const Config solo({0, 0}, {});
  const Config after = apply_comm(p, solo, step);
  CHECK(after.labels() == std::vector<int32_t>{1, 0});

  // a receptive neighbor joins the step
  CommStep heard;
  heard.from = 0;
  heard.message = 0;
  heard.to = 1;
  heard.recv = {{1, 2}};
  const Config both = apply_comm(p, Config({0, 1}, {Edge(0, 1)}), heard);
  CHECK(both.labels() == std::vector<int32_t>{1, 2});
}

TEST_CASE("replay rejects alternation violations") {
  const Protocol p = Protocol::parse(
      "states s0 s1\n"
      "msg m\n"
      "init s0\n"
      "s0 !m s1\n");
  Execution e;
  e.initial = Config({0, 0}, {});
  e.steps.emplace_back(ReconfStep{{Edge(0, 1)}, {}});
  e.steps.emplace_back(ReconfStep{{}, {Edge(0, 1)}});
  CHECK_THROWS_AS(replay(p, e), Error);

  // trivial reconfigurations are real steps and restore alternation
  Execution ok;
  ok.initial = Config({0, 0}, {});
  CommStep c;
  c.from = 0;
  c.message = 0;
  c.to = 1;
  ok.steps.emplace_back(c);
  ok.steps.emplace_back(ReconfStep{});
  CommStep c2;
  c2.from = 1;
  c2.message = 0;
  c2.to = 1;
  ok.steps.emplace_back(c2);
  CHECK(replay(p, ok).size() == 4);
}
