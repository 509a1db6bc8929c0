#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbnet/errors.hpp"

namespace rbnet {

class Protocol;

// Undirected edge between distinct nodes, stored with u < v.
struct Edge {
  int32_t u = 0;
  int32_t v = 0;

  Edge() = default;
  Edge(int32_t a, int32_t b);

  auto operator<=>(const Edge&) const = default;
};

// A configuration: every node carries a protocol state, edges are an
// undirected simple graph without self loops.
class Config {
 public:
  Config() = default;
  Config(std::vector<int32_t> labels, std::vector<Edge> edges);

  int32_t num_nodes() const { return static_cast<int32_t>(labels_.size()); }
  const std::vector<int32_t>& labels() const { return labels_; }
  int32_t label(int32_t node) const;
  void set_label(int32_t node, int32_t state);

  // Sorted, duplicate free.
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(int32_t u, int32_t v) const;
  void add_edge(int32_t u, int32_t v);
  void remove_edge(int32_t u, int32_t v);

  std::vector<int32_t> neighbors(int32_t node) const;
  int32_t degree(int32_t node) const;

  bool operator==(const Config&) const = default;

 private:
  void check_node(int32_t node) const;

  std::vector<int32_t> labels_;
  std::vector<Edge> edges_;
};

// Symmetric difference size of the edge sets when both configs have the same
// node count and identical labels; 0 otherwise.
int64_t distance(const Config& a, const Config& b);

// Like distance but throws LabelMismatch / NodeSetMismatch instead of
// returning 0 when the configs are not comparable.
int64_t distance_strict(const Config& a, const Config& b);

// Number of symmetric-difference edges incident to the given node; 0 when the
// configs are not comparable.
int64_t node_distance(const Config& a, const Config& b, int32_t node);

// Disjoint union; the second config's nodes are shifted by a.num_nodes().
Config juxtapose(const Config& a, const Config& b);

// n-fold juxtaposition of a with itself, n >= 1.
Config power(const Config& a, int32_t n);

struct TopologyReport {
  int32_t max_degree = 0;
  // Number of edges on the longest simple path (exact, exponential search).
  int32_t longest_path_edges = 0;
  // Largest finite shortest-path distance; 0 for graphs without edges.
  int32_t diameter = 0;
};

TopologyReport analyze_topology(const Config& c);

bool satisfies_degree_bound(const Config& c, int32_t bound);
bool satisfies_path_bound(const Config& c, int32_t bound);

std::string to_dot(const Config& c, const Protocol& protocol);

}  // namespace rbnet
