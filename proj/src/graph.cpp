#include "rbnet/graph.hpp"

#include <algorithm>
#include <queue>
#include <sstream>

#include "rbnet/protocol.hpp"

namespace rbnet {

Edge::Edge(int32_t a, int32_t b) {
  if (a == b) fail(ErrorCode::InvalidEdge, "self loop on node " + std::to_string(a));
  u = std::min(a, b);
  v = std::max(a, b);
}

Config::Config(std::vector<int32_t> labels, std::vector<Edge> edges)
    : labels_(std::move(labels)), edges_(std::move(edges)) {
  for (const Edge& e : edges_) {
    if (e.u >= e.v) fail(ErrorCode::InvalidEdge, "edge endpoints must satisfy u < v");
    if (e.u < 0 || e.v >= num_nodes()) fail(ErrorCode::InvalidEdge, "edge endpoint out of range");
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

int32_t Config::label(int32_t node) const {
  check_node(node);
  return labels_[node];
}

void Config::set_label(int32_t node, int32_t state) {
  check_node(node);
  labels_[node] = state;
}

void Config::check_node(int32_t node) const {
  if (node < 0 || node >= num_nodes())
    fail(ErrorCode::InvalidNode, "node " + std::to_string(node) + " out of range");
}

bool Config::has_edge(int32_t u, int32_t v) const {
  check_node(u);
  check_node(v);
  if (u == v) return false;
  return std::binary_search(edges_.begin(), edges_.end(), Edge(u, v));
}

void Config::add_edge(int32_t u, int32_t v) {
  check_node(u);
  check_node(v);
  Edge e(u, v);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it != edges_.end() && *it == e)
    fail(ErrorCode::InvalidEdge,
         "edge {" + std::to_string(e.u) + "," + std::to_string(e.v) + "} already present");
  edges_.insert(it, e);
}

void Config::remove_edge(int32_t u, int32_t v) {
  check_node(u);
  check_node(v);
  Edge e(u, v);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || !(*it == e))
    fail(ErrorCode::InvalidEdge,
         "edge {" + std::to_string(e.u) + "," + std::to_string(e.v) + "} not present");
  edges_.erase(it);
}

std::vector<int32_t> Config::neighbors(int32_t node) const {
  check_node(node);
  std::vector<int32_t> out;
  for (const Edge& e : edges_) {
    if (e.u == node) out.push_back(e.v);
    else if (e.v == node) out.push_back(e.u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int32_t Config::degree(int32_t node) const {
  check_node(node);
  int32_t d = 0;
  for (const Edge& e : edges_)
    if (e.u == node || e.v == node) ++d;
  return d;
}

namespace {

bool comparable(const Config& a, const Config& b) {
  return a.num_nodes() == b.num_nodes() && a.labels() == b.labels();
}

int64_t symmetric_difference_size(const std::vector<Edge>& x, const std::vector<Edge>& y) {
  int64_t count = 0;
  size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i] == y[j]) {
      ++i;
      ++j;
    } else if (x[i] < y[j]) {
      ++count;
      ++i;
    } else {
      ++count;
      ++j;
    }
  }
  count += static_cast<int64_t>(x.size() - i) + static_cast<int64_t>(y.size() - j);
  return count;
}

}  // namespace

int64_t distance(const Config& a, const Config& b) {
  if (!comparable(a, b)) return 0;
  return symmetric_difference_size(a.edges(), b.edges());
}

int64_t distance_strict(const Config& a, const Config& b) {
  if (a.num_nodes() != b.num_nodes())
    fail(ErrorCode::NodeSetMismatch, "configs have different node counts");
  if (a.labels() != b.labels()) fail(ErrorCode::LabelMismatch, "configs have different labels");
  return symmetric_difference_size(a.edges(), b.edges());
}

int64_t node_distance(const Config& a, const Config& b, int32_t node) {
  if (node < 0 || node >= a.num_nodes())
    fail(ErrorCode::InvalidNode, "node " + std::to_string(node) + " out of range");
  if (!comparable(a, b)) return 0;
  int64_t count = 0;
  for (const Edge& e : a.edges())
    if ((e.u == node || e.v == node) && !b.has_edge(e.u, e.v)) ++count;
  for (const Edge& e : b.edges())
    if ((e.u == node || e.v == node) && !a.has_edge(e.u, e.v)) ++count;
  return count;
}

Config juxtapose(const Config& a, const Config& b) {
  std::vector<int32_t> labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  std::vector<Edge> edges = a.edges();
  const int32_t shift = a.num_nodes();
  for (const Edge& e : b.edges()) edges.push_back(Edge(e.u + shift, e.v + shift));
  return Config(std::move(labels), std::move(edges));
}

Config power(const Config& a, int32_t n) {
  if (n < 1) fail(ErrorCode::PreconditionViolated, "power requires n >= 1");
  Config out = a;
  for (int32_t i = 1; i < n; ++i) out = juxtapose(out, a);
  return out;
}

namespace {

// Exact longest simple path (in edges) by DFS from every start node.
int32_t longest_simple_path(const std::vector<std::vector<int32_t>>& adj) {
  const int32_t n = static_cast<int32_t>(adj.size());
  int32_t best = 0;
  std::vector<char> visited(n, 0);
  auto dfs = [&](auto&& self, int32_t node, int32_t len) -> void {
    best = std::max(best, len);
    visited[node] = 1;
    for (int32_t next : adj[node])
      if (!visited[next]) self(self, next, len + 1);
    visited[node] = 0;
  };
  for (int32_t s = 0; s < n; ++s) dfs(dfs, s, 0);
  return best;
}

}  // namespace

TopologyReport analyze_topology(const Config& c) {
  const int32_t n = c.num_nodes();
  std::vector<std::vector<int32_t>> adj(n);
  for (const Edge& e : c.edges()) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  TopologyReport report;
  for (int32_t v = 0; v < n; ++v)
    report.max_degree = std::max(report.max_degree, static_cast<int32_t>(adj[v].size()));
  report.longest_path_edges = longest_simple_path(adj);
  for (int32_t s = 0; s < n; ++s) {
    std::vector<int32_t> dist(n, -1);
    std::queue<int32_t> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int32_t v = q.front();
      q.pop();
      report.diameter = std::max(report.diameter, dist[v]);
      for (int32_t w : adj[v])
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
    }
  }
  return report;
}

bool satisfies_degree_bound(const Config& c, int32_t bound) {
  std::vector<int32_t> deg(c.num_nodes(), 0);
  for (const Edge& e : c.edges()) {
    if (++deg[e.u] > bound) return false;
    if (++deg[e.v] > bound) return false;
  }
  return true;
}

bool satisfies_path_bound(const Config& c, int32_t bound) {
  return analyze_topology(c).longest_path_edges <= bound;
}

std::string to_dot(const Config& c, const Protocol& protocol) {
  std::ostringstream out;
  out << "graph config {\n";
  for (int32_t v = 0; v < c.num_nodes(); ++v)
    out << "  n" << v << " [label=\"" << v << ":" << protocol.state_name(c.label(v)) << "\"];\n";
  for (const Edge& e : c.edges()) out << "  n" << e.u << " -- n" << e.v << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace rbnet
