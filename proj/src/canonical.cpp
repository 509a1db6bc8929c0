#include "rbnet/canonical.hpp"

#include <algorithm>
#include <map>
#include <vector>

namespace rbnet {

PackedConfig pack_config(const Config& c) {
  if (c.num_nodes() > 16)
    fail(ErrorCode::BudgetUnbounded, "packed configurations support at most 16 nodes");
  PackedConfig p;
  p.n = static_cast<uint8_t>(c.num_nodes());
  for (int32_t i = 0; i < c.num_nodes(); ++i) {
    if (c.label(i) > 255) fail(ErrorCode::BudgetUnbounded, "packed labels must fit in a byte");
    p.labels[i] = static_cast<uint8_t>(c.label(i));
  }
  for (const Edge& e : c.edges()) p.edges |= static_cast<unsigned __int128>(1) << edge_bit(e.u, e.v);
  return p;
}

Config unpack_config(const PackedConfig& p) {
  std::vector<int32_t> labels(p.labels.begin(), p.labels.begin() + p.n);
  std::vector<Edge> edges;
  for (int v = 1; v < p.n; ++v)
    for (int u = 0; u < v; ++u)
      if ((p.edges >> edge_bit(u, v)) & 1) edges.push_back(Edge(u, v));
  return Config(std::move(labels), std::move(edges));
}

namespace {

// perm[new_index] = old node; returns the encoding of p relabeled by perm.
PackedConfig apply_perm(const PackedConfig& p, const std::array<uint8_t, 16>& perm) {
  PackedConfig out;
  out.n = p.n;
  for (int i = 0; i < p.n; ++i) out.labels[i] = p.labels[perm[i]];
  for (int v = 1; v < p.n; ++v)
    for (int u = 0; u < v; ++u)
      if ((p.edges >> edge_bit(perm[u], perm[v])) & 1)
        out.edges |= static_cast<unsigned __int128>(1) << edge_bit(u, v);
  return out;
}

bool encoding_less(const PackedConfig& a, const PackedConfig& b) {
  for (int i = 0; i < a.n; ++i)
    if (a.labels[i] != b.labels[i]) return a.labels[i] < b.labels[i];
  return a.edges < b.edges;
}

}  // namespace

PackedConfig canonicalize(const PackedConfig& p) {
  const int n = p.n;
  if (n <= 1) return p;

  // Color refinement: start from labels, refine twice by sorted neighbor
  // colors. The refined coloring is an isomorphism invariant.
  std::array<int32_t, 16> color{};
  for (int i = 0; i < n; ++i) color[i] = p.labels[i];
  for (int round = 0; round < 2; ++round) {
    std::vector<std::pair<std::vector<int32_t>, int>> sigs(n);
    for (int i = 0; i < n; ++i) {
      std::vector<int32_t> sig;
      sig.push_back(color[i]);
      for (int j = 0; j < n; ++j)
        if (j != i && ((p.edges >> edge_bit(std::min(i, j), std::max(i, j))) & 1))
          sig.push_back(color[j]);
      std::sort(sig.begin() + 1, sig.end());
      sigs[i] = {std::move(sig), i};
    }
    std::map<std::vector<int32_t>, int32_t> index;
    for (const auto& [sig, node] : sigs) index.emplace(sig, 0);
    int32_t next = 0;
    for (auto& [sig, idx] : index) idx = next++;
    for (const auto& [sig, node] : sigs) color[node] = index[sig];
  }

  // Nodes ordered by refined color; permutations explored only within
  // equal-color runs.
  std::array<uint8_t, 16> base{};
  for (int i = 0; i < n; ++i) base[i] = static_cast<uint8_t>(i);
  std::stable_sort(base.begin(), base.begin() + n,
                   [&](uint8_t a, uint8_t b) { return color[a] < color[b]; });

  std::vector<std::pair<int, int>> runs;
  uint64_t total_perms = 1;
  bool feasible = true;
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && color[base[j]] == color[base[i]]) ++j;
    runs.emplace_back(i, j);
    const int len = j - i;
    if (len > 8) feasible = false;
    uint64_t fact = 1;
    for (int f = 2; f <= len; ++f) fact *= f;
    total_perms *= fact;
    if (total_perms > 40320) feasible = false;
    i = j;
  }
  if (!feasible) return p;

  std::array<uint8_t, 16> perm = base;
  PackedConfig best = apply_perm(p, perm);
  // Odometer over per-run permutations.
  while (true) {
    size_t r = 0;
    for (; r < runs.size(); ++r) {
      auto [lo, hi] = runs[r];
      if (std::next_permutation(perm.begin() + lo, perm.begin() + hi)) break;
      // next_permutation wrapped this run to its first ordering; carry on.
    }
    if (r == runs.size()) break;
    PackedConfig cand = apply_perm(p, perm);
    if (encoding_less(cand, best)) best = cand;
  }
  return best;
}

}  // namespace rbnet
