#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <functional>

#include "rbnet/graph.hpp"

namespace rbnet {

// Compact configuration for search: at most 16 nodes, labels below 256.
// Edge {u,v} with u < v sits at bit v*(v-1)/2 + u.
struct PackedConfig {
  uint8_t n = 0;
  std::array<uint8_t, 16> labels{};
  unsigned __int128 edges = 0;

  bool operator==(const PackedConfig& o) const {
    return n == o.n && labels == o.labels && edges == o.edges;
  }
};

inline int edge_bit(int u, int v) {
  if (u > v) std::swap(u, v);
  return v * (v - 1) / 2 + u;
}

inline int packed_edge_universe(int n) { return n * (n - 1) / 2; }

PackedConfig pack_config(const Config& c);
Config unpack_config(const PackedConfig& p);

// Representative of the isomorphism class: lexicographically smallest
// (labels, edges) encoding over label-and-structure-preserving relabelings
// when the permutation space is small; otherwise the identity encoding,
// which merges less but never confuses distinct classes.
PackedConfig canonicalize(const PackedConfig& p);

struct PackedConfigHash {
  size_t operator()(const PackedConfig& p) const {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&](uint64_t x) {
      h ^= x;
      h *= 1099511628211ull;
    };
    mix(p.n);
    uint64_t lab[2];
    std::memcpy(lab, p.labels.data(), 16);
    mix(lab[0]);
    mix(lab[1]);
    mix(static_cast<uint64_t>(p.edges));
    mix(static_cast<uint64_t>(p.edges >> 64));
    return static_cast<size_t>(h);
  }
};

}  // namespace rbnet
