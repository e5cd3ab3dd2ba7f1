#pragma once

#include <array>
#include <cstdint>

#include "vmc/graph.hpp"

namespace vmc {

// Compact graph on vertices 0..n-1 (n <= 16) for the hot search loops:
// orbit closures, canonical labeling, containment memo keys.
struct SmallGraph {
  uint8_t n = 0;
  std::array<uint16_t, 16> row{};

  bool edge(int u, int v) const { return (row[u] >> v) & 1; }
  void toggle(int u, int v) {
    row[u] ^= uint16_t(1u << v);
    row[v] ^= uint16_t(1u << u);
  }
  void set_edge(int u, int v) {
    row[u] |= uint16_t(1u << v);
    row[v] |= uint16_t(1u << u);
  }
  int degree(int v) const { return __builtin_popcount(row[v]); }
  int edge_count() const;

  void local_complement(int v);
  void pivot(int u, int v);           // assumes uv is an edge
  SmallGraph without_vertex(int v) const;  // compacts labels above v

  bool operator==(const SmallGraph&) const = default;
};

// 120-bit upper-triangle key, unique per labeled SmallGraph.
struct PackedGraph {
  uint64_t lo = 0;
  uint64_t hi = 0;
  uint8_t n = 0;
  auto operator<=>(const PackedGraph&) const = default;
};

struct PackedGraphHash {
  size_t operator()(const PackedGraph& p) const;
};

PackedGraph pack(const SmallGraph& g);
SmallGraph unpack(const PackedGraph& p);

// Compacts active labels of g to 0..n-1 in ascending order; n must be <= 16.
SmallGraph to_small(const Graph& g);
Graph to_graph(const SmallGraph& g);

// Canonical labeling by partition refinement with backtracking. perm_out, if
// given, receives the canonical position of each input vertex.
PackedGraph small_canonical(const SmallGraph& g,
                            const std::array<uint8_t, 16>* colors = nullptr,
                            std::array<uint8_t, 16>* perm_out = nullptr,
                            uint16_t* canon_colors_out = nullptr);

}  // namespace vmc
