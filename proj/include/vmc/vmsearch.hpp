#pragma once

#include <cstdint>
#include <optional>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "vmc/graph.hpp"
#include "vmc/smallgraph.hpp"

namespace vmc {

struct VmOptions {
  int vertex_cap = 12;
  size_t orbit_bound = size_t{1} << 20;
};

// Closure of {g} under local complementation at every vertex, deduplicated by
// exact adjacency equality. Throws Error (with the partial count) if the
// closure exceeds opts.orbit_bound.
std::vector<Graph> local_equivalence_orbit(const Graph& g,
                                           const VmOptions& opts = {});

// (G - v, G*v - v, G/v): the three ways to remove a vertex up to local
// equivalence.
std::tuple<Graph, Graph, Graph> three_way_reductions(const Graph& g,
                                                     VertexId v);

// Local-equivalence closure with parent links, for labeled membership tests
// and script recovery. All members share g's vertex set.
class LcOrbit {
 public:
  LcOrbit(const Graph& g, size_t bound = VmOptions{}.orbit_bound);

  size_t size() const { return order_.size(); }
  bool contains(const Graph& h) const;
  // Local complementations leading from the start graph to h exactly.
  std::optional<OperationScript> script_to(const Graph& h) const;
  std::vector<Graph> members() const;

 private:
  std::vector<VertexId> labels_;
  std::vector<PackedGraph> order_;
  struct Link {
    int64_t parent;
    int8_t lc_vertex;
  };
  std::unordered_map<PackedGraph, Link, PackedGraphHash> links_;
  PackedGraph key_of(const Graph& h) const;
};

// True iff some graph locally equivalent to g has an induced subgraph
// isomorphic to h. Memoized on canonical forms across calls; thread-safe.
bool contains_vertex_minor(const Graph& g, const Graph& h,
                           const VmOptions& opts = {});

// A replayable script taking g to a graph isomorphic to h, when containment
// holds.
std::optional<OperationScript> vertex_minor_witness(const Graph& g,
                                                    const Graph& h,
                                                    const VmOptions& opts = {});

// Labeled containment: h must appear on exactly its own vertex labels.
bool contains_labeled_vertex_minor(const Graph& g, const Graph& h,
                                   const VmOptions& opts = {});
std::optional<OperationScript> labeled_vm_script(const Graph& g, const Graph& h,
                                                 const VmOptions& opts = {});

// Pivot-minor containment for sided bipartite graphs: true iff some graph
// pivot-equivalent to g has an induced subgraph strongly isomorphic to h.
bool contains_pivot_minor_bipartite(const SidedBipartiteGraph& g,
                                    const SidedBipartiteGraph& h,
                                    const VmOptions& opts = {});
std::optional<OperationScript> pivot_minor_witness(const SidedBipartiteGraph& g,
                                                   const SidedBipartiteGraph& h,
                                                   const VmOptions& opts = {});

// Pivot of a sided bipartite graph: the usual pivot with the two endpoints
// swapping sides.
SidedBipartiteGraph sided_pivot(const SidedBipartiteGraph& g, VertexId u,
                                VertexId v);

// Closure of {g} under pivots, as sided graphs.
std::vector<SidedBipartiteGraph> pivot_orbit(const SidedBipartiteGraph& g,
                                             const VmOptions& opts = {});

enum class EquivalenceKind { Local, Pivot };

// Canonical representative of a local-equivalence (or pivot-equivalence)
// class: the member of the closure with the least canonical form.
struct CanonicalClass {
  CanonicalForm representative;
  EquivalenceKind kind;
  size_t orbit_size;
  auto operator<=>(const CanonicalClass&) const = default;
};

CanonicalClass canonical_class(const Graph& g, EquivalenceKind kind,
                               const VmOptions& opts = {});

// Clears the process-wide containment memo (tests use this to measure work).
void clear_containment_memo();

}  // namespace vmc
