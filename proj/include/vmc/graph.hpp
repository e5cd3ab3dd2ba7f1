#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vmc/gf2.hpp"

namespace vmc {

using VertexId = int;
inline constexpr int kMaxVertices = 64;
inline constexpr int kDefaultIsoCap = 12;

// Labeled simple graph with vertex labels in 0..63. Labels are stable:
// deleting a vertex never renumbers the others, so operation scripts stay
// replayable. Adjacency is a symmetric zero-diagonal matrix over GF(2).
class Graph {
 public:
  Graph() = default;

  static Graph empty(int n);  // vertices 0..n-1, no edges
  static Graph on_vertices(uint64_t vertex_mask);
  static Graph from_edges(int n,
                          const std::vector<std::pair<int, int>>& edges);
  static Graph complete(int n);
  static Graph path(int n);
  static Graph cycle(int n);
  static Graph complete_multipartite(const std::vector<int>& part_sizes);

  uint64_t vertex_mask() const { return verts_; }
  std::vector<VertexId> vertices() const;
  int vertex_count() const;
  int edge_count() const;
  bool has_vertex(VertexId v) const { return valid(v) && ((verts_ >> v) & 1); }
  bool has_edge(VertexId u, VertexId v) const;
  uint64_t neighbors(VertexId v) const;
  int degree(VertexId v) const;
  std::vector<std::pair<int, int>> edges() const;  // u < v, sorted

  void add_vertex(VertexId v);
  void set_edge(VertexId u, VertexId v, bool present);
  void toggle_edge(VertexId u, VertexId v);

  // Adjacency matrix over GF(2) with rows/cols in ascending label order.
  BitMatrix adjacency_matrix() const;

  bool operator==(const Graph&) const = default;
  size_t hash_value() const;

  void require_vertex(VertexId v) const;

 private:
  static bool valid(VertexId v) { return v >= 0 && v < kMaxVertices; }
  uint64_t verts_ = 0;
  std::array<uint64_t, kMaxVertices> adj_{};  // rows of inactive labels stay 0
};

// ---- elementary operations (all pure) ----

// G*v: complement the adjacency among the neighbors of v.
Graph local_complement(const Graph& g, VertexId v);
// G x uv: three-class complementation plus swapping the labels of u and v.
// Equals G*u*v*u; requires uv to be an edge.
Graph pivot(const Graph& g, VertexId u, VertexId v);
// G/v: delete v if isolated, otherwise pivot on (v, smallest neighbor) and
// delete v.
Graph contract_vertex(const Graph& g, VertexId v);
Graph delete_vertex(const Graph& g, VertexId v);
Graph delete_vertices(const Graph& g, uint64_t mask);
Graph induced_subgraph(const Graph& g, uint64_t keep_mask);
// k disjoint relabeled copies of h on labels 0..k*|V(h)|-1.
Graph disjoint_copies(const Graph& h, int k);
// Union keeping labels; vertex sets must be disjoint.
Graph disjoint_union(const Graph& a, const Graph& b);
Graph complement_graph(const Graph& g);
// new_label[old] gives the new label of each active vertex; labels must stay
// unique and within range.
Graph relabel(const Graph& g, const std::array<VertexId, kMaxVertices>& new_label);
// Relabels active vertices to 0..n-1 in ascending label order.
Graph compact(const Graph& g, std::vector<VertexId>* old_labels = nullptr);

// ---- operation scripts ----

struct Step {
  enum Kind : uint8_t { LC, PV, DEL } kind;
  VertexId u = -1;
  VertexId v = -1;  // used by PV only

  static Step lc(VertexId v) { return {LC, v, -1}; }
  static Step pv(VertexId u, VertexId v) { return {PV, u, v}; }
  static Step del(VertexId v) { return {DEL, v, -1}; }
  bool operator==(const Step&) const = default;
};

using OperationScript = std::vector<Step>;

// Applies the steps in order; throws Error naming the step index if any
// precondition fails.
Graph replay(const Graph& g, const OperationScript& s);
// Which vertices get deleted by the script.
uint64_t script_deletions(const OperationScript& s);
OperationScript strip_deletions(const OperationScript& s);
// Inverse of a deletion-free script (LC and PV are involutions).
OperationScript invert_lc_script(const OperationScript& s);
bool script_touches_only(const OperationScript& s, uint64_t allowed_mask);

std::string script_to_text(const OperationScript& s);
OperationScript script_from_text(const std::string& text);

// ---- graph6 / sparse6 ----

std::string to_graph6(const Graph& g);
Graph from_graph6(const std::string& text);
std::string to_sparse6(const Graph& g);
Graph from_sparse6(const std::string& text);
// Accepts graph6 or sparse6 (">>graph6<<" / ">>sparse6<<" headers allowed).
Graph parse_graph_text(const std::string& text);

// ---- isomorphism and canonical forms (desk scale) ----

// Packed upper triangle of a canonically labeled graph; equal forms iff the
// graphs (with matching colors, when given) are isomorphic.
struct CanonicalForm {
  uint64_t lo = 0;
  uint64_t hi = 0;
  uint16_t colors = 0;  // canonical color word for 2-colored use (sides)
  uint8_t n = 0;
  auto operator<=>(const CanonicalForm&) const = default;
};

struct CanonicalFormHash {
  size_t operator()(const CanonicalForm& c) const;
};

CanonicalForm canonical_form(const Graph& g, int cap = kDefaultIsoCap);
// colors[i] applies to the i-th active vertex in ascending label order.
CanonicalForm canonical_form_colored(const Graph& g,
                                     const std::vector<int>& colors,
                                     int cap = kDefaultIsoCap);
// Exact isomorphism decision; throws Error above the cap.
bool are_isomorphic(const Graph& a, const Graph& b, int cap = kDefaultIsoCap);
// Mapping from labels of a to labels of b, if isomorphic.
std::optional<std::array<VertexId, kMaxVertices>> find_isomorphism(
    const Graph& a, const Graph& b, int cap = kDefaultIsoCap);
// True iff h appears as an induced subgraph of g (not necessarily spanning).
bool has_induced_subgraph(const Graph& g, const Graph& h);

// ---- sided bipartite graphs ----

// Bipartite graph with distinguished sides; every edge has one end per side.
struct SidedBipartiteGraph {
  Graph graph;
  uint64_t side_a = 0;
  uint64_t side_b = 0;

  bool operator==(const SidedBipartiteGraph&) const = default;
};

// Throws Error if the sides do not partition V or an edge violates them.
void validate_sided(const SidedBipartiteGraph& g);
bool strongly_isomorphic(const SidedBipartiteGraph& a,
                         const SidedBipartiteGraph& b,
                         int cap = kDefaultIsoCap);

}  // namespace vmc

template <>
struct std::hash<vmc::Graph> {
  size_t operator()(const vmc::Graph& g) const { return g.hash_value(); }
};
