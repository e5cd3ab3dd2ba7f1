#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "vmc/graph.hpp"

namespace vmc {

// rho_G(X): rank over GF(2) of the X x (V \ X) adjacency submatrix.
int cut_rank(const Graph& g, uint64_t x_mask);

// delta_G(X): the edges with one end in X and the other outside.
std::vector<std::pair<int, int>> crossing_edges(const Graph& g, uint64_t x_mask);

// Unrooted tree whose leaves are exactly the host's vertices and whose
// internal nodes have degree at most three.
struct RankDecomposition {
  // Node i is a leaf iff leaf_vertex[i] >= 0; then it carries that vertex.
  std::vector<int> leaf_vertex;
  std::vector<std::pair<int, int>> tree_edges;

  int node_count() const { return static_cast<int>(leaf_vertex.size()); }
};

// Checks tree-ness, leaf set, and the degree bound; throws Error otherwise.
void validate_decomposition(const RankDecomposition& d, const Graph& host);

// Max over tree edges of the cut-rank of one side's leaf set.
int decomposition_width(const RankDecomposition& d, const Graph& host);

// Nested-parenthesis leaf-partition text, e.g. "((1,2),(0,(3,4)))".
std::string decomposition_to_text(const RankDecomposition& d);
RankDecomposition decomposition_from_text(const std::string& text);

// Suppresses internal nodes of degree <= 2 (they contribute no cuts).
RankDecomposition reduce_decomposition(RankDecomposition d);

inline constexpr int kDefaultRankwidthCap = 10;

// Exact rank-width with a witnessing decomposition, by dynamic programming
// over recursive bipartitions (equivalently, all cubic leaf-trees). Ties are
// broken toward the lexicographically smallest split.
std::pair<int, RankDecomposition> exact_rankwidth(
    const Graph& g, int cap = kDefaultRankwidthCap);

// All cubic trees with the given leaf set, as decompositions; the brute-force
// enumeration route used to cross-check exact_rankwidth at tiny sizes.
std::vector<RankDecomposition> enumerate_cubic_decompositions(const Graph& g,
                                                              int cap = 8);

}  // namespace vmc
