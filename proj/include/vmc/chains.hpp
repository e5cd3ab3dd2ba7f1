#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vmc/graph.hpp"

namespace vmc {

// Sequence of pairwise disjoint ordered vertex subsets of a host graph.
struct Chain {
  std::vector<std::vector<VertexId>> parts;

  int length() const { return static_cast<int>(parts.size()); }
  int width() const;
  bool uniform() const;
  uint64_t vertex_mask() const;
  Chain subchain(const std::vector<int>& part_indices) const;
  Chain prefix(int len) const;

  bool operator==(const Chain&) const = default;
};

// Disjointness and membership in the host; throws Error on violation.
void validate_chain(const Chain& x, const Graph& host);

enum class PairStatus : uint8_t { Fixed, UpHalf, DownHalf, CompleteCouple, Mixed };
const char* to_string(PairStatus s);

// Exact classification of the column pair (j1, j2), 0-based, j1 <= j2,
// scanning all part pairs. Chains of length <= 1 are vacuously Fixed.
PairStatus pair_status(const Graph& g, const Chain& x, int j1, int j2);

// A subchain of the requested length on which (j1, j2) is not Mixed, found by
// direct search over the colorings of part pairs; throws Error if none exists.
Chain find_coupled_subchain(const Graph& g, const Chain& x, int j1, int j2,
                            int target_len);

enum class ChainMode : uint8_t { VertexMinor, Pivot };

struct ChainStep {
  Graph graph;
  Chain chain;
  OperationScript script;
};

// Fixes the lexicographically smallest unfixed pair, returning a subchain of
// length k on which it (and every earlier pair) is fixed. The script touches
// only vertices of the input chain outside the returned subchain. Pivot mode
// requires a bipartite host and never locally complements.
ChainStep fix_next_pair(const Graph& g, const Chain& x, int k, ChainMode mode);

// Iterates fix_next_pair over all pairs in lexicographic order; the final
// chain of length k has no edges between distinct parts.
ChainStep clean_chain(const Graph& g, const Chain& x, int k, ChainMode mode);

struct ExtractOptions {
  std::optional<int> max_part_size;
  std::optional<int> cutrank_bound;
  // When >= 0, certify each part's robustness for its component at this order
  // before cleaning; failures are reported in the diagnostic, not fatal.
  int certify_order = -1;
};

struct ExtractResult {
  bool ok = false;
  OperationScript script;  // replays from the host to the extracted copies
  Graph result;
  Chain final_chain;
  std::string diagnostic;
};

// Cleans the chain down to k * |components| parts and exhibits one component
// copy inside each, yielding k disjoint copies of their union.
ExtractResult extract_kh(const Graph& g, const Chain& x,
                         const std::vector<Graph>& components, int k,
                         const ExtractOptions& opts = {});

}  // namespace vmc
