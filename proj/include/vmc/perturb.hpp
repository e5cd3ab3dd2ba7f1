#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vmc/graph.hpp"
#include "vmc/vmsearch.hpp"

namespace vmc {

// Proof that target is an order-t perturbation of base: a supergraph with t
// extra vertices plus replayable scripts reducing it to each of the two.
struct PerturbationWitness {
  Graph base;
  Graph target;
  Graph super;
  OperationScript script1;  // super -> base
  OperationScript script2;  // super -> target
  int order = 0;
};

struct VerifyResult {
  bool ok = false;
  std::string reason;
};

VerifyResult verify_witness(const PerturbationWitness& w);
// The relation is symmetric: swap the two scripts.
PerturbationWitness swap_witness(PerturbationWitness w);

// Chains two witnesses through their shared middle graph; the result has
// order w12.order + w23.order.
PerturbationWitness compose(const PerturbationWitness& w12,
                            const PerturbationWitness& w23);

// Witness between disjoint unions: glues bases, targets, and supers of
// witnesses living on pairwise disjoint vertex sets.
PerturbationWitness witness_disjoint_union(
    const std::vector<PerturbationWitness>& parts);

// Witness that G - delta(X) is a 2 rho(X)-perturbation of G, built from a
// rank-one factorization of the crossing submatrix.
PerturbationWitness cut_perturbation_witness(const Graph& g, uint64_t x_mask);

// ---- low-rank symmetric deltas ----

struct DeltaPiece {
  enum Kind : uint8_t { Rank1, Rank2 } kind;
  uint64_t x = 0;  // Rank1 support: the all-ones block on x times x
  uint64_t y = 0;  // Rank2: indicator outer products y z^T + z y^T
  uint64_t z = 0;

  bool operator==(const DeltaPiece&) const = default;
};

// Symmetric GF(2) matrix on a vertex set, decomposed into rank-1 and rank-2
// normal-form pieces; rank units (1 per Rank1, 2 per Rank2) equal the rank.
struct LowRankDelta {
  uint64_t verts = 0;
  std::vector<DeltaPiece> pieces;

  // Rows/columns in ascending label order of verts.
  BitMatrix matrix() const;
  int rank_units() const;
  bool operator==(const LowRankDelta&) const = default;
};

// Throws Error if pieces are malformed or rank units differ from the rank.
void validate_delta(const LowRankDelta& d);

// Decomposes a symmetric matrix (diagonal allowed) into normal-form pieces
// whose units equal its rank. verts names the rows in ascending label order.
LowRankDelta symmetric_rank_decomposition(const BitMatrix& m, uint64_t verts);

// zero-diagonal(A(G) + delta) as a graph on the same labels.
Graph apply_rank_perturbation(const Graph& g, const LowRankDelta& delta);

// A rank-t perturbation is a t-perturbation: one extra vertex per Rank1 piece
// (removed by local complementation), two per Rank2 piece (removed by a
// pivot).
PerturbationWitness rank_perturbation_to_witness(const Graph& g,
                                                 const LowRankDelta& delta);

// Converse direction: any order-t witness yields a local-complementation
// script s on the target and a delta of rank <= 2t with
// apply_rank_perturbation(base, delta) == replay(target, s).
struct RankConversion {
  OperationScript lc_script_on_target;
  LowRankDelta delta;
};
RankConversion witness_to_rank_perturbation(const PerturbationWitness& w,
                                            const VmOptions& opts = {});

// ---- robustness ----

struct RobustnessVerdict {
  enum Kind : uint8_t { Robust, NotRobust, Unknown } kind;
  // NotRobust: a delta of rank <= t whose application loses H, plus the
  // replayable witness derived from it.
  std::optional<LowRankDelta> delta;
  std::optional<PerturbationWitness> witness;
  std::string note;
};

struct RobustnessOptions {
  int vertex_cap = 8;
  int max_t = 2;
  VmOptions vm;
};

// Sound three-valued certifier via the rank sandwich: a killing delta of rank
// <= t proves NotRobust; survival of every delta of rank <= 2t proves Robust;
// a kill only in the (t, 2t] range is reported as Unknown.
RobustnessVerdict certify_robustness(const Graph& g, const Graph& h, int t,
                                     const RobustnessOptions& opts = {});

// Every symmetric n x n matrix of rank <= r, in deterministic order (by rank,
// then first-found over lexicographic piece supports). fn returning false
// stops the enumeration.
void for_each_symmetric_low_rank(
    int n, int r, const std::function<bool(const LowRankDelta&)>& fn);
std::vector<LowRankDelta> enumerate_symmetric_low_rank(int n, int r);

// Bounded search for a small witness between two labeled vertex-minors of a
// common host on the same vertex set X: shrinks the host while both stay
// vertex-minors, then emits the host itself as the supergraph.
std::optional<PerturbationWitness> bounded_pair_witness_search(
    const Graph& host, uint64_t x_mask, const Graph& g1, const Graph& g2,
    const VmOptions& opts = {});

// Exact decision of "target is a 1-perturbation of base": any supergraph with
// one extra vertex normalizes to base plus a single attached vertex, so the
// scan over attachment sets is complete.
bool is_one_vertex_perturbation(const Graph& base, const Graph& target,
                                const VmOptions& opts = {});

}  // namespace vmc
