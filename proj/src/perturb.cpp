#include "vmc/perturb.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <unordered_set>

#include "vmc/cutrank.hpp"

namespace vmc {

namespace {

std::vector<int> mask_to_rows(uint64_t verts, uint64_t subset) {
  std::vector<int> rows;
  int idx = 0;
  for (uint64_t m = verts; m; m &= m - 1) {
    if (subset & (m & (~m + 1))) rows.push_back(idx);
    ++idx;
  }
  return rows;
}

uint64_t rows_to_mask(uint64_t verts, uint64_t row_bits) {
  uint64_t out = 0;
  int idx = 0;
  for (uint64_t m = verts; m; m &= m - 1) {
    if ((row_bits >> idx) & 1) out |= m & (~m + 1);
    ++idx;
  }
  return out;
}

// Lowest kMaxVertices labels not used by `used`, count many.
std::vector<VertexId> fresh_labels(uint64_t used, int count) {
  std::vector<VertexId> out;
  for (int v = 0; v < kMaxVertices && static_cast<int>(out.size()) < count; ++v)
    if (!((used >> v) & 1)) out.push_back(v);
  if (static_cast<int>(out.size()) < count)
    throw Error("out of vertex labels");
  return out;
}

OperationScript relabel_script(const OperationScript& s,
                               const std::array<VertexId, kMaxVertices>& map) {
  OperationScript out = s;
  for (Step& st : out) {
    st.u = map[st.u];
    if (st.kind == Step::PV) st.v = map[st.v];
  }
  return out;
}

}  // namespace

VerifyResult verify_witness(const PerturbationWitness& w) {
  if (w.base.vertex_mask() != w.target.vertex_mask())
    return {false, "base and target vertex sets differ"};
  if (w.order < 0) return {false, "negative order"};
  if (w.super.vertex_count() != w.base.vertex_count() + w.order)
    return {false, "supergraph size does not match order"};
  if (w.base.vertex_mask() & ~w.super.vertex_mask())
    return {false, "base vertices missing from the supergraph"};
  try {
    if (replay(w.super, w.script1) != w.base)
      return {false, "script1 does not replay to the base"};
    if (replay(w.super, w.script2) != w.target)
      return {false, "script2 does not replay to the target"};
  } catch (const Error& e) {
    return {false, std::string("replay failed: ") + e.what()};
  }
  return {true, ""};
}

PerturbationWitness swap_witness(PerturbationWitness w) {
  std::swap(w.base, w.target);
  std::swap(w.script1, w.script2);
  return w;
}

PerturbationWitness compose(const PerturbationWitness& w12,
                            const PerturbationWitness& w23) {
  if (w12.target.vertex_mask() != w23.base.vertex_mask())
    throw Error("compose: vertex-set mismatch between middle graphs");
  if (!(w12.target == w23.base))
    throw Error("compose: middle graphs differ");
  VerifyResult v1 = verify_witness(w12), v2 = verify_witness(w23);
  if (!v1.ok) throw Error("compose: first witness invalid: " + v1.reason);
  if (!v2.ok) throw Error("compose: second witness invalid: " + v2.reason);

  uint64_t mid = w12.target.vertex_mask();
  // Normalize both supergraphs so the middle graph is an induced subgraph:
  // deletions commute to the end of any script.
  OperationScript sigma_a = strip_deletions(w12.script2);
  Graph super_a = replay(w12.super, sigma_a);
  OperationScript sigma_b = strip_deletions(w23.script1);
  Graph super_b = replay(w23.super, sigma_b);

  uint64_t extra_a = super_a.vertex_mask() & ~mid;
  uint64_t extra_b = super_b.vertex_mask() & ~mid;

  // Move the second witness's extra vertices out of the way if they clash.
  std::array<VertexId, kMaxVertices> map{};
  for (int v = 0; v < kMaxVertices; ++v) map[v] = v;
  if (extra_a & extra_b) {
    auto fresh = fresh_labels(super_a.vertex_mask() | super_b.vertex_mask(),
                              std::popcount(extra_b));
    int i = 0;
    for (uint64_t m = extra_b; m; m &= m - 1)
      map[std::countr_zero(m)] = fresh[i++];
    super_b = relabel(super_b, map);
    sigma_b = relabel_script(sigma_b, map);
    extra_b = super_b.vertex_mask() & ~mid;
  }
  OperationScript b2 = relabel_script(w23.script2, map);

  Graph glued = Graph::on_vertices(mid | extra_a | extra_b);
  for (auto [u, v] : super_a.edges()) glued.set_edge(u, v, true);
  for (auto [u, v] : super_b.edges())
    if (!glued.has_edge(u, v)) glued.set_edge(u, v, true);

  PerturbationWitness out;
  out.base = w12.base;
  out.target = w23.target;
  out.super = glued;
  out.order = w12.order + w23.order;
  for (uint64_t m = extra_b; m; m &= m - 1)
    out.script1.push_back(Step::del(std::countr_zero(m)));
  OperationScript inv_a = invert_lc_script(sigma_a);
  out.script1.insert(out.script1.end(), inv_a.begin(), inv_a.end());
  out.script1.insert(out.script1.end(), w12.script1.begin(), w12.script1.end());
  for (uint64_t m = extra_a; m; m &= m - 1)
    out.script2.push_back(Step::del(std::countr_zero(m)));
  OperationScript inv_b = invert_lc_script(sigma_b);
  out.script2.insert(out.script2.end(), inv_b.begin(), inv_b.end());
  out.script2.insert(out.script2.end(), b2.begin(), b2.end());

  VerifyResult check = verify_witness(out);
  if (!check.ok) throw Error("compose: result failed verification: " + check.reason);
  return out;
}

PerturbationWitness witness_disjoint_union(
    const std::vector<PerturbationWitness>& parts) {
  if (parts.empty()) throw Error("witness_disjoint_union: no parts");
  uint64_t bases = 0;
  for (const auto& w : parts) {
    if (bases & w.base.vertex_mask())
      throw Error("witness_disjoint_union: overlapping parts");
    bases |= w.base.vertex_mask();
  }
  PerturbationWitness out;
  uint64_t used = bases;
  int order = 0;
  std::vector<Graph> supers;
  std::vector<OperationScript> s1s, s2s;
  for (const auto& w : parts) {
    VerifyResult v = verify_witness(w);
    if (!v.ok) throw Error("witness_disjoint_union: invalid part: " + v.reason);
    uint64_t extra = w.super.vertex_mask() & ~w.base.vertex_mask();
    std::array<VertexId, kMaxVertices> map{};
    for (int x = 0; x < kMaxVertices; ++x) map[x] = x;
    Graph super = w.super;
    OperationScript s1 = w.script1, s2 = w.script2;
    if (extra & used) {
      auto fresh = fresh_labels(used | w.super.vertex_mask(),
                                std::popcount(extra));
      int i = 0;
      for (uint64_t m = extra; m; m &= m - 1)
        map[std::countr_zero(m)] = fresh[i++];
      super = relabel(super, map);
      s1 = relabel_script(s1, map);
      s2 = relabel_script(s2, map);
      extra = super.vertex_mask() & ~w.base.vertex_mask();
    }
    used |= extra;
    order += w.order;
    supers.push_back(super);
    s1s.push_back(std::move(s1));
    s2s.push_back(std::move(s2));
  }
  Graph glued = Graph::on_vertices(0);
  Graph base = Graph::on_vertices(0);
  Graph target = Graph::on_vertices(0);
  for (size_t i = 0; i < parts.size(); ++i) {
    glued = disjoint_union(glued, supers[i]);
    base = disjoint_union(base, parts[i].base);
    target = disjoint_union(target, parts[i].target);
    out.script1.insert(out.script1.end(), s1s[i].begin(), s1s[i].end());
    out.script2.insert(out.script2.end(), s2s[i].begin(), s2s[i].end());
  }
  out.base = base;
  out.target = target;
  out.super = glued;
  out.order = order;
  VerifyResult check = verify_witness(out);
  if (!check.ok)
    throw Error("witness_disjoint_union: result failed verification: " +
                check.reason);
  return out;
}

PerturbationWitness cut_perturbation_witness(const Graph& g, uint64_t x_mask) {
  if (x_mask & ~g.vertex_mask())
    throw Error("cut_perturbation_witness: unknown vertex");
  uint64_t y_mask = g.vertex_mask() & ~x_mask;

  // Rank-one factorization of the crossing submatrix by elimination: each
  // step clears one pivot row/column pair and drops the rank by one.
  std::vector<std::pair<uint64_t, uint64_t>> factors;  // (X_i, Y_i) supports
  std::map<int, uint64_t> rows;
  for (uint64_t m = x_mask; m; m &= m - 1) {
    int x = std::countr_zero(m);
    rows[x] = g.neighbors(x) & y_mask;
  }
  while (true) {
    int px = -1;
    for (auto& [x, r] : rows)
      if (r) {
        px = x;
        break;
      }
    if (px < 0) break;
    uint64_t yi = rows[px];
    uint64_t py = yi & (~yi + 1);
    uint64_t xi = 0;
    for (auto& [x, r] : rows)
      if (r & py) xi |= uint64_t{1} << x;
    for (auto& [x, r] : rows)
      if (xi & (uint64_t{1} << x)) r ^= yi;
    factors.emplace_back(xi, yi);
  }
  int r = static_cast<int>(factors.size());

  PerturbationWitness w;
  w.base = g;
  w.order = 2 * r;
  Graph target = g;
  for (auto [u, v] : crossing_edges(g, x_mask)) target.set_edge(u, v, false);
  w.target = target;

  auto fresh = fresh_labels(g.vertex_mask(), 2 * r);
  Graph super = g;
  for (int i = 0; i < r; ++i) {
    VertexId xi = fresh[2 * i], yi = fresh[2 * i + 1];
    super.add_vertex(xi);
    super.add_vertex(yi);
    for (uint64_t m = factors[i].first; m; m &= m - 1)
      super.set_edge(xi, std::countr_zero(m), true);
    for (uint64_t m = factors[i].second; m; m &= m - 1)
      super.set_edge(yi, std::countr_zero(m), true);
    super.set_edge(xi, yi, true);
  }
  w.super = super;
  for (int i = 0; i < 2 * r; ++i) w.script1.push_back(Step::del(fresh[i]));
  for (int i = 0; i < r; ++i)
    w.script2.push_back(Step::pv(fresh[2 * i], fresh[2 * i + 1]));
  for (int i = 0; i < 2 * r; ++i) w.script2.push_back(Step::del(fresh[i]));

  VerifyResult check = verify_witness(w);
  if (!check.ok)
    throw Error("cut_perturbation_witness: construction failed: " +
                check.reason);
  return w;
}

// ---- low-rank deltas ----

BitMatrix LowRankDelta::matrix() const {
  int n = std::popcount(verts);
  BitMatrix m(n, n);
  for (const DeltaPiece& p : pieces) {
    if (p.kind == DeltaPiece::Rank1) {
      auto rs = mask_to_rows(verts, p.x);
      for (int a : rs)
        for (int b : rs) m.set(a, b, !m.get(a, b));
    } else {
      auto ys = mask_to_rows(verts, p.y);
      auto zs = mask_to_rows(verts, p.z);
      for (int a : ys)
        for (int b : zs) m.set(a, b, !m.get(a, b));
      for (int a : zs)
        for (int b : ys) m.set(a, b, !m.get(a, b));
    }
  }
  return m;
}

int LowRankDelta::rank_units() const {
  int units = 0;
  for (const DeltaPiece& p : pieces)
    units += p.kind == DeltaPiece::Rank1 ? 1 : 2;
  return units;
}

void validate_delta(const LowRankDelta& d) {
  for (const DeltaPiece& p : d.pieces) {
    if (p.kind == DeltaPiece::Rank1) {
      if (!p.x || (p.x & ~d.verts))
        throw Error("delta: bad rank-1 piece support");
    } else {
      if (!p.y || !p.z || p.y == p.z || (p.y & ~d.verts) || (p.z & ~d.verts))
        throw Error("delta: bad rank-2 piece supports");
    }
  }
  if (gf2_rank(d.matrix()) != d.rank_units())
    throw Error("delta: rank units do not match the matrix rank");
}

LowRankDelta symmetric_rank_decomposition(const BitMatrix& m, uint64_t verts) {
  int n = std::popcount(verts);
  if (m.rows() != n || m.cols() != n)
    throw Error("symmetric_rank_decomposition: shape mismatch");
  if (!m.is_symmetric())
    throw Error("symmetric_rank_decomposition: matrix not symmetric");
  BitMatrix work = m;
  LowRankDelta out;
  out.verts = verts;
  while (!work.is_zero()) {
    int diag = -1;
    for (int i = 0; i < n; ++i)
      if (work.get(i, i)) {
        diag = i;
        break;
      }
    if (diag >= 0) {
      uint64_t col = 0;
      for (int i = 0; i < n; ++i)
        if (work.get(i, diag)) col |= uint64_t{1} << i;
      out.pieces.push_back(
          DeltaPiece{DeltaPiece::Rank1, rows_to_mask(verts, col), 0, 0});
      for (int a = 0; a < n; ++a)
        if ((col >> a) & 1)
          for (int b = 0; b < n; ++b)
            if ((col >> b) & 1) work.set(a, b, !work.get(a, b));
    } else {
      int pi = -1, pj = -1;
      for (int i = 0; i < n && pi < 0; ++i)
        for (int j = i + 1; j < n; ++j)
          if (work.get(i, j)) {
            pi = i;
            pj = j;
            break;
          }
      if (pi < 0) break;
      uint64_t coli = 0, colj = 0;
      for (int i = 0; i < n; ++i) {
        if (work.get(i, pi)) coli |= uint64_t{1} << i;
        if (work.get(i, pj)) colj |= uint64_t{1} << i;
      }
      out.pieces.push_back(DeltaPiece{DeltaPiece::Rank2,
                                      0,
                                      rows_to_mask(verts, coli),
                                      rows_to_mask(verts, colj)});
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          bool add = (((coli >> a) & 1) && ((colj >> b) & 1)) ^
                     (((colj >> a) & 1) && ((coli >> b) & 1));
          if (add) work.set(a, b, !work.get(a, b));
        }
    }
  }
  validate_delta(out);
  return out;
}

Graph apply_rank_perturbation(const Graph& g, const LowRankDelta& delta) {
  if (delta.verts != g.vertex_mask())
    throw Error("apply_rank_perturbation: index mismatch");
  BitMatrix a = g.adjacency_matrix();
  a.xor_in(delta.matrix());
  a.zero_diagonal();
  auto vs = g.vertices();
  Graph out = Graph::on_vertices(g.vertex_mask());
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t j = i + 1; j < vs.size(); ++j)
      if (a.get(static_cast<int>(i), static_cast<int>(j)))
        out.set_edge(vs[i], vs[j], true);
  return out;
}

PerturbationWitness rank_perturbation_to_witness(const Graph& g,
                                                 const LowRankDelta& delta) {
  validate_delta(delta);
  if (delta.verts != g.vertex_mask())
    throw Error("rank_perturbation_to_witness: index mismatch");
  PerturbationWitness w;
  w.base = g;
  w.target = apply_rank_perturbation(g, delta);
  w.order = delta.rank_units();
  auto fresh = fresh_labels(g.vertex_mask(), w.order);
  Graph super = g;
  size_t next = 0;
  OperationScript ops;
  for (const DeltaPiece& p : delta.pieces) {
    if (p.kind == DeltaPiece::Rank1) {
      VertexId x = fresh[next++];
      super.add_vertex(x);
      for (uint64_t m = p.x; m; m &= m - 1)
        super.set_edge(x, std::countr_zero(m), true);
      ops.push_back(Step::lc(x));
    } else {
      VertexId y = fresh[next++], z = fresh[next++];
      super.add_vertex(y);
      super.add_vertex(z);
      for (uint64_t m = p.y; m; m &= m - 1)
        super.set_edge(y, std::countr_zero(m), true);
      for (uint64_t m = p.z; m; m &= m - 1)
        super.set_edge(z, std::countr_zero(m), true);
      super.set_edge(y, z, true);
      ops.push_back(Step::pv(y, z));
    }
  }
  w.super = super;
  for (VertexId v : fresh) w.script1.push_back(Step::del(v));
  w.script2 = ops;
  for (VertexId v : fresh) w.script2.push_back(Step::del(v));
  VerifyResult check = verify_witness(w);
  if (!check.ok)
    throw Error("rank_perturbation_to_witness: construction failed: " +
                check.reason);
  return w;
}

namespace {

struct PeelState {
  Graph super;
  std::vector<DeltaPiece> pieces;
};

// One step of the conversion: remove extra vertex v from the supergraph by
// each of the three reductions, tracking the induced rank <= 2 change on the
// base window.
std::vector<PeelState> peel_vertex(const PeelState& st, uint64_t window,
                                   VertexId v) {
  std::vector<PeelState> out;
  const Graph& s = st.super;
  // Deletion: no change on the window.
  out.push_back(PeelState{delete_vertex(s, v), st.pieces});
  // Local complementation at v: all-ones block on N(v) within the window.
  {
    PeelState next{delete_vertex(local_complement(s, v), v), st.pieces};
    uint64_t supp = s.neighbors(v) & window;
    if (std::popcount(supp) >= 2)
      next.pieces.push_back(DeltaPiece{DeltaPiece::Rank1, supp, 0, 0});
    out.push_back(std::move(next));
  }
  // Contraction: pivot on (v, w) toggles between the window traces of the two
  // neighborhoods; when w lies in the window its own row is rewritten too.
  uint64_t nb = s.neighbors(v);
  if (nb) {
    VertexId w = std::countr_zero(nb);
    PeelState next{contract_vertex(s, v), st.pieces};
    uint64_t sy = s.neighbors(v) & window;
    uint64_t sz = s.neighbors(w) & window;
    if ((window >> w) & 1) sz |= uint64_t{1} << w;
    if (sy && sz && sy != sz)
      next.pieces.push_back(DeltaPiece{DeltaPiece::Rank2, 0, sy, sz});
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace

RankConversion witness_to_rank_perturbation(const PerturbationWitness& w,
                                            const VmOptions& opts) {
  VerifyResult check = verify_witness(w);
  if (!check.ok)
    throw Error("witness_to_rank_perturbation: invalid witness: " +
                check.reason);
  uint64_t window = w.base.vertex_mask();

  // Normalize so the base graph is induced in the supergraph.
  OperationScript sigma = strip_deletions(w.script1);
  Graph super0 = replay(w.super, sigma);
  if (induced_subgraph(super0, window) != w.base)
    throw Error("witness_to_rank_perturbation: normalization failed");

  LcOrbit target_orbit(w.target, opts.orbit_bound);

  // Depth-first over the three reductions per extra vertex; each peel adds at
  // most one piece of rank <= 2, so any completed leaf stays within rank 2t.
  std::vector<PeelState> stack = {PeelState{super0, {}}};
  while (!stack.empty()) {
    PeelState st = std::move(stack.back());
    stack.pop_back();
    uint64_t extra = st.super.vertex_mask() & ~window;
    if (!extra) {
      if (!target_orbit.contains(st.super)) continue;
      LowRankDelta sum;
      sum.verts = window;
      sum.pieces = st.pieces;
      RankConversion out;
      out.delta = symmetric_rank_decomposition(sum.matrix(), window);
      if (out.delta.rank_units() > 2 * w.order)
        throw Error("witness_to_rank_perturbation: rank bound violated");
      out.lc_script_on_target = *target_orbit.script_to(st.super);
      return out;
    }
    VertexId v = std::countr_zero(extra);
    auto branches = peel_vertex(st, window, v);
    for (auto it = branches.rbegin(); it != branches.rend(); ++it)
      stack.push_back(std::move(*it));
  }
  throw Error("witness_to_rank_perturbation: no reduction path found");
}

// ---- enumeration of symmetric low-rank matrices ----

namespace {

struct MatKey {
  std::vector<uint64_t> rows;
  bool operator==(const MatKey&) const = default;
};

struct MatKeyHash {
  size_t operator()(const MatKey& k) const {
    size_t h = 1469598103934665603ull;
    for (uint64_t r : k.rows) {
      h ^= r;
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace

void for_each_symmetric_low_rank(
    int n, int r, const std::function<bool(const LowRankDelta&)>& fn) {
  if (n < 0 || n > 10) throw Error("for_each_symmetric_low_rank: n cap is 10");
  if (r < 0 || r > 4) throw Error("for_each_symmetric_low_rank: r cap is 4");
  uint64_t verts = n >= 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
  std::unordered_set<MatKey, MatKeyHash> seen;
  auto key_of = [&](const LowRankDelta& d) {
    return MatKey{d.matrix().row_data()};
  };
  std::vector<std::vector<LowRankDelta>> levels(r + 1);
  LowRankDelta zero;
  zero.verts = verts;
  levels[0].push_back(zero);
  seen.insert(key_of(zero));
  if (!fn(zero)) return;
  for (int u = 1; u <= r; ++u) {
    // Extend level u-1 by every rank-1 piece, in lexicographic support order.
    for (uint64_t x = 1; x < (uint64_t{1} << n); ++x) {
      for (const LowRankDelta& base : levels[u - 1]) {
        LowRankDelta d = base;
        d.pieces.push_back(DeltaPiece{DeltaPiece::Rank1, x, 0, 0});
        if (seen.insert(key_of(d)).second) {
          levels[u].push_back(d);
          if (!fn(levels[u].back())) return;
        }
      }
    }
    if (u < 2) continue;
    // Extend level u-2 by every rank-2 piece (independent support pair).
    for (uint64_t y = 1; y < (uint64_t{1} << n); ++y)
      for (uint64_t z = y + 1; z < (uint64_t{1} << n); ++z) {
        for (const LowRankDelta& base : levels[u - 2]) {
          LowRankDelta d = base;
          d.pieces.push_back(DeltaPiece{DeltaPiece::Rank2, 0, y, z});
          if (seen.insert(key_of(d)).second) {
            levels[u].push_back(d);
            if (!fn(levels[u].back())) return;
          }
        }
      }
  }
}

std::vector<LowRankDelta> enumerate_symmetric_low_rank(int n, int r) {
  std::vector<LowRankDelta> out;
  for_each_symmetric_low_rank(n, r, [&](const LowRankDelta& d) {
    out.push_back(d);
    return true;
  });
  return out;
}

RobustnessVerdict certify_robustness(const Graph& g, const Graph& h, int t,
                                     const RobustnessOptions& opts) {
  if (t < 0 || t > opts.max_t)
    throw Error("certify_robustness: t out of range");
  if (g.vertex_count() > opts.vertex_cap)
    throw Error("certify_robustness: vertex cap exceeded");
  int n = g.vertex_count();
  auto vs = g.vertices();

  RobustnessVerdict verdict;
  verdict.kind = RobustnessVerdict::Robust;
  for_each_symmetric_low_rank(n, 2 * t, [&](const LowRankDelta& d0) {
    // Re-index the delta from 0..n-1 onto g's labels.
    LowRankDelta d;
    d.verts = g.vertex_mask();
    for (DeltaPiece p : d0.pieces) {
      DeltaPiece q = p;
      q.x = q.y = q.z = 0;
      for (int i = 0; i < n; ++i) {
        if ((p.x >> i) & 1) q.x |= uint64_t{1} << vs[i];
        if ((p.y >> i) & 1) q.y |= uint64_t{1} << vs[i];
        if ((p.z >> i) & 1) q.z |= uint64_t{1} << vs[i];
      }
      d.pieces.push_back(q);
    }
    Graph perturbed = apply_rank_perturbation(g, d);
    if (contains_vertex_minor(perturbed, h, opts.vm)) return true;
    int rank = gf2_rank(d.matrix());
    if (rank <= t) {
      verdict.kind = RobustnessVerdict::NotRobust;
      verdict.delta = symmetric_rank_decomposition(d.matrix(), d.verts);
      verdict.witness = rank_perturbation_to_witness(g, *verdict.delta);
      return false;
    }
    verdict.kind = RobustnessVerdict::Unknown;
    verdict.note = "a perturbation of rank " + std::to_string(rank) +
                   " in the range (" + std::to_string(t) + ", " +
                   std::to_string(2 * t) +
                   "] loses the target; no rank <= " + std::to_string(t) +
                   " perturbation does";
    return false;
  });
  return verdict;
}

bool is_one_vertex_perturbation(const Graph& base, const Graph& target,
                                const VmOptions& opts) {
  if (base.vertex_mask() != target.vertex_mask())
    throw Error("is_one_vertex_perturbation: vertex sets differ");
  LcOrbit orbit(target, opts.orbit_bound);
  if (orbit.contains(base)) return true;  // already locally equivalent
  uint64_t full = base.vertex_mask();
  VertexId extra = fresh_labels(full, 1)[0];
  auto vs = base.vertices();
  int n = static_cast<int>(vs.size());
  for (uint64_t s = 1; s < (uint64_t{1} << n); ++s) {
    Graph super = base;
    super.add_vertex(extra);
    for (int i = 0; i < n; ++i)
      if ((s >> i) & 1) super.set_edge(extra, vs[i], true);
    Graph lc_branch = delete_vertex(local_complement(super, extra), extra);
    if (orbit.contains(lc_branch)) return true;
    Graph contract_branch = contract_vertex(super, extra);
    if (orbit.contains(contract_branch)) return true;
  }
  return false;
}

std::optional<PerturbationWitness> bounded_pair_witness_search(
    const Graph& host, uint64_t x_mask, const Graph& g1, const Graph& g2,
    const VmOptions& opts) {
  if (x_mask & ~host.vertex_mask())
    throw Error("bounded_pair_witness_search: X not in the host");
  if (g1.vertex_mask() != x_mask || g2.vertex_mask() != x_mask)
    throw Error("bounded_pair_witness_search: graphs must live on X");
  if (!contains_labeled_vertex_minor(host, g1, opts) ||
      !contains_labeled_vertex_minor(host, g2, opts))
    return std::nullopt;
  Graph cur = host;
  bool improved = true;
  while (improved) {
    improved = false;
    uint64_t outside = cur.vertex_mask() & ~x_mask;
    for (uint64_t m = outside; m && !improved; m &= m - 1) {
      VertexId v = std::countr_zero(m);
      auto [del, lcdel, contr] = three_way_reductions(cur, v);
      for (const Graph& red : {del, lcdel, contr}) {
        if (contains_labeled_vertex_minor(red, g1, opts) &&
            contains_labeled_vertex_minor(red, g2, opts)) {
          cur = red;
          improved = true;
          break;
        }
      }
    }
  }
  PerturbationWitness w;
  w.base = g1;
  w.target = g2;
  w.super = cur;
  w.order = cur.vertex_count() - std::popcount(x_mask);
  w.script1 = *labeled_vm_script(cur, g1, opts);
  w.script2 = *labeled_vm_script(cur, g2, opts);
  VerifyResult check = verify_witness(w);
  if (!check.ok)
    throw Error("bounded_pair_witness_search: construction failed: " +
                check.reason);
  return w;
}

}  // namespace vmc
