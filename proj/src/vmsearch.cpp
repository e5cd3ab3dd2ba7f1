#include "vmc/vmsearch.hpp"

#include <algorithm>
#include <bit>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace vmc {

namespace {

struct PairKey {
  CanonicalForm g, h;
  bool operator==(const PairKey&) const = default;
};

struct PairKeyHash {
  size_t operator()(const PairKey& k) const {
    CanonicalFormHash h;
    return h(k.g) * 0x9e3779b97f4a7c15ULL ^ h(k.h);
  }
};

std::mutex memo_mutex;
std::unordered_map<PairKey, bool, PairKeyHash> vm_memo;
std::unordered_map<PairKey, bool, PairKeyHash> pm_memo;

std::optional<bool> memo_get(std::unordered_map<PairKey, bool, PairKeyHash>& m,
                             const PairKey& k) {
  std::lock_guard<std::mutex> lock(memo_mutex);
  auto it = m.find(k);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

void memo_put(std::unordered_map<PairKey, bool, PairKeyHash>& m,
              const PairKey& k, bool v) {
  std::lock_guard<std::mutex> lock(memo_mutex);
  m.emplace(k, v);
}

// BFS closure of a SmallGraph under local complementation.
std::vector<PackedGraph> small_lc_orbit(const SmallGraph& start, size_t bound,
                                        const char* who) {
  std::vector<PackedGraph> order;
  std::unordered_set<PackedGraph, PackedGraphHash> seen;
  order.push_back(pack(start));
  seen.insert(order[0]);
  for (size_t head = 0; head < order.size(); ++head) {
    SmallGraph cur = unpack(order[head]);
    for (int v = 0; v < cur.n; ++v) {
      if (!cur.row[v]) continue;  // isolated vertices fix the graph
      SmallGraph next = cur;
      next.local_complement(v);
      PackedGraph key = pack(next);
      if (seen.insert(key).second) {
        if (order.size() >= bound)
          throw Error(std::string(who) + ": orbit bound exceeded after " +
                      std::to_string(order.size()) + " members");
        order.push_back(key);
      }
    }
  }
  return order;
}

std::vector<int> degree_multiset(const SmallGraph& g) {
  std::vector<int> d;
  for (int v = 0; v < g.n; ++v) d.push_back(g.degree(v));
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace

std::vector<Graph> local_equivalence_orbit(const Graph& g,
                                           const VmOptions& opts) {
  if (g.vertex_count() > opts.vertex_cap)
    throw Error("local_equivalence_orbit: vertex cap exceeded");
  LcOrbit orbit(g, opts.orbit_bound);
  return orbit.members();
}

std::tuple<Graph, Graph, Graph> three_way_reductions(const Graph& g,
                                                     VertexId v) {
  g.require_vertex(v);
  return {delete_vertex(g, v), delete_vertex(local_complement(g, v), v),
          contract_vertex(g, v)};
}

LcOrbit::LcOrbit(const Graph& g, size_t bound) {
  labels_ = g.vertices();
  SmallGraph start = to_small(g);
  PackedGraph k0 = pack(start);
  order_.push_back(k0);
  links_.emplace(k0, Link{-1, -1});
  for (size_t head = 0; head < order_.size(); ++head) {
    SmallGraph cur = unpack(order_[head]);
    for (int v = 0; v < cur.n; ++v) {
      if (!cur.row[v]) continue;
      SmallGraph next = cur;
      next.local_complement(v);
      PackedGraph key = pack(next);
      if (links_.emplace(key, Link{static_cast<int64_t>(head),
                                   static_cast<int8_t>(v)}).second) {
        if (order_.size() >= bound)
          throw Error("LcOrbit: orbit bound exceeded after " +
                      std::to_string(order_.size()) + " members");
        order_.push_back(key);
      }
    }
  }
}

PackedGraph LcOrbit::key_of(const Graph& h) const {
  auto hv = h.vertices();
  if (hv != labels_) throw Error("LcOrbit: vertex set mismatch");
  return pack(to_small(h));
}

bool LcOrbit::contains(const Graph& h) const {
  return links_.count(key_of(h)) > 0;
}

std::optional<OperationScript> LcOrbit::script_to(const Graph& h) const {
  PackedGraph key = key_of(h);
  auto it = links_.find(key);
  if (it == links_.end()) return std::nullopt;
  OperationScript rev;
  PackedGraph cur = key;
  while (true) {
    const Link& link = links_.at(cur);
    if (link.parent < 0) break;
    rev.push_back(Step::lc(labels_[link.lc_vertex]));
    cur = order_[static_cast<size_t>(link.parent)];
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

std::vector<Graph> LcOrbit::members() const {
  std::vector<Graph> out;
  out.reserve(order_.size());
  for (const PackedGraph& p : order_) {
    SmallGraph s = unpack(p);
    Graph g = Graph::on_vertices([&] {
      uint64_t m = 0;
      for (VertexId v : labels_) m |= uint64_t{1} << v;
      return m;
    }());
    for (int i = 0; i < s.n; ++i)
      for (int j = i + 1; j < s.n; ++j)
        if (s.edge(i, j)) g.set_edge(labels_[i], labels_[j], true);
    out.push_back(std::move(g));
  }
  return out;
}

namespace {

// Equal-order base case: does the local-equivalence closure of g meet the
// isomorphism class of h?
bool orbit_meets_iso_class(const Graph& g, const Graph& h,
                           const VmOptions& opts) {
  SmallGraph sh = to_small(h);
  PackedGraph ch = small_canonical(sh);
  auto dh = degree_multiset(sh);
  auto orbit = small_lc_orbit(to_small(g), opts.orbit_bound,
                              "contains_vertex_minor");
  for (const PackedGraph& p : orbit) {
    SmallGraph s = unpack(p);
    if (s.edge_count() != sh.edge_count()) continue;
    if (degree_multiset(s) != dh) continue;
    if (small_canonical(s) == ch) return true;
  }
  return false;
}

std::vector<VertexId> branch_order(const Graph& g) {
  auto vs = g.vertices();
  std::stable_sort(vs.begin(), vs.end(), [&](VertexId a, VertexId b) {
    return g.degree(a) < g.degree(b);
  });
  return vs;
}

bool contains_vm_rec(const Graph& g, const Graph& h, const CanonicalForm& ch,
                     const VmOptions& opts) {
  int ng = g.vertex_count(), nh = h.vertex_count();
  if (ng < nh) return false;
  PairKey key{canonical_form(g, opts.vertex_cap), ch};
  if (auto hit = memo_get(vm_memo, key)) return *hit;
  bool result;
  if (ng == nh) {
    result = orbit_meets_iso_class(g, h, opts);
  } else if (has_induced_subgraph(g, h)) {
    result = true;
  } else {
    result = false;
    for (VertexId v : branch_order(g)) {
      auto [del, lcdel, contr] = three_way_reductions(g, v);
      if (contains_vm_rec(del, h, ch, opts) ||
          contains_vm_rec(lcdel, h, ch, opts) ||
          contains_vm_rec(contr, h, ch, opts)) {
        result = true;
        break;
      }
    }
  }
  memo_put(vm_memo, key, result);
  return result;
}

}  // namespace

bool contains_vertex_minor(const Graph& g, const Graph& h,
                           const VmOptions& opts) {
  if (g.vertex_count() > opts.vertex_cap)
    throw Error("contains_vertex_minor: vertex cap exceeded");
  if (h.vertex_count() > opts.vertex_cap)
    throw Error("contains_vertex_minor: vertex cap exceeded");
  return contains_vm_rec(g, h, canonical_form(h, opts.vertex_cap), opts);
}

std::optional<OperationScript> vertex_minor_witness(const Graph& g,
                                                    const Graph& h,
                                                    const VmOptions& opts) {
  if (!contains_vertex_minor(g, h, opts)) return std::nullopt;
  CanonicalForm ch = canonical_form(h, opts.vertex_cap);
  OperationScript script;
  Graph cur = g;
  while (cur.vertex_count() > h.vertex_count()) {
    bool advanced = false;
    for (VertexId v : branch_order(cur)) {
      auto [del, lcdel, contr] = three_way_reductions(cur, v);
      if (contains_vm_rec(del, h, ch, opts)) {
        script.push_back(Step::del(v));
        cur = del;
        advanced = true;
        break;
      }
      if (contains_vm_rec(lcdel, h, ch, opts)) {
        script.push_back(Step::lc(v));
        script.push_back(Step::del(v));
        cur = lcdel;
        advanced = true;
        break;
      }
      if (contains_vm_rec(contr, h, ch, opts)) {
        uint64_t nb = cur.neighbors(v);
        if (nb) script.push_back(Step::pv(v, std::countr_zero(nb)));
        script.push_back(Step::del(v));
        cur = contr;
        advanced = true;
        break;
      }
    }
    if (!advanced) throw Error("vertex_minor_witness: search inconsistency");
  }
  // Close with local complementations to hit the isomorphism class exactly.
  LcOrbit orbit(cur, opts.orbit_bound);
  for (const Graph& member : orbit.members()) {
    if (member.edge_count() != h.edge_count()) continue;
    if (are_isomorphic(member, h, opts.vertex_cap)) {
      auto tail = orbit.script_to(member);
      script.insert(script.end(), tail->begin(), tail->end());
      return script;
    }
  }
  throw Error("vertex_minor_witness: base case inconsistency");
}

bool contains_labeled_vertex_minor(const Graph& g, const Graph& h,
                                   const VmOptions& opts) {
  return labeled_vm_script(g, h, opts).has_value();
}

std::optional<OperationScript> labeled_vm_script(const Graph& g, const Graph& h,
                                                 const VmOptions& opts) {
  if (g.vertex_count() > opts.vertex_cap)
    throw Error("labeled_vm_script: vertex cap exceeded");
  if (h.vertex_mask() & ~g.vertex_mask()) return std::nullopt;
  uint64_t extra = g.vertex_mask() & ~h.vertex_mask();
  if (extra == 0) {
    LcOrbit orbit(g, opts.orbit_bound);
    return orbit.script_to(h);
  }
  // Any fixed removal order is complete: branching three ways at a vertex
  // outside V(h) preserves labeled containment in at least one branch.
  VertexId v = std::countr_zero(extra);
  auto [del, lcdel, contr] = three_way_reductions(g, v);
  if (auto s = labeled_vm_script(del, h, opts)) {
    OperationScript out = {Step::del(v)};
    out.insert(out.end(), s->begin(), s->end());
    return out;
  }
  if (auto s = labeled_vm_script(lcdel, h, opts)) {
    OperationScript out = {Step::lc(v), Step::del(v)};
    out.insert(out.end(), s->begin(), s->end());
    return out;
  }
  if (auto s = labeled_vm_script(contr, h, opts)) {
    OperationScript out;
    uint64_t nb = g.neighbors(v);
    if (nb) out.push_back(Step::pv(v, std::countr_zero(nb)));
    out.push_back(Step::del(v));
    out.insert(out.end(), s->begin(), s->end());
    return out;
  }
  return std::nullopt;
}

SidedBipartiteGraph sided_pivot(const SidedBipartiteGraph& g, VertexId u,
                                VertexId v) {
  validate_sided(g);
  if (!g.graph.has_edge(u, v)) throw Error("sided_pivot: not an edge");
  SidedBipartiteGraph out;
  out.graph = pivot(g.graph, u, v);
  uint64_t swap_mask = (uint64_t{1} << u) | (uint64_t{1} << v);
  out.side_a = g.side_a ^ swap_mask;
  out.side_b = g.side_b ^ swap_mask;
  validate_sided(out);
  return out;
}

namespace {

struct SidedKey {
  PackedGraph g;
  uint16_t side;
  bool operator==(const SidedKey&) const = default;
};

struct SidedKeyHash {
  size_t operator()(const SidedKey& k) const {
    PackedGraphHash h;
    return h(k.g) ^ (size_t(k.side) * 0x9e3779b9u);
  }
};

struct SidedSmall {
  SmallGraph g;
  uint16_t side_b;
};

SidedSmall to_sided_small(const SidedBipartiteGraph& g) {
  SidedSmall out;
  out.g = to_small(g.graph);
  out.side_b = 0;
  auto vs = g.graph.vertices();
  for (size_t i = 0; i < vs.size(); ++i)
    if ((g.side_b >> vs[i]) & 1) out.side_b |= uint16_t(1u << i);
  return out;
}

// Colored canonical key of a sided small graph (side B = color 1).
CanonicalForm sided_canon(const SidedSmall& s) {
  std::array<uint8_t, 16> colors{};
  for (int v = 0; v < s.g.n; ++v) colors[v] = (s.side_b >> v) & 1;
  uint16_t word = 0;
  PackedGraph p = small_canonical(s.g, &colors, nullptr, &word);
  return CanonicalForm{p.lo, p.hi, word, p.n};
}

std::vector<SidedSmall> sided_pivot_orbit(const SidedSmall& start, size_t bound,
                                          const char* who) {
  std::vector<SidedSmall> order = {start};
  std::unordered_set<SidedKey, SidedKeyHash> seen;
  seen.insert(SidedKey{pack(start.g), start.side_b});
  for (size_t head = 0; head < order.size(); ++head) {
    SidedSmall cur = order[head];
    for (int u = 0; u < cur.g.n; ++u)
      for (int v = u + 1; v < cur.g.n; ++v) {
        if (!cur.g.edge(u, v)) continue;
        SidedSmall next = cur;
        next.g.pivot(u, v);
        next.side_b ^= uint16_t((1u << u) | (1u << v));
        SidedKey key{pack(next.g), next.side_b};
        if (seen.insert(key).second) {
          if (order.size() >= bound)
            throw Error(std::string(who) + ": orbit bound exceeded after " +
                        std::to_string(order.size()) + " members");
          order.push_back(next);
        }
      }
  }
  return order;
}

// v removed by deletion or by contraction, in the sided world.
SidedBipartiteGraph sided_delete(const SidedBipartiteGraph& g, VertexId v) {
  SidedBipartiteGraph out;
  out.graph = delete_vertex(g.graph, v);
  uint64_t bit = ~(uint64_t{1} << v);
  out.side_a = g.side_a & bit;
  out.side_b = g.side_b & bit;
  return out;
}

SidedBipartiteGraph sided_contract(const SidedBipartiteGraph& g, VertexId v) {
  uint64_t nb = g.graph.neighbors(v);
  if (!nb) return sided_delete(g, v);
  return sided_delete(sided_pivot(g, v, std::countr_zero(nb)), v);
}

bool contains_pm_rec(const SidedBipartiteGraph& g, const SidedBipartiteGraph& h,
                     const CanonicalForm& ch, const VmOptions& opts) {
  int ng = g.graph.vertex_count(), nh = h.graph.vertex_count();
  if (ng < nh) return false;
  SidedSmall sg = to_sided_small(g);
  PairKey key{sided_canon(sg), ch};
  if (auto hit = memo_get(pm_memo, key)) return *hit;
  bool result = false;
  if (ng == nh) {
    int b_h = std::popcount(h.side_b);
    if (std::popcount(g.side_b) == b_h) {
      auto orbit = sided_pivot_orbit(sg, opts.orbit_bound,
                                     "contains_pivot_minor_bipartite");
      for (const SidedSmall& member : orbit)
        if (sided_canon(member) == ch) {
          result = true;
          break;
        }
    }
  } else {
    for (VertexId v : branch_order(g.graph)) {
      if (contains_pm_rec(sided_delete(g, v), h, ch, opts) ||
          contains_pm_rec(sided_contract(g, v), h, ch, opts)) {
        result = true;
        break;
      }
    }
  }
  memo_put(pm_memo, key, result);
  return result;
}

}  // namespace

bool contains_pivot_minor_bipartite(const SidedBipartiteGraph& g,
                                    const SidedBipartiteGraph& h,
                                    const VmOptions& opts) {
  validate_sided(g);
  validate_sided(h);
  if (g.graph.vertex_count() > opts.vertex_cap ||
      h.graph.vertex_count() > opts.vertex_cap)
    throw Error("contains_pivot_minor_bipartite: vertex cap exceeded");
  SidedSmall sh = to_sided_small(h);
  return contains_pm_rec(g, h, sided_canon(sh), opts);
}

std::optional<OperationScript> pivot_minor_witness(const SidedBipartiteGraph& g,
                                                   const SidedBipartiteGraph& h,
                                                   const VmOptions& opts) {
  if (!contains_pivot_minor_bipartite(g, h, opts)) return std::nullopt;
  CanonicalForm ch = sided_canon(to_sided_small(h));
  OperationScript script;
  SidedBipartiteGraph cur = g;
  while (cur.graph.vertex_count() > h.graph.vertex_count()) {
    bool advanced = false;
    for (VertexId v : branch_order(cur.graph)) {
      if (contains_pm_rec(sided_delete(cur, v), h, ch, opts)) {
        script.push_back(Step::del(v));
        cur = sided_delete(cur, v);
        advanced = true;
        break;
      }
      if (contains_pm_rec(sided_contract(cur, v), h, ch, opts)) {
        uint64_t nb = cur.graph.neighbors(v);
        if (nb) script.push_back(Step::pv(v, std::countr_zero(nb)));
        script.push_back(Step::del(v));
        cur = sided_contract(cur, v);
        advanced = true;
        break;
      }
    }
    if (!advanced) throw Error("pivot_minor_witness: search inconsistency");
  }
  // Close with pivots to hit the strong-isomorphism class exactly.
  SidedSmall scur = to_sided_small(cur);
  std::vector<SidedSmall> orbit =
      sided_pivot_orbit(scur, opts.orbit_bound, "pivot_minor_witness");
  // Recover a pivot path by BFS with parent tracking.
  std::unordered_map<SidedKey, std::tuple<int64_t, int8_t, int8_t>, SidedKeyHash>
      links;
  std::vector<SidedSmall> order = {scur};
  links.emplace(SidedKey{pack(scur.g), scur.side_b},
                std::tuple<int64_t, int8_t, int8_t>{-1, -1, -1});
  auto labels = cur.graph.vertices();
  for (size_t head = 0; head < order.size(); ++head) {
    SidedSmall c = order[head];
    if (sided_canon(c) == ch) {
      OperationScript rev;
      SidedKey k{pack(c.g), c.side_b};
      while (true) {
        auto [parent, pu, pv] = links.at(k);
        if (parent < 0) break;
        rev.push_back(Step::pv(labels[pu], labels[pv]));
        const SidedSmall& par = order[static_cast<size_t>(parent)];
        k = SidedKey{pack(par.g), par.side_b};
      }
      std::reverse(rev.begin(), rev.end());
      script.insert(script.end(), rev.begin(), rev.end());
      return script;
    }
    for (int u = 0; u < c.g.n; ++u)
      for (int v = u + 1; v < c.g.n; ++v) {
        if (!c.g.edge(u, v)) continue;
        SidedSmall next = c;
        next.g.pivot(u, v);
        next.side_b ^= uint16_t((1u << u) | (1u << v));
        SidedKey key{pack(next.g), next.side_b};
        if (links.emplace(key, std::tuple<int64_t, int8_t, int8_t>{
                                   static_cast<int64_t>(head),
                                   static_cast<int8_t>(u),
                                   static_cast<int8_t>(v)}).second)
          order.push_back(next);
      }
  }
  throw Error("pivot_minor_witness: base case inconsistency");
}

std::vector<SidedBipartiteGraph> pivot_orbit(const SidedBipartiteGraph& g,
                                             const VmOptions& opts) {
  validate_sided(g);
  if (g.graph.vertex_count() > opts.vertex_cap)
    throw Error("pivot_orbit: vertex cap exceeded");
  auto labels = g.graph.vertices();
  auto orbit = sided_pivot_orbit(to_sided_small(g), opts.orbit_bound,
                                 "pivot_orbit");
  std::vector<SidedBipartiteGraph> out;
  for (const SidedSmall& s : orbit) {
    SidedBipartiteGraph member;
    member.graph = Graph::on_vertices(g.graph.vertex_mask());
    member.side_a = 0;
    member.side_b = 0;
    for (int i = 0; i < s.g.n; ++i) {
      if ((s.side_b >> i) & 1)
        member.side_b |= uint64_t{1} << labels[i];
      else
        member.side_a |= uint64_t{1} << labels[i];
      for (int j = i + 1; j < s.g.n; ++j)
        if (s.g.edge(i, j)) member.graph.set_edge(labels[i], labels[j], true);
    }
    out.push_back(std::move(member));
  }
  return out;
}

CanonicalClass canonical_class(const Graph& g, EquivalenceKind kind,
                               const VmOptions& opts) {
  if (g.vertex_count() > opts.vertex_cap)
    throw Error("canonical_class: vertex cap exceeded");
  SmallGraph start = to_small(g);
  std::vector<PackedGraph> orbit;
  if (kind == EquivalenceKind::Local) {
    orbit = small_lc_orbit(start, opts.orbit_bound, "canonical_class");
  } else {
    std::unordered_set<PackedGraph, PackedGraphHash> seen;
    orbit.push_back(pack(start));
    seen.insert(orbit[0]);
    for (size_t head = 0; head < orbit.size(); ++head) {
      SmallGraph cur = unpack(orbit[head]);
      for (int u = 0; u < cur.n; ++u)
        for (int v = u + 1; v < cur.n; ++v) {
          if (!cur.edge(u, v)) continue;
          SmallGraph next = cur;
          next.pivot(u, v);
          PackedGraph key = pack(next);
          if (seen.insert(key).second) {
            if (orbit.size() >= opts.orbit_bound)
              throw Error("canonical_class: orbit bound exceeded");
            orbit.push_back(key);
          }
        }
    }
  }
  CanonicalForm best;
  bool first = true;
  for (const PackedGraph& p : orbit) {
    PackedGraph c = small_canonical(unpack(p));
    CanonicalForm cf{c.lo, c.hi, 0, c.n};
    if (first || cf < best) {
      best = cf;
      first = false;
    }
  }
  return CanonicalClass{best, kind, orbit.size()};
}

void clear_containment_memo() {
  std::lock_guard<std::mutex> lock(memo_mutex);
  vm_memo.clear();
  pm_memo.clear();
}

}  // namespace vmc
