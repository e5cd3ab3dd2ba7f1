#include "vmc/graph.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "vmc/smallgraph.hpp"

namespace vmc {

namespace {

uint64_t mask_below(int n) {
  return n >= 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
}

}  // namespace

Graph Graph::empty(int n) {
  if (n < 0 || n > kMaxVertices) throw Error("Graph: bad vertex count");
  return on_vertices(mask_below(n));
}

Graph Graph::on_vertices(uint64_t vertex_mask) {
  Graph g;
  g.verts_ = vertex_mask;
  return g;
}

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  Graph g = empty(n);
  for (auto [u, v] : edges) g.set_edge(u, v, true);
  return g;
}

Graph Graph::complete(int n) {
  Graph g = empty(n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) g.set_edge(u, v, true);
  return g;
}

Graph Graph::path(int n) {
  Graph g = empty(n);
  for (int v = 0; v + 1 < n; ++v) g.set_edge(v, v + 1, true);
  return g;
}

Graph Graph::cycle(int n) {
  Graph g = path(n);
  if (n >= 3) g.set_edge(n - 1, 0, true);
  return g;
}

Graph Graph::complete_multipartite(const std::vector<int>& part_sizes) {
  int n = 0;
  for (int s : part_sizes) {
    if (s < 0) throw Error("complete_multipartite: negative part");
    n += s;
  }
  Graph g = empty(n);
  int astart = 0;
  for (size_t i = 0; i < part_sizes.size(); ++i) {
    int bstart = astart + part_sizes[i];
    for (int u = astart; u < astart + part_sizes[i]; ++u)
      for (int v = bstart; v < n; ++v) g.set_edge(u, v, true);
    astart = bstart;
  }
  return g;
}

std::vector<VertexId> Graph::vertices() const {
  std::vector<VertexId> out;
  for (uint64_t m = verts_; m; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

int Graph::vertex_count() const { return std::popcount(verts_); }

int Graph::edge_count() const {
  int total = 0;
  for (uint64_t m = verts_; m; m &= m - 1)
    total += std::popcount(adj_[std::countr_zero(m)]);
  return total / 2;
}

bool Graph::has_edge(VertexId u, VertexId v) const {
  require_vertex(u);
  require_vertex(v);
  return (adj_[u] >> v) & 1;
}

uint64_t Graph::neighbors(VertexId v) const {
  require_vertex(v);
  return adj_[v];
}

int Graph::degree(VertexId v) const { return std::popcount(neighbors(v)); }

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (uint64_t m = verts_; m; m &= m - 1) {
    int u = std::countr_zero(m);
    uint64_t higher = adj_[u] & ~mask_below(u + 1);
    for (uint64_t h = higher; h; h &= h - 1)
      out.emplace_back(u, std::countr_zero(h));
  }
  return out;
}

void Graph::add_vertex(VertexId v) {
  if (!valid(v)) throw Error("Graph: vertex label out of range");
  if (has_vertex(v)) throw Error("Graph: vertex already present");
  verts_ |= uint64_t{1} << v;
}

void Graph::set_edge(VertexId u, VertexId v, bool present) {
  require_vertex(u);
  require_vertex(v);
  if (u == v) throw Error("Graph: no loops");
  if (present) {
    adj_[u] |= uint64_t{1} << v;
    adj_[v] |= uint64_t{1} << u;
  } else {
    adj_[u] &= ~(uint64_t{1} << v);
    adj_[v] &= ~(uint64_t{1} << u);
  }
}

void Graph::toggle_edge(VertexId u, VertexId v) {
  set_edge(u, v, !has_edge(u, v));
}

BitMatrix Graph::adjacency_matrix() const {
  auto vs = vertices();
  int n = static_cast<int>(vs.size());
  BitMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && ((adj_[vs[i]] >> vs[j]) & 1)) m.set(i, j, true);
  return m;
}

size_t Graph::hash_value() const {
  uint64_t h = verts_ * 0x9e3779b97f4a7c15ULL;
  for (uint64_t m = verts_; m; m &= m - 1) {
    int v = std::countr_zero(m);
    h ^= (adj_[v] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    h *= 0xff51afd7ed558ccdULL;
  }
  return static_cast<size_t>(h ^ (h >> 33));
}

void Graph::require_vertex(VertexId v) const {
  if (!has_vertex(v)) {
    throw Error("Graph: unknown vertex " + std::to_string(v));
  }
}

Graph local_complement(const Graph& g, VertexId v) {
  uint64_t nb = g.neighbors(v);
  Graph out = g;
  for (uint64_t m = nb; m; m &= m - 1) {
    int u = std::countr_zero(m);
    for (uint64_t rest = nb & ~mask_below(u + 1); rest; rest &= rest - 1)
      out.toggle_edge(u, std::countr_zero(rest));
  }
  return out;
}

Graph pivot(const Graph& g, VertexId u, VertexId v) {
  if (!g.has_edge(u, v)) {
    throw Error("pivot: " + std::to_string(u) + std::to_string(v) +
                " is not an edge");
  }
  uint64_t nu = g.neighbors(u) & ~(uint64_t{1} << v);
  uint64_t nv = g.neighbors(v) & ~(uint64_t{1} << u);
  uint64_t both = nu & nv;
  uint64_t only_u = nu & ~nv;
  uint64_t only_v = nv & ~nu;
  Graph out = g;
  auto toggle_between = [&out](uint64_t a, uint64_t b) {
    for (uint64_t m = a; m; m &= m - 1) {
      int x = std::countr_zero(m);
      for (uint64_t k = b; k; k &= k - 1) out.toggle_edge(x, std::countr_zero(k));
    }
  };
  toggle_between(both, only_u);
  toggle_between(both, only_v);
  toggle_between(only_u, only_v);
  // Swap the labels of u and v.
  for (int x : out.vertices()) {
    if (x == u || x == v) continue;
    bool xu = out.has_edge(x, u), xv = out.has_edge(x, v);
    if (xu != xv) {
      out.set_edge(x, u, xv);
      out.set_edge(x, v, xu);
    }
  }
  return out;
}

Graph contract_vertex(const Graph& g, VertexId v) {
  uint64_t nb = g.neighbors(v);
  if (nb == 0) return delete_vertex(g, v);
  int u = std::countr_zero(nb);  // canonical: smallest-id neighbor
  return delete_vertex(pivot(g, v, u), v);
}

Graph delete_vertex(const Graph& g, VertexId v) {
  g.require_vertex(v);
  return induced_subgraph(g, g.vertex_mask() & ~(uint64_t{1} << v));
}

Graph delete_vertices(const Graph& g, uint64_t mask) {
  if (mask & ~g.vertex_mask()) throw Error("delete_vertices: unknown vertex");
  return induced_subgraph(g, g.vertex_mask() & ~mask);
}

Graph induced_subgraph(const Graph& g, uint64_t keep_mask) {
  if (keep_mask & ~g.vertex_mask())
    throw Error("induced_subgraph: unknown vertex");
  Graph out = Graph::on_vertices(keep_mask);
  for (uint64_t m = keep_mask; m; m &= m - 1) {
    int u = std::countr_zero(m);
    uint64_t nb = g.neighbors(u) & keep_mask;
    for (uint64_t k = nb; k; k &= k - 1) {
      int v = std::countr_zero(k);
      if (u < v) out.set_edge(u, v, true);
    }
  }
  return out;
}

Graph disjoint_copies(const Graph& h, int k) {
  if (k < 1) throw Error("disjoint_copies: k must be positive");
  std::vector<VertexId> vs = h.vertices();
  int n = static_cast<int>(vs.size());
  if (n * k > kMaxVertices) throw Error("disjoint_copies: too many vertices");
  Graph out = Graph::empty(n * k);
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (h.has_edge(vs[i], vs[j]))
          out.set_edge(c * n + i, c * n + j, true);
  return out;
}

Graph disjoint_union(const Graph& a, const Graph& b) {
  if (a.vertex_mask() & b.vertex_mask())
    throw Error("disjoint_union: overlapping vertex labels");
  Graph out = Graph::on_vertices(a.vertex_mask() | b.vertex_mask());
  for (auto [u, v] : a.edges()) out.set_edge(u, v, true);
  for (auto [u, v] : b.edges()) out.set_edge(u, v, true);
  return out;
}

Graph complement_graph(const Graph& g) {
  auto vs = g.vertices();
  Graph out = Graph::on_vertices(g.vertex_mask());
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t j = i + 1; j < vs.size(); ++j)
      if (!g.has_edge(vs[i], vs[j])) out.set_edge(vs[i], vs[j], true);
  return out;
}

Graph relabel(const Graph& g, const std::array<VertexId, kMaxVertices>& new_label) {
  uint64_t seen = 0;
  for (int v : g.vertices()) {
    int w = new_label[v];
    if (w < 0 || w >= kMaxVertices) throw Error("relabel: label out of range");
    if ((seen >> w) & 1) throw Error("relabel: duplicate label");
    seen |= uint64_t{1} << w;
  }
  Graph out = Graph::on_vertices(seen);
  for (auto [u, v] : g.edges())
    out.set_edge(new_label[u], new_label[v], true);
  return out;
}

Graph compact(const Graph& g, std::vector<VertexId>* old_labels) {
  auto vs = g.vertices();
  std::array<VertexId, kMaxVertices> map{};
  for (size_t i = 0; i < vs.size(); ++i) map[vs[i]] = static_cast<int>(i);
  if (old_labels) *old_labels = vs;
  return relabel(g, map);
}

// ---- scripts ----

Graph replay(const Graph& g, const OperationScript& s) {
  Graph cur = g;
  for (size_t i = 0; i < s.size(); ++i) {
    const Step& st = s[i];
    try {
      switch (st.kind) {
        case Step::LC: cur = local_complement(cur, st.u); break;
        case Step::PV: cur = pivot(cur, st.u, st.v); break;
        case Step::DEL: cur = delete_vertex(cur, st.u); break;
      }
    } catch (const Error& e) {
      throw Error("replay: step " + std::to_string(i) + ": " + e.what());
    }
  }
  return cur;
}

uint64_t script_deletions(const OperationScript& s) {
  uint64_t mask = 0;
  for (const Step& st : s)
    if (st.kind == Step::DEL) mask |= uint64_t{1} << st.u;
  return mask;
}

OperationScript strip_deletions(const OperationScript& s) {
  OperationScript out;
  for (const Step& st : s)
    if (st.kind != Step::DEL) out.push_back(st);
  return out;
}

OperationScript invert_lc_script(const OperationScript& s) {
  OperationScript out;
  for (auto it = s.rbegin(); it != s.rend(); ++it) {
    if (it->kind == Step::DEL)
      throw Error("invert_lc_script: script contains deletions");
    out.push_back(*it);
  }
  return out;
}

bool script_touches_only(const OperationScript& s, uint64_t allowed_mask) {
  for (const Step& st : s) {
    if (!((allowed_mask >> st.u) & 1)) return false;
    if (st.kind == Step::PV && !((allowed_mask >> st.v) & 1)) return false;
  }
  return true;
}

std::string script_to_text(const OperationScript& s) {
  std::ostringstream out;
  for (const Step& st : s) {
    switch (st.kind) {
      case Step::LC: out << "LC " << st.u << "\n"; break;
      case Step::PV: out << "PV " << st.u << " " << st.v << "\n"; break;
      case Step::DEL: out << "DEL " << st.u << "\n"; break;
    }
  }
  return out.str();
}

OperationScript script_from_text(const std::string& text) {
  OperationScript out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string op;
    if (!(ls >> op)) continue;
    if (op == "LC" || op == "DEL") {
      int v;
      if (!(ls >> v)) throw Error("script: missing operand in '" + line + "'");
      out.push_back(op == "LC" ? Step::lc(v) : Step::del(v));
    } else if (op == "PV") {
      int u, v;
      if (!(ls >> u >> v)) throw Error("script: missing operand in '" + line + "'");
      out.push_back(Step::pv(u, v));
    } else {
      throw Error("script: unknown op '" + op + "'");
    }
  }
  return out;
}

// ---- graph6 / sparse6 ----

namespace {

void append_number6(std::string& out, int n) {
  if (n < 0 || n > kMaxVertices) throw Error("graph6: size out of range");
  if (n <= 62) {
    out += static_cast<char>(n + 63);
  } else {
    out += static_cast<char>(126);
    out += static_cast<char>(((n >> 12) & 63) + 63);
    out += static_cast<char>(((n >> 6) & 63) + 63);
    out += static_cast<char>((n & 63) + 63);
  }
}

int read_number6(const std::string& s, size_t& pos) {
  if (pos >= s.size()) throw Error("graph6: truncated input");
  int c = s[pos] - 63;
  if (c < 0) throw Error("graph6: bad character");
  if (c != 63) {
    ++pos;
    return c;
  }
  if (pos + 3 >= s.size()) throw Error("graph6: truncated size");
  int n = 0;
  for (int i = 1; i <= 3; ++i) n = (n << 6) | (s[pos + i] - 63);
  pos += 4;
  return n;
}

struct BitWriter {
  std::string out;
  int used = 0;
  void push(bool b) {
    if (used % 6 == 0) out += static_cast<char>(63);
    if (b) out.back() += static_cast<char>(1 << (5 - used % 6));
    ++used;
  }
  void pad(bool b) {
    while (used % 6 != 0) push(b);
  }
};

struct BitReader {
  const std::string& s;
  size_t pos;
  int bit = 0;
  bool more() const { return pos < s.size(); }
  int remaining_bits() const {
    return static_cast<int>(s.size() - pos) * 6 - bit;
  }
  bool next() {
    if (pos >= s.size()) throw Error("graph6: truncated bits");
    int c = s[pos] - 63;
    bool b = (c >> (5 - bit)) & 1;
    if (++bit == 6) {
      bit = 0;
      ++pos;
    }
    return b;
  }
};

}  // namespace

std::string to_graph6(const Graph& g) {
  Graph c = compact(g);
  int n = c.vertex_count();
  std::string out;
  append_number6(out, n);
  BitWriter bw;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) bw.push(c.has_edge(i, j));
  bw.pad(false);
  return out + bw.out;
}

Graph from_graph6(const std::string& text) {
  std::string s = text;
  if (s.starts_with(">>graph6<<")) s = s.substr(10);
  size_t pos = 0;
  int n = read_number6(s, pos);
  Graph g = Graph::empty(n);
  BitReader br{s, pos};
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (br.next()) g.set_edge(i, j, true);
  return g;
}

std::string to_sparse6(const Graph& g) {
  Graph c = compact(g);
  int n = c.vertex_count();
  std::string out = ":";
  append_number6(out, n);
  int k = 1;
  while ((1 << k) < n - 1 + 1 && n > 1) ++k;  // bits for values 0..n-1
  if (n <= 1) k = 1;
  BitWriter bw;
  auto push_val = [&](int x) {
    for (int i = k - 1; i >= 0; --i) bw.push((x >> i) & 1);
  };
  int cur = 0;
  auto es = c.edges();
  std::sort(es.begin(), es.end(), [](auto a, auto b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  for (auto [u, v] : es) {
    if (v == cur) {
      bw.push(false);
      push_val(u);
    } else if (v == cur + 1) {
      cur = v;
      bw.push(true);
      push_val(u);
    } else {
      cur = v;
      bw.push(true);
      push_val(v);
      bw.push(false);
      push_val(u);
    }
  }
  // Padding is 1s, except in one case: when n is a power of two, the current
  // vertex is n-2, and a full group of 1s still fits, that group would decode
  // as a loop at n-1. Lead with a single 0 bit there.
  if (n == (1 << k) && cur == n - 2 && bw.used % 6 != 0 &&
      6 - bw.used % 6 >= k + 1)
    bw.push(false);
  bw.pad(true);
  return out + bw.out;
}

Graph from_sparse6(const std::string& text) {
  std::string s = text;
  if (s.starts_with(">>sparse6<<")) s = s.substr(11);
  if (s.empty() || s[0] != ':') throw Error("sparse6: missing ':'");
  size_t pos = 1;
  int n = read_number6(s, pos);
  Graph g = Graph::empty(n);
  if (n <= 1) return g;
  int k = 1;
  while ((1 << k) < n) ++k;
  BitReader br{s, pos};
  int cur = 0;
  while (br.remaining_bits() >= k + 1) {
    bool b = br.next();
    int x = 0;
    for (int i = 0; i < k; ++i) x = (x << 1) | (br.next() ? 1 : 0);
    if (b) ++cur;
    if (cur >= n || x >= n) break;
    if (x > cur)
      cur = x;
    else if (x != cur)
      g.set_edge(x, cur, true);
    // x == cur would be a loop; sparse6 allows it but simple graphs forbid it.
    else
      throw Error("sparse6: loop not allowed in a simple graph");
  }
  return g;
}

Graph parse_graph_text(const std::string& text) {
  std::string s = text;
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' '))
    s.pop_back();
  if (s.starts_with(">>sparse6<<") || (!s.empty() && s[0] == ':'))
    return from_sparse6(s);
  if (s.starts_with(">>graph6<<")) return from_graph6(s);
  return from_graph6(s);
}

// ---- small graphs, canonical forms, isomorphism ----

int SmallGraph::edge_count() const {
  int total = 0;
  for (int v = 0; v < n; ++v) total += degree(v);
  return total / 2;
}

void SmallGraph::local_complement(int v) {
  uint16_t nb = row[v];
  for (uint16_t m = nb; m; m &= m - 1) {
    int u = std::countr_zero(static_cast<unsigned>(m));
    uint16_t rest = nb & static_cast<uint16_t>(~((2u << u) - 1));
    row[u] ^= rest;
    for (uint16_t k = rest; k; k &= k - 1)
      row[std::countr_zero(static_cast<unsigned>(k))] ^= uint16_t(1u << u);
  }
}

void SmallGraph::pivot(int u, int v) {
  uint16_t nu = row[u] & static_cast<uint16_t>(~(1u << v));
  uint16_t nv = row[v] & static_cast<uint16_t>(~(1u << u));
  uint16_t both = nu & nv, only_u = nu & ~nv, only_v = nv & ~nu;
  auto toggle_between = [this](uint16_t a, uint16_t b) {
    for (uint16_t m = a; m; m &= m - 1) {
      int x = std::countr_zero(static_cast<unsigned>(m));
      row[x] ^= b;
      for (uint16_t k = b; k; k &= k - 1)
        row[std::countr_zero(static_cast<unsigned>(k))] ^= uint16_t(1u << x);
    }
  };
  toggle_between(both, only_u);
  toggle_between(both, only_v);
  toggle_between(only_u, only_v);
  for (int x = 0; x < n; ++x) {
    if (x == u || x == v) continue;
    bool xu = edge(x, u), xv = edge(x, v);
    if (xu != xv) {
      row[x] ^= uint16_t((1u << u) | (1u << v));
      row[u] ^= uint16_t(1u << x);
      row[v] ^= uint16_t(1u << x);
    }
  }
}

SmallGraph SmallGraph::without_vertex(int v) const {
  SmallGraph out;
  out.n = static_cast<uint8_t>(n - 1);
  uint16_t low = static_cast<uint16_t>((1u << v) - 1);
  for (int x = 0; x < n; ++x) {
    if (x == v) continue;
    uint16_t r = row[x];
    uint16_t nr = static_cast<uint16_t>((r & low) | ((r >> 1) & ~low));
    out.row[x < v ? x : x - 1] = nr;
  }
  return out;
}

size_t PackedGraphHash::operator()(const PackedGraph& p) const {
  uint64_t h = p.lo * 0x9e3779b97f4a7c15ULL;
  h ^= p.hi + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  return static_cast<size_t>(h ^ p.n);
}

PackedGraph pack(const SmallGraph& g) {
  PackedGraph p;
  p.n = g.n;
  int bit = 0;
  for (int j = 1; j < g.n; ++j)
    for (int i = 0; i < j; ++i) {
      if (g.edge(i, j)) {
        if (bit < 64)
          p.lo |= uint64_t{1} << bit;
        else
          p.hi |= uint64_t{1} << (bit - 64);
      }
      ++bit;
    }
  return p;
}

SmallGraph unpack(const PackedGraph& p) {
  SmallGraph g;
  g.n = p.n;
  int bit = 0;
  for (int j = 1; j < p.n; ++j)
    for (int i = 0; i < j; ++i) {
      bool e = bit < 64 ? (p.lo >> bit) & 1 : (p.hi >> (bit - 64)) & 1;
      if (e) g.set_edge(i, j);
      ++bit;
    }
  return g;
}

SmallGraph to_small(const Graph& g) {
  auto vs = g.vertices();
  if (vs.size() > 16) throw Error("to_small: more than 16 vertices");
  SmallGraph out;
  out.n = static_cast<uint8_t>(vs.size());
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t j = i + 1; j < vs.size(); ++j)
      if (g.has_edge(vs[i], vs[j])) out.set_edge(static_cast<int>(i), static_cast<int>(j));
  return out;
}

Graph to_graph(const SmallGraph& g) {
  Graph out = Graph::empty(g.n);
  for (int i = 0; i < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j)
      if (g.edge(i, j)) out.set_edge(i, j, true);
  return out;
}

namespace {

// Partition refinement canonical labeling. Cells are kept in order; the
// canonical form is the minimum packed triangle over all leaf labelings.
struct CanonSearch {
  const SmallGraph& g;
  std::array<uint8_t, 16> colors{};
  bool found = false;
  PackedGraph best;
  uint16_t best_colorword = 0;
  std::array<uint8_t, 16> best_perm{};

  explicit CanonSearch(const SmallGraph& graph) : g(graph) {}

  using Partition = std::vector<std::vector<uint8_t>>;

  void refine(Partition& cells) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t s = 0; s < cells.size() && !changed; ++s) {
        uint16_t splitter = 0;
        for (uint8_t v : cells[s]) splitter |= uint16_t(1u << v);
        for (size_t c = 0; c < cells.size(); ++c) {
          if (cells[c].size() <= 1) continue;
          auto& cell = cells[c];
          std::stable_sort(cell.begin(), cell.end(), [&](uint8_t a, uint8_t b) {
            return __builtin_popcount(g.row[a] & splitter) <
                   __builtin_popcount(g.row[b] & splitter);
          });
          std::vector<std::vector<uint8_t>> pieces;
          for (uint8_t v : cell) {
            int d = __builtin_popcount(g.row[v] & splitter);
            if (pieces.empty() ||
                __builtin_popcount(g.row[pieces.back()[0]] & splitter) != d)
              pieces.emplace_back();
            pieces.back().push_back(v);
          }
          if (pieces.size() > 1) {
            cells.erase(cells.begin() + c);
            cells.insert(cells.begin() + c, pieces.begin(), pieces.end());
            changed = true;
            break;
          }
        }
      }
    }
  }

  void leaf(const Partition& cells) {
    std::array<uint8_t, 16> pos{};
    int p = 0;
    for (const auto& cell : cells)
      for (uint8_t v : cell) pos[v] = static_cast<uint8_t>(p++);
    SmallGraph h;
    h.n = g.n;
    for (int u = 0; u < g.n; ++u)
      for (int v = u + 1; v < g.n; ++v)
        if (g.edge(u, v)) h.set_edge(pos[u], pos[v]);
    PackedGraph cand = pack(h);
    uint16_t colorword = 0;
    for (int v = 0; v < g.n; ++v)
      if (colors[v]) colorword |= uint16_t(1u << pos[v]);
    if (!found || std::tie(cand.lo, cand.hi, colorword) <
                      std::tie(best.lo, best.hi, best_colorword)) {
      found = true;
      best = cand;
      best_colorword = colorword;
      best_perm = pos;
    }
  }

  void search(Partition cells) {
    refine(cells);
    size_t branch = cells.size();
    for (size_t c = 0; c < cells.size(); ++c)
      if (cells[c].size() > 1) {
        branch = c;
        break;
      }
    if (branch == cells.size()) {
      leaf(cells);
      return;
    }
    std::vector<uint8_t> cell = cells[branch];
    for (uint8_t v : cell) {
      Partition next = cells;
      std::vector<uint8_t> rest;
      for (uint8_t w : cell)
        if (w != v) rest.push_back(w);
      next[branch] = {v};
      next.insert(next.begin() + branch + 1, rest);
      search(std::move(next));
    }
  }
};

}  // namespace

PackedGraph small_canonical(const SmallGraph& g,
                            const std::array<uint8_t, 16>* colors,
                            std::array<uint8_t, 16>* perm_out,
                            uint16_t* canon_colors_out) {
  CanonSearch cs(g);
  if (colors) cs.colors = *colors;
  CanonSearch::Partition initial;
  int maxcolor = 0;
  for (int v = 0; v < g.n; ++v) maxcolor = std::max(maxcolor, int(cs.colors[v]));
  for (int c = 0; c <= maxcolor; ++c) {
    std::vector<uint8_t> cell;
    for (int v = 0; v < g.n; ++v)
      if (cs.colors[v] == c) cell.push_back(static_cast<uint8_t>(v));
    if (!cell.empty()) initial.push_back(std::move(cell));
  }
  if (initial.empty()) initial.push_back({});
  cs.search(std::move(initial));
  if (perm_out) *perm_out = cs.best_perm;
  if (canon_colors_out) *canon_colors_out = cs.best_colorword;
  return cs.best;
}

size_t CanonicalFormHash::operator()(const CanonicalForm& c) const {
  PackedGraphHash h;
  return h(PackedGraph{c.lo, c.hi, c.n}) ^ (size_t(c.colors) << 1);
}

CanonicalForm canonical_form(const Graph& g, int cap) {
  if (g.vertex_count() > cap || g.vertex_count() > 16)
    throw Error("canonical_form: vertex cap exceeded");
  PackedGraph p = small_canonical(to_small(g));
  return CanonicalForm{p.lo, p.hi, 0, p.n};
}

CanonicalForm canonical_form_colored(const Graph& g,
                                     const std::vector<int>& colors,
                                     int cap) {
  if (g.vertex_count() > cap || g.vertex_count() > 16)
    throw Error("canonical_form: vertex cap exceeded");
  if (static_cast<int>(colors.size()) != g.vertex_count())
    throw Error("canonical_form: color count mismatch");
  SmallGraph s = to_small(g);
  std::array<uint8_t, 16> col{};
  for (size_t i = 0; i < colors.size(); ++i) {
    if (colors[i] != 0 && colors[i] != 1)
      throw Error("canonical_form: colors must be 0 or 1");
    col[i] = static_cast<uint8_t>(colors[i]);
  }
  uint16_t word = 0;
  PackedGraph p = small_canonical(s, &col, nullptr, &word);
  return CanonicalForm{p.lo, p.hi, word, p.n};
}

bool are_isomorphic(const Graph& a, const Graph& b, int cap) {
  if (a.vertex_count() != b.vertex_count()) return false;
  if (a.edge_count() != b.edge_count()) return false;
  return canonical_form(a, cap) == canonical_form(b, cap);
}

std::optional<std::array<VertexId, kMaxVertices>> find_isomorphism(
    const Graph& a, const Graph& b, int cap) {
  if (a.vertex_count() != b.vertex_count()) return std::nullopt;
  if (a.vertex_count() > cap || a.vertex_count() > 16)
    throw Error("find_isomorphism: vertex cap exceeded");
  SmallGraph sa = to_small(a), sb = to_small(b);
  std::array<uint8_t, 16> pa{}, pb{};
  PackedGraph ca = small_canonical(sa, nullptr, &pa);
  PackedGraph cb = small_canonical(sb, nullptr, &pb);
  if (!(ca == cb)) return std::nullopt;
  auto va = a.vertices();
  auto vb = b.vertices();
  std::array<uint8_t, 16> inv_pb{};
  for (size_t i = 0; i < vb.size(); ++i) inv_pb[pb[i]] = static_cast<uint8_t>(i);
  std::array<VertexId, kMaxVertices> map{};
  map.fill(-1);
  for (size_t i = 0; i < va.size(); ++i) map[va[i]] = vb[inv_pb[pa[i]]];
  return map;
}

namespace {

bool extend_embedding(const SmallGraph& g, const SmallGraph& h, int next,
                      std::array<uint8_t, 16>& image, uint16_t used) {
  if (next == h.n) return true;
  for (int c = 0; c < g.n; ++c) {
    if ((used >> c) & 1) continue;
    bool ok = true;
    for (int p = 0; p < next && ok; ++p)
      if (h.edge(p, next) != g.edge(image[p], c)) ok = false;
    if (!ok) continue;
    image[next] = static_cast<uint8_t>(c);
    if (extend_embedding(g, h, next + 1, image, used | uint16_t(1u << c)))
      return true;
  }
  return false;
}

}  // namespace

bool has_induced_subgraph(const Graph& g, const Graph& h) {
  if (h.vertex_count() > g.vertex_count()) return false;
  SmallGraph sg = to_small(g), sh = to_small(h);
  std::array<uint8_t, 16> image{};
  return extend_embedding(sg, sh, 0, image, 0);
}

void validate_sided(const SidedBipartiteGraph& g) {
  if (g.side_a & g.side_b) throw Error("sided graph: sides overlap");
  if ((g.side_a | g.side_b) != g.graph.vertex_mask())
    throw Error("sided graph: sides do not cover the vertex set");
  for (auto [u, v] : g.graph.edges()) {
    bool ua = (g.side_a >> u) & 1, va = (g.side_a >> v) & 1;
    if (ua == va) throw Error("sided graph: edge inside one side");
  }
}

bool strongly_isomorphic(const SidedBipartiteGraph& a,
                         const SidedBipartiteGraph& b, int cap) {
  if (a.graph.vertex_count() != b.graph.vertex_count()) return false;
  if (std::popcount(a.side_a) != std::popcount(b.side_a)) return false;
  if (a.graph.edge_count() != b.graph.edge_count()) return false;
  auto colored = [cap](const SidedBipartiteGraph& s) {
    std::vector<int> colors;
    for (int v : s.graph.vertices())
      colors.push_back(((s.side_b >> v) & 1) ? 1 : 0);
    return canonical_form_colored(s.graph, colors, cap);
  };
  return colored(a) == colored(b);
}

}  // namespace vmc
