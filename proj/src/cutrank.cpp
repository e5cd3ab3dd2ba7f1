#include "vmc/cutrank.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>

namespace vmc {

int cut_rank(const Graph& g, uint64_t x_mask) {
  if (x_mask & ~g.vertex_mask()) throw Error("cut_rank: unknown vertex");
  uint64_t rest = g.vertex_mask() & ~x_mask;
  std::vector<uint64_t> rows;
  for (uint64_t m = x_mask; m; m &= m - 1)
    rows.push_back(g.neighbors(std::countr_zero(m)) & rest);
  return gf2_rank(rows);
}

std::vector<std::pair<int, int>> crossing_edges(const Graph& g,
                                                uint64_t x_mask) {
  if (x_mask & ~g.vertex_mask()) throw Error("crossing_edges: unknown vertex");
  std::vector<std::pair<int, int>> out;
  for (auto [u, v] : g.edges())
    if (((x_mask >> u) & 1) != ((x_mask >> v) & 1)) out.emplace_back(u, v);
  return out;
}

namespace {

std::vector<std::vector<int>> tree_adjacency(const RankDecomposition& d) {
  std::vector<std::vector<int>> adj(d.node_count());
  for (auto [a, b] : d.tree_edges) {
    if (a < 0 || b < 0 || a >= d.node_count() || b >= d.node_count() || a == b)
      throw Error("decomposition: bad tree edge");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  return adj;
}

// Leaves reachable from `to` when the edge (from, to) is removed.
uint64_t side_leaves(const RankDecomposition& d,
                     const std::vector<std::vector<int>>& adj, int from,
                     int to) {
  uint64_t leaves = 0;
  std::vector<int> stack = {to};
  std::vector<char> seen(d.node_count(), 0);
  seen[to] = 1;
  seen[from] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    if (d.leaf_vertex[u] >= 0) leaves |= uint64_t{1} << d.leaf_vertex[u];
    for (int w : adj[u])
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
  }
  return leaves;
}

}  // namespace

void validate_decomposition(const RankDecomposition& d, const Graph& host) {
  int n = d.node_count();
  if (static_cast<int>(d.tree_edges.size()) != std::max(0, n - 1))
    throw Error("decomposition: not a tree (edge count)");
  auto adj = tree_adjacency(d);
  // Connectivity.
  if (n > 0) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int count = 0;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      ++count;
      for (int w : adj[u])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    if (count != n) throw Error("decomposition: not a tree (disconnected)");
  }
  uint64_t leaves = 0;
  for (int u = 0; u < n; ++u) {
    int v = d.leaf_vertex[u];
    if (v >= 0) {
      if (adj[u].size() > 1) throw Error("decomposition: leaf with degree > 1");
      if (!host.has_vertex(v)) throw Error("decomposition: leaf is not a host vertex");
      if ((leaves >> v) & 1) throw Error("decomposition: repeated leaf");
      leaves |= uint64_t{1} << v;
    } else {
      if (adj[u].size() > 3) throw Error("decomposition: internal degree > 3");
    }
  }
  if (leaves != host.vertex_mask())
    throw Error("decomposition: leaves do not match the vertex set");
}

int decomposition_width(const RankDecomposition& d, const Graph& host) {
  validate_decomposition(d, host);
  auto adj = tree_adjacency(d);
  int width = 0;
  for (auto [a, b] : d.tree_edges)
    width = std::max(width, cut_rank(host, side_leaves(d, adj, a, b)));
  return width;
}

std::string decomposition_to_text(const RankDecomposition& d) {
  auto adj = tree_adjacency(d);
  int n = d.node_count();
  if (n == 0) return "()";
  if (n == 1) return std::to_string(d.leaf_vertex[0]);
  // Canonical rooting: hang the tree off the leaf carrying the smallest
  // vertex and order children by their minimum leaf, so re-parsing and
  // re-serializing is stable.
  int root = -1;
  for (int u = 0; u < n; ++u)
    if (d.leaf_vertex[u] >= 0 &&
        (root < 0 || d.leaf_vertex[u] < d.leaf_vertex[root]))
      root = u;
  auto min_leaf = [&](auto&& self, int from, int to) -> int {
    if (d.leaf_vertex[to] >= 0) return d.leaf_vertex[to];
    int best = INT32_MAX;
    for (int w : adj[to])
      if (w != from) best = std::min(best, self(self, to, w));
    return best;
  };
  std::ostringstream out;
  auto emit = [&](auto&& self, int from, int to) -> void {
    if (d.leaf_vertex[to] >= 0) {
      out << d.leaf_vertex[to];
      return;
    }
    std::vector<int> kids;
    for (int w : adj[to])
      if (w != from) kids.push_back(w);
    std::sort(kids.begin(), kids.end(), [&](int a, int b) {
      return min_leaf(min_leaf, to, a) < min_leaf(min_leaf, to, b);
    });
    out << '(';
    for (size_t i = 0; i < kids.size(); ++i) {
      if (i) out << ',';
      self(self, to, kids[i]);
    }
    out << ')';
  };
  out << '(' << d.leaf_vertex[root] << ',';
  emit(emit, root, adj[root][0]);
  out << ')';
  return out.str();
}

RankDecomposition decomposition_from_text(const std::string& text) {
  RankDecomposition d;
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto parse = [&](auto&& self) -> int {
    skip_ws();
    if (pos >= text.size()) throw Error("decomposition: truncated text");
    if (text[pos] == '(') {
      ++pos;
      int me = d.node_count();
      d.leaf_vertex.push_back(-1);
      std::vector<int> kids;
      skip_ws();
      if (pos < text.size() && text[pos] == ')') {
        ++pos;
      } else {
        while (true) {
          kids.push_back(self(self));
          skip_ws();
          if (pos >= text.size()) throw Error("decomposition: missing ')'");
          if (text[pos] == ',') {
            ++pos;
            continue;
          }
          if (text[pos] == ')') {
            ++pos;
            break;
          }
          throw Error("decomposition: unexpected character");
        }
      }
      for (int k : kids) d.tree_edges.emplace_back(me, k);
      return me;
    }
    size_t start = pos;
    while (pos < text.size() && isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (start == pos) throw Error("decomposition: expected vertex number");
    d.leaf_vertex.push_back(std::stoi(text.substr(start, pos - start)));
    return d.node_count() - 1;
  };
  parse(parse);
  skip_ws();
  if (pos != text.size()) throw Error("decomposition: trailing text");
  return reduce_decomposition(std::move(d));
}

RankDecomposition reduce_decomposition(RankDecomposition d) {
  // Suppress redundant internal nodes (degree <= 2): they add no cuts, and
  // removing them makes serialization canonical.
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::vector<int>> adj(d.node_count());
    for (auto [a, b] : d.tree_edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    for (int u = 0; u < d.node_count() && !changed; ++u) {
      if (d.leaf_vertex[u] >= 0 || adj[u].size() > 2 ||
          (d.node_count() == 1)) continue;
      std::vector<std::pair<int, int>> edges;
      for (auto [a, b] : d.tree_edges)
        if (a != u && b != u) edges.push_back({a, b});
      if (adj[u].size() == 2) edges.push_back({adj[u][0], adj[u][1]});
      auto fix = [u](int x) { return x > u ? x - 1 : x; };
      for (auto& [a, b] : edges) {
        a = fix(a);
        b = fix(b);
      }
      d.leaf_vertex.erase(d.leaf_vertex.begin() + u);
      d.tree_edges = std::move(edges);
      changed = true;
    }
  }
  return d;
}

namespace {

struct SplitChoice {
  uint64_t part = 0;  // the chosen sub-block containing the lowest vertex
};

int build_tree(const Graph& g, uint64_t mask,
               const std::map<uint64_t, SplitChoice>& choice,
               RankDecomposition& d) {
  if (std::popcount(mask) == 1) {
    d.leaf_vertex.push_back(std::countr_zero(mask));
    return d.node_count() - 1;
  }
  uint64_t a = choice.at(mask).part;
  uint64_t b = mask & ~a;
  int me = d.node_count();
  d.leaf_vertex.push_back(-1);
  int left = build_tree(g, a, choice, d);
  int right = build_tree(g, b, choice, d);
  d.tree_edges.emplace_back(me, left);
  d.tree_edges.emplace_back(me, right);
  return me;
}

}  // namespace

std::pair<int, RankDecomposition> exact_rankwidth(const Graph& g, int cap) {
  int n = g.vertex_count();
  if (n > cap) throw Error("exact_rankwidth: vertex cap exceeded");
  RankDecomposition d;
  if (n == 0) return {0, d};
  auto vs = g.vertices();
  if (n == 1) {
    d.leaf_vertex.push_back(vs[0]);
    return {0, d};
  }
  if (n == 2) {
    d.leaf_vertex = {vs[0], vs[1]};
    d.tree_edges = {{0, 1}};
    return {decomposition_width(d, g), d};
  }

  // best[mask] = min over rooted binary trees with leaf set `mask` of the max
  // cut-rank over strict subtrees; the root cut itself is charged one level up.
  uint64_t full = g.vertex_mask();
  std::map<uint64_t, int> best;
  std::map<uint64_t, int> rank_of;
  std::map<uint64_t, SplitChoice> choice;
  std::vector<uint64_t> subsets;
  // Enumerate submasks of full in increasing popcount order via sorting.
  for (uint64_t sub = full;; sub = (sub - 1) & full) {
    if (sub) subsets.push_back(sub);
    if (sub == 0) break;
  }
  std::sort(subsets.begin(), subsets.end(), [](uint64_t a, uint64_t b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  for (uint64_t sub : subsets) rank_of[sub] = cut_rank(g, sub);
  for (uint64_t sub : subsets) {
    if (std::popcount(sub) == 1) {
      best[sub] = 0;
      continue;
    }
    uint64_t low = sub & (~sub + 1);  // the split half containing the low vertex
    int opt = INT32_MAX;
    uint64_t opt_part = 0;
    uint64_t rest = sub & ~low;
    // Iterate over all submasks s of rest; part = low | s.
    uint64_t s = 0;
    while (true) {
      uint64_t a = low | s;
      uint64_t b = sub & ~a;
      if (b != 0) {
        int cost = std::max({best[a], best[b], rank_of[a], rank_of[b]});
        if (cost < opt) {
          opt = cost;
          opt_part = a;
        }
      }
      if (s == rest) break;
      s = (s - rest) & rest;  // next submask of rest
    }
    best[sub] = opt;
    choice[sub] = SplitChoice{opt_part};
  }
  int width = best[full];
  build_tree(g, full, choice, d);
  return {width, reduce_decomposition(std::move(d))};
}

namespace {

void cubic_trees_rec(std::vector<RankDecomposition>& out,
                     RankDecomposition cur, const std::vector<int>& vs,
                     size_t next) {
  if (next == vs.size()) {
    out.push_back(std::move(cur));
    return;
  }
  // Insert the next leaf into every existing tree edge.
  for (size_t e = 0; e < cur.tree_edges.size(); ++e) {
    RankDecomposition d = cur;
    auto [a, b] = d.tree_edges[e];
    int mid = d.node_count();
    d.leaf_vertex.push_back(-1);
    int leaf = d.node_count();
    d.leaf_vertex.push_back(vs[next]);
    d.tree_edges[e] = {a, mid};
    d.tree_edges.emplace_back(mid, b);
    d.tree_edges.emplace_back(mid, leaf);
    cubic_trees_rec(out, std::move(d), vs, next + 1);
  }
}

}  // namespace

std::vector<RankDecomposition> enumerate_cubic_decompositions(const Graph& g,
                                                              int cap) {
  int n = g.vertex_count();
  if (n > cap) throw Error("enumerate_cubic_decompositions: cap exceeded");
  auto vs = g.vertices();
  std::vector<RankDecomposition> out;
  RankDecomposition base;
  if (n == 0) return {base};
  if (n == 1) {
    base.leaf_vertex.push_back(vs[0]);
    return {base};
  }
  base.leaf_vertex = {vs[0], vs[1]};
  base.tree_edges = {{0, 1}};
  cubic_trees_rec(out, base, vs, 2);
  return out;
}

}  // namespace vmc
