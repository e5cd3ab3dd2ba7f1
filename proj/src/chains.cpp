#include "vmc/chains.hpp"

#include <algorithm>
#include <bit>

#include "vmc/cutrank.hpp"
#include "vmc/perturb.hpp"
#include "vmc/vmsearch.hpp"

namespace vmc {

int Chain::width() const {
  int w = 0;
  for (const auto& p : parts) w = std::max(w, static_cast<int>(p.size()));
  return w;
}

bool Chain::uniform() const {
  for (const auto& p : parts)
    if (static_cast<int>(p.size()) != width()) return false;
  return true;
}

uint64_t Chain::vertex_mask() const {
  uint64_t m = 0;
  for (const auto& p : parts)
    for (VertexId v : p) m |= uint64_t{1} << v;
  return m;
}

Chain Chain::subchain(const std::vector<int>& part_indices) const {
  Chain out;
  for (int i : part_indices) out.parts.push_back(parts.at(i));
  return out;
}

Chain Chain::prefix(int len) const {
  Chain out;
  for (int i = 0; i < len; ++i) out.parts.push_back(parts.at(i));
  return out;
}

void validate_chain(const Chain& x, const Graph& host) {
  uint64_t seen = 0;
  for (const auto& p : x.parts)
    for (VertexId v : p) {
      host.require_vertex(v);
      if ((seen >> v) & 1) throw Error("chain: parts are not disjoint");
      seen |= uint64_t{1} << v;
    }
}

const char* to_string(PairStatus s) {
  switch (s) {
    case PairStatus::Fixed: return "Fixed";
    case PairStatus::UpHalf: return "UpHalf";
    case PairStatus::DownHalf: return "DownHalf";
    case PairStatus::CompleteCouple: return "CompleteCouple";
    case PairStatus::Mixed: return "Mixed";
  }
  return "?";
}

namespace {

void require_uniform_pair(const Chain& x, int j1, int j2) {
  if (!x.uniform()) throw Error("chain: pair operations need a uniform chain");
  if (j1 < 0 || j2 < j1 || j2 >= x.width())
    throw Error("chain: column pair out of range");
}

// Color of the ordered part pair (i1 < i2) for columns (j1, j2):
// bit0 = edge X_{i1}(j1) - X_{i2}(j2), bit1 = edge X_{i1}(j2) - X_{i2}(j1).
int pair_color(const Graph& g, const Chain& x, int j1, int j2, int i1, int i2) {
  bool down = g.has_edge(x.parts[i1][j1], x.parts[i2][j2]);
  bool up = g.has_edge(x.parts[i1][j2], x.parts[i2][j1]);
  return int(down) | (int(up) << 1);
}

PairStatus color_to_status(int color, bool diagonal) {
  if (diagonal) return color ? PairStatus::CompleteCouple : PairStatus::Fixed;
  switch (color) {
    case 0: return PairStatus::Fixed;
    case 2: return PairStatus::UpHalf;
    case 1: return PairStatus::DownHalf;
    default: return PairStatus::CompleteCouple;
  }
}

// Largest index subset on which every pair has the given color, by
// branch-and-bound; first-found among maxima, so deterministic.
std::vector<int> max_monochromatic(const Graph& g, const Chain& x, int j1,
                                   int j2, int color) {
  int k = x.length();
  std::vector<int> best;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int next) -> void {
    if (static_cast<int>(cur.size()) + (k - next) <=
        static_cast<int>(best.size()))
      return;  // cannot beat the incumbent
    if (next == k) {
      if (cur.size() > best.size()) best = cur;
      return;
    }
    bool ok = true;
    for (int i : cur) {
      int c = j1 == j2
                  ? (g.has_edge(x.parts[i][j1], x.parts[next][j1]) ? 3 : 0)
                  : pair_color(g, x, j1, j2, i, next);
      if (c != color) {
        ok = false;
        break;
      }
    }
    if (ok) {
      cur.push_back(next);
      self(self, next + 1);
      cur.pop_back();
    }
    self(self, next + 1);
  };
  rec(rec, 0);
  return best;
}

}  // namespace

PairStatus pair_status(const Graph& g, const Chain& x, int j1, int j2) {
  require_uniform_pair(x, j1, j2);
  int k = x.length();
  if (k <= 1) return PairStatus::Fixed;
  if (j1 == j2) {
    bool all0 = true, all1 = true;
    for (int i1 = 0; i1 < k; ++i1)
      for (int i2 = i1 + 1; i2 < k; ++i2) {
        bool e = g.has_edge(x.parts[i1][j1], x.parts[i2][j1]);
        all0 &= !e;
        all1 &= e;
      }
    if (all0) return PairStatus::Fixed;
    if (all1) return PairStatus::CompleteCouple;
    return PairStatus::Mixed;
  }
  int first = pair_color(g, x, j1, j2, 0, 1);
  for (int i1 = 0; i1 < k; ++i1)
    for (int i2 = i1 + 1; i2 < k; ++i2)
      if (pair_color(g, x, j1, j2, i1, i2) != first) return PairStatus::Mixed;
  return color_to_status(first, false);
}

Chain find_coupled_subchain(const Graph& g, const Chain& x, int j1, int j2,
                            int target_len) {
  require_uniform_pair(x, j1, j2);
  validate_chain(x, g);
  if (target_len > x.length())
    throw Error("find_coupled_subchain: target exceeds chain length");
  std::vector<int> colors =
      j1 == j2 ? std::vector<int>{0, 3} : std::vector<int>{0, 2, 1, 3};
  for (int color : colors) {
    std::vector<int> found = max_monochromatic(g, x, j1, j2, color);
    if (static_cast<int>(found.size()) >= target_len) {
      found.resize(target_len);
      return x.subchain(found);
    }
  }
  throw Error("find_coupled_subchain: no coupled subchain of length " +
              std::to_string(target_len) + " for pair (" + std::to_string(j1) +
              ", " + std::to_string(j2) + ")");
}

namespace {

bool is_bipartite(const Graph& g) {
  std::array<int8_t, kMaxVertices> color{};
  color.fill(-1);
  for (VertexId s : g.vertices()) {
    if (color[s] >= 0) continue;
    color[s] = 0;
    std::vector<VertexId> stack = {s};
    while (!stack.empty()) {
      VertexId u = stack.back();
      stack.pop_back();
      for (uint64_t m = g.neighbors(u); m; m &= m - 1) {
        VertexId w = std::countr_zero(m);
        if (color[w] < 0) {
          color[w] = 1 - color[u];
          stack.push_back(w);
        } else if (color[w] == color[u]) {
          return false;
        }
      }
    }
  }
  return true;
}

struct PairPlan {
  PairStatus status;
  std::vector<int> mono;  // part indices carrying the chosen color
  int output_len = 0;     // chain length achievable from this plan
};

// Best achievable plan for the given pair; Pivot mode skips the clique branch.
PairPlan plan_pair(const Graph& g, const Chain& x, int j1, int j2,
                   ChainMode mode) {
  PairPlan best;
  best.status = PairStatus::Mixed;
  best.output_len = -1;
  // When the whole chain is already coupled, use its status directly; the
  // subchain search is only for mixed pairs.
  PairStatus whole = pair_status(g, x, j1, j2);
  if (whole != PairStatus::Mixed) {
    if (whole == PairStatus::CompleteCouple && j1 == j2 &&
        mode == ChainMode::Pivot)
      throw Error("fix_next_pair: clique column cannot be fixed in pivot mode");
    std::vector<int> all(x.length());
    for (int i = 0; i < x.length(); ++i) all[i] = i;
    int out = x.length();
    if (j1 == j2 && whole == PairStatus::CompleteCouple) out = x.length() - 1;
    if (j1 != j2 && whole == PairStatus::CompleteCouple) out = x.length() - 2;
    if (whole == PairStatus::UpHalf || whole == PairStatus::DownHalf)
      out = x.length() / 3;
    return PairPlan{whole, std::move(all), out};
  }
  auto consider = [&](PairStatus status, std::vector<int> mono, int out) {
    if (out > best.output_len) best = PairPlan{status, std::move(mono), out};
  };
  if (j1 == j2) {
    std::vector<int> indep = max_monochromatic(g, x, j1, j2, 0);
    consider(PairStatus::Fixed, indep, static_cast<int>(indep.size()));
    if (mode == ChainMode::VertexMinor) {
      std::vector<int> clique = max_monochromatic(g, x, j1, j2, 3);
      consider(PairStatus::CompleteCouple, clique,
               static_cast<int>(clique.size()) - 1);
    }
    return best;
  }
  std::vector<int> fixed = max_monochromatic(g, x, j1, j2, 0);
  consider(PairStatus::Fixed, fixed, static_cast<int>(fixed.size()));
  std::vector<int> up = max_monochromatic(g, x, j1, j2, 2);
  consider(PairStatus::UpHalf, up, static_cast<int>(up.size()) / 3);
  std::vector<int> down = max_monochromatic(g, x, j1, j2, 1);
  consider(PairStatus::DownHalf, down, static_cast<int>(down.size()) / 3);
  std::vector<int> complete = max_monochromatic(g, x, j1, j2, 3);
  consider(PairStatus::CompleteCouple, complete,
           static_cast<int>(complete.size()) - 2);
  return best;
}

std::optional<std::pair<int, int>> smallest_unfixed_pair(const Graph& g,
                                                         const Chain& x) {
  int c = x.width();
  for (int j1 = 0; j1 < c; ++j1)
    for (int j2 = j1; j2 < c; ++j2)
      if (pair_status(g, x, j1, j2) != PairStatus::Fixed)
        return std::make_pair(j1, j2);
  return std::nullopt;
}

ChainStep fix_pair_with_plan(const Graph& g, const Chain& x, int j1, int j2,
                             const PairPlan& plan, int k) {
  ChainStep out;
  out.graph = g;
  if (plan.output_len < k)
    throw Error("fix_next_pair: chain too short for pair (" +
                std::to_string(j1) + ", " + std::to_string(j2) + "): need " +
                std::to_string(k) + ", achievable " +
                std::to_string(std::max(plan.output_len, 0)));
  if (j1 == j2) {
    if (plan.status == PairStatus::Fixed) {
      std::vector<int> keep(plan.mono.begin(), plan.mono.begin() + k);
      out.chain = x.subchain(keep);
      return out;
    }
    // Clique column: one local complementation at the first column vertex.
    std::vector<int> use(plan.mono.begin(), plan.mono.begin() + k + 1);
    VertexId pivot_vertex = x.parts[use[0]][j1];
    out.script.push_back(Step::lc(pivot_vertex));
    out.graph = local_complement(g, pivot_vertex);
    out.chain = x.subchain({use.begin() + 1, use.end()});
    return out;
  }
  switch (plan.status) {
    case PairStatus::Fixed: {
      std::vector<int> keep(plan.mono.begin(), plan.mono.begin() + k);
      out.chain = x.subchain(keep);
      return out;
    }
    case PairStatus::CompleteCouple: {
      std::vector<int> use(plan.mono.begin(), plan.mono.begin() + k + 2);
      VertexId u = x.parts[use[0]][j1];
      VertexId v = x.parts[use[1]][j2];
      out.script.push_back(Step::pv(u, v));
      out.graph = pivot(g, u, v);
      out.chain = x.subchain({use.begin() + 2, use.end()});
      return out;
    }
    case PairStatus::UpHalf:
    case PairStatus::DownHalf: {
      // Up and down are symmetric with the roles of j1 and j2 swapped.
      int ja = plan.status == PairStatus::UpHalf ? j2 : j1;
      int jb = plan.status == PairStatus::UpHalf ? j1 : j2;
      std::vector<int> use(plan.mono.begin(), plan.mono.begin() + 3 * k);
      Graph cur = g;
      std::vector<int> keep;
      for (int i = 0; i < k; ++i) {
        VertexId u = x.parts[use[3 * i]][ja];
        VertexId v = x.parts[use[3 * i + 2]][jb];
        out.script.push_back(Step::pv(u, v));
        cur = pivot(cur, u, v);
        keep.push_back(use[3 * i + 1]);
      }
      out.graph = cur;
      out.chain = x.subchain(keep);
      return out;
    }
    default:
      throw Error("fix_next_pair: pair is hopelessly mixed");
  }
}

}  // namespace

ChainStep fix_next_pair(const Graph& g, const Chain& x, int k, ChainMode mode) {
  validate_chain(x, g);
  if (!x.uniform()) throw Error("fix_next_pair: chain must be uniform");
  if (mode == ChainMode::Pivot && !is_bipartite(g))
    throw Error("fix_next_pair: pivot mode requires a bipartite host");
  auto pair = smallest_unfixed_pair(g, x);
  if (!pair) {
    if (x.length() < k)
      throw Error("fix_next_pair: chain shorter than requested length");
    ChainStep out;
    out.graph = g;
    out.chain = x.prefix(k);
    return out;
  }
  auto [j1, j2] = *pair;
  PairPlan plan = plan_pair(g, x, j1, j2, mode);
  return fix_pair_with_plan(g, x, j1, j2, plan, k);
}

ChainStep clean_chain(const Graph& g, const Chain& x, int k, ChainMode mode) {
  validate_chain(x, g);
  if (!x.uniform()) throw Error("clean_chain: chain must be uniform");
  ChainStep acc;
  acc.graph = g;
  acc.chain = x;
  while (true) {
    if (mode == ChainMode::Pivot && !is_bipartite(acc.graph))
      throw Error("clean_chain: host stopped being bipartite");
    auto pair = smallest_unfixed_pair(acc.graph, acc.chain);
    if (!pair) break;
    auto [j1, j2] = *pair;
    PairPlan plan = plan_pair(acc.graph, acc.chain, j1, j2, mode);
    if (plan.output_len < 1)
      throw Error("clean_chain: no coupled subchain for pair (" +
                  std::to_string(j1) + ", " + std::to_string(j2) + ")");
    // Keep maximal slack for the later pairs.
    ChainStep step = fix_pair_with_plan(acc.graph, acc.chain, j1, j2, plan,
                                        plan.output_len);
    acc.graph = step.graph;
    acc.chain = step.chain;
    acc.script.insert(acc.script.end(), step.script.begin(),
                      step.script.end());
  }
  if (acc.chain.length() < k)
    throw Error("clean_chain: only " + std::to_string(acc.chain.length()) +
                " parts survive, need " + std::to_string(k));
  acc.chain = acc.chain.prefix(k);
  return acc;
}

ExtractResult extract_kh(const Graph& g, const Chain& x,
                         const std::vector<Graph>& components, int k,
                         const ExtractOptions& opts) {
  ExtractResult res;
  if (components.empty() || k < 1) {
    res.diagnostic = "need at least one component and k >= 1";
    return res;
  }
  try {
    validate_chain(x, g);
  } catch (const Error& e) {
    res.diagnostic = e.what();
    return res;
  }
  int m = static_cast<int>(components.size());
  if (opts.max_part_size) {
    for (const auto& p : x.parts)
      if (static_cast<int>(p.size()) > *opts.max_part_size) {
        res.diagnostic = "a part exceeds the size bound";
        return res;
      }
  }
  if (opts.cutrank_bound) {
    for (const auto& p : x.parts) {
      uint64_t mask = 0;
      for (VertexId v : p) mask |= uint64_t{1} << v;
      if (cut_rank(g, mask) > *opts.cutrank_bound) {
        res.diagnostic = "a part exceeds the cut-rank bound";
        return res;
      }
    }
  }
  std::string notes;
  if (opts.certify_order >= 0) {
    for (size_t i = 0; i < x.parts.size(); ++i) {
      uint64_t mask = 0;
      for (VertexId v : x.parts[i]) mask |= uint64_t{1} << v;
      const Graph part = induced_subgraph(g, mask);
      const Graph& target = components[i % m];
      RobustnessVerdict v =
          certify_robustness(part, target, opts.certify_order);
      if (v.kind != RobustnessVerdict::Robust)
        notes += "part " + std::to_string(i) + " not certified robust (" +
                 (v.kind == RobustnessVerdict::Unknown ? "unknown" : "refuted") +
                 "); ";
    }
  }

  ChainStep cleaned;
  try {
    cleaned = clean_chain(g, x, m * k, ChainMode::VertexMinor);
  } catch (const Error& e) {
    res.diagnostic = notes + "cleaning failed: " + e.what();
    return res;
  }
  OperationScript script = cleaned.script;
  // Everything outside the surviving parts goes away first.
  uint64_t keep = cleaned.chain.vertex_mask();
  for (uint64_t mrest = cleaned.graph.vertex_mask() & ~keep; mrest;
       mrest &= mrest - 1)
    script.push_back(Step::del(std::countr_zero(mrest)));
  Graph cur = delete_vertices(cleaned.graph, cleaned.graph.vertex_mask() & ~keep);
  for (int l = 0; l < m * k; ++l) {
    uint64_t mask = 0;
    for (VertexId v : cleaned.chain.parts[l]) mask |= uint64_t{1} << v;
    Graph part = induced_subgraph(cur, mask);
    const Graph& target = components[l % m];
    auto w = vertex_minor_witness(part, target);
    if (!w) {
      res.diagnostic = notes + "part " + std::to_string(l) +
                       " has no vertex-minor copy of component " +
                       std::to_string(l % m);
      return res;
    }
    // Part scripts only touch part vertices, so they apply to the whole
    // graph unchanged.
    script.insert(script.end(), w->begin(), w->end());
    cur = replay(cur, *w);
  }
  res.ok = true;
  res.script = script;
  res.result = cur;
  res.final_chain = cleaned.chain;
  res.diagnostic = notes;
  return res;
}

}  // namespace vmc
