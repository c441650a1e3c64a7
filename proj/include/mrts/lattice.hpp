#pragma once

// The refinement order on ranked multifurcating tree shapes with N tips.
// T_X <= T_Y when T_Y is reached from T_X by collapsing edges (e, e+1); the
// star tree is the maximum. Covering moves are single collapses, so the
// upward neighbours of a shape are its collapses and the downward ones are
// the ways of splitting one node into two consecutively ranked nodes.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mrts/enumerator.hpp"
#include "mrts/error.hpp"
#include "mrts/fmatrix.hpp"
#include "mrts/tree_shape.hpp"

namespace mrts {

using Count = std::uint64_t;

namespace detail {

inline constexpr int kMaxSplitChildren = 62;

inline Count binom_u64(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
  }
  return static_cast<Count>(r);
}

// The r-th (0-based, lexicographic) size-`size` subset of {0..n-1}.
inline std::vector<int> unrank_combination(int n, int size, Count r) {
  std::vector<int> out;
  int next = 0;
  for (int slot = 0; slot < size; ++slot) {
    for (int v = next; v < n; ++v) {
      const Count block = binom_u64(n - v - 1, size - slot - 1);
      if (r < block) {
        out.push_back(v);
        next = v + 1;
        break;
      }
      r -= block;
    }
  }
  return out;
}

}  // namespace detail

// U(k, l): ways to split a node with k internal and l leaf children into a
// parent/child pair of consecutively ranked nodes.
//   U(k, l) = (l + 1) 2^k - k - 3 + [l = 0]
inline Count refinement_count(int k, int l) {
  if (k < 0 || l < 0 || k + l < 2) {
    throw DomainError("node needs at least two children");
  }
  if (k > detail::kMaxSplitChildren) {
    throw DomainError("node with " + std::to_string(k) +
                      " internal children exceeds the 64-bit degree range");
  }
  const Count pow = Count{1} << k;
  return static_cast<Count>(l + 1) * pow - static_cast<Count>(k) - 3 +
         (l == 0 ? 1 : 0);
}

inline Count deg_plus(const TreeShape& s) {
  return static_cast<Count>(present_edges(s).size());
}

inline Count deg_minus(const TreeShape& s) {
  Count total = 0;
  for (int i = 1; i <= s.n_internal(); ++i) {
    total += refinement_count(s.internal_children(i), s.leaves(i));
  }
  return total;
}

inline Count degree(const TreeShape& s) { return deg_plus(s) + deg_minus(s); }

// Shapes covering s (one collapse away), sorted.
inline std::vector<TreeShape> covers(const TreeShape& s) {
  std::vector<TreeShape> out;
  for (int e : present_edges(s)) out.push_back(collapse_edge_s(s, e));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// One way of splitting node `rank`: the internal children (by rank) and the
// number of leaves handed to the new node rank+1.
struct NodeSplit {
  int rank = 0;
  std::vector<int> moved_children;
  int moved_leaves = 0;
};

inline TreeShape apply_split(const TreeShape& s, const NodeSplit& split) {
  const int K = s.n_internal();
  const int i = split.rank;
  auto shifted = [i](int r) { return r > i ? r + 1 : r; };
  std::vector<int> t(static_cast<std::size_t>(K + 1));
  std::vector<int> l(static_cast<std::size_t>(K + 1));
  for (int r = 1; r <= K; ++r) {
    const auto pos = static_cast<std::size_t>(shifted(r) - 1);
    t[pos] = s.parent(r) == 0 ? 0 : shifted(s.parent(r));
    l[pos] = s.leaves(r);
  }
  for (int c : split.moved_children) {
    t[static_cast<std::size_t>(shifted(c) - 1)] = i + 1;
  }
  t[static_cast<std::size_t>(i)] = i;
  l[static_cast<std::size_t>(i)] = split.moved_leaves;
  l[static_cast<std::size_t>(i - 1)] -= split.moved_leaves;
  return TreeShape(std::move(t), std::move(l));
}

namespace detail {

inline std::vector<int> children_of(const TreeShape& s, int rank) {
  std::vector<int> kids;
  for (int c = rank + 1; c <= s.n_internal(); ++c) {
    if (s.parent(c) == rank) kids.push_back(c);
  }
  return kids;
}

// The r-th split of node `rank`, ordered by leaves moved, then number of
// internal children moved, then lexicographic choice of those children.
inline NodeSplit unrank_split(const TreeShape& s, int rank, Count r) {
  const auto kids = children_of(s, rank);
  const int k = static_cast<int>(kids.size());
  const int l = s.leaves(rank);
  for (int j = 0; j <= l; ++j) {
    const int lo = std::max(0, 2 - j);
    const int hi = std::min(k, k + l - 1 - j);
    for (int size = lo; size <= hi; ++size) {
      const Count block = binom_u64(k, size);
      if (r < block) {
        NodeSplit split{rank, {}, j};
        for (int idx : unrank_combination(k, size, r)) {
          split.moved_children.push_back(kids[static_cast<std::size_t>(idx)]);
        }
        return split;
      }
      r -= block;
    }
  }
  throw DomainError("split index out of range");
}

}  // namespace detail

// Shapes covered by s (one split away), sorted and de-duplicated.
inline std::vector<TreeShape> refinements_below(const TreeShape& s) {
  std::vector<TreeShape> out;
  for (int i = 1; i <= s.n_internal(); ++i) {
    const Count n = refinement_count(s.internal_children(i), s.leaves(i));
    for (Count r = 0; r < n; ++r) {
      out.push_back(apply_split(s, detail::unrank_split(s, i, r)));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// The index-th neighbour of s in the covering graph: indices below deg+
// are collapses in ascending edge order, the rest are splits node by node.
inline TreeShape neighbor_at(const TreeShape& s, Count index) {
  const auto edges = present_edges(s);
  if (index < edges.size()) {
    return collapse_edge_s(s, edges[static_cast<std::size_t>(index)]);
  }
  Count r = index - edges.size();
  for (int i = 1; i <= s.n_internal(); ++i) {
    const Count n = refinement_count(s.internal_children(i), s.leaves(i));
    if (r < n) return apply_split(s, detail::unrank_split(s, i, r));
    r -= n;
  }
  throw DomainError("neighbour index out of range");
}

inline std::vector<TreeShape> neighbors(const TreeShape& s) {
  std::vector<TreeShape> out;
  const Count d = degree(s);
  out.reserve(static_cast<std::size_t>(d));
  for (Count i = 0; i < d; ++i) out.push_back(neighbor_at(s, i));
  return out;
}

// ---------------------------------------------------------------------------
// Least upper bound

struct LubTrace {
  // After aligning diagonals and dropping differing columns.
  IntMatrix shared;
  // Matrix after each pass that deleted violating columns.
  std::vector<IntMatrix> passes;
};

struct LubResult {
  TreeShape shape;
  FMatrix fmatrix;
  LubTrace trace;
};

namespace detail {

// Columns whose subdiagonal is not diagonal-1 or that drop by 2 or more
// somewhere below the diagonal. The last column is the lone entry N.
inline std::set<int> violating_columns(const IntMatrix& m) {
  std::set<int> bad;
  for (int j = 0; j + 1 < m.dim(); ++j) {
    if (m(j, j) - 1 != m(j + 1, j)) {
      bad.insert(j);
      continue;
    }
    for (int i = j + 1; i < m.dim(); ++i) {
      if (m(i - 1, j) - m(i, j) >= 2) {
        bad.insert(j);
        break;
      }
    }
  }
  return bad;
}

inline std::set<int> indices_missing_from(const std::vector<int>& diag,
                                          const std::vector<int>& other) {
  std::set<int> drop;
  for (int i = 0; i < static_cast<int>(diag.size()); ++i) {
    if (!std::binary_search(other.begin(), other.end(),
                            diag[static_cast<std::size_t>(i)])) {
      drop.insert(i);
    }
  }
  return drop;
}

}  // namespace detail

inline LubResult lub_with_trace(const TreeShape& a, const TreeShape& b) {
  if (a.n_tips() != b.n_tips()) {
    throw DomainError("least upper bound needs shapes with equal N (" +
                      std::to_string(a.n_tips()) + " vs " +
                      std::to_string(b.n_tips()) + ")");
  }
  const auto fa = string_to_fmatrix(a).retag<RawTag>();
  const auto fb = string_to_fmatrix(b).retag<RawTag>();

  // Keep only the events whose diagonal value both matrices share.
  const auto da = fa.diagonal();
  const auto db = fb.diagonal();
  IntMatrix xa = fa.without(detail::indices_missing_from(da, db));
  IntMatrix xb = fb.without(detail::indices_missing_from(db, da));

  std::set<int> differing;
  for (int j = 0; j < xa.dim(); ++j) {
    if (xa.column(j) != xb.column(j)) differing.insert(j);
  }
  LubTrace trace;
  trace.shared = xa.without(differing);

  IntMatrix current = trace.shared;
  for (auto bad = detail::violating_columns(current); !bad.empty();
       bad = detail::violating_columns(current)) {
    current = current.without(bad);
    trace.passes.push_back(current);
  }

  FMatrix f = current.retag<FTag>();
  const auto verdict = validate_fmatrix(f);
  if (!verdict) {
    throw std::logic_error("LUB reduction produced an invalid F-matrix (" +
                           std::string(to_string(*verdict.violated)) + ")");
  }
  TreeShape shape(fmatrix_to_string(f));
  return {std::move(shape), std::move(f), std::move(trace)};
}

inline TreeShape lub(const TreeShape& a, const TreeShape& b) {
  return lub_with_trace(a, b).shape;
}

// d_L = (K_a - K_lub) + (K_b - K_lub).
inline int lattice_distance(const TreeShape& a, const TreeShape& b) {
  const int k_ab = lub(a, b).n_internal();
  return (a.n_internal() - k_ab) + (b.n_internal() - k_ab);
}

// ---------------------------------------------------------------------------
// Maximum-degree tree

struct MaxDegreeTree {
  TreeShape shape;
  Count max_degree;  // M_N = 1 + deg-(shape)
};

// Root with floor((N-2)/2) cherry children and 2 + (N mod 2) leaves.
inline MaxDegreeTree max_degree_tree(int N) {
  if (N < 4) throw DomainError("max_degree_tree needs N >= 4");
  const int cherries = (N - 2) / 2;
  std::vector<int> t(static_cast<std::size_t>(cherries + 1), 1);
  std::vector<int> l(static_cast<std::size_t>(cherries + 1), 2);
  t[0] = 0;
  l[0] = 2 + N % 2;
  TreeShape shape(std::move(t), std::move(l));
  const Count m = 1 + deg_minus(shape);
  return {std::move(shape), m};
}

// ---------------------------------------------------------------------------
// Explicit Hasse graph for small N

struct LatticeGraph {
  int n = 0;
  std::vector<TreeShape> vertices;
  std::unordered_map<TreeShape, std::size_t, TreeShapeHash> index;
  std::vector<std::vector<std::size_t>> up;    // v -> shapes covering v
  std::vector<std::vector<std::size_t>> down;  // v -> shapes v covers
  std::vector<Count> deg_plus;
  std::vector<Count> deg_minus;

  std::size_t size() const { return vertices.size(); }
  Count degree(std::size_t v) const { return deg_plus[v] + deg_minus[v]; }

  std::size_t edge_count() const {
    std::size_t e = 0;
    for (const auto& u : up) e += u.size();
    return e;
  }

  std::size_t index_of(const TreeShape& s) const { return index.at(s); }

  // Undirected covering graph, neighbours sorted.
  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(size());
    for (std::size_t v = 0; v < size(); ++v) {
      adj[v] = up[v];
      adj[v].insert(adj[v].end(), down[v].begin(), down[v].end());
      std::sort(adj[v].begin(), adj[v].end());
    }
    return adj;
  }
};

inline LatticeGraph build_hasse(int N, int cap = kDefaultGenerationCap) {
  GenerateOptions opts;
  opts.cap = cap;
  LatticeGraph g;
  g.n = N;
  g.vertices = generate_all(N, opts);
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    g.index.emplace(g.vertices[v], v);
  }
  g.up.resize(g.size());
  g.down.resize(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    for (const auto& c : covers(g.vertices[v])) {
      const auto u = g.index.at(c);
      g.up[v].push_back(u);
      g.down[u].push_back(v);
    }
  }
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::sort(g.down[v].begin(), g.down[v].end());
    g.deg_plus.push_back(g.up[v].size());
    g.deg_minus.push_back(g.down[v].size());
  }
  return g;
}

inline std::vector<int> bfs_distances(
    const std::vector<std::vector<std::size_t>>& adj, std::size_t source) {
  std::vector<int> dist(adj.size(), -1);
  std::queue<std::size_t> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (auto w : adj[v]) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

inline int diameter(const LatticeGraph& g) {
  const auto adj = g.adjacency();
  int best = 0;
  for (std::size_t v = 0; v < g.size(); ++v) {
    for (int d : bfs_distances(adj, v)) {
      if (d < 0) throw DomainError("covering graph is disconnected");
      best = std::max(best, d);
    }
  }
  return best;
}

}  // namespace mrts
