#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mrts/error.hpp"
#include "mrts/string_repr.hpp"

namespace mrts {

// Immutable, validated element of the space of ranked multifurcating tree
// shapes with N tips. Identity is the canonical string representation.
class TreeShape {
 public:
  explicit TreeShape(StringRepr repr) : repr_(std::move(repr)) {
    const auto verdict = validate_string(repr_);
    if (!verdict) {
      throw DomainError(std::string("invalid tree shape: ") +
                        to_string(*verdict.violated) + ": " + verdict.detail);
    }
    n_tips_ = repr_.n_tips();
    children_ = mrts::internal_child_counts(repr_.t);
  }

  TreeShape(std::vector<int> t, std::vector<int> l)
      : TreeShape(StringRepr{std::move(t), std::move(l)}) {}

  static TreeShape star(int n_tips) {
    if (n_tips < 2) throw DomainError("a tree needs at least 2 tips");
    return TreeShape({0}, {n_tips});
  }

  const StringRepr& repr() const noexcept { return repr_; }
  const std::vector<int>& t() const noexcept { return repr_.t; }
  const std::vector<int>& l() const noexcept { return repr_.l; }

  int n_tips() const noexcept { return n_tips_; }
  int n_internal() const noexcept { return repr_.n_internal(); }

  // Internal children of node `rank` (1-based).
  int internal_children(int rank) const {
    return children_.at(static_cast<std::size_t>(rank - 1));
  }
  int leaves(int rank) const {
    return repr_.l.at(static_cast<std::size_t>(rank - 1));
  }
  int parent(int rank) const {
    return repr_.t.at(static_cast<std::size_t>(rank - 1));
  }
  const std::vector<int>& internal_child_counts() const noexcept {
    return children_;
  }

  bool is_star() const noexcept { return n_internal() == 1; }
  bool is_binary() const noexcept { return n_internal() == n_tips_ - 1; }

  // (e, e+1) is an edge iff node e+1 hangs off node e.
  bool has_edge(int e) const {
    return e >= 1 && e < n_internal() &&
           repr_.t[static_cast<std::size_t>(e)] == e;
  }

  friend bool operator==(const TreeShape& a, const TreeShape& b) {
    return a.repr_ == b.repr_;
  }
  // Order by (K, t, l); this is the order generate_all emits.
  friend bool operator<(const TreeShape& a, const TreeShape& b) {
    if (a.n_internal() != b.n_internal()) {
      return a.n_internal() < b.n_internal();
    }
    return a.repr_ < b.repr_;
  }

  std::size_t hash() const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    auto mix = [&h](int v) {
      h ^= std::hash<int>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    };
    for (int v : repr_.t) mix(v);
    mix(-1);
    for (int v : repr_.l) mix(v);
    return h;
  }

 private:
  StringRepr repr_;
  int n_tips_ = 0;
  std::vector<int> children_;
};

struct TreeShapeHash {
  std::size_t operator()(const TreeShape& s) const noexcept { return s.hash(); }
};

// Ranks e in 1..K-1 with t_{e+1} = e, ascending. Edge (1,2) is always there
// when K >= 2.
inline std::vector<int> present_edges(const TreeShape& s) {
  std::vector<int> edges;
  for (int e = 1; e < s.n_internal(); ++e) {
    if (s.has_edge(e)) edges.push_back(e);
  }
  return edges;
}

// Collapse edge (e, e+1) directly on the string representation: merge the
// leaves of e and e+1, drop node e+1 and shift every rank above e down by one.
inline StringRepr collapse_edge_s(const StringRepr& s, int e) {
  const int k = s.n_internal();
  if (e < 1 || e > k - 1) {
    throw DomainError("edge index " + std::to_string(e) +
                      " out of range [1, " + std::to_string(k - 1) + "]");
  }
  if (s.t[static_cast<std::size_t>(e)] != e) throw EdgeNotPresent(e);

  StringRepr out;
  out.t.reserve(static_cast<std::size_t>(k - 1));
  out.l.reserve(static_cast<std::size_t>(k - 1));
  for (int i = 1; i <= k; ++i) {
    if (i == e + 1) continue;
    const int parent = s.t[static_cast<std::size_t>(i - 1)];
    out.t.push_back(parent > e ? parent - 1 : parent);
    int leaves = s.l[static_cast<std::size_t>(i - 1)];
    if (i == e) leaves += s.l[static_cast<std::size_t>(e)];
    out.l.push_back(leaves);
  }
  return out;
}

inline TreeShape collapse_edge_s(const TreeShape& s, int e) {
  return TreeShape(collapse_edge_s(s.repr(), e));
}

}  // namespace mrts

template <>
struct std::hash<mrts::TreeShape> {
  std::size_t operator()(const mrts::TreeShape& s) const noexcept {
    return s.hash();
  }
};
