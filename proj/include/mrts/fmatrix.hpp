#pragma once

// F-matrix and D-matrix encodings of ranked multifurcating tree shapes.
//
// D_{i,j}: direct descendants of node j that have not furcated by event i.
// F_{i,j} = D_{i,1} + ... + D_{i,j}: lineages of interval j still unfurcated
// through event i+1. Both are K x K lower triangular. Row/column indices in
// this API are 0-based; "edge e" arguments are 1-based ranks.

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "mrts/error.hpp"
#include "mrts/string_repr.hpp"
#include "mrts/tree_shape.hpp"

namespace mrts {

template <class Tag>
class LowerTriangular {
 public:
  LowerTriangular() = default;
  explicit LowerTriangular(int dim)
      : dim_(dim), data_(static_cast<std::size_t>(dim) * dim, 0) {
    if (dim < 0) throw StructuralError("negative matrix dimension");
  }

  // Rows may be given either ragged (row i has i+1 entries) or square.
  // Anything nonzero above the diagonal is a structural error.
  explicit LowerTriangular(const std::vector<std::vector<int>>& rows)
      : LowerTriangular(static_cast<int>(rows.size())) {
    for (int i = 0; i < dim_; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      const auto len = static_cast<int>(row.size());
      if (len != i + 1 && len != dim_) {
        throw StructuralError("row " + std::to_string(i + 1) + " has " +
                              std::to_string(len) +
                              " entries; matrix is not square/triangular");
      }
      for (int j = 0; j < len; ++j) {
        const int v = row[static_cast<std::size_t>(j)];
        if (j > i) {
          if (v != 0) {
            throw StructuralError("nonzero entry above the diagonal at (" +
                                  std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + ")");
          }
        } else {
          (*this)(i, j) = v;
        }
      }
    }
  }

  int dim() const noexcept { return dim_; }

  int& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * dim_ + j];
  }
  int operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * dim_ + j];
  }

  std::vector<int> column(int j) const {
    std::vector<int> col;
    for (int i = j; i < dim_; ++i) col.push_back((*this)(i, j));
    return col;
  }

  std::vector<int> diagonal() const {
    std::vector<int> d;
    for (int i = 0; i < dim_; ++i) d.push_back((*this)(i, i));
    return d;
  }

  // Ragged rows, row i holding columns 0..i.
  std::vector<std::vector<int>> rows() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j <= i; ++j) {
        out[static_cast<std::size_t>(i)].push_back((*this)(i, j));
      }
    }
    return out;
  }

  // Deletes the given rows and the same-numbered columns (0-based).
  LowerTriangular without(const std::set<int>& drop) const {
    std::vector<int> keep;
    for (int i = 0; i < dim_; ++i) {
      if (!drop.count(i)) keep.push_back(i);
    }
    LowerTriangular out(static_cast<int>(keep.size()));
    for (int a = 0; a < out.dim_; ++a) {
      for (int b = 0; b <= a; ++b) {
        out(a, b) = (*this)(keep[static_cast<std::size_t>(a)],
                            keep[static_cast<std::size_t>(b)]);
      }
    }
    return out;
  }

  template <class Other>
  LowerTriangular<Other> retag() const {
    LowerTriangular<Other> out(dim_);
    for (int i = 0; i < dim_; ++i) {
      for (int j = 0; j <= i; ++j) out(i, j) = (*this)(i, j);
    }
    return out;
  }

  friend bool operator==(const LowerTriangular& a, const LowerTriangular& b) {
    return a.dim_ == b.dim_ && a.data_ == b.data_;
  }

  // "2;1,3;1,2,4": rows separated by ';', lower triangle only.
  std::string to_text() const {
    std::string s;
    for (int i = 0; i < dim_; ++i) {
      if (i) s += ';';
      for (int j = 0; j <= i; ++j) {
        if (j) s += ',';
        s += std::to_string((*this)(i, j));
      }
    }
    return s;
  }

  friend std::ostream& operator<<(std::ostream& os, const LowerTriangular& m) {
    for (int i = 0; i < m.dim_; ++i) {
      for (int j = 0; j < m.dim_; ++j) {
        if (j) os << ' ';
        os << m(i, j);
      }
      os << '\n';
    }
    return os;
  }

 private:
  int dim_ = 0;
  std::vector<int> data_;
};

struct FTag {};
struct DTag {};
struct RawTag {};

using FMatrix = LowerTriangular<FTag>;
using DMatrix = LowerTriangular<DTag>;
// Intermediate integer matrices that need not satisfy F1..F3 (LUB steps).
using IntMatrix = LowerTriangular<RawTag>;

enum class FConstraint { F1, F2, F3a, F3b, F3c };

inline const char* to_string(FConstraint c) {
  switch (c) {
    case FConstraint::F1: return "F1";
    case FConstraint::F2: return "F2";
    case FConstraint::F3a: return "F3a";
    case FConstraint::F3b: return "F3b";
    case FConstraint::F3c: return "F3c";
  }
  return "?";
}

using FVerdict = Verdict<FConstraint>;

namespace detail {
inline std::string cell(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}
}  // namespace detail

// F1 -> F2 -> F3a -> F3b -> F3c, first failure wins. Entries are also
// required to be nonnegative (reported under F3a, the row-wise lower bound).
template <class Tag>
FVerdict validate_fmatrix(const LowerTriangular<Tag>& f) {
  const int k = f.dim();
  if (k == 0) throw StructuralError("empty F-matrix");

  // F1: diagonal strictly increasing from at least 2, subdiagonal one less.
  if (f(0, 0) < 2) {
    return FVerdict::fail(FConstraint::F1, "F_{1,1} must be at least 2");
  }
  for (int i = 1; i < k; ++i) {
    if (f(i, i) <= f(i - 1, i - 1)) {
      return FVerdict::fail(FConstraint::F1,
                            "diagonal not strictly increasing at " +
                                detail::cell(i, i));
    }
    if (f(i, i - 1) != f(i - 1, i - 1) - 1) {
      return FVerdict::fail(FConstraint::F1,
                            "subdiagonal " + detail::cell(i, i - 1) +
                                " must equal F" + detail::cell(i - 1, i - 1) +
                                " - 1");
    }
  }

  // F2: first column drops by at most one per row and never below zero.
  for (int i = 1; i < k; ++i) {
    const int prev = f(i - 1, 0);
    const int cur = f(i, 0);
    if (cur < std::max(0, prev - 1) || cur > prev) {
      return FVerdict::fail(FConstraint::F2,
                            "first column step at " + detail::cell(i, 0));
    }
  }

  // F3a: rows non-decreasing and nonnegative.
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j <= i; ++j) {
      if (f(i, j) < 0 || (j > 0 && f(i, j) < f(i, j - 1))) {
        return FVerdict::fail(FConstraint::F3a,
                              "row decreases at " + detail::cell(i, j));
      }
    }
  }

  // F3b: every column steps down by 0 or 1.
  for (int j = 1; j < k; ++j) {
    for (int i = j + 1; i < k; ++i) {
      const int step = f(i - 1, j) - f(i, j);
      if (step < 0 || step > 1) {
        return FVerdict::fail(FConstraint::F3b,
                              "column step at " + detail::cell(i, j));
      }
    }
  }

  // F3c: 2x2 grid condition between neighbouring columns.
  for (int j = 1; j < k; ++j) {
    for (int i = j + 1; i < k; ++i) {
      const int d = (f(i - 1, j) - f(i, j)) - (f(i - 1, j - 1) - f(i, j - 1));
      if (d < 0 || d > 1) {
        return FVerdict::fail(FConstraint::F3c,
                              "grid condition at " + detail::cell(i, j));
      }
    }
  }
  return FVerdict::pass();
}

inline DMatrix string_to_dmatrix(const StringRepr& s) {
  const int k = s.n_internal();
  DMatrix d(k);
  // D_{i,j} = l_j + |{c > i : t_c = j}|   (ranks 1-based)
  for (int i = 1; i <= k; ++i) {
    for (int j = 1; j <= i; ++j) {
      int later_children = 0;
      for (int c = i + 1; c <= k; ++c) {
        if (s.t[static_cast<std::size_t>(c - 1)] == j) ++later_children;
      }
      d(i - 1, j - 1) = s.l[static_cast<std::size_t>(j - 1)] + later_children;
    }
  }
  return d;
}

inline FMatrix dmatrix_to_fmatrix(const DMatrix& d) {
  FMatrix f(d.dim());
  for (int i = 0; i < d.dim(); ++i) {
    int acc = 0;
    for (int j = 0; j <= i; ++j) {
      acc += d(i, j);
      f(i, j) = acc;
    }
  }
  return f;
}

inline DMatrix fmatrix_to_dmatrix(const FMatrix& f) {
  DMatrix d(f.dim());
  for (int i = 0; i < f.dim(); ++i) {
    for (int j = 0; j <= i; ++j) {
      d(i, j) = f(i, j) - (j > 0 ? f(i, j - 1) : 0);
    }
  }
  return d;
}

inline FMatrix string_to_fmatrix(const StringRepr& s) {
  return dmatrix_to_fmatrix(string_to_dmatrix(s));
}

inline FMatrix string_to_fmatrix(const TreeShape& s) {
  return string_to_fmatrix(s.repr());
}

// Node i's parent is the unique column whose D entry drops between rows i-1
// and i; the last row of D holds the pendant-leaf counts.
inline StringRepr fmatrix_to_string(const FMatrix& f) {
  const int k = f.dim();
  if (k == 0) throw StructuralError("empty F-matrix");
  const DMatrix d = fmatrix_to_dmatrix(f);
  StringRepr s;
  s.t.assign(static_cast<std::size_t>(k), 0);
  s.l.assign(static_cast<std::size_t>(k), 0);
  for (int i = 1; i < k; ++i) {
    int parent = 0;
    for (int j = 0; j < i; ++j) {
      const int drop = d(i - 1, j) - d(i, j);
      if (drop == 1) {
        if (parent != 0) {
          throw DomainError("invalid F-matrix: more than one lineage furcates "
                            "at event " + std::to_string(i + 1));
        }
        parent = j + 1;
      } else if (drop != 0) {
        throw DomainError("invalid F-matrix: column " + std::to_string(j + 1) +
                          " of D changes by " + std::to_string(drop));
      }
    }
    if (parent == 0) {
      throw DomainError("invalid F-matrix: no lineage furcates at event " +
                        std::to_string(i + 1));
    }
    s.t[static_cast<std::size_t>(i)] = parent;
  }
  for (int j = 0; j < k; ++j) s.l[static_cast<std::size_t>(j)] = d(k - 1, j);
  return s;
}

// Edge test on the F-matrix: e = 1, or rows e and e+1 agree on columns
// 1..e-1.
inline bool fmatrix_has_edge(const FMatrix& f, int e) {
  if (e < 1 || e > f.dim() - 1) return false;
  if (e == 1) return true;
  for (int j = 0; j < e - 1; ++j) {
    if (f(e - 1, j) != f(e, j)) return false;
  }
  return true;
}

inline std::vector<int> present_edges_f(const FMatrix& f) {
  std::vector<int> edges;
  for (int e = 1; e < f.dim(); ++e) {
    if (fmatrix_has_edge(f, e)) edges.push_back(e);
  }
  return edges;
}

// Collapsing (e, e+1) deletes row e and column e.
inline FMatrix collapse_edge_f(const FMatrix& f, int e) {
  if (e < 1 || e > f.dim() - 1) {
    throw DomainError("edge index " + std::to_string(e) +
                      " out of range [1, " + std::to_string(f.dim() - 1) +
                      "]");
  }
  if (!fmatrix_has_edge(f, e)) throw EdgeNotPresent(e);
  return f.without({e - 1});
}

inline TreeShape to_shape(const FMatrix& f) {
  const auto verdict = validate_fmatrix(f);
  if (!verdict) {
    throw DomainError(std::string("invalid F-matrix: ") +
                      to_string(*verdict.violated) + ": " + verdict.detail);
  }
  return TreeShape(fmatrix_to_string(f));
}

}  // namespace mrts
