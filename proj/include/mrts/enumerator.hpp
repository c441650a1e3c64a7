#pragma once

// Exact counting of ranked multifurcating tree shapes and an exhaustive
// generator that serves as the brute-force oracle for everything else.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mrts/error.hpp"
#include "mrts/tree_shape.hpp"

namespace mrts {

using BigInt = boost::multiprecision::cpp_int;

// Binomial coefficient with C(n, k) = 0 whenever n < 0, k < 0 or k > n.
inline BigInt binomial(long long n, long long k) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (long long i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

inline BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

struct K0K1 {
  int k0 = 0;  // nodes with no internal children
  int k1 = 0;  // nodes with exactly one internal child
  auto operator<=>(const K0K1&) const = default;
};

// Counts over ranks 1..K in t[1..]; the root placeholder t_1 = 0 is ignored.
inline K0K1 k0_k1(const std::vector<int>& t) {
  const auto k = internal_child_counts(t);
  K0K1 r;
  for (int c : k) {
    if (c == 0) ++r.k0;
    if (c == 1) ++r.k1;
  }
  return r;
}

// The set of (k0, k1) pairs realised by length-K parent vectors, in
// increasing (k0, k1) order.
inline std::vector<K0K1> valid_pairs(int K) {
  if (K < 2) throw DomainError("valid_pairs needs K >= 2");
  std::vector<K0K1> pairs{{1, K - 1}};
  for (int k0 = 2; k0 <= K - 2; ++k0) {
    for (int k1 = std::max(0, K - 2 * k0 + 1); k1 <= K - 1 - k0; ++k1) {
      pairs.push_back({k0, k1});
    }
  }
  // For K = 2 the two boundary pairs coincide in k0 = 1; (1, 1) is the only
  // realisable one.
  if (K > 2) pairs.push_back({K - 1, 0});
  return pairs;
}

inline std::size_t valid_pair_count_formula(int K) {
  return static_cast<std::size_t>((K - 1) * (K - 1) / 4 + 1);
}

// A_K(k0, k1): number of length-K parent vectors with the given statistics.
class PairTable {
 public:
  int K() const noexcept { return K_; }
  const std::map<K0K1, BigInt>& entries() const noexcept { return entries_; }

  BigInt at(int k0, int k1) const {
    const auto it = entries_.find({k0, k1});
    return it == entries_.end() ? BigInt(0) : it->second;
  }

  // B_K(k0) = sum over k1 of A_K(k0, k1).
  BigInt row_sum(int k0) const {
    BigInt s = 0;
    for (const auto& [key, v] : entries_) {
      if (key.k0 == k0) s += v;
    }
    return s;
  }

  BigInt total() const {
    BigInt s = 0;
    for (const auto& [key, v] : entries_) s += v;
    return s;
  }

 private:
  friend PairTable pair_table(int);
  int K_ = 0;
  std::map<K0K1, BigInt> entries_;
};

// Dynamic program over K' = 2..K using the three-way split on where the new
// last entry t_K points (to a node seen twice or more, once, or never).
inline PairTable pair_table(int K) {
  if (K < 2) throw DomainError("pair_table needs K >= 2");
  std::map<K0K1, BigInt> prev{{{1, 1}, 1}};
  auto lookup = [&prev](int k0, int k1) -> BigInt {
    const auto it = prev.find({k0, k1});
    return it == prev.end() ? BigInt(0) : it->second;
  };
  for (int k = 3; k <= K; ++k) {
    std::map<K0K1, BigInt> next;
    for (const auto& p : valid_pairs(k)) {
      BigInt v = lookup(p.k0 - 1, p.k1) * (k - p.k0 - p.k1) +
                 lookup(p.k0 - 1, p.k1 + 1) * (p.k1 + 1) +
                 lookup(p.k0, p.k1 - 1) * p.k0;
      next.emplace(p, std::move(v));
    }
    prev = std::move(next);
  }
  PairTable table;
  table.K_ = K;
  table.entries_ = std::move(prev);
  return table;
}

// Eulerian number E(n, k), 1 <= k <= n, with E(n, 1) = E(n, n) = 1.
inline BigInt eulerian(int n, int k) {
  if (n < 1 || k < 1 || k > n) return 0;
  std::vector<BigInt> row{1};  // n = 1
  for (int m = 2; m <= n; ++m) {
    std::vector<BigInt> next(static_cast<std::size_t>(m));
    for (int j = 1; j <= m; ++j) {
      BigInt v = 0;
      if (j - 1 >= 1) v += (m - j + 1) * row[static_cast<std::size_t>(j - 2)];
      if (j <= m - 1) v += j * row[static_cast<std::size_t>(j - 1)];
      next[static_cast<std::size_t>(j - 1)] = v;
    }
    row = std::move(next);
  }
  return row[static_cast<std::size_t>(k - 1)];
}

struct CountResult {
  int n = 0;
  int k = 0;
  BigInt value = 0;
  bool in_domain = true;
};

// G(N, K) = sum over (k0, k1) of A_K(k0, k1) C(N - 2k0 - k1 + K - 1, K - 1).
inline CountResult count_shapes(int N, int K) {
  CountResult r{N, K, 0, true};
  if (N < 2 || K < 1 || K > N - 1) {
    r.in_domain = false;
    return r;
  }
  if (K == 1) {
    r.value = 1;
    return r;
  }
  const auto table = pair_table(K);
  for (const auto& [p, a] : table.entries()) {
    r.value += a * binomial(N - 2 * p.k0 - p.k1 + K - 1, K - 1);
  }
  return r;
}

inline CountResult count_space(int N) {
  if (N < 2) throw DomainError("count_space needs N >= 2");
  CountResult r{N, 0, 0, true};
  for (int K = 1; K <= N - 1; ++K) r.value += count_shapes(N, K).value;
  return r;
}

// Stirling numbers of the second kind S(n, k) for k = 0..n.
inline std::vector<BigInt> stirling2_row(int n) {
  std::vector<BigInt> row{1};  // S(0, 0)
  for (int m = 1; m <= n; ++m) {
    std::vector<BigInt> next(static_cast<std::size_t>(m + 1), 0);
    for (int k = 1; k <= m; ++k) {
      BigInt v = row[static_cast<std::size_t>(k - 1)];
      if (k <= m - 1) v += k * row[static_cast<std::size_t>(k)];
      next[static_cast<std::size_t>(k)] = v;
    }
    row = std::move(next);
  }
  return row;
}

// Ranked, labeled multifurcating trees: f(N) = sum_{k<N} S(N, k) f(k).
inline BigInt count_labeled_ranked(int N) {
  if (N < 1) throw DomainError("count_labeled_ranked needs N >= 1");
  std::vector<BigInt> f(static_cast<std::size_t>(N + 1), 0);
  f[1] = 1;
  for (int n = 2; n <= N; ++n) {
    const auto s = stirling2_row(n);
    BigInt v = 0;
    for (int k = 1; k <= n - 1; ++k) {
      v += s[static_cast<std::size_t>(k)] * f[static_cast<std::size_t>(k)];
    }
    f[static_cast<std::size_t>(n)] = v;
  }
  return f[static_cast<std::size_t>(N)];
}

// Ranked, labeled binary trees: N! (N-1)! / 2^(N-1).
inline BigInt count_labeled_binary(int N) {
  if (N < 1) throw DomainError("count_labeled_binary needs N >= 1");
  BigInt num = factorial(N) * factorial(N - 1);
  BigInt den = BigInt(1) << (N - 1);
  return num / den;
}

// ---------------------------------------------------------------------------
// Exhaustive generation

inline constexpr int kDefaultGenerationCap = 9;

struct GenerateOptions {
  std::optional<int> k;  // restrict to a single K
  int cap = kDefaultGenerationCap;
};

// Visits every parent vector of length K in lexicographic order.
inline void for_each_parent_vector(
    int K, const std::function<void(const std::vector<int>&)>& visit) {
  if (K < 1) throw DomainError("K must be positive");
  std::vector<int> t(static_cast<std::size_t>(K), 1);
  t[0] = 0;
  while (true) {
    visit(t);
    int i = K - 1;
    while (i >= 1 && t[static_cast<std::size_t>(i)] == i) {
      t[static_cast<std::size_t>(i)] = 1;
      --i;
    }
    if (i < 1) return;
    ++t[static_cast<std::size_t>(i)];
  }
}

namespace detail {

// All vectors extra >= 0 of length parts summing to `total`, lexicographic.
inline void for_each_composition(
    int total, int parts, std::vector<int>& buf, std::size_t idx,
    const std::function<void(const std::vector<int>&)>& visit) {
  if (idx + 1 == static_cast<std::size_t>(parts)) {
    buf[idx] = total;
    visit(buf);
    return;
  }
  for (int v = 0; v <= total; ++v) {
    buf[idx] = v;
    for_each_composition(total - v, parts, buf, idx + 1, visit);
  }
}

}  // namespace detail

// Streams every shape with N tips (optionally only K internal nodes) exactly
// once, ordered by (K, t, l).
inline void for_each_shape(int N, const GenerateOptions& opts,
                           const std::function<void(const TreeShape&)>& visit) {
  if (N < 2) throw DomainError("a tree needs at least 2 tips");
  if (N > opts.cap) {
    throw DomainError("exhaustive generation refused: N = " +
                      std::to_string(N) + " exceeds the cap of " +
                      std::to_string(opts.cap));
  }
  const int k_lo = opts.k ? *opts.k : 1;
  const int k_hi = opts.k ? *opts.k : N - 1;
  if (k_lo < 1 || k_hi > N - 1) return;
  for (int K = k_lo; K <= k_hi; ++K) {
    for_each_parent_vector(K, [&](const std::vector<int>& t) {
      const auto kids = internal_child_counts(t);
      std::vector<int> base(static_cast<std::size_t>(K));
      int used = 0;
      for (std::size_t j = 0; j < kids.size(); ++j) {
        base[j] = kids[j] == 0 ? 2 : (kids[j] == 1 ? 1 : 0);
        used += base[j];
      }
      if (used > N) return;
      std::vector<int> buf(static_cast<std::size_t>(K));
      detail::for_each_composition(
          N - used, K, buf, 0, [&](const std::vector<int>& extra) {
            std::vector<int> l(base);
            for (std::size_t j = 0; j < l.size(); ++j) l[j] += extra[j];
            visit(TreeShape(StringRepr{t, std::move(l)}));
          });
    });
  }
}

inline std::vector<TreeShape> generate_all(int N,
                                           const GenerateOptions& opts = {}) {
  std::vector<TreeShape> out;
  for_each_shape(N, opts, [&out](const TreeShape& s) { out.push_back(s); });
  return out;
}

}  // namespace mrts
