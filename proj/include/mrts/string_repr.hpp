#pragma once

// String representation {t, l} of a ranked multifurcating tree shape.
//
// Internal nodes carry ranks 1..K from the root downwards. t[i-1] is the rank
// of the parent of node i (0 for the root) and l[i-1] is the number of leaves
// hanging directly off node i. Ranks are 1-based as values; the vectors
// themselves are indexed from 0.

#include <compare>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mrts/error.hpp"

namespace mrts {

struct StringRepr {
  std::vector<int> t;
  std::vector<int> l;

  int n_internal() const { return static_cast<int>(t.size()); }
  int n_tips() const { return std::accumulate(l.begin(), l.end(), 0); }

  auto operator<=>(const StringRepr&) const = default;
};

enum class StringConstraint { S1, S2, S3, S4 };

inline const char* to_string(StringConstraint c) {
  switch (c) {
    case StringConstraint::S1: return "S1";
    case StringConstraint::S2: return "S2";
    case StringConstraint::S3: return "S3";
    case StringConstraint::S4: return "S4";
  }
  return "?";
}

// Outcome of a validation pass: either ok, or the first violated constraint
// together with a human-readable reason.
template <class Constraint>
struct Verdict {
  std::optional<Constraint> violated;
  std::string detail;

  bool ok() const { return !violated.has_value(); }
  explicit operator bool() const { return ok(); }

  static Verdict pass() { return {}; }
  static Verdict fail(Constraint c, std::string why) {
    return {c, std::move(why)};
  }
};

using StringVerdict = Verdict<StringConstraint>;

// Number of internal children of every node: k[i-1] = |{c : t_c = i}|.
inline std::vector<int> internal_child_counts(const std::vector<int>& t) {
  std::vector<int> k(t.size(), 0);
  for (std::size_t c = 1; c < t.size(); ++c) {
    const int parent = t[c];
    if (parent >= 1 && static_cast<std::size_t>(parent) <= t.size()) {
      ++k[static_cast<std::size_t>(parent - 1)];
    }
  }
  return k;
}

// Checks S1..S4 in that order. When expected_tips is given, S2 also demands
// that the leaves sum to it; otherwise S2 only rejects negative leaf counts.
inline StringVerdict validate_string(const std::vector<int>& t,
                                     const std::vector<int>& l,
                                     std::optional<int> expected_tips = {}) {
  if (t.size() != l.size()) {
    throw StructuralError("t and l have different lengths (" +
                          std::to_string(t.size()) + " vs " +
                          std::to_string(l.size()) + ")");
  }
  if (t.empty()) throw StructuralError("empty string representation");

  if (t[0] != 0) {
    return StringVerdict::fail(StringConstraint::S1, "t_1 must be 0");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    const int rank = static_cast<int>(i) + 1;
    if (t[i] < 1 || t[i] > rank - 1) {
      return StringVerdict::fail(
          StringConstraint::S1,
          "t_" + std::to_string(rank) + " must lie in [1, " +
              std::to_string(rank - 1) + "]");
    }
  }

  long long total = 0;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (l[i] < 0) {
      return StringVerdict::fail(
          StringConstraint::S2,
          "l_" + std::to_string(i + 1) + " is negative");
    }
    total += l[i];
  }
  if (expected_tips && total != *expected_tips) {
    return StringVerdict::fail(StringConstraint::S2,
                               "leaves sum to " + std::to_string(total) +
                                   ", expected " +
                                   std::to_string(*expected_tips));
  }

  const auto k = internal_child_counts(t);
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] == 0 && l[j] < 2) {
      return StringVerdict::fail(
          StringConstraint::S3,
          "node " + std::to_string(j + 1) +
              " has no internal children and needs at least 2 leaves");
    }
  }
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (k[j] == 1 && l[j] < 1) {
      return StringVerdict::fail(
          StringConstraint::S4,
          "node " + std::to_string(j + 1) +
              " has one internal child and needs at least 1 leaf");
    }
  }
  return StringVerdict::pass();
}

inline StringVerdict validate_string(const StringRepr& s,
                                     std::optional<int> expected_tips = {}) {
  return validate_string(s.t, s.l, expected_tips);
}

}  // namespace mrts
