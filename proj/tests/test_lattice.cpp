#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "mrts/mrts.hpp"
#include "oracles.hpp"

using namespace mrts;

namespace {

// The two binary trees with 8 tips used as the worked LUB example.
const std::vector<std::vector<int>> kFx{{2},          {1, 3},          {0, 2, 4},
                                        {0, 2, 3, 5}, {0, 1, 2, 4, 6}, {0, 1, 2, 4, 5, 7},
                                        {0, 1, 2, 3, 4, 6, 8}};
const std::vector<std::vector<int>> kFy{{2},          {1, 3},          {0, 2, 4},
                                        {0, 2, 3, 5}, {0, 1, 2, 4, 6}, {0, 1, 2, 4, 5, 7},
                                        {0, 1, 2, 4, 5, 6, 8}};

}  // namespace

TEST(RefinementCount, FormulaValues) {
  // k = 0: split l leaves into a parent with >= 1 leaf and a cherry child.
  EXPECT_EQ(refinement_count(0, 2), 0u);
  EXPECT_EQ(refinement_count(0, 3), 1u);
  EXPECT_EQ(refinement_count(0, 5), 3u);
  EXPECT_EQ(refinement_count(2, 0), 0u);
  EXPECT_EQ(refinement_count(1, 1), 0u);
  EXPECT_EQ(refinement_count(2, 1), 3u);
  EXPECT_THROW(refinement_count(0, 1), DomainError);
  EXPECT_THROW(refinement_count(63, 0), DomainError);
}

TEST(Degrees, FormulaMatchesGraphUpToSeven) {
  for (int N = 3; N <= 7; ++N) {
    const auto g = build_hasse(N);
    for (std::size_t v = 0; v < g.size(); ++v) {
      const auto& s = g.vertices[v];
      EXPECT_EQ(deg_plus(s), g.deg_plus[v]) << to_text(s);
      EXPECT_EQ(deg_minus(s), g.deg_minus[v]) << to_text(s);
    }
  }
}

TEST(Degrees, BinaryAndStarExtremes) {
  for (int N = 3; N <= 8; ++N) {
    for (const auto& s : generate_all(N)) {
      if (s.is_binary()) {
        EXPECT_EQ(deg_minus(s), 0u);
      }
      if (s.is_star()) {
        EXPECT_EQ(deg_plus(s), 0u);
      }
    }
  }
}

TEST(Refinements, EveryRefinementCollapsesBack) {
  for (int N = 3; N <= 7; ++N) {
    for (const auto& s : generate_all(N)) {
      for (const auto& r : refinements_below(s)) {
        EXPECT_EQ(r.n_internal(), s.n_internal() + 1);
        const auto up = covers(r);
        EXPECT_TRUE(std::binary_search(up.begin(), up.end(), s));
      }
    }
  }
}

TEST(Refinements, NoDuplicateCoversOrSplits) {
  for (int N = 3; N <= 7; ++N) {
    for (const auto& s : generate_all(N)) {
      EXPECT_EQ(covers(s).size(), deg_plus(s));
      EXPECT_EQ(refinements_below(s).size(), deg_minus(s));
    }
  }
}

TEST(Neighbors, IndexingEnumeratesCoversThenSplits) {
  for (const auto& s : generate_all(6)) {
    auto nb = neighbors(s);
    ASSERT_EQ(nb.size(), degree(s));
    for (std::size_t i = 0; i < deg_plus(s); ++i) {
      EXPECT_EQ(nb[i].n_internal(), s.n_internal() - 1);
    }
    std::sort(nb.begin(), nb.end());
    EXPECT_EQ(std::adjacent_find(nb.begin(), nb.end()), nb.end());
  }
  EXPECT_THROW(neighbor_at(TreeShape::star(4), 99), DomainError);
}

TEST(Lub, WorkedBinaryExampleStepByStep) {
  const auto a = to_shape(FMatrix(kFx));
  const auto b = to_shape(FMatrix(kFy));
  const auto res = lub_with_trace(a, b);
  EXPECT_EQ(res.trace.shared.rows(),
            (std::vector<std::vector<int>>{
                {2}, {1, 3}, {0, 2, 4}, {0, 1, 2, 7}, {0, 1, 2, 6, 8}}));
  ASSERT_EQ(res.trace.passes.size(), 3u);
  EXPECT_EQ(res.trace.passes[0].rows(),
            (std::vector<std::vector<int>>{{2}, {1, 3}, {0, 1, 7}, {0, 1, 6, 8}}));
  EXPECT_EQ(res.trace.passes[1].rows(),
            (std::vector<std::vector<int>>{{2}, {0, 7}, {0, 6, 8}}));
  EXPECT_EQ(res.trace.passes[2].rows(),
            (std::vector<std::vector<int>>{{7}, {6, 8}}));
  EXPECT_EQ(res.fmatrix.to_text(), "7;6,8");
}

TEST(Lub, AgreesWithBruteForceUpClosure) {
  for (int N = 3; N <= 6; ++N) {
    const auto shapes = generate_all(N);
    const auto up = oracle::up_closure(shapes);
    for (std::size_t a = 0; a < shapes.size(); ++a) {
      for (std::size_t b = 0; b < shapes.size(); ++b) {
        const auto minimal = oracle::minimal_common_upper_bounds(up, a, b);
        ASSERT_EQ(minimal.size(), 1u);
        EXPECT_EQ(lub(shapes[a], shapes[b]), shapes[minimal[0]])
            << to_text(shapes[a]) << " v " << to_text(shapes[b]);
      }
    }
  }
}

TEST(Lub, LatticeLaws) {
  const auto shapes = generate_all(6);
  for (const auto& a : shapes) {
    EXPECT_EQ(lub(a, a), a);
    EXPECT_EQ(lub(a, TreeShape::star(6)), TreeShape::star(6));
    for (const auto& b : shapes) {
      const auto ab = lub(a, b);
      EXPECT_EQ(ab, lub(b, a));
      EXPECT_EQ(lub(a, ab), ab);
      EXPECT_LE(ab.n_internal(), std::min(a.n_internal(), b.n_internal()));
    }
  }
}

TEST(Lub, MismatchedTipCountsRejected) {
  EXPECT_THROW(lub(TreeShape::star(4), TreeShape::star(5)), DomainError);
}

TEST(Distance, MetricAxiomsAndBounds) {
  const auto shapes = generate_all(6);
  const auto n = shapes.size();
  std::vector<std::vector<int>> d(n, std::vector<int>(n));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      d[a][b] = lattice_distance(shapes[a], shapes[b]);
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    const int ka = shapes[a].n_internal();
    for (std::size_t b = 0; b < n; ++b) {
      const int kb = shapes[b].n_internal();
      EXPECT_EQ(d[a][b], d[b][a]);
      EXPECT_EQ(d[a][b] == 0, a == b);
      EXPECT_GE(d[a][b], std::abs(ka - kb));
      EXPECT_LE(d[a][b], ka + kb - 2);
      for (std::size_t c = 0; c < n; ++c) {
        EXPECT_LE(d[a][c], d[a][b] + d[b][c]);
      }
    }
  }
}

TEST(MaxDegreeTree, KnownValues) {
  const std::vector<Count> deg_minus_seq{2, 4, 7, 11, 18, 26};
  for (int N = 4; N <= 9; ++N) {
    const auto t = max_degree_tree(N);
    EXPECT_EQ(deg_minus(t.shape), deg_minus_seq[N - 4]) << N;
    EXPECT_EQ(deg_plus(t.shape), 1u);
    EXPECT_EQ(t.max_degree, degree(t.shape));
  }
  EXPECT_EQ(max_degree_tree(4).max_degree, 3u);
  EXPECT_EQ(max_degree_tree(5).max_degree, 5u);
  EXPECT_THROW(max_degree_tree(3), DomainError);
}

TEST(MaxDegreeTree, ExhaustiveArgMax) {
  for (int N = 4; N <= 9; ++N) {
    const auto t = max_degree_tree(N);
    Count best = 0;
    for (const auto& s : generate_all(N)) best = std::max(best, degree(s));
    EXPECT_EQ(best, t.max_degree) << N;
  }
}

TEST(Hasse, SmallLattices) {
  const auto g4 = build_hasse(4);
  EXPECT_EQ(g4.size(), 5u);
  EXPECT_EQ(g4.edge_count(), 5u);
  EXPECT_EQ(build_hasse(5).size(), 15u);
  // Degree sum is twice the edge count.
  for (int N = 4; N <= 7; ++N) {
    const auto g = build_hasse(N);
    Count total = 0;
    for (std::size_t v = 0; v < g.size(); ++v) total += g.degree(v);
    EXPECT_EQ(total, 2 * g.edge_count());
  }
}

TEST(Hasse, DiameterLowerBound) {
  for (int N = 5; N <= 7; ++N) {
    EXPECT_GE(diameter(build_hasse(N)), 2 * (N - 3)) << N;
  }
}
