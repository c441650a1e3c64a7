#include <gtest/gtest.h>

#include <map>
#include <set>
#include <unordered_set>

#include "mrts/mrts.hpp"
#include "oracles.hpp"

using namespace mrts;

TEST(Binomial, EdgeCasesAndAgreementWithPascal) {
  EXPECT_EQ(binomial(5, -1), 0);
  EXPECT_EQ(binomial(-3, 1), 0);
  EXPECT_EQ(binomial(3, 5), 0);
  for (int n = 0; n <= 40; ++n) {
    for (int k = 0; k <= n; ++k) {
      EXPECT_EQ(binomial(n, k), oracle::choose(n, k));
    }
  }
}

TEST(ValidPairs, SmallCases) {
  EXPECT_THROW(valid_pairs(1), DomainError);
  EXPECT_EQ(valid_pairs(2), (std::vector<K0K1>{{1, 1}}));
  EXPECT_EQ(valid_pairs(3), (std::vector<K0K1>{{1, 2}, {2, 0}}));
  EXPECT_EQ(valid_pairs(4), (std::vector<K0K1>{{1, 3}, {2, 1}, {3, 0}}));
}

TEST(ValidPairs, EqualRealisedPairsByEnumeration) {
  for (int K = 2; K <= 9; ++K) {
    std::set<K0K1> seen;
    for_each_parent_vector(K, [&](const std::vector<int>& t) {
      seen.insert(k0_k1(t));
    });
    const auto pairs = valid_pairs(K);
    EXPECT_EQ(std::set<K0K1>(pairs.begin(), pairs.end()), seen) << "K=" << K;
  }
}

TEST(ValidPairs, CardinalityFormula) {
  for (int K = 2; K <= 20; ++K) {
    EXPECT_EQ(valid_pairs(K).size(), valid_pair_count_formula(K)) << "K=" << K;
  }
}

TEST(PairTable, MatchesDirectParentVectorCounts) {
  for (int K = 2; K <= 9; ++K) {
    std::map<K0K1, long long> direct;
    for_each_parent_vector(K, [&](const std::vector<int>& t) {
      ++direct[k0_k1(t)];
    });
    const auto table = pair_table(K);
    ASSERT_EQ(table.entries().size(), direct.size());
    for (const auto& [p, c] : direct) {
      EXPECT_EQ(table.at(p.k0, p.k1), c) << "K=" << K;
    }
    // (K-1)! parent vectors in total.
    EXPECT_EQ(table.total(), factorial(K - 1));
  }
}

TEST(PairTable, RowSumsAreEulerian) {
  for (int K = 2; K <= 14; ++K) {
    const auto table = pair_table(K);
    for (int k0 = 1; k0 <= K - 1; ++k0) {
      EXPECT_EQ(table.row_sum(k0), eulerian(K - 1, k0)) << K << "," << k0;
    }
  }
  // Eulerian numbers E(7, .).
  const std::vector<int> e7{1, 120, 1191, 2416, 1191, 120, 1};
  for (int k = 1; k <= 7; ++k) EXPECT_EQ(eulerian(7, k), e7[k - 1]);
}

TEST(PairTable, KnownSequenceForEightNodes) {
  const std::vector<long long> expected{1,   120, 768, 423, 496, 1494, 426,
                                        294, 741, 156, 98,  22,  1};
  std::vector<long long> got;
  for (const auto& [p, v] : pair_table(8).entries()) {
    got.push_back(v.convert_to<long long>());
  }
  EXPECT_EQ(got, expected);
}

TEST(CountShapes, AgreesWithNaiveStringEnumeration) {
  for (int N = 2; N <= 8; ++N) {
    for (int K = 1; K <= N - 1; ++K) {
      EXPECT_EQ(count_shapes(N, K).value, oracle::naive_strings(N, K).size())
          << N << "," << K;
    }
  }
}

TEST(CountShapes, ClosedFormsForSmallK) {
  for (int N = 3; N <= 40; ++N) {
    EXPECT_EQ(count_shapes(N, 1).value, 1);
    EXPECT_EQ(count_shapes(N, 2).value, N - 2);
  }
}

TEST(CountShapes, BinaryShapesAreEulerZigzag) {
  const std::vector<long long> zigzag{1,   2,    5,    16,    61,
                                      272, 1385, 7936, 50521, 353792};
  for (int N = 3; N <= 12; ++N) {
    EXPECT_EQ(count_shapes(N, N - 1).value, zigzag[N - 3]) << N;
  }
}

TEST(CountShapes, OutOfDomainIsZero) {
  EXPECT_FALSE(count_shapes(5, 5).in_domain);
  EXPECT_EQ(count_shapes(5, 5).value, 0);
  EXPECT_FALSE(count_shapes(5, 0).in_domain);
  EXPECT_FALSE(count_shapes(1, 1).in_domain);
}

TEST(CountShapes, TwelveTipRow) {
  const std::vector<long long> row{1,      10,     90,     684,    4312,  21931,
                                   86885,  255386, 517692, 637329, 353792};
  for (int K = 1; K <= 11; ++K) EXPECT_EQ(count_shapes(12, K).value, row[K - 1]);
  // The row above sums to 1878112.
  EXPECT_EQ(count_space(12).value, 1878112);
}

TEST(CountShapes, TotalsAgreeWithExhaustiveGenerationUpToTwelve) {
  GenerateOptions opts;
  opts.cap = 12;
  for (int N = 9; N <= 12; ++N) {
    long long generated = 0;
    for_each_shape(N, opts, [&](const TreeShape&) { ++generated; });
    EXPECT_EQ(count_space(N).value, generated) << N;
  }
}

TEST(CountShapes, GrowsBelowNToTheKMinusOne) {
  for (int N = 4; N <= 30; ++N) {
    for (int K = 1; K <= N - 1; ++K) {
      BigInt bound = 1;
      for (int i = 0; i < K - 1; ++i) bound *= N;
      EXPECT_LE(count_shapes(N, K).value, bound);
    }
  }
}

TEST(LabeledCounts, KnownValues) {
  EXPECT_EQ(count_labeled_binary(8), 1587600);
  EXPECT_EQ(count_labeled_ranked(3), 4);
  EXPECT_EQ(count_labeled_ranked(4), 32);
  EXPECT_EQ(count_labeled_ranked(8), 10270696);
  EXPECT_EQ(count_labeled_ranked(12), BigInt("237106822506952"));
}

TEST(LabeledCounts, StirlingRowSumsAreBell) {
  const std::vector<int> bell{1, 1, 2, 5, 15, 52, 203, 877};
  for (int n = 0; n < 8; ++n) {
    BigInt s = 0;
    for (const auto& v : stirling2_row(n)) s += v;
    EXPECT_EQ(s, bell[n]);
  }
}

TEST(Generate, CountsPerKAndNoDuplicates) {
  for (int N = 2; N <= 8; ++N) {
    std::unordered_set<TreeShape> seen;
    for (int K = 1; K <= N - 1; ++K) {
      GenerateOptions opts;
      opts.k = K;
      const auto shapes = generate_all(N, opts);
      EXPECT_EQ(count_shapes(N, K).value, shapes.size()) << N << "," << K;
      for (const auto& s : shapes) {
        EXPECT_EQ(s.n_tips(), N);
        EXPECT_EQ(s.n_internal(), K);
        EXPECT_TRUE(seen.insert(s).second) << to_text(s);
      }
    }
  }
}

TEST(Generate, EmitsInCanonicalOrder) {
  const auto shapes = generate_all(7);
  EXPECT_TRUE(std::is_sorted(shapes.begin(), shapes.end()));
  EXPECT_EQ(shapes.front(), TreeShape::star(7));
}

TEST(Generate, RefusesAboveCap) {
  EXPECT_THROW(generate_all(kDefaultGenerationCap + 1), DomainError);
  GenerateOptions opts;
  opts.cap = 4;
  EXPECT_THROW(generate_all(5, opts), DomainError);
  EXPECT_EQ(generate_all(4, opts).size(), 5u);
}
