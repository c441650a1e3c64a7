#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <unordered_map>

#include "mrts/mrts.hpp"

using namespace mrts;

namespace {

std::size_t index_in(const ExactKernel& k, const TreeShape& s) {
  for (std::size_t i = 0; i < k.states.size(); ++i) {
    if (k.states[i] == s) return i;
  }
  return k.states.size();
}

}  // namespace

TEST(ExactKernel, RowsSumToOneAndEntriesNonNegative) {
  for (auto kind : {ChainKind::symmetric, ChainKind::random_walk,
                    ChainKind::mh_uniform}) {
    for (bool lazy : {false, true}) {
      for (int N = 4; N <= 6; ++N) {
        const auto k = exact_kernel({kind, lazy, N});
        EXPECT_LT((k.P.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
        EXPECT_GE(k.P.minCoeff(), 0.0);
        EXPECT_LT(stationarity_residual(k), 1e-12);
        EXPECT_LT(detailed_balance_residual(k), 1e-12);
        EXPECT_TRUE(is_irreducible(k));
      }
    }
  }
}

TEST(ExactKernel, SymmetricChainIsDoublyStochastic) {
  for (int N = 4; N <= 7; ++N) {
    const auto k = exact_kernel({ChainKind::symmetric, false, N});
    EXPECT_LT((k.P - k.P.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((k.P.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  }
}

TEST(ExactKernel, SymmetricSelfLoopIsOneMinusDegreeOverM) {
  for (int N = 4; N <= 6; ++N) {
    const auto k = exact_kernel({ChainKind::symmetric, false, N});
    const double m = static_cast<double>(max_degree_tree(N).max_degree);
    for (std::size_t i = 0; i < k.states.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      EXPECT_NEAR(k.P(ii, ii),
                  1.0 - static_cast<double>(degree(k.states[i])) / m, 1e-15);
    }
    // The max-degree tree never stays put.
    const auto top = index_in(k, max_degree_tree(N).shape);
    EXPECT_EQ(k.P(static_cast<Eigen::Index>(top), static_cast<Eigen::Index>(top)),
              0.0);
  }
}

TEST(ExactKernel, RandomWalkStationaryIsProportionalToDegree) {
  const auto k = exact_kernel({ChainKind::random_walk, false, 6});
  for (std::size_t i = 0; i < k.states.size(); ++i) {
    EXPECT_NEAR(k.pi(static_cast<Eigen::Index>(i)) /
                    static_cast<double>(degree(k.states[i])),
                k.pi(0) / static_cast<double>(degree(k.states[0])), 1e-15);
  }
}

TEST(ExactKernel, LazyIsHalfIdentityPlusHalfKernel) {
  for (auto kind : {ChainKind::symmetric, ChainKind::random_walk}) {
    const auto p = exact_kernel({kind, false, 5});
    const auto q = exact_kernel({kind, true, 5});
    const auto n = p.P.rows();
    EXPECT_LT((q.P - 0.5 * (Eigen::MatrixXd::Identity(n, n) + p.P))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-15);
    EXPECT_GE(exact_gap(q).eigenvalues.minCoeff(), -1e-12);
  }
}

TEST(ExactKernel, RefusesAboveCap) {
  EXPECT_THROW(exact_kernel({ChainKind::random_walk, false, 8}), DomainError);
  EXPECT_THROW(exact_kernel({ChainKind::symmetric, false, 3}), DomainError);
  const auto k = exact_kernel({ChainKind::random_walk, false, 6});
  EXPECT_THROW(exact_bottleneck(k), DomainError);
}

TEST(Bottleneck, FourTipsByHand) {
  // With M_4 = 3 a lone shape of degree 1 leaks a third of its mass, and
  // no set does better.
  const auto k = exact_kernel({ChainKind::symmetric, false, 4});
  const auto b = exact_bottleneck(k);
  EXPECT_NEAR(b.phi, 1.0 / 3.0, 1e-12);
  EXPECT_FALSE(b.argmin.empty());
  const auto lazy = exact_bottleneck(exact_kernel({ChainKind::symmetric, true, 4}));
  EXPECT_NEAR(lazy.phi, b.phi / 2, 1e-12);
}

TEST(Bottleneck, CheegerSandwichForLazyKernels) {
  for (auto kind : {ChainKind::symmetric, ChainKind::random_walk,
                    ChainKind::mh_uniform}) {
    for (int N = 4; N <= 5; ++N) {
      const auto k = exact_kernel({kind, true, N});
      const double phi = exact_bottleneck(k).phi;
      const double gap = exact_gap(k).gap;
      EXPECT_LE(phi * phi / 2, gap + 1e-12);
      EXPECT_LE(gap, 2 * phi + 1e-12);
    }
  }
}

TEST(Steps, RandomWalkFromStarAndBinary) {
  for (int N = 4; N <= 9; ++N) {
    Rng rng(static_cast<std::uint64_t>(N));
    for (int rep = 0; rep < 50; ++rep) {
      ChainState st{TreeShape::star(N)};
      step_random_walk(st, rng);
      EXPECT_EQ(st.current.n_internal(), 2);
    }
    // Caterpillar: every neighbour is a collapse.
    StringRepr cat;
    for (int i = 0; i < N - 1; ++i) {
      cat.t.push_back(i);
      cat.l.push_back(i == N - 2 ? 2 : 1);
    }
    for (int rep = 0; rep < 50; ++rep) {
      ChainState st{TreeShape(cat)};
      step_random_walk(st, rng);
      EXPECT_EQ(st.current.n_internal(), N - 2);
    }
  }
}

TEST(Steps, SymmetricEmpiricalTransitionsMatchKernel) {
  const int N = 5;
  const auto k = exact_kernel({ChainKind::symmetric, false, N});
  const Count m = max_degree_tree(N).max_degree;
  std::map<std::pair<std::size_t, std::size_t>, double> counts;
  std::vector<double> visits(k.states.size(), 0);
  ChainState st{TreeShape::star(N)};
  Rng rng(2024);
  std::size_t x = index_in(k, st.current);
  constexpr int kSteps = 300000;
  for (int s = 0; s < kSteps; ++s) {
    step_symmetric(st, m, rng);
    const std::size_t y = index_in(k, st.current);
    ++counts[{x, y}];
    ++visits[x];
    x = y;
  }
  for (std::size_t a = 0; a < k.states.size(); ++a) {
    ASSERT_GT(visits[a], 1000);
    for (std::size_t b = 0; b < k.states.size(); ++b) {
      const double p = k.P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      const double f = counts[{a, b}] / visits[a];
      EXPECT_NEAR(f, p, 5 * std::sqrt(p * (1 - p) / visits[a]) + 1e-9)
          << a << "->" << b;
    }
  }
}

TEST(Steps, MhAcceptanceCounting) {
  MarkovChain chain({ChainKind::mh_uniform, false, 6}, TreeShape::star(6), Rng(3));
  for (int i = 0; i < 1000; ++i) chain.step();
  EXPECT_EQ(chain.state().step, 1000u);
  EXPECT_EQ(chain.state().proposed, 1000u);
  EXPECT_LE(chain.state().accepted, 1000u);
  EXPECT_GT(chain.state().acceptance_rate(), 0.3);
}

TEST(Steps, MhVisitsUniformlyAtFiveTips) {
  // Exhaustive target: every one of the 15 shapes equally often.
  const auto shapes = generate_all(5);
  RunOptions opt;
  opt.spec = {ChainKind::mh_uniform, false, 5};
  opt.chains = 4;
  opt.steps = 50000;
  opt.seed = 99;
  const auto res = run_chains(opt);
  std::unordered_map<TreeShape, double> freq;
  const auto pooled = res.pooled();
  for (const auto& s : pooled) freq[s] += 1.0 / static_cast<double>(pooled.size());
  EXPECT_EQ(freq.size(), shapes.size());
  for (const auto& s : shapes) EXPECT_NEAR(freq[s], 1.0 / 15, 0.01) << to_text(s);
}

TEST(Runner, DeterministicAndThreadInvariant) {
  RunOptions opt;
  opt.spec = {ChainKind::random_walk, true, 9};
  opt.chains = 5;
  opt.steps = 300;
  opt.thin = 7;
  opt.burn_in = 20;
  opt.seed = 17;
  const auto a = run_chains(opt);
  opt.threads = 3;
  const auto b = run_chains(opt);
  ASSERT_EQ(a.chains.size(), b.chains.size());
  for (std::size_t c = 0; c < a.chains.size(); ++c) {
    EXPECT_EQ(a.chains[c].initial, b.chains[c].initial);
    EXPECT_EQ(a.chains[c].samples, b.chains[c].samples);
  }
  // Kept steps: 27, 34, ..., 300.
  EXPECT_EQ(a.chains[0].samples.size(), (300u - 20u) / 7u);
  EXPECT_EQ(a.chains[0].samples.front().first, 27u);
  EXPECT_EQ(a.pooled().size(), 5 * a.chains[0].samples.size());
  opt.seed = 18;
  EXPECT_NE(run_chains(opt).pooled(), a.pooled());
}

TEST(Runner, InitialShapesCycleThroughK) {
  RunOptions opt;
  opt.spec = {ChainKind::symmetric, false, 6};
  opt.chains = 7;
  opt.steps = 1;
  opt.seed = 1;
  const auto res = run_chains(opt);
  for (int c = 0; c < 7; ++c) {
    EXPECT_EQ(res.chains[static_cast<std::size_t>(c)].initial.n_internal(),
              c % 5 + 1);
  }
}

TEST(Runner, ObserverReceivesEveryKeptState) {
  RunOptions opt;
  opt.spec = {ChainKind::mh_uniform, false, 7};
  opt.chains = 3;
  opt.steps = 100;
  opt.thin = 10;
  opt.seed = 5;
  std::vector<int> seen(3, 0);
  opt.observe = [&](int c, std::uint64_t, const TreeShape&) { ++seen[static_cast<std::size_t>(c)]; };
  const auto res = run_chains(opt);
  EXPECT_EQ(seen, (std::vector<int>{10, 10, 10}));
  EXPECT_TRUE(res.pooled().empty());
}

TEST(Runner, RejectsBadInput) {
  RunOptions opt;
  opt.spec = {ChainKind::mh_uniform, false, 6};
  opt.steps = 10;
  opt.init = TreeShape::star(5);
  EXPECT_THROW(run_chains(opt), DomainError);
  opt.init.reset();
  opt.thin = 0;
  EXPECT_THROW(run_chains(opt), DomainError);
  opt.thin = 1;
  opt.spec = {ChainKind::symmetric, false, 3};
  EXPECT_THROW(run_chains(opt), DomainError);
  EXPECT_THROW(parse_chain_kind("gibbs"), DomainError);
  EXPECT_EQ(parse_chain_kind("rw"), ChainKind::random_walk);
}

TEST(SemiRandom, Extremes) {
  Rng rng(8);
  EXPECT_EQ(semi_random_init(9, 1, rng), TreeShape::star(9));
  // K = N-1 forces diagonal 2..N and gives a binary shape.
  const auto f = semi_random_fmatrix(9, 8, rng);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(f(i, i), i + 2);
  EXPECT_TRUE(to_shape(f).is_binary());
  EXPECT_THROW(semi_random_fmatrix(9, 9, rng), DomainError);
}

TEST(SemiRandom, AlwaysValidWithRequestedK) {
  Rng rng(77);
  for (int i = 0; i < 10000; ++i) {
    const auto f = semi_random_fmatrix(8, 4, rng);
    ASSERT_TRUE(validate_fmatrix(f)) << f;
    EXPECT_EQ(to_shape(f).n_internal(), 4);
  }
}

TEST(Bounds, FormulaValues) {
  const auto b5 = mixing_bounds(5);
  EXPECT_EQ(b5.m_n, 5u);
  EXPECT_DOUBLE_EQ(b5.sym_lower, 1.25);
  EXPECT_DOUBLE_EQ(b5.sym_upper, 8.0 * 25 * std::log(4.0 * 15));
  EXPECT_DOUBLE_EQ(b5.rw_upper, 8.0 * std::log(4.0 * 5 * 15));
  EXPECT_TRUE(b5.sym_exact.has_value());
  EXPECT_EQ(b5.diameter, 5);
  EXPECT_DOUBLE_EQ(mixing_bounds(10).rw_lower, 7.0);
  EXPECT_FALSE(mixing_bounds(10).diameter.has_value());
  EXPECT_THROW(mixing_bounds(3), DomainError);
}

TEST(Bounds, LowerNeverExceedsUpper) {
  for (int N = 4; N <= 20; ++N) {
    const auto b = mixing_bounds(N);
    EXPECT_LE(b.sym_lower, b.sym_upper) << N;
    EXPECT_LE(b.rw_lower, b.rw_upper) << N;
  }
}

TEST(Bounds, BigLogHandlesHugeCounts) {
  BigInt x = 1;
  x <<= 2000;
  EXPECT_NEAR(big_log(x), 2000 * std::log(2.0), 1e-9);
  EXPECT_THROW(big_log(BigInt(0)), DomainError);
}
