#pragma once

// Markov chains on the covering graph of the lattice: the symmetric chain
// (1/M_N per neighbour), the simple random walk (1/deg), their lazy
// versions, and Metropolis-Hastings targeting the uniform distribution with
// the random walk as proposal. Small N can be analysed exactly.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "mrts/enumerator.hpp"
#include "mrts/error.hpp"
#include "mrts/fmatrix.hpp"
#include "mrts/lattice.hpp"
#include "mrts/rng.hpp"
#include "mrts/tree_shape.hpp"

namespace mrts {

enum class ChainKind { symmetric, random_walk, mh_uniform };

inline std::string_view to_string(ChainKind k) {
  switch (k) {
    case ChainKind::symmetric: return "symmetric";
    case ChainKind::random_walk: return "random-walk";
    case ChainKind::mh_uniform: return "mh-uniform";
  }
  return "?";
}

inline ChainKind parse_chain_kind(std::string_view s) {
  if (s == "sym" || s == "symmetric") return ChainKind::symmetric;
  if (s == "rw" || s == "random-walk") return ChainKind::random_walk;
  if (s == "mh" || s == "mh-uniform") return ChainKind::mh_uniform;
  throw DomainError("unknown chain kind '" + std::string(s) + "'");
}

struct ChainSpec {
  ChainKind kind = ChainKind::mh_uniform;
  bool lazy = false;
  int n = 0;
};

struct ChainState {
  TreeShape current;
  std::uint64_t step = 0;
  std::uint64_t stream = 0;
  std::uint64_t proposed = 0;  // MH only
  std::uint64_t accepted = 0;  // MH only

  double acceptance_rate() const {
    return proposed == 0 ? 1.0
                         : static_cast<double>(accepted) /
                               static_cast<double>(proposed);
  }
};

inline TreeShape uniform_neighbor(const TreeShape& s, Rng& rng) {
  return neighbor_at(s, rng.below(degree(s)));
}

// Moves to each neighbour with probability 1/M_N and otherwise stays.
inline void step_symmetric(ChainState& st, Count m_n, Rng& rng) {
  const Count u = rng.below(m_n);
  if (u < degree(st.current)) st.current = neighbor_at(st.current, u);
  ++st.step;
}

inline void step_random_walk(ChainState& st, Rng& rng) {
  st.current = uniform_neighbor(st.current, rng);
  ++st.step;
}

// Accepts T -> T' with probability min{1, deg(T)/deg(T')}.
inline void step_mh_uniform(ChainState& st, Rng& rng) {
  const Count d = degree(st.current);
  TreeShape proposal = neighbor_at(st.current, rng.below(d));
  const Count d_new = degree(proposal);
  ++st.proposed;
  bool accept = d_new <= d;
  if (!accept) {
    accept = rng.uniform() * static_cast<double>(d_new) <
             static_cast<double>(d);
  }
  if (accept) {
    ++st.accepted;
    st.current = std::move(proposal);
  }
  ++st.step;
}

class MarkovChain {
 public:
  MarkovChain(ChainSpec spec, TreeShape init, Rng rng, std::uint64_t stream = 0)
      : spec_(spec), rng_(std::move(rng)) {
    if (init.n_tips() != spec.n) {
      throw DomainError("initial shape has " + std::to_string(init.n_tips()) +
                        " tips, chain expects " + std::to_string(spec.n));
    }
    if (spec.kind == ChainKind::symmetric) {
      m_n_ = max_degree_tree(spec.n).max_degree;
    }
    state_.current = std::move(init);
    state_.stream = stream;
  }

  const ChainSpec& spec() const { return spec_; }
  const ChainState& state() const { return state_; }
  Count m_n() const { return m_n_; }

  void step() {
    if (spec_.lazy && rng_.coin()) {
      ++state_.step;
      return;
    }
    switch (spec_.kind) {
      case ChainKind::symmetric: step_symmetric(state_, m_n_, rng_); break;
      case ChainKind::random_walk: step_random_walk(state_, rng_); break;
      case ChainKind::mh_uniform: step_mh_uniform(state_, rng_); break;
    }
  }

 private:
  ChainSpec spec_;
  Rng rng_;
  ChainState state_{TreeShape::star(2)};
  Count m_n_ = 0;
};

// ---------------------------------------------------------------------------
// Semi-random initial shapes

// K-1 distinct diagonal values from {2..N-1}, sorted, then N; every column
// below the diagonal decreases by one until it reaches zero.
inline FMatrix semi_random_fmatrix(int N, int K, Rng& rng) {
  if (N < 2 || K < 1 || K > N - 1) {
    throw DomainError("semi-random sampling needs 1 <= K <= N-1");
  }
  std::vector<int> pool;
  for (int v = 2; v <= N - 1; ++v) pool.push_back(v);
  rng.partial_shuffle(pool, static_cast<std::size_t>(K - 1));
  std::vector<int> diag(pool.begin(), pool.begin() + (K - 1));
  std::sort(diag.begin(), diag.end());
  diag.push_back(N);

  std::vector<std::vector<int>> rows(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i) {
    auto& row = rows[static_cast<std::size_t>(i)];
    for (int j = 0; j < i; ++j) {
      const int above = j + 1 == i ? diag[static_cast<std::size_t>(j)]
                                   : rows[static_cast<std::size_t>(i - 1)]
                                         [static_cast<std::size_t>(j)];
      row.push_back(std::max(0, above - 1));
    }
    row.push_back(diag[static_cast<std::size_t>(i)]);
  }
  return FMatrix(rows);
}

inline TreeShape semi_random_init(int N, int K, Rng& rng) {
  return to_shape(semi_random_fmatrix(N, K, rng));
}

// ---------------------------------------------------------------------------
// Multi-chain runner

struct RunOptions {
  ChainSpec spec;
  int chains = 1;
  std::uint64_t steps = 0;
  std::uint64_t thin = 1;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  // Every chain starts here when set; otherwise chain c starts from a
  // semi-random shape with K = (c mod (N-1)) + 1.
  std::optional<TreeShape> init;
  // When set, kept states are passed here (from the chain's own thread)
  // instead of being stored.
  std::function<void(int chain, std::uint64_t step, const TreeShape&)> observe;
};

struct ChainOutput {
  int chain = 0;
  TreeShape initial = TreeShape::star(2);
  std::vector<std::pair<std::uint64_t, TreeShape>> samples;
  std::uint64_t proposed = 0;
  std::uint64_t accepted = 0;

  double acceptance_rate() const {
    return proposed == 0 ? 1.0
                         : static_cast<double>(accepted) /
                               static_cast<double>(proposed);
  }
};

struct RunResult {
  std::vector<ChainOutput> chains;

  // Chains concatenated in index order.
  std::vector<TreeShape> pooled() const {
    std::vector<TreeShape> out;
    for (const auto& c : chains) {
      for (const auto& [step, s] : c.samples) out.push_back(s);
    }
    return out;
  }

  double acceptance_rate() const {
    std::uint64_t p = 0, a = 0;
    for (const auto& c : chains) {
      p += c.proposed;
      a += c.accepted;
    }
    return p == 0 ? 1.0 : static_cast<double>(a) / static_cast<double>(p);
  }
};

inline ChainOutput run_one_chain(const RunOptions& opt, int c) {
  Rng rng = Rng::stream(opt.seed, static_cast<std::uint64_t>(c));
  const int N = opt.spec.n;
  ChainOutput out;
  out.chain = c;
  out.initial =
      opt.init ? *opt.init : semi_random_init(N, c % (N - 1) + 1, rng);
  MarkovChain chain(opt.spec, out.initial, std::move(rng),
                    static_cast<std::uint64_t>(c));
  for (std::uint64_t s = 1; s <= opt.steps; ++s) {
    chain.step();
    if (s <= opt.burn_in || (s - opt.burn_in) % opt.thin != 0) continue;
    if (opt.observe) {
      opt.observe(c, s, chain.state().current);
    } else {
      out.samples.emplace_back(s, chain.state().current);
    }
  }
  out.proposed = chain.state().proposed;
  out.accepted = chain.state().accepted;
  return out;
}

inline RunResult run_chains(const RunOptions& opt) {
  if (opt.spec.n < 2) throw DomainError("chains need N >= 2");
  if (opt.spec.kind == ChainKind::symmetric && opt.spec.n < 4) {
    throw DomainError("the symmetric chain needs N >= 4");
  }
  if (opt.chains < 1) throw DomainError("need at least one chain");
  if (opt.thin < 1) throw DomainError("thinning interval must be >= 1");
  if (opt.init && opt.init->n_tips() != opt.spec.n) {
    throw DomainError("initial shape has " +
                      std::to_string(opt.init->n_tips()) +
                      " tips, expected " + std::to_string(opt.spec.n));
  }
  RunResult res;
  res.chains.resize(static_cast<std::size_t>(opt.chains));
  const int workers = std::clamp(opt.threads, 1, opt.chains);
  if (workers == 1) {
    for (int c = 0; c < opt.chains; ++c) {
      res.chains[static_cast<std::size_t>(c)] = run_one_chain(opt, c);
    }
    return res;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int c = w; c < opt.chains; c += workers) {
          res.chains[static_cast<std::size_t>(c)] = run_one_chain(opt, c);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Exact analysis for small N

inline constexpr int kExactCap = 7;
inline constexpr int kBottleneckCap = 5;

struct ExactKernel {
  ChainSpec spec;
  std::vector<TreeShape> states;
  Eigen::MatrixXd P;
  Eigen::VectorXd pi;  // stationary distribution of the chain
};

inline ExactKernel exact_kernel(const ChainSpec& spec, int cap = kExactCap) {
  const int N = spec.n;
  if (N > cap) {
    throw DomainError("exact analysis refused: N = " + std::to_string(N) +
                      " exceeds the cap of " + std::to_string(cap));
  }
  if (spec.kind == ChainKind::symmetric && N < 4) {
    throw DomainError("the symmetric chain needs N >= 4");
  }
  const auto g = build_hasse(N, cap);
  const auto adj = g.adjacency();
  const auto n = static_cast<Eigen::Index>(g.size());
  ExactKernel k;
  k.spec = spec;
  k.states = g.vertices;
  k.P = Eigen::MatrixXd::Zero(n, n);
  k.pi = Eigen::VectorXd::Zero(n);

  const double m_n = spec.kind == ChainKind::symmetric
                         ? static_cast<double>(max_degree_tree(N).max_degree)
                         : 0.0;
  double total_degree = 0;
  for (std::size_t v = 0; v < g.size(); ++v) {
    total_degree += static_cast<double>(g.degree(v));
  }
  for (std::size_t v = 0; v < g.size(); ++v) {
    const auto vi = static_cast<Eigen::Index>(v);
    const double dv = static_cast<double>(g.degree(v));
    double off = 0;
    for (auto w : adj[v]) {
      const auto wi = static_cast<Eigen::Index>(w);
      double p = 0;
      switch (spec.kind) {
        case ChainKind::symmetric: p = 1.0 / m_n; break;
        case ChainKind::random_walk: p = 1.0 / dv; break;
        case ChainKind::mh_uniform:
          p = 1.0 / std::max(dv, static_cast<double>(g.degree(w)));
          break;
      }
      k.P(vi, wi) = p;
      off += p;
    }
    k.P(vi, vi) = 1.0 - off;
    k.pi(vi) = spec.kind == ChainKind::random_walk
                   ? dv / total_degree
                   : 1.0 / static_cast<double>(g.size());
  }
  if (spec.lazy) {
    k.P = 0.5 * (Eigen::MatrixXd::Identity(n, n) + k.P);
  }
  return k;
}

// Largest entry of |pi P - pi|.
inline double stationarity_residual(const ExactKernel& k) {
  const Eigen::RowVectorXd r = k.pi.transpose() * k.P - k.pi.transpose();
  return r.cwiseAbs().maxCoeff();
}

// Largest |pi(x)P(x,y) - pi(y)P(y,x)|.
inline double detailed_balance_residual(const ExactKernel& k) {
  double worst = 0;
  for (Eigen::Index x = 0; x < k.P.rows(); ++x) {
    for (Eigen::Index y = 0; y < k.P.cols(); ++y) {
      worst = std::max(worst, std::abs(k.pi(x) * k.P(x, y) -
                                       k.pi(y) * k.P(y, x)));
    }
  }
  return worst;
}

// Single communicating class: the support of (I + P)^(n-1) is full.
inline bool is_irreducible(const ExactKernel& k) {
  const auto n = k.P.rows();
  Eigen::MatrixXd reach = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd step =
      ((Eigen::MatrixXd::Identity(n, n) + k.P).array() > 0).cast<double>();
  for (Eigen::Index i = 1; i < n; i *= 2) {
    reach = ((reach * step).array() > 0).cast<double>();
    step = ((step * step).array() > 0).cast<double>();
  }
  reach = ((reach * step).array() > 0).cast<double>();
  return (reach.array() > 0).all();
}

struct Bottleneck {
  double phi = 0;
  // Every minimising set, as indices into the kernel's state list.
  std::vector<std::vector<std::size_t>> argmin;
};

// Exhaustive min over nonempty S with pi(S) <= 1/2 of Q(S, S^c) / pi(S).
inline Bottleneck exact_bottleneck(const ExactKernel& k,
                                   int cap = kBottleneckCap) {
  if (k.spec.n > cap) {
    throw DomainError("bottleneck enumeration refused: N = " +
                      std::to_string(k.spec.n) + " exceeds the cap of " +
                      std::to_string(cap));
  }
  const auto n = static_cast<std::size_t>(k.P.rows());
  constexpr double kTieTolerance = 1e-12;
  Bottleneck b;
  b.phi = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    double mass = 0;
    for (std::size_t x = 0; x < n; ++x) {
      if (mask >> x & 1) mass += k.pi(static_cast<Eigen::Index>(x));
    }
    if (mass > 0.5 + kTieTolerance) continue;
    double flow = 0;
    for (std::size_t x = 0; x < n; ++x) {
      if (!(mask >> x & 1)) continue;
      for (std::size_t y = 0; y < n; ++y) {
        if (mask >> y & 1) continue;
        const auto xi = static_cast<Eigen::Index>(x);
        flow += k.pi(xi) * k.P(xi, static_cast<Eigen::Index>(y));
      }
    }
    const double phi = flow / mass;
    if (phi < b.phi - kTieTolerance) {
      b.phi = phi;
      b.argmin.clear();
    }
    if (std::abs(phi - b.phi) <= kTieTolerance) {
      std::vector<std::size_t> set;
      for (std::size_t x = 0; x < n; ++x) {
        if (mask >> x & 1) set.push_back(x);
      }
      b.argmin.push_back(std::move(set));
    }
  }
  return b;
}

struct SpectralGap {
  Eigen::VectorXd eigenvalues;  // descending
  double gap = 0;               // 1 - lambda_2
  double absolute_gap = 0;      // 1 - max(|lambda_2|, |lambda_min|)
  double relaxation_time = 0;   // 1 / absolute_gap
};

// Spectrum of D^{1/2} P D^{-1/2} with D = diag(pi); real for reversible P.
inline SpectralGap exact_gap(const ExactKernel& k) {
  const Eigen::VectorXd s = k.pi.cwiseSqrt();
  const Eigen::MatrixXd A =
      s.asDiagonal() * k.P * s.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      sym, Eigen::EigenvaluesOnly);
  SpectralGap g;
  g.eigenvalues = solver.eigenvalues().reverse();
  const auto n = g.eigenvalues.size();
  const double l2 = n > 1 ? g.eigenvalues(1) : 0.0;
  const double lmin = g.eigenvalues(n - 1);
  g.gap = 1.0 - l2;
  g.absolute_gap = 1.0 - std::max(std::abs(l2), n > 1 ? std::abs(lmin) : 0.0);
  g.relaxation_time = 1.0 / g.absolute_gap;
  return g;
}

// ---------------------------------------------------------------------------
// Mixing-time bound formulas

// Natural log of a positive big integer without overflowing a double.
inline double big_log(const BigInt& x) {
  if (x <= 0) throw DomainError("logarithm of a non-positive count");
  const auto bits = boost::multiprecision::msb(x);
  if (bits < 960) return std::log(x.convert_to<double>());
  const auto shift = bits - 900;
  const BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) +
         static_cast<double>(shift) * std::log(2.0);
}

struct ExactChainFigures {
  double phi = 0;             // bottleneck ratio of the lazy chain
  double gap = 0;             // spectral gap of the lazy chain
  double relaxation_time = 0;
};

struct BoundReport {
  int n = 0;
  Count m_n = 0;
  BigInt g_n = 0;
  double sym_lower = 0;  // M_N / 4
  double sym_upper = 0;  // 8 M_N^2 log(4 G(N))
  double rw_lower = 0;   // 2(N-3)/2
  double rw_upper = 0;   // 8 log(4 M_N G(N))
  std::optional<ExactChainFigures> sym_exact;
  std::optional<ExactChainFigures> rw_exact;
  std::optional<int> diameter;
};

inline ExactChainFigures exact_figures(ChainKind kind, int N) {
  const auto k = exact_kernel({kind, true, N});
  const auto g = exact_gap(k);
  return {exact_bottleneck(k).phi, g.gap, g.relaxation_time};
}

inline BoundReport mixing_bounds(int N) {
  if (N < 4) throw DomainError("mixing bounds need N >= 4");
  BoundReport r;
  r.n = N;
  r.m_n = max_degree_tree(N).max_degree;
  r.g_n = count_space(N).value;
  const double m = static_cast<double>(r.m_n);
  const double log_g = big_log(r.g_n);
  r.sym_lower = m / 4.0;
  r.sym_upper = 8.0 * m * m * (std::log(4.0) + log_g);
  r.rw_lower = 2.0 * (N - 3) / 2.0;
  r.rw_upper = 8.0 * (std::log(4.0) + std::log(m) + log_g);
  if (N <= kBottleneckCap) {
    r.sym_exact = exact_figures(ChainKind::symmetric, N);
    r.rw_exact = exact_figures(ChainKind::random_walk, N);
  }
  if (N <= kExactCap) r.diameter = diameter(build_hasse(N));
  return r;
}

}  // namespace mrts
