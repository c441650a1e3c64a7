#pragma once

// Topology-only sampler for Beta(a, b) Lambda-coalescents. Branch lengths
// are never drawn: conditional on an event with b lineages the block size k
// has probability proportional to C(b, k) lambda_{b,k}, and the merging
// lineages are a uniform k-subset.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "mrts/error.hpp"
#include "mrts/rng.hpp"
#include "mrts/tree_shape.hpp"

namespace mrts {

// Boost's lgamma keeps no global state, unlike ::lgamma (signgam).
inline double log_gamma(double x) { return boost::math::lgamma(x); }

inline double log_beta(double x, double y) {
  return log_gamma(x) + log_gamma(y) - log_gamma(x + y);
}

struct LambdaBeta {
  double a = 1.0;
  double b = 1.0;

  LambdaBeta() = default;
  LambdaBeta(double a_, double b_) : a(a_), b(b_) {
    if (!(a > 0) || !(b > 0) || !std::isfinite(a) || !std::isfinite(b)) {
      throw DomainError("Beta measure needs a > 0 and b > 0");
    }
  }

  // Beta(2 - alpha, alpha); alpha = 1 is Beta(1, 1).
  static LambdaBeta from_alpha(double alpha) {
    if (!(alpha >= 1.0 && alpha < 2.0)) {
      throw DomainError("alpha must lie in [1, 2)");
    }
    return {2.0 - alpha, alpha};
  }
};

// log lambda_{n,k} = log B(k - 2 + a, n - k + b) - log B(a, b).
inline double log_merger_rate(int n, int k, const LambdaBeta& m) {
  if (k < 2 || k > n) {
    throw DomainError("merger size k = " + std::to_string(k) +
                      " outside [2, " + std::to_string(n) + "]");
  }
  return log_beta(k - 2 + m.a, n - k + m.b) - log_beta(m.a, m.b);
}

inline double merger_rate(int n, int k, const LambdaBeta& m) {
  return std::exp(log_merger_rate(n, k, m));
}

// P(block size = k | n lineages), indexed by k - 2.
inline std::vector<double> merger_distribution(int n, const LambdaBeta& m) {
  if (n < 2) throw DomainError("a merger needs at least 2 lineages");
  std::vector<double> logw;
  logw.reserve(static_cast<std::size_t>(n - 1));
  for (int k = 2; k <= n; ++k) {
    const double log_choose =
        log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
    logw.push_back(log_choose + log_merger_rate(n, k, m));
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0;
  for (double& w : logw) {
    w = std::exp(w - top);
    z += w;
  }
  for (double& w : logw) w /= z;
  return logw;
}

// Cumulative block-size distributions for every lineage count up to n.
class MergerTable {
 public:
  MergerTable(int n, const LambdaBeta& m) : n_(n), measure_(m) {
    if (n < 2) throw DomainError("a coalescent needs N >= 2");
    cdf_.resize(static_cast<std::size_t>(n + 1));
    for (int b = 2; b <= n; ++b) {
      auto p = merger_distribution(b, m);
      double acc = 0;
      for (double& x : p) {
        acc += x;
        x = acc;
      }
      p.back() = 1.0;
      cdf_[static_cast<std::size_t>(b)] = std::move(p);
    }
  }

  int max_lineages() const { return n_; }
  const LambdaBeta& measure() const { return measure_; }

  int draw(int b, Rng& rng) const {
    const auto& c = cdf_.at(static_cast<std::size_t>(b));
    const double u = rng.uniform();
    const auto it = std::upper_bound(c.begin(), c.end(), u);
    return 2 + static_cast<int>(std::min<std::ptrdiff_t>(
                   it - c.begin(), static_cast<std::ptrdiff_t>(c.size()) - 1));
  }

 private:
  int n_;
  LambdaBeta measure_;
  std::vector<std::vector<double>> cdf_;
};

inline TreeShape sample_topology(int N, const MergerTable& table, Rng& rng) {
  if (N < 2) throw DomainError("a coalescent needs N >= 2");
  if (N > table.max_lineages()) {
    throw DomainError("merger table built for fewer lineages than N");
  }
  constexpr int kTip = -1;
  std::vector<int> lineages(static_cast<std::size_t>(N), kTip);
  // Per event: merged tips and merged earlier events.
  std::vector<int> tips;
  std::vector<std::vector<int>> child_events;
  while (lineages.size() > 1) {
    const int b = static_cast<int>(lineages.size());
    const int k = table.draw(b, rng);
    rng.partial_shuffle(lineages, static_cast<std::size_t>(k));
    const int e = static_cast<int>(tips.size());
    tips.push_back(0);
    child_events.emplace_back();
    for (int i = 0; i < k; ++i) {
      const int x = lineages[static_cast<std::size_t>(i)];
      if (x == kTip) {
        ++tips.back();
      } else {
        child_events.back().push_back(x);
      }
    }
    lineages.erase(lineages.begin(), lineages.begin() + k);
    lineages.push_back(e);
  }
  // The last event is the root (rank 1); event e has rank E - e.
  const int E = static_cast<int>(tips.size());
  StringRepr s;
  s.t.assign(static_cast<std::size_t>(E), 0);
  s.l.assign(static_cast<std::size_t>(E), 0);
  for (int e = 0; e < E; ++e) {
    const int rank = E - e;
    s.l[static_cast<std::size_t>(rank - 1)] = tips[static_cast<std::size_t>(e)];
    for (int c : child_events[static_cast<std::size_t>(e)]) {
      s.t[static_cast<std::size_t>(E - c - 1)] = rank;
    }
  }
  return TreeShape(std::move(s));
}

inline TreeShape sample_topology(int N, const LambdaBeta& m, Rng& rng) {
  return sample_topology(N, MergerTable(N, m), rng);
}

// Samples are drawn in fixed blocks, block i from stream i, so the output
// depends only on (N, measure, count, seed) and not on the thread count.
inline constexpr std::size_t kCoalescentBlock = 1024;

inline std::vector<TreeShape> sample_topologies(int N, const LambdaBeta& m,
                                                std::size_t count,
                                                std::uint64_t seed,
                                                int threads = 1) {
  const MergerTable table(N, m);
  std::vector<TreeShape> out(count, TreeShape::star(N));
  const std::size_t blocks = (count + kCoalescentBlock - 1) / kCoalescentBlock;
  auto run_block = [&](std::size_t blk) {
    Rng rng = Rng::stream(seed, blk);
    const std::size_t end = std::min(count, (blk + 1) * kCoalescentBlock);
    for (std::size_t i = blk * kCoalescentBlock; i < end; ++i) {
      out[i] = sample_topology(N, table, rng);
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || blocks <= 1) {
    for (std::size_t blk = 0; blk < blocks; ++blk) run_block(blk);
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, blocks); ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t blk = w; blk < blocks; blk += workers) run_block(blk);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace mrts
